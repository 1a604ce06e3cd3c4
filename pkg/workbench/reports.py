"""Command dispatch and JSON reports."""

import json
import logging
import sys
from itertools import combinations

from cochains.models import PolyDiffOp
from cochains.services import apply
from multivectors.models import Polyvector, RelativeClass
from multivectors.services import jacobi_check
from obstructions.services import (
    cocycle_cascade_check,
    eliminate_to_order,
    obstruction_class,
)
from polynomials.exceptions import PreconditionError, ProblemFileError
from polynomials.models import TruncatedSeries
from polynomials.services import polynomial_ring
from stars.models import FormalDiffeo, StarProduct
from stars.services import (
    assoc_residual,
    extend_one_order,
    gauge_transform,
    residual_witness,
    star_commutator,
)
from workbench.parsing import (
    format_operator,
    format_polynomial,
    format_rational,
    parse_operator,
    parse_polynomial,
)

logger = logging.getLogger(__name__)

COMMANDS = (
    'check-poisson',
    'assoc-check',
    'commutator-table',
    'obstruction',
    'eliminate',
    'extend-star',
)

NORMALIZATION = 'real formal parameter; Moyal B_1 has antisymmetric part (1/2){,}'


def _index_key(indices):
    return '(' + ','.join(str(i) for i in indices) + ')'


def serialize_polyvector(P):
    return {_index_key(I): format_polynomial(p) for I, p in sorted(P.components.items())}


def serialize_class(c):
    return {_index_key(I): format_polynomial(p) for I, p in sorted(c.components.items())}


def serialize_series(series):
    return [format_polynomial(p) for p in series]


def serialize_terms(ops):
    """Orders 1..N of a star product or formal diffeomorphism, keyed by order."""
    return {str(k): format_operator(op) for k, op in enumerate(ops, start=1) if op}


def jsonable(value):
    """Plain JSON data for report values: domain objects, rationals, polynomials and tuples."""
    # polynomials are dicts, so they go first
    if hasattr(value, 'ring') and hasattr(value, 'items'):
        return format_polynomial(value)
    if isinstance(value, (StarProduct, FormalDiffeo)):
        return serialize_terms(value.terms)
    if isinstance(value, PolyDiffOp):
        return format_operator(value)
    if isinstance(value, TruncatedSeries):
        return serialize_series(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if hasattr(value, 'components'):
        return serialize_class(value)
    return format_rational(value)


def _require_star(loaded):
    if loaded.star is None:
        raise ProblemFileError('this command needs a star product', field='star')
    return loaded.star


def _require_system(loaded):
    if loaded.system is None:
        raise ProblemFileError('this command needs generators', field='generators')
    return loaded.system


def _command_order(loaded, order):
    if order is not None:
        return order
    order = loaded.problem.command.get('order')
    if order is not None:
        return order
    return _require_star(loaded).order


def check_poisson(loaded, order):
    ok, witness = jacobi_check(loaded.pi)
    return {
        'poisson': 'yes' if ok else 'no',
        'schouten_square': serialize_polyvector(witness),
    }


def assoc_check(loaded, order):
    s = _require_star(loaded)
    order = min(_command_order(loaded, order), s.order)
    probe = loaded.problem.command.get('probe')
    if probe is not None:
        if not isinstance(probe, list) or len(probe) != 3:
            raise ProblemFileError('a probe is three polynomial strings', field='command.probe')
        probe = [parse_polynomial(loaded.ring, p, f'command.probe[{i}]') for i, p in enumerate(probe)]
    residuals = []
    for n in range(1, order + 1):
        residual = assoc_residual(s, n)
        entry = {'order': n, 'zero': not residual, 'operator': format_operator(residual)}
        if residual:
            triple, value = residual_witness(s, n)
            entry['witness'] = {
                'arguments': [format_polynomial(a) for a in triple],
                'value': format_polynomial(value),
            }
        if probe is not None:
            entry['probe'] = {
                'arguments': [format_polynomial(a) for a in probe],
                'value': format_polynomial(apply(residual, probe)),
            }
        residuals.append(entry)
    return {'order': order, 'certified_order': s.certified_order, 'residuals': residuals}


def commutator_table(loaded, order):
    s = _require_star(loaded)
    system = _require_system(loaded)
    table = {}
    for i, j in combinations(range(system.size), 2):
        series = star_commutator(s, system.generators[i], system.generators[j])
        table[_index_key((i + 1, j + 1))] = serialize_series(series)
    return {'order': s.order, 'commutators': table}


def obstruction(loaded, order):
    s = _require_star(loaded)
    system = _require_system(loaded)
    n = _command_order(loaded, order)
    chi = obstruction_class(s, system, n)
    cascade = cocycle_cascade_check(s, system, n)
    return {
        'order': n,
        'system_size': system.size,
        'class': serialize_class(chi),
        'closed': cascade.closed,
        'hochschild_witness': jsonable(cascade.hochschild_witness),
        'horizontal_witness': jsonable(cascade.horizontal_witness),
    }


def eliminate(loaded, order, seed=None):
    s = _require_star(loaded)
    system = _require_system(loaded)
    order = _command_order(loaded, order)
    report = eliminate_to_order(s, system, order, loaded.bounds, seed)
    return {
        'status': report.status,
        'order': order,
        'order_reached': report.order_reached,
        'system_size': system.size,
        'classes': {str(n): serialize_class(c) for n, c in report.classes},
        'gauge': serialize_terms(report.gauge.terms),
        'star': serialize_terms(report.star.terms),
        'lifts': {
            str(step.order): serialize_polyvector(step.lift) for step in report.steps if step.lift is not None
        },
        'certificates': jsonable(list(report.certificates)),
    }


def extend_star(loaded, order):
    s = _require_star(loaded)
    n = _command_order(loaded, order)
    result = extend_one_order(s, n, loaded.bounds)
    return {
        'order': result.order,
        'status': result.status,
        'particular': format_operator(result.particular) if result.particular is not None else None,
        'freedom': [format_operator(op) for op in result.freedom],
        'certificate': jsonable(result.certificate),
    }


HANDLERS = {
    'check-poisson': check_poisson,
    'assoc-check': assoc_check,
    'commutator-table': commutator_table,
    'obstruction': obstruction,
    'eliminate': eliminate,
    'extend-star': extend_star,
}


def run_command(name, loaded, order=None, seed=0):
    """Run a workbench command on a loaded problem and return the report as plain data."""
    if name not in HANDLERS:
        raise ProblemFileError(f'unknown command {name!r}; choose one of {", ".join(COMMANDS)}', field='command')
    logger.info('running %s', name)
    if name == 'eliminate':
        body = eliminate(loaded, order, seed)
    else:
        body = HANDLERS[name](loaded, order)
    return {
        'command': name,
        'seed': seed,
        'normalization': NORMALIZATION,
        'bounds': loaded.bounds.as_dict(),
        'coordinates': list(loaded.problem.coordinates),
        'result': body,
    }


def render_report(report):
    return json.dumps(jsonable(report), indent=2, sort_keys=True) + '\n'


def emit_report(report, path=None, stream=None):
    """Write the report as canonical JSON to `path`, or to `stream` (stdout by default)."""
    text = render_report(report)
    if path is None:
        (stream or sys.stdout).write(text)
    else:
        with open(path, 'w') as handle:
            handle.write(text)
    return text


REPORT_KEYS = {'bounds', 'command', 'coordinates', 'normalization', 'result', 'seed'}


def _parse_index_key(key, where):
    try:
        if not (key.startswith('(') and key.endswith(')')):
            raise ValueError(key)
        body = key[1:-1]
        return tuple(int(i) for i in body.split(',')) if body else ()
    except ValueError:
        raise ProblemFileError(f'index key {key!r} is not of the form (i,j,...)', field=where) from None


def _parse_components(ring, data, where):
    if not isinstance(data, dict):
        raise ProblemFileError('expected an object of index keys', field=where)
    return [
        (_parse_index_key(key, where), parse_polynomial(ring, value, f'{where}.{key}'))
        for key, value in data.items()
    ]


def _parse_polynomials(ring, texts, where):
    if not isinstance(texts, list):
        raise ProblemFileError('expected a list of polynomials', field=where)
    return [parse_polynomial(ring, text, f'{where}[{i}]') for i, text in enumerate(texts)]


def _parse_terms(ring, arity, order, data, where):
    """Inverse of serialize_terms; omitted orders are zero."""
    if not isinstance(data, dict):
        raise ProblemFileError('expected an object keyed by order', field=where)
    terms = {}
    for key, value in data.items():
        if not key.isdigit() or int(key) < 1:
            raise ProblemFileError(f'order key {key!r} is not a positive integer', field=where)
        terms[int(key)] = parse_operator(ring, arity, value, f'{where}.{key}')
    order = max([order, *terms])
    return tuple(terms.get(k, PolyDiffOp.zero(ring, arity)) for k in range(1, order + 1))


def _parse_evaluation(ring, entry, where):
    return {
        'arguments': _parse_polynomials(ring, entry['arguments'], f'{where}.arguments'),
        'value': parse_polynomial(ring, entry['value'], f'{where}.value'),
    }


def _read_check_poisson(ring, result):
    return dict(
        result, schouten_square=Polyvector.build(
            ring, 3, _parse_components(ring, result['schouten_square'], 'result.schouten_square')
        ),
    )


def _read_assoc_check(ring, result):
    residuals = []
    for index, entry in enumerate(result['residuals']):
        where = f'result.residuals[{index}]'
        parsed = dict(entry, operator=parse_operator(ring, 3, entry['operator'], f'{where}.operator'))
        for key in ('witness', 'probe'):
            if key in entry:
                parsed[key] = _parse_evaluation(ring, entry[key], f'{where}.{key}')
        residuals.append(parsed)
    return dict(result, residuals=residuals)


def _read_commutator_table(ring, result):
    order = result['order']
    return dict(result, commutators={
        key: TruncatedSeries(order, tuple(_parse_polynomials(ring, series, f'result.commutators.{key}')))
        for key, series in result['commutators'].items()
    })


def _read_obstruction(ring, result):
    parsed = dict(result)
    parsed['class'] = RelativeClass.build(
        ring, result['system_size'], 2, _parse_components(ring, result['class'], 'result.class')
    )
    return parsed


def _read_eliminate(ring, result):
    order, size = result['order'], result['system_size']
    gauge = _parse_terms(ring, 1, order, result['gauge'], 'result.gauge')
    star = _parse_terms(ring, 2, order, result['star'], 'result.star')
    return dict(
        result,
        classes={
            n: RelativeClass.build(ring, size, 2, _parse_components(ring, c, f'result.classes.{n}'))
            for n, c in result['classes'].items()
        },
        gauge=FormalDiffeo(ring, len(gauge), gauge),
        star=StarProduct(ring, len(star), star),
        lifts={
            n: Polyvector.build(ring, 1, _parse_components(ring, lift, f'result.lifts.{n}'))
            for n, lift in result['lifts'].items()
        },
        certificates=list(result['certificates']),
    )


def _read_extend_star(ring, result):
    particular = result['particular']
    return dict(
        result,
        particular=None if particular is None else parse_operator(ring, 2, particular, 'result.particular'),
        freedom=[
            parse_operator(ring, 2, op, f'result.freedom[{i}]') for i, op in enumerate(result['freedom'])
        ],
    )


READERS = {
    'check-poisson': _read_check_poisson,
    'assoc-check': _read_assoc_check,
    'commutator-table': _read_commutator_table,
    'obstruction': _read_obstruction,
    'eliminate': _read_eliminate,
    'extend-star': _read_extend_star,
}


def read_report(data, ring=None):
    """
    Rebuild the domain objects of a report held as plain data.

    Classes, lifts and Schouten squares come back as RelativeClass and
    Polyvector, operators as PolyDiffOp, the gauge and star as FormalDiffeo and
    StarProduct, commutators as TruncatedSeries. Certificates and witnesses
    stay plain data. render_report() of the result reproduces the input text.
    """
    if not isinstance(data, dict) or set(data) != REPORT_KEYS:
        raise ProblemFileError(f'a report is an object with keys {sorted(REPORT_KEYS)}', field=None)
    name = data['command']
    if name not in READERS:
        raise ProblemFileError(f'unknown command {name!r}', field='command')
    if ring is None:
        ring = polynomial_ring(data['coordinates'])
    try:
        result = READERS[name](ring, data['result'])
    except KeyError as exc:
        raise ProblemFileError(f'missing key {exc.args[0]!r}', field='result') from None
    return dict(data, result=result)


def parse_report(text, ring=None):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return read_report(data, ring)


def verify_gauge_roundtrip(loaded, report):
    """Re-apply the reported gauge to the input star and compare with the reported star."""
    s = _require_star(loaded)
    if report['command'] != 'eliminate':
        raise PreconditionError('only eliminate reports carry a gauge', witness=report['command'])
    result = read_report(report, loaded.ring)['result']
    gauge = result['gauge']
    transformed = gauge_transform(s.truncated(gauge.order), gauge)
    return serialize_terms(transformed.terms) == serialize_terms(result['star'].terms)
