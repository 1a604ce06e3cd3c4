"""Problem files: JSON descriptions of a Poisson structure, a star product and a subalgebra."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from cochains.models import PolyDiffOp
from multivectors.models import Polyvector
from multivectors.services import require_poisson
from obstructions.models import Bounds, IntegrableSystem
from obstructions.services import require_valid
from polynomials.exceptions import (
    IndexOutOfRangeError,
    NotPoissonError,
    ProblemFileError,
)
from polynomials.services import polynomial_ring
from stars.models import StarProduct
from stars.services import certify, moyal
from workbench.parsing import (
    format_operator,
    format_polynomial,
    parse_operator,
    parse_polynomial,
)

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {'dimension', 'coordinates', 'poisson', 'star', 'generators', 'bounds', 'command'}


@dataclass(frozen=True)
class ProblemFile:
    """The raw, syntactically checked content of a problem file."""
    dimension: int
    coordinates: tuple
    poisson: tuple
    star: dict = None
    generators: tuple = ()
    bounds: dict = field(default_factory=dict)
    command: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LoadedProblem:
    problem: ProblemFile
    ring: object
    pi: Polyvector
    star: StarProduct = None
    system: IntegrableSystem = None
    bounds: Bounds = None


def _require(condition, message, field_name):
    if not condition:
        raise ProblemFileError(message, field=field_name)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def read_problem(text):
    """Decode and shape-check problem JSON into a ProblemFile."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    _require(isinstance(data, dict), 'a problem file is a JSON object', None)
    unknown = sorted(set(data) - TOP_LEVEL_KEYS)
    _require(not unknown, f'unknown keys {unknown}', None)

    dimension = data.get('dimension')
    _require(_is_int(dimension) and dimension > 0, 'must be a positive integer', 'dimension')
    coordinates = data.get('coordinates', [f'x{i}' for i in range(dimension)])
    _require(
        isinstance(coordinates, list) and len(coordinates) == dimension
        and all(isinstance(c, str) and c.isidentifier() for c in coordinates)
        and len(set(coordinates)) == dimension,
        f'must list {dimension} distinct identifiers', 'coordinates',
    )

    poisson = data.get('poisson', [])
    _require(isinstance(poisson, list), 'must be a list of [i, j, coefficient] entries', 'poisson')
    for index, entry in enumerate(poisson):
        where = f'poisson[{index}]'
        _require(
            isinstance(entry, list) and len(entry) == 3 and _is_int(entry[0]) and _is_int(entry[1]),
            'expected [i, j, coefficient]', where,
        )
        for i in entry[:2]:
            if not 0 <= i < dimension:
                raise ProblemFileError(
                    f'coordinate index {i} out of range 0..{dimension - 1}', field=where
                )

    star = data.get('star')
    if star is not None:
        _require(isinstance(star, dict), 'must be an object', 'star')
        if 'moyal' in star:
            _require(set(star) <= {'moyal', 'corrections'}, 'unexpected keys next to "moyal"', 'star')
            _require(_is_int(star['moyal']) and star['moyal'] >= 0, 'must be a non-negative order', 'star.moyal')
        else:
            _require(set(star) <= {'order', 'terms'}, 'expected "moyal" or "order" and "terms"', 'star')
            _require(_is_int(star.get('order')) and star['order'] >= 0, 'must be a non-negative order', 'star.order')
        for key in ('corrections', 'terms'):
            _require(isinstance(star.get(key, {}), dict), 'must map orders to term lists', f'star.{key}')

    generators = data.get('generators', [])
    _require(isinstance(generators, list), 'must be a list of polynomial strings', 'generators')
    bounds = data.get('bounds', {})
    _require(
        isinstance(bounds, dict) and set(bounds) <= {'degree', 'op_order'}
        and all(_is_int(v) and v >= 0 for v in bounds.values()),
        'expected non-negative "degree" and "op_order"', 'bounds',
    )
    command = data.get('command', {})
    _require(isinstance(command, dict), 'must be an object', 'command')
    if 'name' in command:
        _require(isinstance(command['name'], str), 'must be a command name string', 'command.name')
    if 'order' in command:
        _require(_is_int(command['order']) and command['order'] >= 0, 'must be a non-negative order', 'command.order')

    return ProblemFile(
        dimension, tuple(coordinates), tuple(tuple(e) for e in poisson), star,
        tuple(generators), bounds, command,
    )


def _star_terms(ring, order, terms, where):
    parsed = {}
    for key, term_list in terms.items():
        try:
            k = int(key)
        except ValueError:
            raise ProblemFileError(f'order key {key!r} is not an integer', field=where) from None
        if not 1 <= k <= order:
            raise ProblemFileError(f'order {k} out of range 1..{order}', field=where)
        parsed[k] = parse_operator(ring, 2, term_list, f'{where}.{key}')
    return parsed


def build_star(ring, pi, data):
    if data is None:
        return None
    if 'moyal' in data:
        order = data['moyal']
        try:
            star = moyal(pi, order)
        except NotPoissonError as exc:
            raise ProblemFileError(str(exc), field='star.moyal') from exc
        corrections = _star_terms(ring, order, data.get('corrections', {}), 'star.corrections')
        if not corrections:
            return star
        terms = list(star.terms)
        for k, op in corrections.items():
            terms[k - 1] = terms[k - 1] + op
    else:
        order = data['order']
        explicit = _star_terms(ring, order, data.get('terms', {}), 'star.terms')
        terms = [explicit.get(k, PolyDiffOp.zero(ring, 2)) for k in range(1, order + 1)]
    return certify(StarProduct(ring, order, tuple(terms), 0))


def build_objects(problem, validate=True, seed=None):
    """Turn a ProblemFile into domain objects, validating the system unless told not to."""
    ring = polynomial_ring(problem.coordinates)
    items = []
    for index, (i, j, coefficient) in enumerate(problem.poisson):
        items.append(((i, j), parse_polynomial(ring, coefficient, f'poisson[{index}]')))
    try:
        pi = Polyvector.build(ring, 2, items)
    except IndexOutOfRangeError as exc:
        raise ProblemFileError(str(exc), field='poisson') from exc

    generators = tuple(
        parse_polynomial(ring, g, f'generators[{index}]') for index, g in enumerate(problem.generators)
    )
    system = IntegrableSystem(ring, pi, generators) if generators else None
    if validate:
        if system is not None:
            require_valid(system, seed)
        else:
            require_poisson(pi)
    star = build_star(ring, pi, problem.star)
    bounds = Bounds.from_settings(problem.bounds.get('degree'), problem.bounds.get('op_order'))
    logger.info('loaded problem in dimension %d with %d generators', problem.dimension, len(generators))
    return LoadedProblem(problem, ring, pi, star, system, bounds)


def read_problem_file(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ProblemFileError(f'cannot read problem file: {exc.strerror}', field=str(path)) from exc
    return read_problem(text)


def load_problem(path, validate=True, seed=None):
    return build_objects(read_problem_file(path), validate, seed)


def problem_as_dict(problem):
    data = {
        'dimension': problem.dimension,
        'coordinates': list(problem.coordinates),
        'poisson': [list(entry) for entry in problem.poisson],
    }
    if problem.star is not None:
        data['star'] = problem.star
    if problem.generators:
        data['generators'] = list(problem.generators)
    if problem.bounds:
        data['bounds'] = problem.bounds
    if problem.command:
        data['command'] = problem.command
    return data


def canonical_problem(loaded):
    """ProblemFile with every polynomial and operator rewritten in canonical form."""
    problem = loaded.problem
    poisson = tuple(
        (i, j, _canonical_text(loaded.ring, c)) for i, j, c in problem.poisson
    )
    star = problem.star
    if star is not None:
        key = 'corrections' if 'moyal' in star else 'terms'
        terms = {
            k: format_operator(parse_operator(loaded.ring, 2, v, f'star.{key}.{k}'))
            for k, v in sorted(star.get(key, {}).items(), key=lambda item: int(item[0]))
        }
        star = {**star, key: terms} if key in star else dict(star)
    generators = tuple(_canonical_text(loaded.ring, g) for g in problem.generators)
    return ProblemFile(
        problem.dimension, problem.coordinates, poisson, star, generators,
        problem.bounds, problem.command,
    )


def _canonical_text(ring, text):
    return format_polynomial(parse_polynomial(ring, text))


def dump_problem(problem):
    """Canonical JSON text of a problem file."""
    return json.dumps(problem_as_dict(problem), indent=2, sort_keys=True) + '\n'
