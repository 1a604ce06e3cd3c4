import json
import tempfile
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from sympy import QQ

from cochains.models import PolyDiffOp
from multivectors.models import RelativeClass
from polynomials.exceptions import ProblemFileError
from polynomials.services import polynomial_ring
from workbench.parsing import (
    format_operator,
    format_polynomial,
    parse_operator,
    parse_polynomial,
)
from workbench.problems import (
    build_objects,
    canonical_problem,
    dump_problem,
    load_problem,
    read_problem,
    read_problem_file,
)
from workbench.reports import parse_report, render_report, run_command, verify_gauge_roundtrip

PROBLEMS = Path(settings.BASE_DIR) / 'problems'


def problem_path(name):
    return str(PROBLEMS / f'{name}.json')


def golden_path(name, command):
    return PROBLEMS / 'golden' / f'{name}.{command}.json'


def quantize(name, **options):
    out = StringIO()
    call_command('quantize', problem=problem_path(name), stdout=out, stderr=StringIO(), **options)
    return json.loads(out.getvalue())


class PolynomialTextTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens

    def test_parse(self):
        x, p = self.x, self.p
        self.assertEqual(parse_polynomial(self.ring, 'x^2 + 3*x*p - 1/2'), x**2 + 3 * x * p - QQ(1, 2))
        self.assertEqual(parse_polynomial(self.ring, '-(x - p)^2'), -(x - p)**2)
        self.assertEqual(parse_polynomial(self.ring, 7), self.ring(7))

    def test_undeclared_variable_column(self):
        with self.assertRaises(ProblemFileError) as ctx:
            parse_polynomial(self.ring, 'x^2 + q', 'generators[0]')
        self.assertEqual(ctx.exception.column, 7)
        self.assertEqual(ctx.exception.field, 'generators[0]')

    def test_rejected_inputs(self):
        for text in ('x + * p', 'x^-1', 'x / p', '1.5*x', ''):
            with self.assertRaises(ProblemFileError, msg=text):
                parse_polynomial(self.ring, text)

    def test_canonical_format(self):
        x, p = self.x, self.p
        self.assertEqual(format_polynomial(3 * x**2 * p - x + QQ(1, 2)), '3*x^2*p - x + 1/2')
        self.assertEqual(format_polynomial(self.ring(2)), '2')
        self.assertEqual(format_polynomial(self.ring.zero), '0')
        self.assertEqual(format_polynomial(-p**3), '-p^3')

    def test_format_is_reparseable(self):
        x, p = self.x, self.p
        for poly in (x**3 * p - QQ(2, 3) * p**2 + 5, -x + p, self.ring(QQ(-1, 4))):
            self.assertEqual(parse_polynomial(self.ring, format_polynomial(poly)), poly)

    def test_operator_terms(self):
        terms = [{'coefficient': 'x', 'derivatives': [[1, 0], [0, 1]]}]
        op = parse_operator(self.ring, 2, terms, 'star.terms.1')
        self.assertEqual(format_operator(op), terms)
        with self.assertRaises(ProblemFileError):
            parse_operator(self.ring, 1, terms, 'gauge.1')
        with self.assertRaises(ProblemFileError):
            parse_operator(self.ring, 2, [{'derivatives': [[1], [0, 1]]}], 'star.terms.1')


class ProblemFileTests(SimpleTestCase):
    def test_invalid_json_reports_position(self):
        with self.assertRaises(ProblemFileError) as ctx:
            read_problem('{\n  "dimension": 2,,\n}')
        self.assertEqual(ctx.exception.line, 2)

    def test_bad_dimension(self):
        with self.assertRaises(ProblemFileError) as ctx:
            read_problem('{"dimension": 0, "poisson": []}')
        self.assertEqual(ctx.exception.field, 'dimension')

    def test_index_out_of_range(self):
        with self.assertRaises(ProblemFileError) as ctx:
            read_problem_file(problem_path('bad_index'))
        self.assertEqual(ctx.exception.field, 'poisson[1]')
        self.assertIn('5', str(ctx.exception))

    def test_missing_file(self):
        with self.assertRaises(ProblemFileError):
            read_problem_file(problem_path('does_not_exist'))

    def test_non_constant_moyal_is_rejected(self):
        text = json.dumps({
            'dimension': 3, 'coordinates': ['x', 'y', 'z'],
            'poisson': [[0, 1, 'z'], [1, 2, 'x'], [0, 2, '-y']],
            'star': {'moyal': 1},
        })
        with self.assertRaises(ProblemFileError) as ctx:
            build_objects(read_problem(text))
        self.assertEqual(ctx.exception.field, 'star.moyal')

    def test_explicit_star_is_certified(self):
        loaded = load_problem(problem_path('second_derivative_star'))
        self.assertEqual(loaded.star.order, 2)
        self.assertEqual(loaded.star.certified_order, 1)

    def test_canonical_dump_is_a_fixed_point(self):
        for name in ('removable', 'obstructed', 'second_derivative_star', 'canonical_r4'):
            text = dump_problem(canonical_problem(load_problem(problem_path(name))))
            again = dump_problem(canonical_problem(build_objects(read_problem(text))))
            self.assertEqual(text, again, name)

    def test_command_fields_are_type_checked(self):
        cases = (
            ({'name': 'eliminate', 'order': '2'}, 'command.order'),
            ({'name': 'eliminate', 'order': -1}, 'command.order'),
            ({'name': 'eliminate', 'order': True}, 'command.order'),
            ({'name': ['eliminate']}, 'command.name'),
        )
        for command, field in cases:
            text = json.dumps({'dimension': 2, 'poisson': [[0, 1, '1']], 'command': command})
            with self.assertRaises(ProblemFileError, msg=command) as ctx:
                read_problem(text)
            self.assertEqual(ctx.exception.field, field)


class ReportTests(SimpleTestCase):
    def test_removable_report_roundtrips(self):
        loaded = load_problem(problem_path('removable'))
        report = run_command('eliminate', loaded)
        result = report['result']
        self.assertEqual(result['status'], 'TRIVIALIZED')
        self.assertEqual(result['classes'], {'1': {}, '2': {'(1,2)': '2'}})
        self.assertEqual(result['lifts'], {'2': {'(2)': '-2*x'}})
        self.assertEqual(result['gauge']['1'], [{'coefficient': '2*x', 'derivatives': [[0, 0, 1]]}])
        self.assertTrue(verify_gauge_roundtrip(loaded, report))

    def test_unknown_command(self):
        loaded = load_problem(problem_path('canonical_r2'))
        with self.assertRaises(ProblemFileError):
            run_command('quantize-everything', loaded)

    def test_report_header(self):
        report = run_command('check-poisson', load_problem(problem_path('so3')), seed=3)
        self.assertEqual(report['seed'], 3)
        self.assertEqual(report['coordinates'], ['x', 'y', 'z'])
        self.assertEqual(report['bounds'], {'degree': 2, 'op_order': 2})
        self.assertTrue(render_report(report).endswith('}\n'))

    def test_parsed_reports_render_back_to_the_same_text(self):
        cases = (
            ('removable', 'eliminate', None),
            ('obstructed', 'eliminate', None),
            ('second_derivative_star', 'assoc-check', None),
            ('removable', 'obstruction', 2),
            ('canonical_r4', 'commutator-table', None),
            ('not_poisson', 'check-poisson', None),
            ('extend_moyal', 'extend-star', None),
        )
        for name, command, order in cases:
            validate = command != 'check-poisson'
            loaded = load_problem(problem_path(name), validate=validate)
            text = render_report(run_command(command, loaded, order))
            self.assertEqual(render_report(parse_report(text)), text, f'{name} {command}')

    def test_parsed_report_holds_domain_objects(self):
        loaded = load_problem(problem_path('removable'))
        ring = loaded.ring
        x = ring.gens[0]
        text = render_report(run_command('eliminate', loaded))
        result = parse_report(text, ring)['result']
        self.assertEqual(result['classes']['2'], RelativeClass.build(ring, 2, 2, [((1, 2), 2)]))
        self.assertFalse(result['classes']['1'])
        self.assertEqual(result['gauge'].term(1), PolyDiffOp.partial(ring, (0, 0, 1), 2 * x))
        self.assertEqual(result['star'].order, 2)
        self.assertEqual(result['lifts']['2'].components, {(2,): -2 * x})
        self.assertEqual(result['certificates'][0]['order'], 1)

    def test_malformed_report(self):
        with self.assertRaises(ProblemFileError):
            parse_report('{"command": "eliminate"}')
        text = render_report(run_command('check-poisson', load_problem(problem_path('so3'))))
        broken = text.replace('"schouten_square": {}', '"schouten_square": {"(0,1": "x"}')
        with self.assertRaises(ProblemFileError) as ctx:
            parse_report(broken)
        self.assertEqual(ctx.exception.field, 'result.schouten_square')


class QuantizeCommandTests(SimpleTestCase):
    def test_check_poisson(self):
        self.assertEqual(quantize('so3')['result']['poisson'], 'yes')
        result = quantize('not_poisson')['result']
        self.assertEqual(result['poisson'], 'no')
        self.assertEqual(list(result['schouten_square']), ['(0,1,2)'])

    def test_assoc_check_probe(self):
        residuals = quantize('second_derivative_star')['result']['residuals']
        self.assertTrue(residuals[0]['zero'])
        self.assertFalse(residuals[1]['zero'])
        self.assertEqual(residuals[1]['probe']['value'], '-12*x^2')
        self.assertIn('witness', residuals[1])

    def test_moyal_is_associative(self):
        residuals = quantize('canonical_r2')['result']['residuals']
        self.assertTrue(all(entry['zero'] for entry in residuals))

    def test_commutator_table(self):
        commutators = quantize('canonical_r4')['result']['commutators']
        self.assertEqual(commutators, {'(1,2)': ['0', '0', '0', '0']})

    def test_obstruction(self):
        result = quantize('removable', workbench_command='obstruction', order=2)['result']
        self.assertEqual(result['class'], {'(1,2)': '2'})
        self.assertTrue(result['closed'])

    def test_eliminate_outcomes(self):
        self.assertEqual(quantize('removable')['result']['status'], 'TRIVIALIZED')
        self.assertEqual(quantize('removable', degree_bound=0)['result']['status'], 'UNDECIDED')
        self.assertEqual(quantize('obstructed')['result']['status'], 'OBSTRUCTED')
        result = quantize('moyal_casimir')['result']
        self.assertEqual(result['status'], 'TRIVIALIZED')
        self.assertEqual(result['gauge'], {})

    def test_extend_star(self):
        result = quantize('extend_moyal')['result']
        self.assertEqual(result['status'], 'solved')
        self.assertEqual(result['order'], 2)

    def test_output_is_deterministic(self):
        first, second = StringIO(), StringIO()
        for out in (first, second):
            call_command('quantize', problem=problem_path('removable'), stdout=out, stderr=StringIO())
        self.assertEqual(first.getvalue(), second.getvalue())

    def test_out_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'report.json'
            call_command(
                'quantize', problem=problem_path('so3'), out=str(path), stdout=StringIO(), stderr=StringIO()
            )
            self.assertEqual(json.loads(path.read_text())['command'], 'check-poisson')

    def test_invalid_system_exits_with_one(self):
        with self.assertRaises(CommandError) as ctx:
            quantize('noncommuting')
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('{f_1, f_2}', str(ctx.exception))

    def test_bad_index_exits_with_one(self):
        with self.assertRaises(CommandError) as ctx:
            quantize('bad_index')
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('poisson[1]', str(ctx.exception))

    def test_mistyped_command_order_exits_with_one(self):
        data = json.loads(Path(problem_path('removable')).read_text())
        data['command'] = {'name': 'eliminate', 'order': '2'}
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'problem.json'
            path.write_text(json.dumps(data))
            with self.assertRaises(CommandError) as ctx:
                call_command('quantize', problem=str(path), stdout=StringIO(), stderr=StringIO())
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('command.order', str(ctx.exception))

    def test_unwritable_out_path_exits_with_one(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'missing' / 'report.json'
            with self.assertRaises(CommandError) as ctx:
                call_command(
                    'quantize', problem=problem_path('so3'), out=str(path), stdout=StringIO(), stderr=StringIO()
                )
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('cannot write report', str(ctx.exception))


class GoldenReportTests(SimpleTestCase):
    def test_output_matches_stored_reports(self):
        for name, command in (('so3', 'check-poisson'), ('moyal_casimir', 'eliminate')):
            expected = golden_path(name, command).read_text()
            out = StringIO()
            call_command(
                'quantize', problem=problem_path(name), workbench_command=command, stdout=out, stderr=StringIO()
            )
            self.assertEqual(out.getvalue(), expected, f'{name} {command}')

    def test_stored_reports_parse_back(self):
        for path in sorted((PROBLEMS / 'golden').glob('*.json')):
            text = path.read_text()
            self.assertEqual(render_report(parse_report(text)), text, path.name)
