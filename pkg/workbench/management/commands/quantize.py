import logging
from dataclasses import replace

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from polynomials.exceptions import InternalCheckError, ProblemFileError, QuantizationError
from workbench.problems import build_objects, read_problem_file
from workbench.reports import emit_report, run_command

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Run a deformation-quantization workbench command on a problem file'

    def add_arguments(self, parser):
        parser.add_argument('--problem', required=True, help='Path to the JSON problem file')
        parser.add_argument('--command', dest='workbench_command', help='Command name; defaults to the one in the problem file')
        parser.add_argument('--order', type=int, help='Order N (or n) the command works at')
        parser.add_argument('--degree-bound', type=int, help='Coefficient-degree cap of every ansatz')
        parser.add_argument('--op-order-bound', type=int, help='Operator-order cap of every ansatz')
        parser.add_argument('--seed', type=int, help='Seed for random-point cross-checks')
        parser.add_argument('--out', help='Report path; stdout when omitted')

    def handle(self, *args, **options):
        seed = settings.QUANTIZE_SEED if options['seed'] is None else options['seed']
        try:
            problem = read_problem_file(options['problem'])
            name = options['workbench_command'] or problem.command.get('name')
            if not name:
                raise ProblemFileError('no command given', field='command')
            loaded = build_objects(problem, validate=name != 'check-poisson', seed=seed)
            overrides = {
                key: options[option]
                for key, option in (('degree', 'degree_bound'), ('op_order', 'op_order_bound'))
                if options[option] is not None
            }
            if overrides:
                loaded = replace(loaded, bounds=replace(loaded.bounds, **overrides))
            report = run_command(name, loaded, options['order'], seed)
        except InternalCheckError as exc:
            logger.error('internal check failed: %s', exc)
            raise CommandError(f'internal check failed: {exc}', returncode=2) from exc
        except QuantizationError as exc:
            raise CommandError(str(exc), returncode=1) from exc

        try:
            emit_report(report, options['out'], self.stdout)
        except OSError as exc:
            raise CommandError(f'cannot write report to {options["out"]}: {exc.strerror}', returncode=1) from exc
        if options['out']:
            self.stderr.write(f'Report written to {options["out"]}')
