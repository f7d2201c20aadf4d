"""
Management command evaluating one catalog inequality on matrices from a
JSON file. The hypotheses are verified first; a violated hypothesis exits
with status 2 and names what failed, a failed inequality exits with 1.
"""
from operator_means.forms import CheckForm, raise_for_errors
from operator_means.inequalities import check
from operator_means.management.base import VerifierCommand
from operator_means.reporting import report_lines


class Command(VerifierCommand):
    help = 'Check one inequality of the catalog on user-supplied matrices'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--file', help='JSON file with A, B and optional map, x, sigma, tau, ...')
        parser.add_argument('--id', help='Inequality id, e.g. THM_2_7_A')
        parser.add_argument('--nu', help='Weight nu in [0, 1] (default 0.5)')
        parser.add_argument('--p', help='Exponent p (default 1)')
        parser.add_argument('--m', help='Lower spectral bound (default: from the matrices)')
        parser.add_argument('--M', help='Upper spectral bound (default: from the matrices)')
        parser.add_argument('--tol', help='Relative gap tolerance (default from settings)')
        parser.add_argument('--alpha-variant', help='body (default) or abstract')
        parser.add_argument('--alpha-scale', help='Multiply alpha by this factor (default 1)')
        parser.add_argument('--factor', help='Order factor c for LEMMA_2_3')

    def run(self, **options):
        cleaned = raise_for_errors(CheckForm(data={
            key: options[key]
            for key in ('file', 'id', 'nu', 'p', 'm', 'M', 'tol', 'alpha_variant', 'alpha_scale', 'factor')
        }))
        report = check(cleaned['id'], cleaned['params'], cleaned['inputs'])

        if options['json']:
            self.write_json(report.to_json())
        else:
            self.write_lines(report_lines(report))
            if report.holds:
                self.stdout.write(self.style.SUCCESS(f'✓ {report.id} holds'))
        if not report.holds:
            self.fail(f'{report.id} failed: gap {report.gap:.3e} below -{report.tolerance:.1e}')
