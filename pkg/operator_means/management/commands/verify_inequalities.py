"""
Management command running the randomized soundness suite over the catalog.
Exit status is 0 only when no inequality failed on inputs satisfying its
hypotheses.
"""
import time

from operator_means.forms import VerifyForm, raise_for_errors
from operator_means.management.base import VerifierCommand
from operator_means.reporting import suite_table
from operator_means.sampling import run_suite


class Command(VerifierCommand):
    help = 'Verify catalog inequalities on seeded random inputs'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--ids', nargs='+', help='Inequality ids, or ALL (default)')
        parser.add_argument('--trials', help='Trials per id (default from settings)')
        parser.add_argument('--seed', help='Master seed (default from settings)')
        parser.add_argument('--dims', help='Matrix sizes, e.g. "1-6" or "2,3"')
        parser.add_argument('--m', help='Lower spectral bound (with --M replaces the default bounds)')
        parser.add_argument('--M', help='Upper spectral bound')
        parser.add_argument('--nu', help='Comma-separated nu grid')
        parser.add_argument('--p', help='Comma-separated p grid')
        parser.add_argument('--tol', help='Relative gap tolerance')
        parser.add_argument('--alpha-variant', help='body (default) or abstract')
        parser.add_argument('--alpha-scale', help='Multiply alpha by this factor (fault injection)')
        parser.add_argument('--workers', help='Worker processes (results do not depend on it)')

    def run(self, **options):
        data = {
            key: options[key]
            for key in ('trials', 'seed', 'dims', 'm', 'M', 'nu', 'p', 'tol', 'alpha_variant', 'alpha_scale', 'workers')
        }
        data['ids'] = ' '.join(options['ids'] or [])
        cleaned = raise_for_errors(VerifyForm(data=data))

        started = time.monotonic()
        report = run_suite(cleaned['config'], cleaned['ids'], workers=cleaned['workers'])
        elapsed = time.monotonic() - started

        if options['json']:
            self.stdout.write(report.to_json())
        else:
            self.stdout.write(self.style.MIGRATE_HEADING('\n=== INEQUALITY SUITE ===\n'))
            self.stdout.write(f'Seed {report.seed}, {report.config.trials} trial(s) per id, {elapsed:.1f}s')
            self.write_lines(suite_table(report))
            self.stdout.write(self.style.MIGRATE_HEADING('\n=== SUMMARY ==='))
            if report.ok:
                self.stdout.write(self.style.SUCCESS('✓ No failures'))
        if not report.ok:
            self.fail(f'{report.total_failures} failure(s) in the suite')
