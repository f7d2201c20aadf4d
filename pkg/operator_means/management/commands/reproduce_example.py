"""
Management command rebuilding one of the two worked examples of the refined
reverse AM-GM inequality and comparing it with the published values.
"""
from operator_means.exceptions import InputError
from operator_means.golden import EXAMPLES, reproduce
from operator_means.management.base import VerifierCommand
from operator_means.reporting import comparison_lines, format_value, matrix_lines


class Command(VerifierCommand):
    help = 'Reproduce worked example 2.9 or 2.10'

    def add_arguments(self, parser):
        parser.add_argument('which', help='Which example: ' + ' or '.join(EXAMPLES))
        super().add_arguments(parser)

    def run(self, **options):
        if options['which'] not in EXAMPLES:
            raise InputError(
                f"Unknown example {options['which']!r}; choose one of {', '.join(EXAMPLES)}.",
                code='example',
            )
        report = reproduce(options['which'])

        if options['json']:
            self.write_json(report.to_dict())
        else:
            self._write_report(report)
        if not report.ok:
            self.fail(f'Example {report.example.key} does not match its published values')

    def _write_report(self, report):
        example = report.example
        values = report.intermediates
        self.stdout.write(self.style.MIGRATE_HEADING(f'\n=== EXAMPLE {example.key} ===\n'))
        self.stdout.write(
            f'm = {example.bounds.m:g}, M = {example.bounds.M:g}, nu = {example.nu:g}, '
            f'p = {example.p:.6g}, map = {example.phi.variant}'
        )
        for label in ('arithmetic_mean', 'refinement_term', 'refined'):
            self.write_lines(matrix_lines(label, values[label]))
        for label in ('phi_p_refined', 'phi_p_arithmetic', 'difference'):
            value = values[label]
            if isinstance(value, list):
                self.write_lines(matrix_lines(label, value))
            else:
                self.stdout.write(f'{label}: {format_value(value)}')
        self.stdout.write(f'Smallest eigenvalue of the difference: {report.difference_min_eigenvalue:.6g}')

        self.stdout.write(self.style.MIGRATE_HEADING('\n=== PUBLISHED VALUES ==='))
        for comparison in report.comparisons:
            style = self.style.SUCCESS if comparison.ok else self.style.ERROR
            lines = comparison_lines(comparison)
            self.stdout.write(style(lines[0]))
            self.write_lines(lines[1:])

        verdict = 'holds' if report.inequality.holds else 'FAILS'
        self.stdout.write(f'\nRefined inequality with alpha = {report.inequality.alpha_used:.6f}: {verdict}')
        if report.ok:
            self.stdout.write(self.style.SUCCESS(f'✓ Example {example.key} reproduced'))
