"""
Management command evaluating one weighted operator mean on matrices read
from a JSON file ({"A": {"n": 2, "data": [...]}, "B": {...}}).
"""
from operator_means.forms import MeansForm, raise_for_errors
from operator_means.linalg import SpdMatrix, matrix_to_json
from operator_means.management.base import VerifierCommand
from operator_means.reporting import matrix_lines


class Command(VerifierCommand):
    help = 'Compute A m_nu B for an arithmetic, geometric, harmonic or power mean'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--file', help='JSON file holding matrices A and B')
        parser.add_argument('--kind', help='arithmetic, geometric, harmonic or power')
        parser.add_argument('--nu', help='Weight in [0, 1] (default 0.5)')
        parser.add_argument('--t', help='Exponent in [-1, 1], t != 0, for power means')

    def run(self, **options):
        cleaned = raise_for_errors(MeansForm(data={
            'file': options['file'],
            'kind': options['kind'],
            'nu': options['nu'],
            't': options['t'],
        }))
        mean = cleaned['mean']
        A = SpdMatrix.from_sym(cleaned['A'])
        B = SpdMatrix.from_sym(cleaned['B'])
        result = mean.apply(A, B)

        if options['json']:
            self.write_json({'mean': mean.as_dict(), 'result': matrix_to_json(result)})
            return
        self.stdout.write(self.style.MIGRATE_HEADING(f'A {mean.label} B'))
        self.write_lines(matrix_lines('Result', result.tolist(), digits=6))
