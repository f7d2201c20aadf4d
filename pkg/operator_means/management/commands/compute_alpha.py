"""
Management command printing the constant alpha(m, M, p).
"""
from operator_means.forms import AlphaForm, raise_for_errors
from operator_means.inequalities import alpha
from operator_means.management.base import VerifierCommand


class Command(VerifierCommand):
    help = 'Print alpha = max{(M+m)^2/(4Mm), (M+m)^2/(4^(2/p) Mm)}'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--m', help='Lower spectral bound m > 0')
        parser.add_argument('--M', help='Upper spectral bound M >= m')
        parser.add_argument('--p', help='Exponent p > 0')
        parser.add_argument(
            '--alpha-variant',
            default='body',
            help='body (4^(2/p), default) or abstract (4^p)',
        )

    def run(self, **options):
        cleaned = raise_for_errors(AlphaForm(data={
            'm': options['m'],
            'M': options['M'],
            'p': options['p'],
            'alpha_variant': options['alpha_variant'],
        }))
        bounds, p, variant = cleaned['bounds'], cleaned['p'], cleaned['alpha_variant']
        value = alpha(bounds, p, variant)
        data = {
            'alpha': value,
            'kantorovich': bounds.kantorovich,
            'm': bounds.m,
            'M': bounds.M,
            'p': p,
            'alpha_variant': str(variant),
        }
        if options['json']:
            self.write_json(data)
            return
        self.stdout.write(f'alpha(m={bounds.m:g}, M={bounds.M:g}, p={p:g}, {variant}) = {value:.10g}')
        self.stdout.write(f'Kantorovich constant (M+m)^2/(4Mm) = {bounds.kantorovich:.10g}')
