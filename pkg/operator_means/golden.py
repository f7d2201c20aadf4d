"""
The two worked examples of the refined reverse AM-GM inequality, as data.

Each example is rebuilt from exact inputs, pushed through the same code the
verifiers use, and compared entry by entry against the published numbers.
Published values carry rounded intermediates, so every golden value has its
own tolerance; a value with ``tolerance=None`` is reported but not asserted.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .inequalities import CheckInputs, InequalityId, VerifierParams, check
from .linalg import SpdMatrix, SpectralBounds, SymMatrix, power
from .means import arithmetic_mean, refinement_term
from .posmaps import IsometryCongruence, NormalizedTrace

_HALF_SQRT2 = math.sqrt(2.0) / 2.0


@dataclass(frozen=True)
class GoldenValue:
    label: str
    printed: object
    tolerance: float = None
    note: str = ''


@dataclass(frozen=True)
class WorkedExample:
    key: str
    A: list
    B: list
    phi: object
    bounds: SpectralBounds
    nu: float
    p: float
    golden: tuple
    printed_refined: list = None

    def matrices(self):
        return SpdMatrix(self.A), SpdMatrix(self.B)


@dataclass(frozen=True)
class Comparison:
    label: str
    printed: object
    computed: object
    deviation: float
    tolerance: float
    note: str = ''

    @property
    def asserted(self):
        return self.tolerance is not None

    @property
    def ok(self):
        return not self.asserted or self.deviation <= self.tolerance

    def as_dict(self):
        return {
            'label': self.label,
            'printed': self.printed,
            'computed': self.computed,
            'deviation': self.deviation,
            'tolerance': self.tolerance,
            'ok': self.ok,
            'note': self.note,
        }


@dataclass
class ExampleReport:
    example: WorkedExample
    intermediates: dict = field(default_factory=dict)
    comparisons: list = field(default_factory=list)
    difference_min_eigenvalue: float = None
    inequality: object = None

    @property
    def positive(self):
        return self.difference_min_eigenvalue > 0

    @property
    def ok(self):
        return (
            self.positive
            and all(c.ok for c in self.comparisons)
            and self.inequality.holds
        )

    def to_dict(self):
        return {
            'example': self.example.key,
            'params': {
                **self.example.bounds.as_dict(),
                'nu': self.example.nu,
                'p': self.example.p,
                'map': self.example.phi.to_json(),
            },
            'intermediates': self.intermediates,
            'comparisons': [c.as_dict() for c in self.comparisons],
            'difference_min_eigenvalue': self.difference_min_eigenvalue,
            'difference_positive': self.positive,
            'inequality': self.inequality.to_json(),
            'ok': self.ok,
        }


EXAMPLES = {
    '2.9': WorkedExample(
        key='2.9',
        A=[[1.75, 0.433], [0.433, 1.25]],
        B=[[2.5, 0.5], [0.5, 2.5]],
        phi=NormalizedTrace(2),
        bounds=SpectralBounds(1.0, 3.0),
        nu=0.5,
        p=3.0,
        golden=(
            GoldenValue('arithmetic_mean', [[2.1250, 0.4665], [0.4665, 1.8750]], 5e-5),
            GoldenValue('refined', [[2.1601, 0.4260], [0.4260, 2.0016]], 5e-4),
            GoldenValue('phi_p_refined', 9.0095, 1e-2),
            GoldenValue('phi_p_arithmetic', 8.0, 1e-12),
            GoldenValue('difference', 1.0095, 1e-2),
        ),
    ),
    '2.10': WorkedExample(
        key='2.10',
        A=[[5.0, -2.0], [-2.0, 5.0]],
        B=[[4.75, 0.433], [0.433, 4.25]],
        phi=IsometryCongruence(np.array([[_HALF_SQRT2, _HALF_SQRT2], [-_HALF_SQRT2, _HALF_SQRT2]])),
        bounds=SpectralBounds(3.0, 7.0),
        nu=0.5,
        p=5.0 / 3.0,
        printed_refined=[[5.0283, -0.7730], [-0.7730, 4.7909]],
        golden=(
            GoldenValue('arithmetic_mean', [[4.8750, -0.7835], [-0.7835, 4.6250]], 5e-5),
            GoldenValue(
                'refined', [[5.0283, -0.7730], [-0.7730, 4.7909]], 2e-3,
                note='printed entries were rounded before scaling by 2rMm = 21',
            ),
            GoldenValue(
                'difference[0,0]', 0.7838, 5e-3,
                note='published value was computed from the rounded refined matrix',
            ),
            GoldenValue(
                'difference[1,1]', 0.7199, 5e-3,
                note='published value was computed from the rounded refined matrix',
            ),
            GoldenValue('difference_from_printed_refined[0,0]', 0.7838, 2e-3),
            GoldenValue('difference_from_printed_refined[1,1]', 0.7199, 2e-3),
            GoldenValue(
                'difference[0,1]', -1.0172, None,
                note='printed value is inconsistent with a positive definite difference; reported only',
            ),
        ),
    ),
}


def _plain(value):
    if isinstance(value, SymMatrix):
        return value.tolist()
    return float(value)


def _deviation(printed, computed):
    return float(np.max(np.abs(np.asarray(printed, dtype=float) - np.asarray(computed, dtype=float))))


def _lookup(values, label):
    name, _, index = label.partition('[')
    if not index:
        return values[name]
    i, j = (int(k) for k in index.rstrip(']').split(','))
    return float(values[name][i][j])


def reproduce(key):
    """Rebuild one worked example and compare it with its golden values."""
    example = EXAMPLES[key]
    A, B = example.matrices()
    phi, bounds, nu, p = example.phi, example.bounds, example.nu, example.p

    arithmetic = arithmetic_mean(A, B, nu)
    term = refinement_term(A, B, nu, bounds)
    refined = SpdMatrix.assume(arithmetic + term)
    phi_p_refined = power(phi(refined), p)
    phi_p_arithmetic = power(phi(arithmetic), p)
    difference = phi_p_refined - phi_p_arithmetic

    values = {
        'arithmetic_mean': _plain(arithmetic),
        'refinement_term': _plain(term),
        'refined': _plain(refined),
        'difference': _plain(difference),
    }
    if phi.output_dim == 1:
        values.update(
            phi_p_refined=float(phi_p_refined.data[0, 0]),
            phi_p_arithmetic=float(phi_p_arithmetic.data[0, 0]),
            difference=float(difference.data[0, 0]),
        )
    else:
        values.update(phi_p_refined=_plain(phi_p_refined), phi_p_arithmetic=_plain(phi_p_arithmetic))
    if example.printed_refined is not None:
        printed = power(phi(SymMatrix(example.printed_refined)), p)
        values['difference_from_printed_refined'] = _plain(printed - phi_p_arithmetic)

    report = ExampleReport(example, intermediates=values)
    report.difference_min_eigenvalue = difference.lambda_min
    for golden in example.golden:
        computed = _lookup(values, golden.label)
        report.comparisons.append(Comparison(
            label=golden.label,
            printed=golden.printed,
            computed=computed,
            deviation=_deviation(golden.printed, computed),
            tolerance=golden.tolerance,
            note=golden.note,
        ))
    report.inequality = check(
        InequalityId.THM_2_7_A,
        VerifierParams(nu=nu, p=p, bounds=bounds, phi=phi),
        CheckInputs(A=A, B=B),
    )
    return report
