"""
Weighted operator means and the refinement term.

    A nabla_nu B = (1 - nu) A + nu B
    A  #_nu   B  = A^1/2 (A^-1/2 B A^-1/2)^nu A^1/2
    A  !_nu   B  = ((1 - nu) A^-1 + nu B^-1)^-1
    power(t)     = A^1/2 ((1 - nu) I + nu (A^-1/2 B A^-1/2)^t)^(1/t) A^1/2

The power means with -1 <= t <= 1 fill the range between the harmonic
(t = -1) and arithmetic (t = 1) means; they are what "an arbitrary mean
between harmonic and arithmetic" ranges over in the verifiers.
"""
from dataclasses import dataclass
import math

import numpy as np
from django.db import models

from .exceptions import DimensionMismatch, InputError
from .linalg import SpdMatrix, SymMatrix, apply_function, inverse, power

POWER_FAMILY_EXPONENTS = (-1.0, -0.5, 0.5, 1.0)


class MeanKind(models.TextChoices):
    ARITHMETIC = 'arithmetic', 'Weighted arithmetic mean'
    GEOMETRIC = 'geometric', 'Weighted geometric mean'
    HARMONIC = 'harmonic', 'Weighted harmonic mean'
    POWER = 'power', 'Weighted power mean'


def _check_weight(nu):
    if not (math.isfinite(nu) and 0.0 <= nu <= 1.0):
        raise InputError(f'Weight nu must lie in [0, 1], got {nu}.', code='weight')
    return float(nu)


def _check_pair(A, B):
    if A.n != B.n:
        raise DimensionMismatch(
            f'Means need equal dimensions, got {A.n} and {B.n}.', code='dimension'
        )


def weight_r(nu):
    """r = min{nu, 1 - nu}"""
    nu = _check_weight(nu)
    return min(nu, 1.0 - nu)


def _congruence(S, X):
    """S X S for symmetric S (result symmetrized)."""
    return SymMatrix._trusted(S.data @ X.data @ S.data)


def _relative_operator(A, B):
    """Return (A^1/2, A^-1/2 B A^-1/2)."""
    a_half = power(A, 0.5)
    a_neg_half = power(A, -0.5)
    return a_half, SpdMatrix.assume(_congruence(a_neg_half, B))


def arithmetic_mean(A, B, nu):
    nu = _check_weight(nu)
    _check_pair(A, B)
    if nu == 0.0:
        return A
    if nu == 1.0:
        return B
    return SpdMatrix.assume((1.0 - nu) * A + nu * B)


def geometric_mean(A, B, nu):
    nu = _check_weight(nu)
    _check_pair(A, B)
    if nu == 0.0 or np.array_equal(A.data, B.data):
        return A
    if nu == 1.0:
        return B
    a_half, relative = _relative_operator(A, B)
    return SpdMatrix.assume(_congruence(a_half, power(relative, nu)))


def harmonic_mean(A, B, nu):
    nu = _check_weight(nu)
    _check_pair(A, B)
    if nu == 0.0 or np.array_equal(A.data, B.data):
        return A
    if nu == 1.0:
        return B
    return inverse(arithmetic_mean(inverse(A), inverse(B), nu))


def power_mean(A, B, nu, t):
    nu = _check_weight(nu)
    t = _check_power_exponent(t)
    _check_pair(A, B)
    if nu == 0.0 or np.array_equal(A.data, B.data):
        return A
    if nu == 1.0:
        return B
    a_half, relative = _relative_operator(A, B)
    inner = apply_function(relative, lambda x: ((1.0 - nu) + nu * x ** t) ** (1.0 / t))
    return SpdMatrix.assume(_congruence(a_half, inner))


def _check_power_exponent(t):
    if t is None or not math.isfinite(t) or not -1.0 <= t <= 1.0 or t == 0.0:
        raise InputError(
            f'Power mean exponent t must lie in [-1, 1] with t != 0, got {t}.',
            code='power_exponent',
        )
    return float(t)


def refinement_term(A, B, nu, bounds):
    """
    2 r M m (A^-1 nabla B^-1 - A^-1 # B^-1), r = min{nu, 1 - nu}.

    Positive semidefinite by the AM-GM inequality applied to A^-1, B^-1;
    zero when nu is 0 or 1, or when A = B.
    """
    r = weight_r(nu)
    _check_pair(A, B)
    if r == 0.0 or np.array_equal(A.data, B.data):
        return SymMatrix.zeros(A.n)
    a_inv = inverse(A)
    b_inv = inverse(B)
    am_gm_gap = arithmetic_mean(a_inv, b_inv, 0.5) - geometric_mean(a_inv, b_inv, 0.5)
    return (2.0 * r * bounds.product) * am_gm_gap


@dataclass(frozen=True)
class MeanDescriptor:
    """Which mean, with which weight (and exponent t for power means)."""
    kind: str
    nu: float
    t: float = None

    def __post_init__(self):
        if self.kind not in MeanKind.values:
            raise InputError(f'Unknown mean kind {self.kind!r}.', code='mean_kind')
        _check_weight(self.nu)
        if self.kind == MeanKind.POWER:
            _check_power_exponent(self.t)
        elif self.t is not None:
            raise InputError(f'Only power means take an exponent t (got kind {self.kind}).', code='mean_kind')

    @classmethod
    def arithmetic(cls, nu=0.5):
        return cls(MeanKind.ARITHMETIC, nu)

    @classmethod
    def geometric(cls, nu=0.5):
        return cls(MeanKind.GEOMETRIC, nu)

    @classmethod
    def harmonic(cls, nu=0.5):
        return cls(MeanKind.HARMONIC, nu)

    @classmethod
    def power(cls, nu, t):
        return cls(MeanKind.POWER, nu, float(t))

    @property
    def r(self):
        return weight_r(self.nu)

    @property
    def label(self):
        if self.kind == MeanKind.POWER:
            return f'power(t={self.t:g}, nu={self.nu:g})'
        return f'{self.kind}(nu={self.nu:g})'

    def apply(self, A, B):
        if self.kind == MeanKind.ARITHMETIC:
            return arithmetic_mean(A, B, self.nu)
        if self.kind == MeanKind.GEOMETRIC:
            return geometric_mean(A, B, self.nu)
        if self.kind == MeanKind.HARMONIC:
            return harmonic_mean(A, B, self.nu)
        return power_mean(A, B, self.nu, self.t)

    def as_dict(self):
        data = {'kind': str(self.kind), 'nu': self.nu}
        if self.t is not None:
            data['t'] = self.t
        return data


def mean_family(nu):
    """Means between harmonic and arithmetic used for sigma/tau in the verifiers."""
    return [
        MeanDescriptor.arithmetic(nu),
        MeanDescriptor.geometric(nu),
        MeanDescriptor.harmonic(nu),
        *(MeanDescriptor.power(nu, t) for t in POWER_FAMILY_EXPONENTS),
    ]
