"""
Dense real symmetric matrix arithmetic.

Everything else in the app is built on the values defined here:

* ``SymMatrix`` / ``SpdMatrix``: immutable symmetric (positive definite)
  matrices. Symmetry is enforced at construction by (X + X^T)/2, so
  ``data[i, j] == data[j, i]`` holds exactly.
* ``eigh``: cyclic Jacobi eigensolver, eigenvalues sorted descending.
* ``apply_function`` / ``power``: functional calculus f(A) = Q f(L) Q^T.
* ``loewner_leq``: the Loewner order A <= B iff B - A >= 0, decided with a
  relative tolerance because many of the inequalities hold with equality.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np

from .conf import VerifierSettings
from .exceptions import (
    ConditioningError,
    ConvergenceError,
    DimensionMismatch,
    FunctionalCalculusError,
    InputError,
    NotPositiveDefinite,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EigenDecomposition:
    """A = Q diag(values) Q^T with orthogonal Q and values sorted descending."""
    vectors: np.ndarray
    values: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.T

    def orthogonality_residual(self):
        n = self.vectors.shape[1]
        return float(np.linalg.norm(self.vectors.T @ self.vectors - np.eye(n)))


@dataclass(frozen=True)
class SpectralBounds:
    """Two-sided spectral hypothesis 0 < m <= A <= M."""
    m: float
    M: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and math.isfinite(self.M)):
            raise InputError('Spectral bounds must be finite.', code='bounds')
        if not 0 < self.m <= self.M:
            raise InputError(
                f'Spectral bounds need 0 < m <= M, got m={self.m}, M={self.M}.',
                code='bounds',
            )

    @property
    def product(self):
        return self.M * self.m

    @property
    def kantorovich(self):
        """(M + m)^2 / (4Mm)"""
        return (self.M + self.m) ** 2 / (4.0 * self.M * self.m)

    def as_dict(self):
        return {'m': self.m, 'M': self.M}


@dataclass(frozen=True)
class OrderResult:
    holds: bool
    gap: float
    tolerance: float


@dataclass(frozen=True)
class TolerancePolicy:
    """
    Acceptance threshold for gaps that should be non-negative.

    By default a gap passes when gap >= -rel * max(1, *scales); ``absolute``
    replaces the relative rule entirely (used for exact identities).
    """
    rel: float = None
    absolute: float = None

    def tolerance(self, *scales):
        if self.absolute is not None:
            return float(self.absolute)
        rel = self.rel if self.rel is not None else VerifierSettings.load().tolerance
        return rel * max([1.0, *(abs(float(s)) for s in scales)])

    def accepts(self, gap, *scales):
        return gap >= -self.tolerance(*scales)


DEFAULT_POLICY = TolerancePolicy()


def _as_array(X):
    if isinstance(X, SymMatrix):
        return X.data
    return np.asarray(X, dtype=float)


class SymMatrix:
    """Real symmetric n x n matrix. Immutable; the decomposition is cached."""

    def __init__(self, data):
        arr = np.array(_as_array(data), dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise InputError(f'Expected a non-empty square matrix, got shape {arr.shape}.', code='shape')
        if not np.all(np.isfinite(arr)):
            raise InputError('Matrix entries must be finite.', code='finite')
        arr = (arr + arr.T) / 2.0
        arr.setflags(write=False)
        self._data = arr
        self._decomposition = None

    @classmethod
    def _trusted(cls, data, decomposition=None):
        # Bypasses validation for values produced by this module.
        obj = cls.__new__(cls)
        arr = np.array(data, dtype=float)
        arr = (arr + arr.T) / 2.0
        arr.setflags(write=False)
        obj._data = arr
        obj._decomposition = decomposition
        return obj

    @classmethod
    def identity(cls, n):
        return SpdMatrix._trusted(
            np.eye(n), EigenDecomposition(np.eye(n), np.ones(n))
        )

    @classmethod
    def zeros(cls, n):
        return SymMatrix._trusted(np.zeros((n, n)))

    @classmethod
    def diag(cls, values):
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def data(self):
        return self._data

    @property
    def n(self):
        return self._data.shape[0]

    @property
    def decomposition(self):
        if self._decomposition is None:
            self._decomposition = eigh(self)
        return self._decomposition

    @property
    def eigenvalues(self):
        return self.decomposition.values

    @property
    def lambda_min(self):
        return float(self.eigenvalues[-1])

    @property
    def lambda_max(self):
        return float(self.eigenvalues[0])

    def frobenius_norm(self):
        return float(np.linalg.norm(self._data))

    def _check_same_dim(self, other):
        if self.n != other.n:
            raise DimensionMismatch(
                f'Dimension mismatch: {self.n}x{self.n} vs {other.n}x{other.n}.',
                code='dimension',
            )

    def __add__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        self._check_same_dim(other)
        return SymMatrix._trusted(self._data + other._data)

    def __sub__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        self._check_same_dim(other)
        return SymMatrix._trusted(self._data - other._data)

    def __neg__(self):
        return SymMatrix._trusted(-self._data)

    def __mul__(self, scalar):
        if isinstance(scalar, (SymMatrix, np.ndarray)):
            return NotImplemented
        return SymMatrix._trusted(float(scalar) * self._data)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def shift(self, scalar):
        """A + scalar * I"""
        return SymMatrix._trusted(self._data + float(scalar) * np.eye(self.n))

    def tolist(self):
        return self._data.tolist()

    def __repr__(self):
        return f'{type(self).__name__}(n={self.n}, data={self._data.tolist()!r})'


class SpdMatrix(SymMatrix):
    """Symmetric positive definite matrix; lambda_min > 0 is checked on construction."""

    def __init__(self, data):
        super().__init__(data)
        if self.lambda_min <= 0:
            raise NotPositiveDefinite(
                f'Matrix is not positive definite (smallest eigenvalue {self.lambda_min:.6g}).',
                code='not_positive_definite',
            )

    @classmethod
    def from_sym(cls, A):
        if isinstance(A, SpdMatrix):
            return A
        spd = cls.__new__(cls)
        spd._data = A.data
        spd._decomposition = A._decomposition
        if spd.lambda_min <= 0:
            raise NotPositiveDefinite(
                f'Matrix is not positive definite (smallest eigenvalue {spd.lambda_min:.6g}).',
                code='not_positive_definite',
            )
        return spd

    @classmethod
    def assume(cls, A):
        """Wrap a SymMatrix the caller knows to be positive definite (no eigensolve)."""
        if isinstance(A, SpdMatrix):
            return A
        spd = cls.__new__(cls)
        spd._data = A.data
        spd._decomposition = A._decomposition
        return spd

    @property
    def bounds(self):
        """Tightest SpectralBounds (lambda_min, lambda_max) of this matrix."""
        return SpectralBounds(self.lambda_min, self.lambda_max)


def _off_norm(a):
    return math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))


def _jacobi(a, tol, max_sweeps):
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * np.linalg.norm(a)
    # entries below this may be left in place: n(n-1) of them stay under threshold
    negligible = threshold / n

    for sweep in range(max_sweeps + 1):
        off = _off_norm(a)
        if off <= threshold:
            logger.debug(f'Jacobi converged on {n}x{n} after {sweep} sweep(s)')
            return np.diag(a).copy(), v
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= negligible:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                row_p, row_q = a[p].copy(), a[q].copy()
                new_p = c * row_p - s * row_q
                new_q = s * row_p + c * row_q
                a[p], a[q] = new_p, new_q
                a[:, p], a[:, q] = new_p, new_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0

                col_p, col_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * col_p - s * col_q
                v[:, q] = s * col_p + c * col_q

    raise ConvergenceError(
        f'Jacobi eigensolver did not converge within {max_sweeps} sweeps '
        f'(off-diagonal norm {off:.3e}, threshold {threshold:.3e}).'
    )


def eigh(A):
    """
    Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Converges when the off-diagonal Frobenius norm drops below
    JACOBI_TOL * ||A||_F; raises ConvergenceError after JACOBI_MAX_SWEEPS.
    Eigenvalues come back sorted descending; ties keep Jacobi's column order.
    """
    conf = VerifierSettings.load()
    values, vectors = _jacobi(_as_array(A), conf.jacobi_tol, conf.jacobi_max_sweeps)
    order = np.argsort(-values, kind='stable')
    values = values[order]
    vectors = vectors[:, order]
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenDecomposition(vectors, values)


def _evaluate(f, values):
    out = np.empty_like(values)
    with np.errstate(all='raise'):
        for i, t in enumerate(values):
            try:
                y = f(float(t))
            except (ArithmeticError, ValueError, FloatingPointError) as exc:
                raise FunctionalCalculusError(
                    f'Function undefined at eigenvalue {float(t):.6g}: {exc}'
                ) from exc
            if isinstance(y, complex) or not math.isfinite(y):
                raise FunctionalCalculusError(
                    f'Function is not real and finite at eigenvalue {float(t):.6g} (got {y!r}).'
                )
            out[i] = y
    return out


def apply_function(A, f):
    """
    Functional calculus: f(A) = Q diag(f(lambda)) Q^T.

    The result commutes with A and inherits its eigenvectors, so its
    decomposition is known without another eigensolve.
    """
    dec = A.decomposition
    values = _evaluate(f, dec.values)
    order = np.argsort(-values, kind='stable')
    result_dec = EigenDecomposition(dec.vectors[:, order], values[order])
    return SymMatrix._trusted(result_dec.reconstruct(), result_dec)


def power(A, p):
    """
    A^p for symmetric A.

    Integer p >= 0 works for any symmetric A; negative or fractional p needs
    lambda_min > CONDITION_FLOOR * lambda_max, otherwise ConditioningError.
    """
    p = float(p)
    if p == 0.0:
        return SymMatrix.identity(A.n)
    if p == 1.0:
        return A
    if p < 0 or not p.is_integer():
        floor = VerifierSettings.load().condition_floor
        if not A.lambda_min > floor * A.lambda_max:
            raise ConditioningError(
                f'Power {p:g} needs lambda_min > {floor:g} * lambda_max '
                f'(got lambda_min={A.lambda_min:.6g}, lambda_max={A.lambda_max:.6g}).'
            )
    result = apply_function(A, lambda t: t ** p)
    if result.lambda_min > 0:
        return SpdMatrix.assume(result)
    return result


def inverse(A):
    return power(A, -1.0)


def sqrtm(A):
    return power(A, 0.5)


def psd_power(A, p, policy=DEFAULT_POLICY):
    """
    A^p for p > 0 and A positive SEMIdefinite.

    Eigenvalues in [-tol, 0) are treated as zero, so singular inputs such
    as a vanishing refinement term are accepted.
    """
    p = float(p)
    if p <= 0:
        raise InputError(f'psd_power needs p > 0, got {p:g}.', code='exponent')
    tol = policy.tolerance(A.lambda_max)
    if A.lambda_min < -tol:
        raise NotPositiveDefinite(
            f'Matrix is not positive semidefinite (smallest eigenvalue {A.lambda_min:.6g}).',
            code='not_positive_semidefinite',
        )
    if p == 1.0:
        return A
    return apply_function(A, lambda t: max(t, 0.0) ** p)


def operator_norm(A):
    """Spectral norm of a symmetric matrix: max |lambda_i|."""
    values = A.eigenvalues
    return float(max(abs(values[0]), abs(values[-1])))


def spectral_norm(X):
    """Largest singular value of an arbitrary real matrix, via eigh of X^T X."""
    arr = _as_array(X)
    if arr.size == 0:
        return 0.0
    gram = SymMatrix._trusted(arr.T @ arr)
    return math.sqrt(max(gram.lambda_max, 0.0))


def loewner_leq(A, B, policy=DEFAULT_POLICY):
    """Decide A <= B in the Loewner order: gap = lambda_min(B - A)."""
    if A.n != B.n:
        raise DimensionMismatch(
            f'Cannot compare {A.n}x{A.n} with {B.n}x{B.n}.', code='dimension'
        )
    gap = (B - A).lambda_min
    tolerance = policy.tolerance(operator_norm(A), operator_norm(B))
    return OrderResult(holds=gap >= -tolerance, gap=float(gap), tolerance=tolerance)


def spectrum_within(A, bounds, policy=DEFAULT_POLICY):
    """
    Decide mI <= A <= MI.

    lambda(A - mI) = lambda(A) - m, so the two Loewner gaps are read off
    A's own spectrum; the reported gap is the smaller of the two.
    """
    gap = min(A.lambda_min - bounds.m, bounds.M - A.lambda_max)
    tolerance = policy.tolerance(bounds.M, operator_norm(A))
    return OrderResult(holds=gap >= -tolerance, gap=float(gap), tolerance=tolerance)


def block_norm_check(X, t, policy=DEFAULT_POLICY):
    """
    ||X|| <= t  iff  [[tI, X], [X^T, tI]] >= 0.

    Returns the positivity verdict of the block matrix.
    """
    arr = _as_array(X)
    rows, cols = arr.shape
    t = float(t)
    block = np.block([
        [t * np.eye(rows), arr],
        [arr.T, t * np.eye(cols)],
    ])
    gap = SymMatrix._trusted(block).lambda_min
    return bool(policy.accepts(gap, t, np.linalg.norm(arr)))


def matrix_from_json(obj, name='matrix'):
    """
    Read ``{"n": <int>, "data": [[...], ...]}``.

    The reader symmetrizes (X + X^T)/2 and rejects the input when
    ||X - X^T||_F > SYMMETRY_TOL * ||X||_F.
    """
    if not isinstance(obj, dict) or 'data' not in obj:
        raise InputError(f'{name}: expected an object with "n" and "data".', code='layout')
    try:
        arr = np.array(obj['data'], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f'{name}: data must be a list of numeric rows ({exc}).', code='layout') from exc
    n = obj.get('n', arr.shape[0] if arr.ndim == 2 else None)
    if arr.ndim != 2 or arr.shape != (n, n):
        raise InputError(f'{name}: data must be {n}x{n}, got shape {arr.shape}.', code='shape')
    if not np.all(np.isfinite(arr)):
        raise InputError(f'{name}: entries must be finite.', code='finite')
    asymmetry = np.linalg.norm(arr - arr.T)
    if asymmetry > VerifierSettings.load().symmetry_tol * np.linalg.norm(arr):
        raise InputError(
            f'{name}: matrix is not symmetric (||X - X^T||_F = {asymmetry:.3e}).',
            code='not_symmetric',
        )
    return SymMatrix(arr)


def matrix_to_json(A):
    arr = _as_array(A)
    return {'n': int(arr.shape[0]), 'data': arr.tolist()}
