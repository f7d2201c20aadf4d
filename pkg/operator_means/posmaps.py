"""
Concrete positive unital linear maps.

Every map sends symmetric n x n matrices to symmetric k x k matrices, is
linear by construction, and (when built from valid parameters) satisfies
Phi(I) = I. Scalar-valued maps such as the normalized trace produce 1 x 1
matrices so that one matrix type flows through the verifiers.
"""
from dataclasses import dataclass, field
import logging

import numpy as np
from django.db import models

from .conf import VerifierSettings
from .exceptions import DimensionMismatch, InputError
from .linalg import SymMatrix

logger = logging.getLogger(__name__)


class MapVariant(models.TextChoices):
    IDENTITY = 'identity', 'Identity'
    NORMALIZED_TRACE = 'normalized_trace', 'Normalized trace tr(X)/n'
    ISOMETRY_CONGRUENCE = 'isometry_congruence', 'Isometry congruence T^T X T'
    BLOCK_AVERAGE = 'block_average', 'Average of diagonal blocks'
    CONVEX_COMBINATION = 'convex_combination', 'Convex combination of maps'


class PositiveUnitalMap:
    variant = None
    input_dim = None
    output_dim = None

    def apply(self, X):
        if X.n != self.input_dim:
            raise DimensionMismatch(
                f'{self.variant} expects {self.input_dim}x{self.input_dim} input, got {X.n}x{X.n}.',
                code='dimension',
            )
        return SymMatrix._trusted(self._apply(X.data))

    def _apply(self, arr):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError

    def __call__(self, X):
        return self.apply(X)


def _check_size(n, name):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InputError(f'{name} needs an integer size n >= 1, got {n!r}.', code='shape')


@dataclass(frozen=True, eq=False)
class IdentityMap(PositiveUnitalMap):
    n: int
    variant = MapVariant.IDENTITY

    def __post_init__(self):
        _check_size(self.n, 'Identity map')

    @property
    def input_dim(self):
        return self.n

    @property
    def output_dim(self):
        return self.n

    def _apply(self, arr):
        return arr

    def to_json(self):
        return {'variant': str(self.variant), 'n': self.n}


@dataclass(frozen=True, eq=False)
class NormalizedTrace(PositiveUnitalMap):
    n: int
    variant = MapVariant.NORMALIZED_TRACE

    def __post_init__(self):
        _check_size(self.n, 'Normalized trace')

    @property
    def input_dim(self):
        return self.n

    @property
    def output_dim(self):
        return 1

    def _apply(self, arr):
        return np.array([[np.trace(arr) / self.n]])

    def to_json(self):
        return {'variant': str(self.variant), 'n': self.n}


@dataclass(frozen=True, eq=False)
class IsometryCongruence(PositiveUnitalMap):
    """X -> T^T X T for an n x k matrix T; unital iff T^T T = I_k."""
    T: np.ndarray
    validate: bool = True
    variant = MapVariant.ISOMETRY_CONGRUENCE

    def __post_init__(self):
        T = np.array(self.T, dtype=float)
        if T.ndim == 1:
            T = T.reshape(-1, 1)
        if T.ndim != 2 or T.shape[1] > T.shape[0] or T.size == 0:
            raise InputError(f'Isometry must be n x k with k <= n, got shape {T.shape}.', code='shape')
        T.setflags(write=False)
        object.__setattr__(self, 'T', T)
        if self.validate:
            residual = isometry_residual(T)
            if residual > VerifierSettings.load().unital_tol:
                raise InputError(
                    f'T is not an isometry: ||T^T T - I||_F = {residual:.3e}.',
                    code='not_isometry',
                )

    @property
    def input_dim(self):
        return self.T.shape[0]

    @property
    def output_dim(self):
        return self.T.shape[1]

    def _apply(self, arr):
        return self.T.T @ arr @ self.T

    def to_json(self):
        return {'variant': str(self.variant), 'T': self.T.tolist()}


@dataclass(frozen=True, eq=False)
class BlockAverage(PositiveUnitalMap):
    """diag(A_1, ..., A_k) -> (1/k) sum A_j (off-diagonal blocks are ignored)."""
    n_blocks: int
    block_dim: int
    variant = MapVariant.BLOCK_AVERAGE

    def __post_init__(self):
        if self.n_blocks < 1 or self.block_dim < 1:
            raise InputError('Block average needs n_blocks >= 1 and block_dim >= 1.', code='shape')

    @property
    def input_dim(self):
        return self.n_blocks * self.block_dim

    @property
    def output_dim(self):
        return self.block_dim

    def _apply(self, arr):
        d = self.block_dim
        blocks = [arr[j * d:(j + 1) * d, j * d:(j + 1) * d] for j in range(self.n_blocks)]
        return sum(blocks) / self.n_blocks

    def to_json(self):
        return {'variant': str(self.variant), 'n_blocks': self.n_blocks, 'block_dim': self.block_dim}


@dataclass(frozen=True, eq=False)
class ConvexCombination(PositiveUnitalMap):
    terms: tuple = field(default=())
    variant = MapVariant.CONVEX_COMBINATION

    def __post_init__(self):
        terms = tuple((float(w), phi) for w, phi in self.terms)
        object.__setattr__(self, 'terms', terms)
        if not terms:
            raise InputError('Convex combination needs at least one term.', code='empty')
        weights = np.array([w for w, _ in terms])
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise InputError(f'Weights must be non-negative and sum to 1, got {weights.tolist()}.', code='weights')
        dims = {(phi.input_dim, phi.output_dim) for _, phi in terms}
        if len(dims) != 1:
            raise DimensionMismatch(f'Combined maps disagree on dimensions: {sorted(dims)}.', code='dimension')

    @property
    def input_dim(self):
        return self.terms[0][1].input_dim

    @property
    def output_dim(self):
        return self.terms[0][1].output_dim

    def _apply(self, arr):
        return sum(w * phi._apply(arr) for w, phi in self.terms)

    def to_json(self):
        return {
            'variant': str(self.variant),
            'terms': [{'weight': w, 'map': phi.to_json()} for w, phi in self.terms],
        }


def isometry_residual(T):
    T = np.asarray(T, dtype=float)
    return float(np.linalg.norm(T.T @ T - np.eye(T.shape[1])))


def apply_map(phi, X):
    return phi.apply(X)


def verify_unital(phi):
    """||Phi(I) - I||_F <= UNITAL_TOL"""
    image = phi.apply(SymMatrix.identity(phi.input_dim))
    residual = np.linalg.norm(image.data - np.eye(phi.output_dim))
    return bool(residual <= VerifierSettings.load().unital_tol)


def verify_positive_sampled(phi, trials, rng_seed):
    """
    Spot-check positivity: Phi(X) >= 0 for random PSD X (random rank).

    Accepts lambda_min(Phi(X)) >= -POSITIVITY_TOL * max(1, ||X||_F).
    """
    if trials < 1:
        raise InputError('verify_positive_sampled needs trials >= 1.', code='trials')
    tol = VerifierSettings.load().positivity_tol
    rng = np.random.default_rng(rng_seed)
    n = phi.input_dim
    for trial in range(trials):
        rank = int(rng.integers(1, n + 1))
        G = rng.standard_normal((n, rank))
        X = SymMatrix._trusted(G @ G.T)
        image = phi.apply(X)
        if image.lambda_min < -tol * max(1.0, X.frobenius_norm()):
            logger.warning(
                f'{phi.variant} sent a PSD input to a matrix with eigenvalue '
                f'{image.lambda_min:.3e} (trial {trial})'
            )
            return False
    return True


def map_from_json(obj, name='map'):
    """
    Build a map from its JSON description:

    {"variant": "normalized_trace" | "identity", "n": 2}
    {"variant": "isometry_congruence", "T": [[...], ...]}     (row-major, validated)
    {"variant": "block_average", "n_blocks": 3, "block_dim": 2}
    {"variant": "convex_combination", "terms": [{"weight": w, "map": {...}}, ...]}
    """
    if not isinstance(obj, dict) or 'variant' not in obj:
        raise InputError(f'{name}: expected an object with a "variant" field.', code='layout')
    variant = obj['variant']
    try:
        if variant == MapVariant.IDENTITY:
            return IdentityMap(int(obj['n']))
        if variant == MapVariant.NORMALIZED_TRACE:
            return NormalizedTrace(int(obj['n']))
        if variant == MapVariant.ISOMETRY_CONGRUENCE:
            return IsometryCongruence(np.array(obj['T'], dtype=float))
        if variant == MapVariant.BLOCK_AVERAGE:
            return BlockAverage(int(obj['n_blocks']), int(obj['block_dim']))
        if variant == MapVariant.CONVEX_COMBINATION:
            return ConvexCombination(tuple(
                (term['weight'], map_from_json(term['map'], name=f'{name}.terms[{i}]'))
                for i, term in enumerate(obj['terms'])
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f'{name}: malformed {variant} map ({exc!r}).', code='layout') from exc
    raise InputError(
        f'{name}: unknown variant {variant!r}; expected one of {", ".join(MapVariant.values)}.',
        code='variant',
    )
