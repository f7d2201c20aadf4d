"""
Seeded random inputs and the property-suite runner.

Every trial draws from its own generator,
``numpy.random.default_rng([seed, id_index, trial])``, so a suite report
depends only on the configuration and never on scheduling or worker count.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
import json
import logging
import math

import numpy as np

from .exceptions import HypothesisViolation, InputError, NumericalError
from .inequalities import (
    AlphaVariant,
    CheckInputs,
    InequalityId,
    PolyaSzegoBounds,
    VerifierParams,
    check,
)
from .linalg import EigenDecomposition, SpdMatrix, SpectralBounds, SymMatrix
from .means import mean_family
from .posmaps import ConvexCombination, IsometryCongruence, NormalizedTrace

logger = logging.getLogger(__name__)

DEFAULT_DIMS = (1, 2, 3, 4, 5, 6)
DEFAULT_BOUNDS = (SpectralBounds(1.0, 3.0), SpectralBounds(3.0, 7.0), SpectralBounds(0.5, 50.0))
DEFAULT_NU_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_P_GRID = (0.5, 1.0, 2.0, 3.0, 5.0)


def sample_orthogonal(n, rng):
    """QR of a standard normal matrix, columns sign-fixed so diag(R) > 0."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def sample_isometry(n, k, rng):
    if not 1 <= k <= n:
        raise InputError(f'An n x k isometry needs 1 <= k <= n, got n={n}, k={k}.', code='shape')
    return sample_orthogonal(n, rng)[:, :k]


def sample_unit_vector(n, rng):
    while True:
        x = rng.standard_normal(n)
        norm = np.linalg.norm(x)
        if norm > 0:
            return x / norm


def sample_spd(n, bounds, rng):
    """
    Q diag(lambda) Q^T with lambda uniform on [m, M]; for n >= 2 the first
    two eigenvalues are pinned to m and M so the hypotheses are tight.
    """
    values = rng.uniform(bounds.m, bounds.M, n)
    if n >= 2:
        values[0], values[1] = bounds.m, bounds.M
    Q = sample_orthogonal(n, rng)
    order = np.argsort(-values, kind='stable')
    decomposition = EigenDecomposition(Q[:, order], values[order])
    return SpdMatrix.assume(SymMatrix._trusted(decomposition.reconstruct(), decomposition))


def random_unital_map(n, rng):
    """
    A convex combination of one to three isometry congruences X -> T^T X T
    (T random n x k), plus the normalized trace when k = 1.
    """
    k = int(rng.integers(1, n + 1))
    maps = [IsometryCongruence(sample_isometry(n, k, rng)) for _ in range(int(rng.integers(1, 4)))]
    if k == 1:
        maps.append(NormalizedTrace(n))
    if len(maps) == 1:
        return maps[0]
    weights = rng.dirichlet(np.ones(len(maps)))
    weights[-1] = max(0.0, 1.0 - weights[:-1].sum())
    return ConvexCombination(tuple(zip(weights.tolist(), maps)))


@dataclass(frozen=True)
class SampleConfig:
    dims: tuple = DEFAULT_DIMS
    bounds: tuple = DEFAULT_BOUNDS
    trials: int = 1000
    seed: int = 42
    nu_grid: tuple = DEFAULT_NU_GRID
    p_grid: tuple = DEFAULT_P_GRID
    alpha_variant: str = AlphaVariant.BODY
    alpha_scale: float = 1.0
    policy: object = None

    def __post_init__(self):
        for name in ('dims', 'bounds', 'nu_grid', 'p_grid'):
            value = tuple(getattr(self, name))
            if not value:
                raise InputError(f'{name} must not be empty.', code='empty')
            object.__setattr__(self, name, value)
        if any(not isinstance(n, int) or n < 1 for n in self.dims):
            raise InputError(f'dims must be integers >= 1, got {list(self.dims)}.', code='dims')
        if any(not isinstance(b, SpectralBounds) for b in self.bounds):
            raise InputError('bounds must be SpectralBounds values.', code='bounds')
        if not isinstance(self.trials, int) or self.trials < 1:
            raise InputError(f'trials must be a positive integer, got {self.trials}.', code='trials')
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise InputError(f'seed must be an integer in [0, 2^64), got {self.seed}.', code='seed')
        if any(not 0.0 <= nu <= 1.0 for nu in self.nu_grid):
            raise InputError(f'nu values must lie in [0, 1], got {list(self.nu_grid)}.', code='nu')
        if any(not (math.isfinite(p) and p > 0) for p in self.p_grid):
            raise InputError(f'p values must be positive, got {list(self.p_grid)}.', code='p')
        if not (math.isfinite(self.alpha_scale) and self.alpha_scale > 0):
            raise InputError(f'alpha_scale must be positive, got {self.alpha_scale}.', code='alpha_scale')

    @property
    def grid_size(self):
        return len(self.dims) * len(self.nu_grid) * len(self.p_grid) * len(self.bounds)

    def grid_point(self, trial):
        """
        Grid point of a trial over dims x nu x p x bounds.

        The mixed-radix digits of ``trial % grid_size`` are sheared (each axis
        is offset by the sum of the faster digits), which keeps the walk a
        bijection on the grid while every axis runs through all its values
        within the first few trials.
        """
        index = trial % self.grid_size
        axes = (self.dims, self.nu_grid, self.p_grid, self.bounds)
        point, shift = [], 0
        for axis in axes:
            index, digit = divmod(index, len(axis))
            point.append(axis[(digit + shift) % len(axis)])
            shift += digit
        return tuple(point)

    def as_dict(self):
        return {
            'dims': list(self.dims),
            'bounds': [b.as_dict() for b in self.bounds],
            'trials': self.trials,
            'seed': self.seed,
            'nu_grid': list(self.nu_grid),
            'p_grid': list(self.p_grid),
            'alpha_variant': str(self.alpha_variant),
            'alpha_scale': self.alpha_scale,
        }


@dataclass
class IdTally:
    passed: int = 0
    failed: int = 0
    rejected: int = 0
    worst_gap: float = None

    def record(self, outcome, gap):
        setattr(self, outcome, getattr(self, outcome) + 1)
        if gap is not None and (self.worst_gap is None or gap < self.worst_gap):
            self.worst_gap = gap

    def as_dict(self):
        return {
            'passed': self.passed,
            'failed': self.failed,
            'rejected': self.rejected,
            'worst_gap': self.worst_gap,
        }


@dataclass
class SuiteReport:
    config: SampleConfig
    results: dict = field(default_factory=dict)

    @property
    def seed(self):
        return self.config.seed

    @property
    def total_failures(self):
        return sum(tally.failed for tally in self.results.values())

    @property
    def ok(self):
        return self.total_failures == 0

    def to_dict(self):
        return {
            'seed': self.seed,
            'config': self.config.as_dict(),
            'results': {key: tally.as_dict() for key, tally in self.results.items()},
            'total_failures': self.total_failures,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


# -- per-id inputs -----------------------------------------------------------

POLYA_SZEGO_IDS = {
    InequalityId.POLYA_SZEGO,
    InequalityId.THM_2_13_A,
    InequalityId.EQ_2_11,
    InequalityId.EQ_2_12,
    InequalityId.COR_2_14,
}
MEAN_PAIR_IDS = {
    InequalityId.HOA_FU,
    InequalityId.HOA_FU_MAPS,
    InequalityId.LEMMA_2_4,
    InequalityId.PROP_2_5,
}


def build_trial(inequality_id, config, n, nu, p, bounds, rng):
    """Draw (params, inputs) for one trial of one catalog entry."""
    params = dict(
        nu=nu,
        p=p,
        bounds=bounds,
        phi=random_unital_map(n, rng),
        alpha_variant=config.alpha_variant,
        alpha_scale=config.alpha_scale,
        policy=config.policy,
    )
    A = sample_spd(n, bounds, rng)
    B = sample_spd(n, bounds, rng)
    inputs = dict(A=A, B=B)

    if inequality_id in MEAN_PAIR_IDS:
        family = mean_family(nu)
        params['mean_sigma'] = family[int(rng.integers(len(family)))]
        params['mean_tau'] = family[int(rng.integers(len(family)))]
    elif inequality_id == InequalityId.LEMMA_2_3:
        # log-uniform over [m/M, M/m] straddles the boundary factor
        spread = math.log(bounds.M / bounds.m)
        params['order_factor'] = math.exp(rng.uniform(-spread, spread)) if spread else 1.0
    elif inequality_id == InequalityId.SCALAR_KM:
        inputs.update(a=float(rng.uniform(bounds.m, bounds.M)), b=float(rng.uniform(bounds.m, bounds.M)))
    elif inequality_id == InequalityId.PROP_2_15:
        inputs['x'] = sample_unit_vector(n, rng)
    elif inequality_id in POLYA_SZEGO_IDS:
        b_bounds = config.bounds[int(rng.integers(len(config.bounds)))]
        params['polya_szego'] = PolyaSzegoBounds.from_spectral(bounds, b_bounds)
        if inequality_id == InequalityId.COR_2_14:
            k = int(rng.integers(1, 4))
            inputs['pairs'] = tuple(
                (sample_spd(n, bounds, rng), sample_spd(n, b_bounds, rng)) for _ in range(k)
            )
        else:
            inputs['B'] = sample_spd(n, b_bounds, rng)

    return VerifierParams(**params), CheckInputs(**inputs)


def run_trial(config, inequality_id, id_index, trial):
    """One trial; returns ('passed' | 'failed' | 'rejected', gap or None)."""
    rng = np.random.default_rng([config.seed, id_index, trial])
    n, nu, p, bounds = config.grid_point(trial)
    try:
        params, inputs = build_trial(inequality_id, config, n, nu, p, bounds, rng)
        report = check(inequality_id, params, inputs)
    except HypothesisViolation as exc:
        logger.debug(f'{inequality_id} trial {trial} rejected: {exc.messages[0]}')
        return 'rejected', None
    except NumericalError as exc:
        logger.warning(f'{inequality_id} trial {trial} hit a numerical error: {exc}')
        return 'rejected', None
    return ('passed' if report.holds else 'failed'), report.gap


def _run_chunk(config, jobs):
    return [run_trial(config, inequality_id, id_index, trial) for inequality_id, id_index, trial in jobs]


def _chunks(jobs, size):
    for start in range(0, len(jobs), size):
        yield jobs[start:start + size]


def run_suite(config, ids, workers=1):
    """
    Run ``config.trials`` trials of every id. Hypothesis rejections and
    numerical errors are counted, never raised.

    With ``workers > 1`` trials run in a process pool; each trial seeds its
    own generator, so the report is the same for any worker count.
    """
    try:
        ids = [InequalityId(i) for i in ids]
    except ValueError as exc:
        raise InputError(f'Unknown inequality id: {exc}', code='unknown_id') from exc
    catalog_order = list(InequalityId)
    workers = max(1, int(workers))
    report = SuiteReport(config)
    logger.info(
        f'Suite start: {len(ids)} id(s), {config.trials} trial(s), seed {config.seed}, {workers} worker(s)'
    )

    jobs = [
        (inequality_id, catalog_order.index(inequality_id), trial)
        for inequality_id in ids
        for trial in range(config.trials)
    ]
    if workers == 1:
        outcomes = _run_chunk(config, jobs)
    else:
        size = max(1, math.ceil(len(jobs) / (workers * 8)))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = [
                outcome
                for chunk in executor.map(partial(_run_chunk, config), _chunks(jobs, size))
                for outcome in chunk
            ]

    for position, inequality_id in enumerate(ids):
        tally = IdTally()
        start = position * config.trials
        for outcome, gap in outcomes[start:start + config.trials]:
            tally.record(outcome, gap)
        report.results[str(inequality_id)] = tally
        if tally.failed:
            logger.warning(f'{inequality_id}: {tally.failed} failure(s), worst gap {tally.worst_gap:.3e}')

    logger.info(f'Suite finished: {report.total_failures} failure(s)')
    return report
