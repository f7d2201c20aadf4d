"""
Catalog of verifiers for reverse AM-GM type operator inequalities.

Each verifier takes the shared ``VerifierParams`` plus the inputs it needs
(``CheckInputs``), verifies the hypotheses of its inequality (spectral
bounds are checked, never trusted), evaluates both sides and returns an
``InequalityReport``:

    gap   = lambda_min(RHS - LHS)        for matrix inequalities
    gap   = RHS - LHS                    for scalar / norm inequalities
    holds = gap >= -tolerance

Notation used in docstrings: Phi^p(X) = (Phi(X))^p, K = (M + m)^2 / (4Mm),
R = 2rMm(A^-1 nabla B^-1 - A^-1 # B^-1) the refinement term, and
alpha = max{K, (M + m)^2 / (4^(2/p) Mm)}.

A violated hypothesis raises HypothesisViolation; a failed inequality is a
report with holds=False.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np
from django.db import models

from .conf import VerifierSettings
from .exceptions import HypothesisViolation, InputError, NotPositiveDefinite
from .linalg import (
    DEFAULT_POLICY,
    SpdMatrix,
    SpectralBounds,
    SymMatrix,
    TolerancePolicy,
    block_norm_check,
    inverse,
    loewner_leq,
    matrix_to_json,
    operator_norm,
    power,
    psd_power,
    spectral_norm,
    spectrum_within,
)
from .means import (
    MeanDescriptor,
    arithmetic_mean,
    geometric_mean,
    refinement_term,
    weight_r,
)
from .posmaps import BlockAverage, IdentityMap, verify_unital

logger = logging.getLogger(__name__)


class InequalityId(models.TextChoices):
    AMGM = 'AMGM', 'A # B <= (A + B)/2'
    LIN_REVERSE = 'LIN_REVERSE', 'Phi((A + B)/2) <= K Phi(A # B)'
    LIN_SQ = 'LIN_SQ', 'Phi^2((A + B)/2) <= K^2 Phi^2(A # B)'
    LIN_SQ_MAPS = 'LIN_SQ_MAPS', 'Phi^2((A + B)/2) <= K^2 (Phi(A) # Phi(B))^2'
    P_LE_2 = 'P_LE_2', 'Phi^p((A + B)/2) <= K^p Phi^p(A # B), 0 < p <= 2'
    P_LE_2_MAPS = 'P_LE_2_MAPS', 'Phi^p((A + B)/2) <= K^p (Phi(A) # Phi(B))^p, 0 < p <= 2'
    FU_HE = 'FU_HE', 'Phi^p((A + B)/2) <= ((M + m)^2/(4^(2/p) Mm))^p Phi^p(A # B), p > 2'
    FU_HE_MAPS = 'FU_HE_MAPS', 'Phi^p((A + B)/2) <= ((M + m)^2/(4^(2/p) Mm))^p (Phi(A) # Phi(B))^p, p > 2'
    HOA_FU = 'HOA_FU', 'Phi^p(A sigma B) <= alpha^p Phi^p(A tau B)'
    HOA_FU_MAPS = 'HOA_FU_MAPS', 'Phi^p(A sigma B) <= alpha^p (Phi(A) tau Phi(B))^p'
    CHOI = 'CHOI', 'Phi(A)^-1 <= Phi(A^-1)'
    LEMMA_2_1 = 'LEMMA_2_1', '||AB|| <= ||A + B||^2 / 4'
    LEMMA_2_2 = 'LEMMA_2_2', '||A^p + B^p|| <= ||(A + B)^p||, p > 1'
    LEMMA_2_3 = 'LEMMA_2_3', 'A <= cB  iff  ||A^1/2 B^-1/2|| <= c^1/2'
    LEMMA_2_4 = 'LEMMA_2_4', 'Phi(A sigma B) + Mm Phi(A tau B)^-1 <= M + m'
    PROP_2_5 = 'PROP_2_5', 'Phi^p(A sigma B) Phi^-p(A tau B) + Phi^-p(A tau B) Phi^p(A sigma B) <= 2 alpha(2p)^p'
    SCALAR_KM = 'SCALAR_KM', 'a^(1-nu) b^nu + r (sqrt(a) - sqrt(b))^2 <= (1 - nu) a + nu b'
    THM_2_7_A = 'THM_2_7_A', 'Phi^p(A nabla_nu B + R) <= alpha^p Phi^p(A #_nu B)'
    THM_2_7_B = 'THM_2_7_B', 'Phi^p(A nabla_nu B + R) <= alpha^p (Phi(A) #_nu Phi(B))^p'
    EQ_2_4 = 'EQ_2_4', 'Phi(A nabla_nu B) + Mm Phi((1 - nu) A^-1 + nu B^-1) <= M + m'
    EQ_2_5 = 'EQ_2_5', 'A^-1 #_nu B^-1 + 2r (A^-1 nabla B^-1 - A^-1 # B^-1) <= (1 - nu) A^-1 + nu B^-1'
    EQ_2_6 = 'EQ_2_6', '||Phi(A nabla_nu B + R) Phi(A #_nu B)^-1|| <= K'
    REMARK_2_8_A = 'REMARK_2_8_A', 'Phi^p(A nabla_nu B) <= (Phi(A nabla_nu B) + Phi(R))^p, 0 < p <= 1'
    REMARK_2_8_B = 'REMARK_2_8_B', '||Phi^p(A nabla_nu B)|| <= ||Phi^p(A nabla_nu B) + Phi^p(R)|| <= ||Phi^p(A nabla_nu B + R)||, p >= 1'
    BASIC_BOUND = 'BASIC_BOUND', 'A + Mm A^-1 <= M + m'
    COR_2_11 = 'COR_2_11', 'Phi^p((A + B)/2 + Mm(A^-1 nabla B^-1 - A^-1 # B^-1)) <= alpha^p Phi^p(A # B) and alpha^p (Phi(A) # Phi(B))^p'
    COR_2_12 = 'COR_2_12', '((A + B)/2 + Mm(A^-1 nabla B^-1 - A^-1 # B^-1))^p <= alpha^p (A # B)^p'
    POLYA_SZEGO = 'POLYA_SZEGO', 'Phi(A) # Phi(B) <= (M + m)/(2 sqrt(Mm)) Phi(A # B)'
    KANTOROVICH = 'KANTOROVICH', 'Phi(A) # Phi(A^-1) <= (M^2 + m^2)/(2mM)'
    THM_2_13_A = 'THM_2_13_A', 'Phi(A) # Phi(B) + (sqrt(Mm) Phi(A) + Phi(B)/sqrt(Mm) - 2 Phi(A) # Phi(B))/2 <= (M + m)/(2 sqrt(Mm)) Phi(A # B)'
    THM_2_13_B = 'THM_2_13_B', 'Phi(A) # Phi(A^-1) + (Phi(A)/(Mm) + Mm Phi(A^-1) - 2 Phi(A) # Phi(A^-1))/2 <= (M^2 + m^2)/(2mM)'
    EQ_2_11 = 'EQ_2_11', 'Mm Phi(A) + Phi(B) <= (M + m) Phi(A # B)'
    EQ_2_12 = 'EQ_2_12', 'sqrt(Mm) Phi(A) # Phi(B) + (Mm Phi(A) + Phi(B) - 2 sqrt(Mm) Phi(A) # Phi(B))/2 <= (Mm Phi(A) + Phi(B))/2'
    COR_2_14 = 'COR_2_14', 'Refined reverse Cauchy-Schwarz for sum A_j # sum B_j'
    PROP_2_15 = 'PROP_2_15', '<Ax,x>^1/2 <A^-1x,x>^1/2 + ((Mm)^-1/4 <Ax,x>^1/2 - (Mm)^1/4 <A^-1x,x>^1/2)^2/2 <= (M + m)/(2 sqrt(Mm))'


class AlphaVariant(models.TextChoices):
    BODY = 'body', '(M + m)^2 / (4^(2/p) Mm)'
    ABSTRACT = 'abstract', '(M + m)^2 / (4^p Mm)'


def alpha(bounds, p, variant=AlphaVariant.BODY):
    """
    alpha = max{(M + m)^2/(4Mm), (M + m)^2/(4^(2/p) Mm)}.

    The ``abstract`` variant replaces 4^(2/p) with 4^p, for comparison only.
    """
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p > 0):
        raise InputError(f'alpha needs p > 0, got {p}.', code='exponent')
    if variant == AlphaVariant.BODY:
        divisor = 4.0 ** (2.0 / p)
    elif variant == AlphaVariant.ABSTRACT:
        divisor = 4.0 ** p
    else:
        raise InputError(f'Unknown alpha variant {variant!r}.', code='alpha_variant')
    total = (bounds.M + bounds.m) ** 2
    return max(total / (4.0 * bounds.M * bounds.m), total / (divisor * bounds.M * bounds.m))


def alpha_doubled(bounds, p, variant=AlphaVariant.BODY):
    """alpha evaluated at 2p, i.e. with 4^(1/p): the constant for products Phi^p Phi^-p."""
    return alpha(bounds, 2.0 * p, variant)


@dataclass(frozen=True)
class PolyaSzegoBounds:
    """
    m1^2 <= A <= M1^2 and m2^2 <= B <= M2^2, giving m = m2/M1 and M = M2/m1,
    so that m^2 <= A^-1/2 B A^-1/2 <= M^2.
    """
    m1: float
    M1: float
    m2: float
    M2: float

    def __post_init__(self):
        if not (0 < self.m1 <= self.M1 and 0 < self.m2 <= self.M2):
            raise InputError(
                'Polya-Szego bounds need 0 < m1 <= M1 and 0 < m2 <= M2.', code='bounds'
            )
        if self.m > self.M:
            raise InputError(f'Derived bounds m={self.m} > M={self.M}.', code='bounds')

    @classmethod
    def from_spectral(cls, a_bounds, b_bounds):
        return cls(
            math.sqrt(a_bounds.m), math.sqrt(a_bounds.M),
            math.sqrt(b_bounds.m), math.sqrt(b_bounds.M),
        )

    @property
    def m(self):
        return self.m2 / self.M1

    @property
    def M(self):
        return self.M2 / self.m1

    @property
    def printed_M(self):
        # The ratio M1/m2 as it is often quoted; reported for comparison only.
        return self.M1 / self.m2

    @property
    def a_bounds(self):
        return SpectralBounds(self.m1 ** 2, self.M1 ** 2)

    @property
    def b_bounds(self):
        return SpectralBounds(self.m2 ** 2, self.M2 ** 2)

    def as_dict(self):
        return {
            'm1': self.m1, 'M1': self.M1, 'm2': self.m2, 'M2': self.M2,
            'm': self.m, 'M': self.M, 'printed_M': self.printed_M,
        }


@dataclass(frozen=True)
class VerifierParams:
    """
    Parameters shared by the catalog. Only the fields an inequality consumes
    are required; r and alpha are derived, never stored.
    """
    nu: float = 0.5
    p: float = 1.0
    bounds: SpectralBounds = None
    mean_sigma: MeanDescriptor = None
    mean_tau: MeanDescriptor = None
    phi: object = None
    polya_szego: PolyaSzegoBounds = None
    order_factor: float = None
    alpha_variant: str = AlphaVariant.BODY
    alpha_scale: float = 1.0
    policy: TolerancePolicy = None

    def as_dict(self):
        data = {'nu': self.nu, 'p': self.p, 'alpha_variant': str(self.alpha_variant)}
        if self.alpha_scale != 1.0:
            data['alpha_scale'] = self.alpha_scale
        if self.bounds is not None:
            data.update(self.bounds.as_dict())
        if self.mean_sigma is not None:
            data['sigma'] = self.mean_sigma.as_dict()
        if self.mean_tau is not None:
            data['tau'] = self.mean_tau.as_dict()
        if self.phi is not None:
            data['map'] = self.phi.to_json()
        if self.polya_szego is not None:
            data['polya_szego'] = self.polya_szego.as_dict()
        if self.order_factor is not None:
            data['order_factor'] = self.order_factor
        return data


@dataclass(frozen=True)
class CheckInputs:
    A: SymMatrix = None
    B: SymMatrix = None
    x: np.ndarray = None
    a: float = None
    b: float = None
    pairs: tuple = field(default=())


@dataclass(frozen=True)
class InequalityReport:
    id: str
    lhs: object
    rhs: object
    gap: float
    alpha_used: float
    holds: bool
    tolerance: float
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_json(self):
        def encode(value):
            if isinstance(value, SymMatrix):
                return matrix_to_json(value)
            return float(value)

        data = {
            'id': str(self.id),
            'holds': bool(self.holds),
            'gap': float(self.gap),
            'tolerance': float(self.tolerance),
            'alpha': None if self.alpha_used is None else float(self.alpha_used),
            'params': self.params,
            'lhs': encode(self.lhs),
            'rhs': encode(self.rhs),
        }
        if self.details:
            data['details'] = self.details
        return data


class _Evaluation:
    """Hypothesis checks and report assembly shared by the verifiers."""

    def __init__(self, inequality_id, params, inputs):
        self.id = inequality_id
        self.params = params
        self.inputs = inputs
        self.policy = params.policy or DEFAULT_POLICY
        self.effective = {}
        self.details = {}

    # -- hypotheses ---------------------------------------------------

    def fix(self, **values):
        """Record parameters the inequality pins (e.g. nu = 1/2)."""
        self.effective.update(values)
        return values

    def spd(self, name):
        value = getattr(self.inputs, name)
        if value is None:
            raise HypothesisViolation(f'{self.id} needs matrix {name}.', code='missing_input')
        try:
            return SpdMatrix.from_sym(value)
        except NotPositiveDefinite as exc:
            raise HypothesisViolation(
                f'{self.id}: {name} must be positive definite.', code='not_positive_definite'
            ) from exc

    def bounds(self):
        if self.params.bounds is None:
            raise HypothesisViolation(f'{self.id} needs spectral bounds m, M.', code='missing_bounds')
        return self.params.bounds

    def bounded(self, name, bounds=None):
        A = self.spd(name)
        bounds = bounds or self.bounds()
        result = spectrum_within(A, bounds, self.policy)
        if not result.holds:
            raise HypothesisViolation(
                f'{self.id}: spectral bounds violated: {name} has spectrum '
                f'[{A.lambda_min:.6g}, {A.lambda_max:.6g}] outside [{bounds.m:.6g}, {bounds.M:.6g}].',
                code='spectral_bounds',
            )
        return A

    def pair(self):
        A = self.bounded('A')
        B = self.bounded('B')
        if A.n != B.n:
            raise HypothesisViolation(f'{self.id}: A and B must have the same size.', code='dimension')
        return A, B

    def phi(self, n):
        phi = self.params.phi or IdentityMap(n)
        if phi.input_dim != n:
            raise HypothesisViolation(
                f'{self.id}: map expects {phi.input_dim}x{phi.input_dim} inputs, matrices are {n}x{n}.',
                code='dimension',
            )
        if not verify_unital(phi):
            raise HypothesisViolation(f'{self.id}: map is not unital.', code='not_unital')
        return phi

    def exponent(self, accept, description):
        p = self.params.p
        if p is None or not math.isfinite(p) or not accept(p):
            raise HypothesisViolation(f'{self.id}: exponent must satisfy {description}, got p={p}.', code='exponent')
        return float(p)

    def means(self):
        sigma = self.params.mean_sigma or MeanDescriptor.arithmetic(self.params.nu)
        tau = self.params.mean_tau or MeanDescriptor.geometric(self.params.nu)
        if sigma.nu != tau.nu:
            raise HypothesisViolation(
                f'{self.id}: sigma and tau must share the weight nu (got {sigma.nu} and {tau.nu}).',
                code='mean_weights',
            )
        self.effective.update(sigma=sigma.as_dict(), tau=tau.as_dict())
        return sigma, tau

    def polya_szego(self):
        ps = self.params.polya_szego
        if ps is None:
            bounds = self.bounds()
            ps = PolyaSzegoBounds.from_spectral(bounds, bounds)
        self.effective['polya_szego'] = ps.as_dict()
        return ps

    def alpha(self, p):
        return alpha(self.bounds(), p, self.params.alpha_variant) * self.params.alpha_scale

    def scaled(self, constant):
        return constant * self.params.alpha_scale

    # -- reports ------------------------------------------------------

    def _report(self, lhs, rhs, gap, tolerance, alpha_used):
        params = {**self.params.as_dict(), **self.effective}
        report = InequalityReport(
            id=str(self.id),
            lhs=lhs,
            rhs=rhs,
            gap=float(gap),
            alpha_used=alpha_used,
            holds=bool(gap >= -tolerance),
            tolerance=float(tolerance),
            params=params,
            details=self.details,
        )
        if not report.holds:
            logger.warning(f'{self.id} failed: gap {report.gap:.3e} below -{report.tolerance:.3e}')
        return report

    def matrix(self, lhs, rhs, alpha_used=None):
        order = loewner_leq(lhs, rhs, self.policy)
        return self._report(lhs, rhs, order.gap, order.tolerance, alpha_used)

    def scalar(self, lhs, rhs, alpha_used=None, policy=None):
        policy = policy or self.policy
        gap = rhs - lhs
        return self._report(float(lhs), float(rhs), gap, policy.tolerance(lhs, rhs), alpha_used)

    def links(self, sides, alpha_used=None):
        """
        Several inequalities that must all hold. Each side is a (lhs, rhs)
        pair of matrices or scalars; the reported link is the one with the
        smallest margin gap + tolerance.
        """
        worst = None
        for lhs, rhs in sides:
            if isinstance(lhs, SymMatrix):
                order = loewner_leq(lhs, rhs, self.policy)
                gap, tol = order.gap, order.tolerance
            else:
                gap, tol = rhs - lhs, self.policy.tolerance(lhs, rhs)
            if worst is None or gap + tol < worst[2] + worst[3]:
                worst = (lhs, rhs, gap, tol)
        lhs, rhs, gap, tol = worst
        self.details['links'] = len(sides)
        return self._report(lhs, rhs, gap, tol, alpha_used)


CATALOG = {}


def verifier(inequality_id):
    def register(func):
        CATALOG[inequality_id] = func
        return func
    return register


def _identity(n, scale=1.0):
    return scale * SymMatrix.identity(n)


def _refined(A, B, nu, bounds):
    """A nabla_nu B + R"""
    return SpdMatrix.assume(arithmetic_mean(A, B, nu) + refinement_term(A, B, nu, bounds))


# -- reverse AM-GM for positive linear maps --------------------------------

@verifier(InequalityId.AMGM)
def _amgm(ev):
    A, B = ev.spd('A'), ev.spd('B')
    ev.fix(nu=0.5)
    return ev.matrix(geometric_mean(A, B, 0.5), arithmetic_mean(A, B, 0.5))


@verifier(InequalityId.LIN_REVERSE)
def _lin_reverse(ev):
    A, B = ev.pair()
    phi = ev.phi(A.n)
    ev.fix(nu=0.5)
    K = ev.scaled(ev.bounds().kantorovich)
    lhs = phi(arithmetic_mean(A, B, 0.5))
    rhs = K * phi(geometric_mean(A, B, 0.5))
    return ev.matrix(lhs, rhs, K)


def _squared_or_powered(ev, p, constant, use_maps):
    A, B = ev.pair()
    phi = ev.phi(A.n)
    ev.fix(nu=0.5, p=p)
    lhs = power(phi(arithmetic_mean(A, B, 0.5)), p)
    if use_maps:
        inner = geometric_mean(phi(A), phi(B), 0.5)
    else:
        inner = phi(geometric_mean(A, B, 0.5))
    return ev.matrix(lhs, constant ** p * power(inner, p), constant)


@verifier(InequalityId.LIN_SQ)
def _lin_sq(ev):
    return _squared_or_powered(ev, 2.0, ev.scaled(ev.bounds().kantorovich), use_maps=False)


@verifier(InequalityId.LIN_SQ_MAPS)
def _lin_sq_maps(ev):
    return _squared_or_powered(ev, 2.0, ev.scaled(ev.bounds().kantorovich), use_maps=True)


@verifier(InequalityId.P_LE_2)
def _p_le_2(ev):
    p = ev.exponent(lambda p: 0 < p <= 2, '0 < p <= 2')
    return _squared_or_powered(ev, p, ev.scaled(ev.bounds().kantorovich), use_maps=False)


@verifier(InequalityId.P_LE_2_MAPS)
def _p_le_2_maps(ev):
    p = ev.exponent(lambda p: 0 < p <= 2, '0 < p <= 2')
    return _squared_or_powered(ev, p, ev.scaled(ev.bounds().kantorovich), use_maps=True)


def _fu_he_constant(bounds, p):
    return (bounds.M + bounds.m) ** 2 / (4.0 ** (2.0 / p) * bounds.M * bounds.m)


@verifier(InequalityId.FU_HE)
def _fu_he(ev):
    p = ev.exponent(lambda p: p > 2, 'p > 2')
    return _squared_or_powered(ev, p, ev.scaled(_fu_he_constant(ev.bounds(), p)), use_maps=False)


@verifier(InequalityId.FU_HE_MAPS)
def _fu_he_maps(ev):
    p = ev.exponent(lambda p: p > 2, 'p > 2')
    return _squared_or_powered(ev, p, ev.scaled(_fu_he_constant(ev.bounds(), p)), use_maps=True)


def _between_means(ev, use_maps):
    p = ev.exponent(lambda p: p > 0, 'p > 0')
    A, B = ev.pair()
    phi = ev.phi(A.n)
    sigma, tau = ev.means()
    a = ev.alpha(p)
    lhs = power(phi(sigma.apply(A, B)), p)
    if use_maps:
        inner = tau.apply(phi(SpdMatrix.assume(A)), phi(SpdMatrix.assume(B)))
    else:
        inner = phi(tau.apply(A, B))
    return ev.matrix(lhs, a ** p * power(inner, p), a)


@verifier(InequalityId.HOA_FU)
def _hoa_fu(ev):
    return _between_means(ev, use_maps=False)


@verifier(InequalityId.HOA_FU_MAPS)
def _hoa_fu_maps(ev):
    return _between_means(ev, use_maps=True)


@verifier(InequalityId.CHOI)
def _choi(ev):
    A = ev.spd('A')
    phi = ev.phi(A.n)
    return ev.matrix(inverse(phi(A)), phi(inverse(A)))


# -- norm lemmas -----------------------------------------------------------

@verifier(InequalityId.LEMMA_2_1)
def _lemma_product_norm(ev):
    A, B = ev.spd('A'), ev.spd('B')
    lhs = spectral_norm(A.data @ B.data)
    rhs = operator_norm(A + B) ** 2 / 4.0
    return ev.scalar(lhs, rhs)


@verifier(InequalityId.LEMMA_2_2)
def _lemma_power_norm(ev):
    p = ev.exponent(lambda p: p > 1, 'p > 1')
    A, B = ev.spd('A'), ev.spd('B')
    lhs = operator_norm(power(A, p) + power(B, p))
    rhs = operator_norm(power(SpdMatrix.assume(A + B), p))
    return ev.scalar(lhs, rhs)


@verifier(InequalityId.LEMMA_2_3)
def _lemma_order_norm(ev):
    """
    Both sides of the equivalence are evaluated as margins:
    d1 = lambda_min(cB - A) and d2 = c - ||A^1/2 B^-1/2||^2.
    The report fails only when they clearly disagree in sign.
    """
    A, B = ev.spd('A'), ev.spd('B')
    relative = SymMatrix._trusted(power(B, -0.5).data @ A.data @ power(B, -0.5).data)
    factor = ev.params.order_factor
    if factor is None:
        factor = relative.lambda_max
    if not factor > 0:
        raise HypothesisViolation(f'{ev.id}: the factor must be positive, got {factor}.', code='factor')
    ev.fix(order_factor=float(factor))
    d1 = (factor * B - A).lambda_min
    d2 = factor - spectral_norm(power(A, 0.5).data @ power(B, -0.5).data) ** 2
    tol1 = ev.policy.tolerance(factor * operator_norm(B), operator_norm(A))
    tol2 = ev.policy.tolerance(factor)
    tolerance = max(tol1, tol2)
    clearly_disagree = (d1 > tol1 and d2 < -tol2) or (d1 < -tol1 and d2 > tol2)
    gap = -min(abs(d1), abs(d2)) if clearly_disagree else 0.0
    ev.details.update(order_holds=bool(d1 >= -tol1), norm_holds=bool(d2 >= -tol2))
    return ev._report(float(d1), float(d2), gap, tolerance, None)


@verifier(InequalityId.LEMMA_2_4)
def _lemma_mean_sum(ev):
    A, B = ev.pair()
    phi = ev.phi(A.n)
    sigma, tau = ev.means()
    bounds = ev.bounds()
    lhs = phi(sigma.apply(A, B)) + bounds.product * inverse(phi(tau.apply(A, B)))
    return ev.matrix(lhs, _identity(lhs.n, bounds.M + bounds.m))


@verifier(InequalityId.PROP_2_5)
def _symmetrized_product(ev):
    p = ev.exponent(lambda p: p > 0, 'p > 0')
    A, B = ev.pair()
    phi = ev.phi(A.n)
    sigma, tau = ev.means()
    a = alpha_doubled(ev.bounds(), p, ev.params.alpha_variant) * ev.params.alpha_scale
    X = power(phi(sigma.apply(A, B)), p).data
    Y = power(phi(tau.apply(A, B)), -p).data
    product = X @ Y
    symmetrized = SymMatrix._trusted(product + product.T)
    bound = a ** p
    ev.details.update(
        product_norm=spectral_norm(product),
        block_norm_check=block_norm_check(product, bound, ev.policy),
    )
    return ev.matrix(symmetrized, _identity(symmetrized.n, 2.0 * bound), a)


@verifier(InequalityId.SCALAR_KM)
def _scalar_young(ev):
    a, b = ev.inputs.a, ev.inputs.b
    if a is None or b is None:
        A, B = ev.spd('A'), ev.spd('B')
        if A.n != 1 or B.n != 1:
            raise HypothesisViolation(f'{ev.id} needs scalars a, b (or 1x1 matrices).', code='missing_input')
        a, b = float(A.data[0, 0]), float(B.data[0, 0])
    if not (a > 0 and b > 0):
        raise HypothesisViolation(f'{ev.id}: a and b must be positive, got a={a}, b={b}.', code='positivity')
    nu = ev.params.nu
    r = weight_r(nu)
    lhs = a ** (1.0 - nu) * b ** nu + r * (math.sqrt(a) - math.sqrt(b)) ** 2
    rhs = (1.0 - nu) * a + nu * b
    policy = ev.params.policy
    if policy is None and nu == 0.5:
        policy = TolerancePolicy(absolute=VerifierSettings.load().scalar_equality_tol)
    ev.fix(a=a, b=b)
    return ev.scalar(lhs, rhs, policy=policy)


# -- refinements of the reverse AM-GM inequality ---------------------------

def _refined_power(ev, use_maps):
    p = ev.exponent(lambda p: p > 0, 'p > 0')
    A, B = ev.pair()
    phi = ev.phi(A.n)
    nu = ev.params.nu
    a = ev.alpha(p)
    lhs = power(phi(_refined(A, B, nu, ev.bounds())), p)
    if use_maps:
        inner = geometric_mean(SpdMatrix.assume(phi(A)), SpdMatrix.assume(phi(B)), nu)
    else:
        inner = phi(geometric_mean(A, B, nu))
    return ev.matrix(lhs, a ** p * power(inner, p), a)


@verifier(InequalityId.THM_2_7_A)
def _refined_reverse(ev):
    return _refined_power(ev, use_maps=False)


@verifier(InequalityId.THM_2_7_B)
def _refined_reverse_maps(ev):
    return _refined_power(ev, use_maps=True)


@verifier(InequalityId.EQ_2_4)
def _weighted_basic_bound(ev):
    A, B = ev.pair()
    phi = ev.phi(A.n)
    bounds = ev.bounds()
    nu = ev.params.nu
    lhs = phi(arithmetic_mean(A, B, nu)) + bounds.product * phi(arithmetic_mean(inverse(A), inverse(B), nu))
    return ev.matrix(lhs, _identity(lhs.n, bounds.M + bounds.m))


@verifier(InequalityId.EQ_2_5)
def _young_on_inverses(ev):
    A, B = ev.spd('A'), ev.spd('B')
    nu = ev.params.nu
    r = weight_r(nu)
    a_inv, b_inv = inverse(A), inverse(B)
    am_gm_gap = arithmetic_mean(a_inv, b_inv, 0.5) - geometric_mean(a_inv, b_inv, 0.5)
    lhs = geometric_mean(a_inv, b_inv, nu) + 2.0 * r * am_gm_gap
    return ev.matrix(lhs, arithmetic_mean(a_inv, b_inv, nu))


@verifier(InequalityId.EQ_2_6)
def _refined_product_norm(ev):
    A, B = ev.pair()
    phi = ev.phi(A.n)
    bounds = ev.bounds()
    nu = ev.params.nu
    refined = phi(_refined(A, B, nu, bounds))
    geometric = inverse(phi(geometric_mean(A, B, nu)))
    K = ev.scaled(bounds.kantorovich)
    return ev.scalar(spectral_norm(refined.data @ geometric.data), K, K)


def _refinement_split(ev):
    A, B = ev.pair()
    phi = ev.phi(A.n)
    nu = ev.params.nu
    base = phi(arithmetic_mean(A, B, nu))
    extra = phi(refinement_term(A, B, nu, ev.bounds()))
    return SpdMatrix.assume(base), extra


@verifier(InequalityId.REMARK_2_8_A)
def _refinement_dominates(ev):
    p = ev.exponent(lambda p: 0 < p <= 1, '0 < p <= 1')
    base, extra = _refinement_split(ev)
    return ev.matrix(power(base, p), power(SpdMatrix.assume(base + extra), p))


@verifier(InequalityId.REMARK_2_8_B)
def _refinement_norm_chain(ev):
    p = ev.exponent(lambda p: p >= 1, 'p >= 1')
    base, extra = _refinement_split(ev)
    base_p = power(base, p)
    first = operator_norm(base_p)
    middle = operator_norm(base_p + psd_power(extra, p, ev.policy))
    last = operator_norm(power(SpdMatrix.assume(base + extra), p))
    ev.details['norms'] = [first, middle, last]
    return ev.links([(first, middle), (middle, last)])


@verifier(InequalityId.BASIC_BOUND)
def _basic_bound(ev):
    A = ev.bounded('A')
    bounds = ev.bounds()
    lhs = A + bounds.product * inverse(A)
    return ev.matrix(lhs, _identity(A.n, bounds.M + bounds.m))


def _midpoint_refined(ev, phi, A, B, p, a):
    lhs = power(phi(_refined(A, B, 0.5, ev.bounds())), p)
    first = a ** p * power(phi(geometric_mean(A, B, 0.5)), p)
    second = a ** p * power(geometric_mean(SpdMatrix.assume(phi(A)), SpdMatrix.assume(phi(B)), 0.5), p)
    return lhs, first, second


@verifier(InequalityId.COR_2_11)
def _midpoint_refinement(ev):
    p = ev.exponent(lambda p: p > 0, 'p > 0')
    A, B = ev.pair()
    phi = ev.phi(A.n)
    ev.fix(nu=0.5)
    a = ev.alpha(p)
    lhs, first, second = _midpoint_refined(ev, phi, A, B, p, a)
    return ev.links([(lhs, first), (lhs, second)], a)


@verifier(InequalityId.COR_2_12)
def _midpoint_refinement_plain(ev):
    p = ev.exponent(lambda p: p > 0, 'p > 0')
    A, B = ev.pair()
    ev.fix(nu=0.5, map=IdentityMap(A.n).to_json())
    # Kantorovich constant for p <= 2, the 4^(2/p) constant beyond.
    a = ev.scaled(alpha(ev.bounds(), p, AlphaVariant.BODY))
    lhs = power(_refined(A, B, 0.5, ev.bounds()), p)
    return ev.matrix(lhs, a ** p * power(geometric_mean(A, B, 0.5), p), a)


# -- Polya-Szego and Kantorovich family --------------------------------------

def _polya_szego_pair(ev):
    ps = ev.polya_szego()
    A = ev.bounded('A', ps.a_bounds)
    B = ev.bounded('B', ps.b_bounds)
    if A.n != B.n:
        raise HypothesisViolation(f'{ev.id}: A and B must have the same size.', code='dimension')
    return ps, A, B


@verifier(InequalityId.POLYA_SZEGO)
def _polya_szego(ev):
    ps, A, B = _polya_szego_pair(ev)
    phi = ev.phi(A.n)
    constant = (ps.M + ps.m) / (2.0 * math.sqrt(ps.M * ps.m))
    lhs = geometric_mean(SpdMatrix.assume(phi(A)), SpdMatrix.assume(phi(B)), 0.5)
    return ev.matrix(lhs, constant * phi(geometric_mean(A, B, 0.5)), constant)


@verifier(InequalityId.KANTOROVICH)
def _kantorovich(ev):
    A = ev.bounded('A')
    phi = ev.phi(A.n)
    bounds = ev.bounds()
    m, M = math.sqrt(bounds.m), math.sqrt(bounds.M)
    ev.fix(kantorovich_m=m, kantorovich_M=M)
    constant = (M ** 2 + m ** 2) / (2.0 * m * M)
    lhs = geometric_mean(SpdMatrix.assume(phi(A)), SpdMatrix.assume(phi(inverse(A))), 0.5)
    return ev.matrix(lhs, _identity(lhs.n, constant), constant)


def _refined_polya_szego(phi, A, B, ps):
    X = SpdMatrix.assume(phi(A))
    Y = SpdMatrix.assume(phi(B))
    c = math.sqrt(ps.M * ps.m)
    G = geometric_mean(X, Y, 0.5)
    lhs = G + 0.5 * (c * X + Y / c - 2.0 * G)
    rhs = (ps.M + ps.m) / (2.0 * c) * phi(geometric_mean(A, B, 0.5))
    return lhs, rhs


@verifier(InequalityId.THM_2_13_A)
def _refined_polya_szego_check(ev):
    ps, A, B = _polya_szego_pair(ev)
    phi = ev.phi(A.n)
    lhs, rhs = _refined_polya_szego(phi, A, B, ps)
    return ev.matrix(lhs, rhs)


@verifier(InequalityId.THM_2_13_B)
def _refined_kantorovich(ev):
    A = ev.bounded('A')
    phi = ev.phi(A.n)
    bounds = ev.bounds()
    m, M = math.sqrt(bounds.m), math.sqrt(bounds.M)
    ev.fix(kantorovich_m=m, kantorovich_M=M)
    X = SpdMatrix.assume(phi(A))
    Y = SpdMatrix.assume(phi(inverse(A)))
    G = geometric_mean(X, Y, 0.5)
    lhs = G + 0.5 * (X / (M * m) + (M * m) * Y - 2.0 * G)
    constant = (M ** 2 + m ** 2) / (2.0 * m * M)
    return ev.matrix(lhs, _identity(lhs.n, constant), constant)


@verifier(InequalityId.EQ_2_11)
def _polya_szego_linear(ev):
    ps, A, B = _polya_szego_pair(ev)
    phi = ev.phi(A.n)
    lhs = ps.M * ps.m * phi(A) + phi(B)
    return ev.matrix(lhs, (ps.M + ps.m) * phi(geometric_mean(A, B, 0.5)))


@verifier(InequalityId.EQ_2_12)
def _polya_szego_young(ev):
    ps, A, B = _polya_szego_pair(ev)
    phi = ev.phi(A.n)
    c = math.sqrt(ps.M * ps.m)
    X = ps.M * ps.m * phi(A)
    Y = phi(B)
    G = c * geometric_mean(SpdMatrix.assume(phi(A)), SpdMatrix.assume(Y), 0.5)
    lhs = G + 0.5 * (X + Y - 2.0 * G)
    return ev.matrix(lhs, 0.5 * (X + Y))


def _block_diagonal(blocks):
    d = blocks[0].n
    out = np.zeros((d * len(blocks), d * len(blocks)))
    for j, block in enumerate(blocks):
        out[j * d:(j + 1) * d, j * d:(j + 1) * d] = block.data
    return SpdMatrix.assume(SymMatrix._trusted(out))


@verifier(InequalityId.COR_2_14)
def _reverse_cauchy_schwarz(ev):
    pairs = tuple(ev.inputs.pairs) or ((ev.inputs.A, ev.inputs.B),)
    ps = ev.polya_szego()
    checked = []
    for j, (A_j, B_j) in enumerate(pairs):
        sub = _Evaluation(ev.id, ev.params, CheckInputs(A=A_j, B=B_j))
        sub.policy = ev.policy
        A_j = sub.bounded('A', ps.a_bounds)
        B_j = sub.bounded('B', ps.b_bounds)
        if A_j.n != B_j.n or A_j.n != pairs[0][0].n:
            raise HypothesisViolation(f'{ev.id}: all pairs must share one size.', code='dimension')
        checked.append((A_j, B_j))
    k = len(checked)
    phi = BlockAverage(k, checked[0][0].n)
    ev.fix(map=phi.to_json(), pairs=k)
    lhs, rhs = _refined_polya_szego(
        phi,
        _block_diagonal([A_j for A_j, _ in checked]),
        _block_diagonal([B_j for _, B_j in checked]),
        ps,
    )
    # Phi averages the blocks; the sums are k times the averages.
    return ev.matrix(k * lhs, k * rhs)


@verifier(InequalityId.PROP_2_15)
def _vector_kantorovich(ev):
    A = ev.bounded('A')
    bounds = ev.bounds()
    x = ev.inputs.x
    if x is None:
        raise HypothesisViolation(f'{ev.id} needs a vector x.', code='missing_input')
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != A.n:
        raise HypothesisViolation(f'{ev.id}: x has length {x.shape[0]}, A is {A.n}x{A.n}.', code='dimension')
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > 1e-12:
        raise HypothesisViolation(f'{ev.id}: x must be a unit vector (||x|| = {norm:.15g}).', code='unit_vector')
    a = float(x @ A.data @ x)
    b = float(x @ inverse(A).data @ x)
    c4 = bounds.product ** 0.25
    lhs = math.sqrt(a * b) + 0.5 * (math.sqrt(a) / c4 - c4 * math.sqrt(b)) ** 2
    rhs = (bounds.M + bounds.m) / (2.0 * math.sqrt(bounds.product)) * norm ** 4
    ev.details.update(quadratic_form=a, inverse_quadratic_form=b)
    return ev.scalar(lhs, rhs)


def check(inequality_id, params, inputs):
    """Evaluate one catalog entry; HypothesisViolation if its hypotheses fail."""
    try:
        key = InequalityId(inequality_id)
    except ValueError:
        raise InputError(
            f'Unknown inequality id {inequality_id!r}.', code='unknown_id'
        ) from None
    return CATALOG[key](_Evaluation(key, params, inputs))