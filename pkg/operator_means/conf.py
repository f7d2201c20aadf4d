"""
Typed access to the OPERATOR_MEANS settings block.

Values are read once per call to ``VerifierSettings.load()``; tests can use
``override_settings(OPERATOR_MEANS=...)`` and the next load sees the change.
"""
from dataclasses import dataclass, fields

from django.conf import settings

DEFAULTS = {
    'TOLERANCE': 1e-9,
    'JACOBI_TOL': 1e-14,
    'JACOBI_MAX_SWEEPS': 100,
    'CONDITION_FLOOR': 1e-12,
    'SYMMETRY_TOL': 1e-8,
    'UNITAL_TOL': 1e-12,
    'POSITIVITY_TOL': 1e-10,
    'SCALAR_EQUALITY_TOL': 1e-12,
    'DEFAULT_SEED': 42,
    'DEFAULT_TRIALS': 1000,
    'WORKERS': 1,
}


@dataclass(frozen=True)
class VerifierSettings:
    tolerance: float
    jacobi_tol: float
    jacobi_max_sweeps: int
    condition_floor: float
    symmetry_tol: float
    unital_tol: float
    positivity_tol: float
    scalar_equality_tol: float
    default_seed: int
    default_trials: int
    workers: int

    @classmethod
    def load(cls):
        """Merge the project's OPERATOR_MEANS block over the defaults"""
        configured = {**DEFAULTS, **getattr(settings, 'OPERATOR_MEANS', {})}
        return cls(**{f.name: configured[f.name.upper()] for f in fields(cls)})
