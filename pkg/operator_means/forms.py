"""
Validation of command-line flags.

Each management command hands its raw option strings to one of these forms;
nothing is computed until ``is_valid()`` passes. Cleaned forms carry ready
domain values (SampleConfig, VerifierParams, ...) in ``cleaned_data``.
"""
import json
import math
import re

import numpy as np
from django import forms
from django.core.exceptions import ValidationError

from .conf import VerifierSettings
from .exceptions import InputError
from .inequalities import (
    AlphaVariant,
    CheckInputs,
    InequalityId,
    PolyaSzegoBounds,
    VerifierParams,
)
from .linalg import SpectralBounds, TolerancePolicy, matrix_from_json
from .means import MeanDescriptor, MeanKind
from .posmaps import map_from_json
from .sampling import DEFAULT_BOUNDS, DEFAULT_DIMS, DEFAULT_NU_GRID, DEFAULT_P_GRID, SampleConfig

_SEPARATORS = re.compile(r'[\s,]+')


def _split(value):
    return [item for item in _SEPARATORS.split(value.strip()) if item]


def _float_list(value, label):
    try:
        return [float(item) for item in _split(value)]
    except ValueError:
        raise ValidationError(f'{label} must be a comma-separated list of numbers, got "{value}".')


def raise_for_errors(form):
    """Turn an invalid form into a single InputError listing every problem."""
    if form.is_valid():
        return form.cleaned_data
    problems = []
    for field, errors in form.errors.items():
        prefix = '' if field == '__all__' else f'--{field.replace("_", "-")}: '
        problems.extend(f'{prefix}{error}' for error in errors)
    raise InputError('; '.join(problems), code='invalid_flags')


class BoundsMixin:
    """Optional --m/--M pair, both or neither."""

    def clean_bounds_pair(self, cleaned_data):
        m, M = cleaned_data.get('m'), cleaned_data.get('M')
        if m is None and M is None:
            return None
        if m is None or M is None:
            raise ValidationError('--m and --M must be given together.')
        try:
            return SpectralBounds(m, M)
        except InputError as exc:
            raise ValidationError(exc.messages)


class AlphaForm(forms.Form):
    m = forms.FloatField()
    M = forms.FloatField()
    p = forms.FloatField()
    alpha_variant = forms.ChoiceField(choices=AlphaVariant.choices, required=False)

    def clean_p(self):
        p = self.cleaned_data['p']
        if not p > 0:
            raise ValidationError('p must be positive.')
        return p

    def clean_alpha_variant(self):
        return self.cleaned_data.get('alpha_variant') or AlphaVariant.BODY

    def clean(self):
        cleaned_data = super().clean()
        if 'm' in cleaned_data and 'M' in cleaned_data:
            try:
                cleaned_data['bounds'] = SpectralBounds(cleaned_data['m'], cleaned_data['M'])
            except InputError as exc:
                raise ValidationError(exc.messages)
        return cleaned_data


def _read_json_file(path):
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except OSError as exc:
        raise ValidationError(f'Cannot read {path}: {exc.strerror or exc}.')
    except json.JSONDecodeError as exc:
        raise ValidationError(f'{path} is not valid JSON: {exc.msg} (line {exc.lineno}).')


class MatrixFileMixin:
    def clean_file(self):
        data = _read_json_file(self.cleaned_data['file'])
        if not isinstance(data, dict):
            raise ValidationError('The input file must hold a JSON object.')
        return data


class MeansForm(MatrixFileMixin, forms.Form):
    file = forms.CharField()
    kind = forms.ChoiceField(choices=MeanKind.choices)
    nu = forms.FloatField(min_value=0.0, max_value=1.0, required=False)
    t = forms.FloatField(required=False)

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        data = cleaned_data['file']
        for name in ('A', 'B'):
            if name not in data:
                raise ValidationError(f'The input file must define matrix {name}.')
        nu = cleaned_data.get('nu')
        cleaned_data['mean'] = MeanDescriptor(
            cleaned_data['kind'], 0.5 if nu is None else nu, cleaned_data.get('t'),
        )
        cleaned_data['A'] = matrix_from_json(data['A'], 'A')
        cleaned_data['B'] = matrix_from_json(data['B'], 'B')
        return cleaned_data


class VerifyForm(BoundsMixin, forms.Form):
    ids = forms.CharField(required=False)
    trials = forms.IntegerField(required=False)
    seed = forms.IntegerField(required=False)
    dims = forms.CharField(required=False)
    m = forms.FloatField(required=False)
    M = forms.FloatField(required=False)
    nu = forms.CharField(required=False)
    p = forms.CharField(required=False)
    tol = forms.FloatField(required=False)
    alpha_variant = forms.ChoiceField(choices=AlphaVariant.choices, required=False)
    alpha_scale = forms.FloatField(required=False)
    workers = forms.IntegerField(required=False)

    def clean_ids(self):
        raw = self.cleaned_data.get('ids') or 'ALL'
        items = _split(raw)
        if [item.upper() for item in items] == ['ALL']:
            return list(InequalityId)
        unknown = [item for item in items if item not in InequalityId.values]
        if unknown:
            raise ValidationError(f'Unknown inequality id(s): {", ".join(unknown)}.')
        return [InequalityId(item) for item in items]

    def clean_trials(self):
        trials = self.cleaned_data.get('trials')
        if trials is None:
            return VerifierSettings.load().default_trials
        if trials < 1:
            raise ValidationError(f'trials must be at least 1, got {trials}.')
        return trials

    def clean_seed(self):
        seed = self.cleaned_data.get('seed')
        if seed is None:
            return VerifierSettings.load().default_seed
        if not 0 <= seed < 2 ** 64:
            raise ValidationError('seed must be a non-negative 64-bit integer.')
        return seed

    def clean_dims(self):
        raw = self.cleaned_data.get('dims')
        if not raw:
            return list(DEFAULT_DIMS)
        match = re.fullmatch(r'\s*(\d+)\s*-\s*(\d+)\s*', raw)
        try:
            dims = list(range(int(match[1]), int(match[2]) + 1)) if match else [int(d) for d in _split(raw)]
        except ValueError:
            raise ValidationError(f'dims must look like "1-6" or "2,3,4", got "{raw}".')
        if not dims or min(dims) < 1:
            raise ValidationError('dims must be a non-empty list of integers >= 1.')
        return dims

    def clean_nu(self):
        raw = self.cleaned_data.get('nu')
        grid = _float_list(raw, 'nu') if raw else list(DEFAULT_NU_GRID)
        if not grid or any(not 0.0 <= nu <= 1.0 for nu in grid):
            raise ValidationError('nu values must lie in [0, 1].')
        return grid

    def clean_p(self):
        raw = self.cleaned_data.get('p')
        grid = _float_list(raw, 'p') if raw else list(DEFAULT_P_GRID)
        if not grid or any(not 0 < p < float('inf') for p in grid):
            raise ValidationError('p values must be positive.')
        return grid

    def clean_tol(self):
        tol = self.cleaned_data.get('tol')
        if tol is not None and not tol >= 0:
            raise ValidationError('tol must be non-negative.')
        return tol

    def clean_alpha_scale(self):
        scale = self.cleaned_data.get('alpha_scale')
        if scale is None:
            return 1.0
        if not scale > 0:
            raise ValidationError('alpha-scale must be positive.')
        return scale

    def clean_workers(self):
        workers = self.cleaned_data.get('workers')
        if workers is None:
            return VerifierSettings.load().workers
        if workers < 1:
            raise ValidationError('workers must be at least 1.')
        return workers

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        bounds = self.clean_bounds_pair(cleaned_data)
        tol = cleaned_data.get('tol')
        cleaned_data['config'] = SampleConfig(
            dims=tuple(cleaned_data['dims']),
            bounds=(bounds,) if bounds else DEFAULT_BOUNDS,
            trials=cleaned_data['trials'],
            seed=cleaned_data['seed'],
            nu_grid=tuple(cleaned_data['nu']),
            p_grid=tuple(cleaned_data['p']),
            alpha_variant=cleaned_data.get('alpha_variant') or AlphaVariant.BODY,
            alpha_scale=cleaned_data['alpha_scale'],
            policy=None if tol is None else TolerancePolicy(rel=tol),
        )
        return cleaned_data


class CheckForm(BoundsMixin, MatrixFileMixin, forms.Form):
    """
    Input file layout (every key optional except what the inequality needs):

        {"A": matrix, "B": matrix, "map": map, "x": [..], "a": 1.0, "b": 2.0,
         "pairs": [{"A": matrix, "B": matrix}, ...],
         "sigma": {"kind": "harmonic", "nu": 0.5}, "tau": {...},
         "polya_szego": {"m1": .., "M1": .., "m2": .., "M2": ..},
         "bounds": {"m": .., "M": ..}}
    """
    file = forms.CharField()
    id = forms.ChoiceField(choices=InequalityId.choices)
    nu = forms.FloatField(min_value=0.0, max_value=1.0, required=False)
    p = forms.FloatField(required=False)
    m = forms.FloatField(required=False)
    M = forms.FloatField(required=False)
    tol = forms.FloatField(required=False)
    alpha_variant = forms.ChoiceField(choices=AlphaVariant.choices, required=False)
    alpha_scale = forms.FloatField(required=False)
    factor = forms.FloatField(required=False)

    def clean_alpha_scale(self):
        scale = self.cleaned_data.get('alpha_scale')
        if scale is not None and not scale > 0:
            raise ValidationError('alpha-scale must be positive.')
        return 1.0 if scale is None else scale

    def clean_tol(self):
        tol = self.cleaned_data.get('tol')
        if tol is not None and not tol >= 0:
            raise ValidationError('tol must be non-negative.')
        return tol

    @staticmethod
    def _mean(data, key):
        if key not in data:
            return None
        entry = data[key]
        if not isinstance(entry, dict) or 'kind' not in entry:
            raise ValidationError(f'{key}: expected {{"kind": ..., "nu": ...}}.')
        return MeanDescriptor(entry['kind'], float(entry.get('nu', 0.5)), entry.get('t'))

    @staticmethod
    def _scalar(data, key):
        if key not in data:
            return None
        value = float(data[key])
        if not math.isfinite(value):
            raise ValueError(f'{key} must be finite, got {data[key]!r}')
        return value

    @staticmethod
    def _derived_bounds(matrices):
        # Tightest common bounds; left unset when a matrix is not positive definite.
        lows = [A.lambda_min for A in matrices]
        highs = [A.lambda_max for A in matrices]
        if not matrices or min(lows) <= 0:
            return None
        return SpectralBounds(min(lows), max(highs))

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        try:
            return self._build(cleaned_data)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f'Malformed input file: {exc!r}.')

    def _build(self, cleaned_data):
        data = cleaned_data['file']

        A = matrix_from_json(data['A'], 'A') if 'A' in data else None
        B = matrix_from_json(data['B'], 'B') if 'B' in data else None
        pairs = tuple(
            (matrix_from_json(pair['A'], f'pairs[{j}].A'), matrix_from_json(pair['B'], f'pairs[{j}].B'))
            for j, pair in enumerate(data.get('pairs', []))
        )
        x = np.asarray(data['x'], dtype=float) if 'x' in data else None

        bounds = self.clean_bounds_pair(cleaned_data)
        if bounds is None and 'bounds' in data:
            bounds = SpectralBounds(float(data['bounds']['m']), float(data['bounds']['M']))
        if bounds is None:
            matrices = [X for X in (A, B) if X is not None] + [X for pair in pairs for X in pair]
            bounds = self._derived_bounds(matrices)

        polya_szego = PolyaSzegoBounds(**data['polya_szego']) if 'polya_szego' in data else None
        nu, p, tol = cleaned_data.get('nu'), cleaned_data.get('p'), cleaned_data.get('tol')
        cleaned_data['params'] = VerifierParams(
            nu=0.5 if nu is None else nu,
            p=1.0 if p is None else p,
            bounds=bounds,
            mean_sigma=self._mean(data, 'sigma'),
            mean_tau=self._mean(data, 'tau'),
            phi=map_from_json(data['map']) if 'map' in data else None,
            polya_szego=polya_szego,
            order_factor=cleaned_data.get('factor'),
            alpha_variant=cleaned_data.get('alpha_variant') or AlphaVariant.BODY,
            alpha_scale=cleaned_data['alpha_scale'],
            policy=None if tol is None else TolerancePolicy(rel=tol),
        )
        cleaned_data['inputs'] = CheckInputs(
            A=A, B=B, x=x, a=self._scalar(data, 'a'), b=self._scalar(data, 'b'), pairs=pairs,
        )
        return cleaned_data
