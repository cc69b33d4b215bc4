"""scikit-learn style wrapper around the steady-state solvers.

Rows of ``X`` are parameter points; columns are the names in ``features``.
``transform`` returns the photon statistics of each row, so the simulator
drops into pipelines, ``clone`` and ``GridSearchCV``-style parameter handling.

    >>> est = PhotonStatistics(features=("delta_c",), pump="optimal_single",
    ...                        pump_reference="resonance").fit()
    >>> est.transform([[1.0], [1.24]])[:, 0]      # doctest: +SKIP
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .blockade import nonreciprocal_ratio
from .errors import BlockadeSimError, ParameterError
from .model import Direction, SystemParams
from .sweep import SWEEPABLE, PumpMode, resolve_pump, solve_amplitudes, solve_lindblad

_PER_DIRECTION = ("g2", "g3", "n_photon")


class PhotonStatistics(TransformerMixin, BaseEstimator):
    """Map parameter points to ``(g2, g3, n_photon)`` per drive direction.

    With ``direction="both"`` the output also carries ``eta_db``. Points where
    a solve fails come back as NaN rows rather than raising.
    """

    def __init__(self, kappa1=0.9, gamma=0.7, g=1.0, delta_c=1.0, delta_a=0.6,
                 b_in=0.02, omega_p=0.0, theta_p=0.0, features=("delta_c",),
                 direction="forward", solver="lindblad", pump="fixed",
                 pump_direction="forward", pump_reference=None, pump_branch="auto",
                 n_max=10):
        self.kappa1 = kappa1
        self.gamma = gamma
        self.g = g
        self.delta_c = delta_c
        self.delta_a = delta_a
        self.b_in = b_in
        self.omega_p = omega_p
        self.theta_p = theta_p
        self.features = features
        self.direction = direction
        self.solver = solver
        self.pump = pump
        self.pump_direction = pump_direction
        self.pump_reference = pump_reference
        self.pump_branch = pump_branch
        self.n_max = n_max

    def fit(self, X=None, y=None):
        features = tuple(self.features)
        unknown = [f for f in features if f not in SWEEPABLE]
        if unknown or len(set(features)) != len(features) or not features:
            raise ParameterError(f"features must be distinct names from {SWEEPABLE}")
        if self.solver not in ("amplitudes", "lindblad"):
            raise ParameterError("solver must be 'amplitudes' or 'lindblad'")
        if self.direction not in ("forward", "backward", "both"):
            raise ParameterError("direction must be forward, backward or both")
        self.base_params_ = SystemParams(
            kappa1=self.kappa1, kappa2=1.0 - self.kappa1, gamma=self.gamma, g=self.g,
            delta_c=self.delta_c, delta_a=self.delta_a, b_in=self.b_in,
            omega_p=self.omega_p, theta_p=self.theta_p)
        self.pump_mode_ = PumpMode(self.pump, Direction(self.pump_direction),
                                   self.pump_reference, self.pump_branch)
        self.directions_ = ((Direction.FORWARD, Direction.BACKWARD)
                            if self.direction == "both" else (Direction(self.direction),))
        self.features_ = features
        self.n_features_in_ = len(features)
        return self

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "features_")
        if len(self.directions_) == 1:
            return np.array(_PER_DIRECTION, dtype=object)
        names = [f"{q}_{d.value[0]}" for d in self.directions_ for q in _PER_DIRECTION]
        return np.array(names + ["eta_db"], dtype=object)

    def _row(self, values) -> list[float]:
        out = []
        try:
            params = self.base_params_.replace(**dict(zip(self.features_, map(float, values))))
            pumped, _ = resolve_pump(self.pump_mode_, params, self.features_)
            for d in self.directions_:
                if self.solver == "amplitudes":
                    n, second, third, _ = solve_amplitudes(pumped, d)
                else:
                    n, second, third, _ = solve_lindblad(pumped, d, self.n_max)
                out += [second, third, n]
        except BlockadeSimError:
            return [math.nan] * len(self.get_feature_names_out())
        if len(self.directions_) == 2:
            try:
                out.append(nonreciprocal_ratio(out[0], out[3]))
            except ParameterError:
                out.append(math.nan)
        return out

    def transform(self, X):
        check_is_fitted(self, "features_")
        X = check_array(X, ensure_min_features=self.n_features_in_)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        return np.array([self._row(row) for row in X], dtype=float)

    def predict(self, X):
        """Forward (or the single configured direction's) g2 per row."""
        return self.transform(X)[:, 0]
