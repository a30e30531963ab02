"""Limit predictors for n^kappa lambda_n and a first-order extrapolator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bessel import L_alpha, endpoint_gamma_constant

__all__ = ["Prediction", "predict_interior", "predict_endpoint", "extrapolate", "Extrapolation"]


@dataclass(frozen=True)
class Prediction:
    """Predicted limit of n^kappa lambda_n.

    Attributes:
        kind: ``"interior"`` or ``"endpoint"``.
        kappa: Scaling exponent (alpha + 1 interior, 2 alpha + 2 endpoint).
        limit: The predicted limit.
        inputs: Echo of (w0, omega0 or M, alpha).
    """

    kind: str
    kappa: float
    limit: float
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.limit > 0 and self.kappa > 0):
            raise ValueError("prediction needs a positive limit and exponent")


def _check(w0, dens, alpha):
    if not w0 > 0:
        raise ValueError("w0 must be positive")
    if not dens > 0:
        raise ValueError("density constant must be positive")
    if not alpha > -1:
        raise ValueError("alpha must exceed -1")


def predict_interior(w0: float, omega0: float, alpha: float) -> Prediction:
    """Interior limit w0 L_alpha / (pi omega0)^(alpha+1)."""
    _check(w0, omega0, alpha)
    limit = w0 * L_alpha(alpha) / (math.pi * omega0) ** (alpha + 1.0)
    return Prediction("interior", alpha + 1.0, limit, {"w0": w0, "omega0": omega0, "alpha": alpha})


def predict_endpoint(w0: float, M: float, alpha: float) -> Prediction:
    """Endpoint limit w0 Gamma(alpha+1) Gamma(alpha+2) / (pi M)^(2 alpha + 2)."""
    _check(w0, M, alpha)
    limit = w0 * endpoint_gamma_constant(alpha) / (math.pi * M) ** (2.0 * alpha + 2.0)
    return Prediction("endpoint", 2.0 * alpha + 2.0, limit, {"w0": w0, "M": M, "alpha": alpha})


@dataclass(frozen=True)
class Extrapolation:
    limit: float
    residual: float
    slope: float = math.nan
    used: tuple = ()

    def __iter__(self):
        # unpacks as (limit_estimate, fit_residual)
        yield self.limit
        yield self.residual


def extrapolate(pairs: Sequence[tuple[float, float]]) -> Extrapolation:
    """Fit value ~ c0 + c1/n by least squares over the trailing half of the ladder.

    Returns ``(c0, rms residual)``; a degenerate fit returns the last value
    with an infinite residual.
    """
    pairs = [(float(n), float(v)) for n, v in pairs]
    if len(pairs) < 3:
        raise ValueError("extrapolation needs at least 3 pairs")
    if any(pairs[i][0] >= pairs[i + 1][0] for i in range(len(pairs) - 1)):
        raise ValueError("n must be increasing")
    tail = pairs[len(pairs) // 2:]
    if len(tail) < 2:
        return Extrapolation(pairs[-1][1], math.inf, math.nan, tuple(pairs[-1:]))
    ns = np.array([p[0] for p in tail])
    vs = np.array([p[1] for p in tail])
    A = np.column_stack([np.ones_like(ns), 1.0 / ns])
    if not np.all(np.isfinite(vs)) or np.linalg.matrix_rank(A) < 2:
        return Extrapolation(pairs[-1][1], math.inf, math.nan, tuple(tail))
    coef, *_ = np.linalg.lstsq(A, vs, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - vs) ** 2)))
    return Extrapolation(float(coef[0]), resid, float(coef[1]), tuple(tail))
