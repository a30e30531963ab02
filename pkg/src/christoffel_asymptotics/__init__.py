"""Christoffel functions of power-type measures and their limit constants.

The package computes lambda_n(mu, z0) at extended precision for measures
w(z)|z - z0|^alpha ds on intervals, circles, polynomial lemniscates and
parametric arcs, and compares n^kappa lambda_n with closed-form limits built
from equilibrium densities and Bessel-kernel constants.
"""

from .asymptotics import Prediction, extrapolate, predict_endpoint, predict_interior
from .bessel import L_alpha, bessel_j, bessel_zero, bessel_zeros, kernel_Jcal, kernel_square_integral
from .christoffel import ChristoffelResult, IllConditionedError, extremal_polynomial, lambda_n, lambda_sweep
from .equilibrium import (
    density_circle,
    density_intervals,
    density_lemniscate,
    endpoint_constant,
    gap_roots,
)
from .geometry import CircularArc, Lemniscate, ParametricArc, RealInterval, UnitCircle
from .measures import PowerWeightMeasure, gram, make_measure, sqrt_pullback, total_mass
from .polynomials import ComplexPolynomial
from .quadrature import QuadratureError, gauss_jacobi, integrate_singular

__version__ = "0.1.0"

__all__ = [
    "Prediction",
    "extrapolate",
    "predict_endpoint",
    "predict_interior",
    "L_alpha",
    "bessel_j",
    "bessel_zero",
    "bessel_zeros",
    "kernel_Jcal",
    "kernel_square_integral",
    "ChristoffelResult",
    "IllConditionedError",
    "extremal_polynomial",
    "lambda_n",
    "lambda_sweep",
    "density_circle",
    "density_intervals",
    "density_lemniscate",
    "endpoint_constant",
    "gap_roots",
    "CircularArc",
    "Lemniscate",
    "ParametricArc",
    "RealInterval",
    "UnitCircle",
    "PowerWeightMeasure",
    "gram",
    "make_measure",
    "sqrt_pullback",
    "total_mass",
    "ComplexPolynomial",
    "QuadratureError",
    "gauss_jacobi",
    "integrate_singular",
]
