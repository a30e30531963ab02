"""Bessel functions of the first kind, the normalized Bessel kernel and its zeros.

Double-precision evaluators built from scratch: a Lanczos gamma function, a
power series (summed in extended precision to avoid cancellation) and the
Hankel asymptotic expansion for large arguments.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import mpmath
import numpy as np

__all__ = [
    "gamma",
    "bessel_j",
    "bessel_j_derivative",
    "kernel_Jcal",
    "bessel_zero",
    "bessel_zeros",
    "L_alpha",
    "endpoint_gamma_constant",
    "kernel_square_integral",
    "BesselKernel",
    "series_switch_point",
]

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def gamma(x: float) -> float:
    """Gamma function by the Lanczos approximation with reflection.

    Relative error is below 1e-13 on (0, 20); poles at non-positive
    integers raise ``ValueError``.
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    # split the power to postpone overflow for larger arguments
    half = t ** (0.5 * (x + 0.5))
    return _SQRT_2PI * half * half * math.exp(-t) * acc


def series_switch_point(beta: float) -> float:
    """Argument above which the Hankel expansion is used instead of the series."""
    return max(20.0, 2.0 * abs(beta), beta * beta)


def _series(beta: float, x: float, normalized: bool) -> float:
    """Power series for J_beta(x), or for the kernel if ``normalized``.

    Terms alternate and grow like exp(x) before decaying, so the sum is done
    in binary floating point with enough guard bits to absorb cancellation.
    """
    if x == 0.0:
        if normalized or beta == 0.0:
            return 1.0
        return 0.0
    guard = int(x * 1.45) + 30
    with mpmath.workprec(53 + guard):
        b = mpmath.mpf(beta)
        h = mpmath.mpf(x) / 2
        q = h * h
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        k = 0
        eps = mpmath.mpf(2) ** (-(60 + guard))
        while True:
            k += 1
            term = -term * q / (k * (k + b))
            total += term
            if abs(term) < eps * (1 + abs(total)) and k > h:
                break
        if normalized:
            return float(total)
        if b == 0:
            return float(total)
        return float(total * mpmath.power(h, b) / mpmath.gamma(b + 1))


def _hankel(beta: np.ndarray | float, x: np.ndarray) -> np.ndarray:
    """Hankel asymptotic expansion of J_beta(x), truncated at its smallest term."""
    x = np.asarray(x, dtype=float)
    mu = 4.0 * beta * beta
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    last = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 60):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        active &= mag < last
        if not active.any():
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        contrib = np.where(active, sign * term, 0.0)
        if k % 2:
            q += contrib
        else:
            p += contrib
        last = np.where(active, mag, last)
        active &= mag > 1e-18
    chi = x - (0.5 * beta + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(beta: float, x):
    """Bessel function of the first kind J_beta(x) for x >= 0.

    Parameters
    ----------
    beta : float
        Order, ``beta > -1``.
    x : float or array_like
        Non-negative argument(s).

    Returns
    -------
    float or numpy.ndarray
        Absolute accuracy about 1e-13 on [0, 1000].
    """
    if beta <= -1.0:
        raise ValueError("order must exceed -1")
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < 0):
        raise ValueError("argument must be non-negative")
    out = np.empty_like(xs)
    cut = series_switch_point(beta)
    big = xs > cut
    if big.any():
        out[big] = _hankel(beta, xs[big])
    for i in np.flatnonzero(~big):
        out[i] = _series(beta, float(xs[i]), normalized=False)
    return float(out[0]) if scalar else out


def bessel_j_derivative(beta: float, x):
    """Derivative of J_beta from the recurrence J' = (beta/x) J_beta - J_{beta+1}."""
    if np.isscalar(x):
        x = float(x)
        return beta / x * bessel_j(beta, x) - bessel_j(beta + 1.0, x)
    xs = np.asarray(x, dtype=float)
    return beta / xs * bessel_j(beta, xs) - bessel_j(beta + 1.0, xs)


def kernel_Jcal(beta: float, z):
    """Normalized kernel 2^beta Gamma(beta+1) J_beta(z) / z^beta, equal to 1 at 0.

    The function is even, so negative arguments are accepted.
    """
    if beta <= 0.0:
        raise ValueError("kernel order must be positive")
    scalar = np.isscalar(z)
    zs = np.abs(np.atleast_1d(np.asarray(z, dtype=float)))
    out = np.empty_like(zs)
    cut = series_switch_point(beta)
    big = zs > cut
    if big.any():
        zb = zs[big]
        scale = 2.0**beta * gamma(beta + 1.0)
        out[big] = scale * _hankel(beta, zb) / zb**beta
    for i in np.flatnonzero(~big):
        out[i] = _series(beta, float(zs[i]), normalized=True)
    return float(out[0]) if scalar else out


_ZERO_CACHE: dict[float, list[float]] = {}
_ZERO_LOCK = threading.Lock()


def _bisect_root(beta: float, lo: float, hi: float) -> float:
    flo = bessel_j(beta, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = bessel_j(beta, mid)
        if fm == 0.0 or hi - lo < 1e-15 * max(1.0, hi):
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _newton_root(beta: float, x: float) -> float | None:
    for _ in range(60):
        f = bessel_j(beta, x)
        df = float(bessel_j_derivative(beta, x))
        if df == 0.0:
            return None
        step = f / df
        x -= step
        if x <= 0 or not math.isfinite(x):
            return None
        if abs(step) < 1e-15 * x:
            return x
    return None


def _no_sign_change(beta: float, lo: float, hi: float) -> bool:
    if hi - lo < 0.2:
        return True
    grid = np.linspace(lo, hi, max(3, int((hi - lo) / 0.25) + 2))
    vals = bessel_j(beta, grid)
    return bool(np.all(vals > 0) or np.all(vals < 0))


def _next_zero(beta: float, k: int, prev: float) -> float:
    seed = (k + 0.5 * beta - 0.25) * math.pi
    root = _newton_root(beta, seed)
    # j_{beta,1} > beta; near 0 the function is tiny without vanishing
    lower = prev if k > 1 else max(0.0, beta)
    if root is not None and root > lower + 1e-6:
        # the bracket (lower, root) must not hide another zero
        if _no_sign_change(beta, lower + 0.2, root - 0.2):
            return root
    # sign-change scan from the previous zero
    step = 0.25
    x = max(lower + 0.1, 1e-3)
    fx = bessel_j(beta, x)
    while True:
        y = x + step
        fy = bessel_j(beta, y)
        if fx == 0.0:
            return x
        if (fx > 0) != (fy > 0):
            r = _bisect_root(beta, x, y)
            polished = _newton_root(beta, r)
            if polished is not None and abs(polished - r) < 1e-9:
                return polished
            return r
        x, fx = y, fy
        if x > seed + 10.0 * (1.0 + beta):
            raise RuntimeError(f"failed to locate zero {k} of J_{beta}")


def bessel_zeros(beta: float, count: int) -> list[float]:
    """First ``count`` positive zeros of J_beta, cached per order."""
    if beta < 0.0:
        raise ValueError("order must be non-negative")
    key = float(beta)
    with _ZERO_LOCK:
        zeros = _ZERO_CACHE.setdefault(key, [])
        while len(zeros) < count:
            prev = zeros[-1] if zeros else 0.0
            zeros.append(_next_zero(key, len(zeros) + 1, prev))
        return list(zeros[:count])


def bessel_zero(beta: float, k: int) -> float:
    """The k-th positive zero of J_beta (k >= 1)."""
    if k < 1:
        raise ValueError("zero index starts at 1")
    return bessel_zeros(beta, k)[k - 1]


def L_alpha(alpha: float) -> float:
    """Interior limit constant 2^(alpha+1) Gamma((alpha+1)/2) Gamma((alpha+3)/2)."""
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1")
    return 2.0 ** (alpha + 1.0) * gamma(0.5 * (alpha + 1.0)) * gamma(0.5 * (alpha + 3.0))


def endpoint_gamma_constant(alpha: float) -> float:
    """Gamma(alpha+1) Gamma(alpha+2), the endpoint counterpart of ``L_alpha``."""
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1")
    return gamma(alpha + 1.0) * gamma(alpha + 2.0)


def kernel_square_integral(alpha: float, A: float, tol: float = 1e-12) -> float:
    """Integral of kernel(x)^2 |x|^alpha over [-A, A], kernel of order (alpha+1)/2."""
    from .quadrature import integrate_singular

    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1")
    if A <= 0:
        raise ValueError("A must be positive")
    beta = 0.5 * (alpha + 1.0)

    def f(x):
        v = kernel_Jcal(beta, x)
        return v * v

    half = integrate_singular(f, 0.0, float(A), s=0.0, alpha=alpha, tol=0.5 * tol, max_panel=2.0)
    return 2.0 * half


@dataclass
class BesselKernel:
    """Kernel of order ``beta`` with a lazily grown zero table."""

    beta: float
    zero_cache: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("order must be positive")

    def __call__(self, z):
        return kernel_Jcal(self.beta, z)

    def zero(self, k: int) -> float:
        if len(self.zero_cache) < k:
            self.zero_cache = bessel_zeros(self.beta, k)
        return self.zero_cache[k - 1]

    def zeros(self, count: int) -> list[float]:
        if len(self.zero_cache) < count:
            self.zero_cache = bessel_zeros(self.beta, count)
        return self.zero_cache[:count]
