"""Gauss-Jacobi rules at arbitrary precision and singular/arc integration helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable

import gmpy2
import numpy as np
from gmpy2 import mpfr
from scipy.linalg import eigh_tridiagonal

from ._xp import workprec

__all__ = [
    "QuadratureError",
    "QuadratureRule",
    "gauss_jacobi",
    "gauss_legendre",
    "jacobi_recurrence",
    "integrate_singular",
    "integrate_arc",
]


class QuadratureError(ArithmeticError):
    """Raised when a rule or an integral cannot be computed to the requested accuracy.

    Attributes
    ----------
    order : int or None
        Rule order whose node solver failed, if applicable.
    estimate : float or None
        Best available value of the integral.
    error : float or None
        Achieved error estimate of ``estimate``.
    """

    def __init__(self, message, *, order=None, estimate=None, error=None):
        super().__init__(message)
        self.order = order
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the weight (1-x)^p (1+x)^q on [-1, 1].

    ``nodes`` and ``weights`` are gmpy2 ``mpfr`` numbers at ``prec`` bits;
    the float views ``x`` and ``w`` are provided for double-precision work.
    """

    nodes: tuple
    weights: tuple
    exponents: tuple[float, float]
    order: int
    prec: int

    @cached_property
    def x(self) -> np.ndarray:
        return np.array([float(t) for t in self.nodes])

    @cached_property
    def w(self) -> np.ndarray:
        return np.array([float(t) for t in self.weights])

    def mapped(self, a, b):
        """Nodes and weights for the weight (b-u)^p (u-a)^q on [a, b].

        ``a`` and ``b`` should be numbers at the current gmpy2 precision.
        """
        p, q = self.exponents
        a = mpfr(a)
        b = mpfr(b)
        half = (b - a) / 2
        scale = half ** (mpfr(p) + mpfr(q) + 1)
        mid = (a + b) / 2
        return [mid + half * t for t in self.nodes], [scale * v for v in self.weights]


def jacobi_recurrence(m: int, p, q):
    """Monic recurrence coefficients for the Jacobi weight, at the current precision.

    Returns ``(a, b2, mu0)`` with ``a[k]`` for k = 0..m-1, ``b2[k]`` for
    k = 1..m-1 (``b2[0]`` is a placeholder) and ``mu0`` the total mass.
    """
    p = mpfr(p)
    q = mpfr(q)
    s = p + q
    a = []
    b2 = [mpfr(0)]
    for k in range(m):
        if k == 0:
            a.append((q - p) / (s + 2))
        else:
            d = 2 * k + s
            a.append((q * q - p * p) / (d * (d + 2)))
    for k in range(1, m):
        d = 2 * k + s
        if k == 1:
            # the generic formula has a removable 0/0 when p + q = -1
            b2.append(4 * (1 + p) * (1 + q) / ((2 + s) ** 2 * (3 + s)))
        else:
            b2.append(4 * k * (k + p) * (k + q) * (k + s) / (d * d * (d + 1) * (d - 1)))
    mu0 = 2 ** (s + 1) * gmpy2.gamma(p + 1) * gmpy2.gamma(q + 1) / gmpy2.gamma(s + 2)
    return a, b2, mu0


def _orthonormal_eval(x, m, a, sb, p0):
    """Degree-m orthonormal value and derivative, and the degree m-1 value."""
    prev, cur = mpfr(0), p0
    dprev, dcur = mpfr(0), mpfr(0)
    for k in range(m):
        xa = x - a[k]
        nxt = (xa * cur - sb[k] * prev) / sb[k + 1]
        dprev, dcur = dcur, (xa * dcur + cur - sb[k] * dprev) / sb[k + 1]
        prev, cur = cur, nxt
    return cur, dcur, prev


def _coefficients(m, p, q, prec):
    with workprec(prec):
        a, b2, mu0 = jacobi_recurrence(m + 1, p, q)
        sb = [gmpy2.sqrt(t) for t in b2]
        p0 = 1 / gmpy2.sqrt(mu0)
    return a, sb, p0


def _seeds(order, p, q):
    with workprec(64):
        a, b2, _ = jacobi_recurrence(order, p, q)
    diag = np.array([float(t) for t in a[:order]])
    if order == 1:
        return diag.copy()
    off = np.array([math.sqrt(float(t)) for t in b2[1:order]])
    return np.sort(eigh_tridiagonal(diag, off, eigvals_only=True))


def _bisect_node(lo, hi, order, coeffs, prec):
    a, sb, p0 = coeffs
    with workprec(prec):
        lo, hi = mpfr(lo), mpfr(hi)
        flo = _orthonormal_eval(lo, order, a, sb, p0)[0]
        fhi = _orthonormal_eval(hi, order, a, sb, p0)[0]
        if flo * fhi > 0:
            return None
        for _ in range(prec + 8):
            mid = (lo + hi) / 2
            fm = _orthonormal_eval(mid, order, a, sb, p0)[0]
            if fm == 0:
                return mid
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        return (lo + hi) / 2


def _polish(seed, order, coeffs, ramp, prec):
    """Newton iteration with a precision ramp; returns (node, weight) or None."""
    a, sb, p0 = coeffs
    work = ramp[-1]
    x = mpfr(float(seed))
    for bits in ramp:
        with workprec(bits):
            f, df, _ = _orthonormal_eval(x, order, a, sb, p0)
            if df == 0:
                return None
            x = x - f / df
    with workprec(work):
        f, df, pm1 = _orthonormal_eval(x, order, a, sb, p0)
        if df == 0 or not -1 < x < 1:
            return None
        if abs(f / df) > mpfr(2) ** (-prec - 4):
            return None
        # Christoffel-Darboux at a zero: sum_{k<m} p_k^2 = b_m p_m' p_{m-1}
        return x, 1 / (sb[order] * df * pm1)


def _weight_at(x, order, coeffs, work):
    a, sb, p0 = coeffs
    with workprec(work):
        _, df, pm1 = _orthonormal_eval(x, order, a, sb, p0)
        return 1 / (sb[order] * df * pm1)


@lru_cache(maxsize=512)
def _gauss_jacobi_cached(order: int, p: float, q: float, prec: int) -> QuadratureRule:
    seeds = _seeds(order, p, q)
    work = prec + 24
    coeffs = _coefficients(order, p, q, work)
    ramp = []
    bits = 106
    while bits < work:
        ramp.append(bits)
        bits *= 2
    ramp.append(work)
    symmetric = p == q
    count = (order + 1) // 2 if symmetric else order
    nodes, weights = [], []
    for i in range(count):
        seed = seeds[i]
        res = _polish(seed, order, coeffs, ramp, prec)
        if res is None or (nodes and res[0] <= nodes[-1]):
            lo = -1.0 if i == 0 else 0.5 * (seeds[i - 1] + seed)
            hi = 1.0 if i == order - 1 else 0.5 * (seeds[i + 1] + seed)
            x = _bisect_node(lo, hi, order, coeffs, work)
            if x is None or (nodes and x <= nodes[-1]):
                raise QuadratureError(f"Gauss-Jacobi node solver failed for order {order}", order=order)
            res = (x, _weight_at(x, order, coeffs, work))
        nodes.append(res[0])
        weights.append(res[1])
    with workprec(prec):
        if symmetric:
            if order % 2:
                nodes[-1] = mpfr(0)
                mirror_n = [-t for t in reversed(nodes[:-1])]
                mirror_w = list(reversed(weights[:-1]))
            else:
                mirror_n = [-t for t in reversed(nodes)]
                mirror_w = list(reversed(weights))
            nodes = nodes + mirror_n
            weights = weights + mirror_w
        nodes = tuple(+t for t in nodes)
        weights = tuple(+t for t in weights)
    return QuadratureRule(nodes, weights, (p, q), order, prec)


def gauss_jacobi(order: int, p: float, q: float, prec: int = 53) -> QuadratureRule:
    """Gauss-Jacobi rule of ``order`` nodes for (1-x)^p (1+x)^q on [-1, 1].

    Nodes are seeded by the eigenvalues of the Jacobi matrix in double
    precision and polished by Newton's method on the orthonormal recurrence
    with a precision ramp up to ``prec`` bits. Rules are cached.

    Raises:
        QuadratureError: if neither Newton nor the bisection fallback
            isolates a node.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    if p <= -1 or q <= -1:
        raise ValueError("exponents must exceed -1")
    return _gauss_jacobi_cached(int(order), float(p), float(q), int(prec))


def gauss_legendre(order: int, prec: int = 53) -> QuadratureRule:
    return gauss_jacobi(order, 0.0, 0.0, prec)


def _evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x))
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([f(t.item()) for t in x])


class _Panel:
    __slots__ = ("a", "b", "left", "right", "depth", "value", "error")

    def __init__(self, a, b, left, right, depth):
        self.a, self.b = a, b
        self.left, self.right = left, right
        self.depth = depth


def _panel_rules(m: int, left: float, right: float):
    # (1-x)^p weights the right end, (1+x)^q the left end
    return gauss_jacobi(m, right, left), gauss_jacobi(2 * m, right, left)


def _eval_panel(f, panel: _Panel, m: int):
    lo_rule, hi_rule = _panel_rules(m, panel.left, panel.right)
    a, b = panel.a, panel.b
    half = 0.5 * (b - a)
    scale = half ** (panel.left + panel.right + 1.0)
    vals = []
    for rule in (lo_rule, hi_rule):
        x = a + half * (1.0 + rule.x)
        vals.append(scale * np.dot(rule.w, _evaluate(f, x)))
    panel.value = vals[1]
    panel.error = abs(vals[1] - vals[0])


def integrate_singular(
    f: Callable,
    a: float,
    b: float,
    s: float | None = None,
    alpha: float | None = None,
    tol: float = 1e-12,
    *,
    order: int = 20,
    max_panel: float | None = None,
    max_panels: int = 4000,
    return_error: bool = False,
):
    """Integrate f(x)|x-s|^alpha over [a, b] with an adaptive composite Gauss scheme.

    The panels touching ``s`` use Gauss-Jacobi rules with the singular
    exponent; all others use Gauss-Legendre. Each panel is estimated with
    ``order`` and ``2*order`` nodes and the panel with the largest error is
    bisected until the total error is below ``tol * max(1, |I|)``.

    Args:
        f: Integrand, called with numpy arrays when possible.
        a, b: Integration limits, ``a < b``.
        s: Optional location of the algebraic singularity, ``a <= s <= b``.
        alpha: Exponent of ``|x-s|``, ``alpha > -1``.
        tol: Requested accuracy.
        max_panel: Optional upper bound on initial panel length.
        return_error: Also return the error estimate.

    Raises:
        QuadratureError: when the panel budget is exhausted first.
    """
    if not a < b:
        raise ValueError("need a < b")
    if s is not None:
        if alpha is None:
            raise ValueError("alpha is required with s")
        if alpha <= -1:
            raise ValueError("alpha must exceed -1")
        if not a <= s <= b:
            raise ValueError("singular point outside [a, b]")
    ex = 0.0 if s is None or alpha == 0 else float(alpha)

    if s is None or ex == 0.0:
        g = f
    else:
        def g(x):
            return _evaluate(f, x) * np.abs(x - s) ** ex

    breaks = [a, b] if s is None or s in (a, b) else [a, s, b]
    pieces = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        count = 1 if max_panel is None else max(1, math.ceil((hi - lo) / max_panel))
        edges = np.linspace(lo, hi, count + 1)
        for u, v in zip(edges[:-1], edges[1:]):
            left = ex if s is not None and u == s else 0.0
            right = ex if s is not None and v == s else 0.0
            pieces.append(_Panel(float(u), float(v), left, right, 0))

    def integrand_for(panel):
        if panel.left == 0.0 and panel.right == 0.0:
            return g
        return f

    for panel in pieces:
        _eval_panel(integrand_for(panel), panel, order)

    while True:
        total = math.fsum(p.value for p in pieces)
        err = math.fsum(p.error for p in pieces)
        if err <= tol * max(1.0, abs(total)):
            return (total, err) if return_error else total
        if len(pieces) >= max_panels:
            raise QuadratureError(
                f"integrate_singular: tolerance {tol} not reached", estimate=total, error=err
            )
        worst = max(range(len(pieces)), key=lambda i: pieces[i].error)
        p = pieces.pop(worst)
        if p.depth > 60:
            raise QuadratureError("integrate_singular: refinement too deep", estimate=total, error=err)
        if p.left or p.right:
            # dyadic refinement toward the singular end
            cut = p.a + 0.5 * (p.b - p.a)
            if p.left and not p.right:
                cut = p.a + 0.25 * (p.b - p.a)
            elif p.right and not p.left:
                cut = p.a + 0.75 * (p.b - p.a)
            kids = [_Panel(p.a, cut, p.left, 0.0, p.depth + 1), _Panel(cut, p.b, 0.0, p.right, p.depth + 1)]
        else:
            mid = 0.5 * (p.a + p.b)
            kids = [_Panel(p.a, mid, 0.0, 0.0, p.depth + 1), _Panel(mid, p.b, 0.0, 0.0, p.depth + 1)]
        for k in kids:
            _eval_panel(integrand_for(k), k, order)
        pieces.extend(kids)


def integrate_arc(component, g: Callable, tol: float = 1e-12) -> float:
    """Arc-length integral of g over a support component via its parametrization.

    ``component`` is any object exposing ``pieces()`` whose items provide
    ``lo``, ``hi`` and ``eval(u) -> (z, dz/du)`` on numpy arrays (see
    :mod:`christoffel_asymptotics.measures`).
    """
    total = 0.0
    pieces = component.pieces()
    for piece in pieces:
        def h(u, piece=piece):
            z, dz = piece.eval(np.asarray(u, dtype=float))
            return _evaluate(g, z) * np.abs(dz)

        span = piece.hi - piece.lo
        total += integrate_singular(h, piece.lo, piece.hi, tol=tol / len(pieces), max_panel=span / 8)
    return total
