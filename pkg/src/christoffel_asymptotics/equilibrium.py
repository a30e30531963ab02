"""Equilibrium densities of interval unions, circles and polynomial lemniscates.

For a union of intervals [a_0, a_1] u ... u [a_{2k}, a_{2k+1}] the density is

    omega(x) = prod |x - l_j| / (pi sqrt(prod |x - a_j|)),

with one root l_j in every gap, fixed by the vanishing of the gap integrals.
For a lemniscate {|T| = 1} of a degree-N polynomial it is |T'| / (2 pi N).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .geometry import CircularArc, Lemniscate, RealInterval, TWO_PI
from .polynomials import ComplexPolynomial, aberth_roots
from .quadrature import gauss_jacobi, gauss_legendre, integrate_arc

__all__ = [
    "EquilibriumError",
    "EquilibriumDensity",
    "IntervalUnion",
    "CircleDensity",
    "LemniscateDensity",
    "gap_roots",
    "gap_integrals",
    "density_intervals",
    "density_circle",
    "density_lemniscate",
    "endpoint_constant",
    "density_for",
    "pushforward_residual",
    "symmetrization_residual",
]

_GAP_ORDER = 64


class EquilibriumError(ValueError):
    """Invalid input or an inconsistent gap-root solution."""


def _check_endpoints(endpoints) -> tuple:
    a = tuple(float(x) for x in endpoints)
    if len(a) < 2 or len(a) % 2:
        raise EquilibriumError("need an even number (>= 2) of endpoints")
    if any(not a[i] < a[i + 1] for i in range(len(a) - 1)):
        raise EquilibriumError("endpoints must be strictly increasing")
    return a


def _gap_moments(a: tuple) -> np.ndarray:
    """I[g, m] = integral over gap g of t^m / sqrt(prod |t - a_j|), m = 0..k."""
    k = len(a) // 2 - 1
    rule = gauss_jacobi(_GAP_ORDER, -0.5, -0.5)
    u, wts = rule.x, rule.w
    out = np.zeros((k, k + 1))
    for g in range(k):
        lo, hi = a[2 * g + 1], a[2 * g + 2]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        t = mid + half * u
        others = np.ones_like(t)
        for j, aj in enumerate(a):
            if j not in (2 * g + 1, 2 * g + 2):
                others *= np.abs(t - aj)
        # (hi - t)(t - lo) = half^2 (1 - u^2) and dt = half du
        base = wts / np.sqrt(others)
        for m in range(k + 1):
            out[g, m] = np.sum(base * t**m)
    return out


def gap_integrals(endpoints: Sequence[float], roots: Sequence[float]) -> np.ndarray:
    """The defining gap integrals of prod (t - l_j) / sqrt(prod |t - a_j|)."""
    a = _check_endpoints(endpoints)
    k = len(a) // 2 - 1
    if len(roots) != k:
        raise EquilibriumError("one root per gap expected")
    mom = _gap_moments(a)
    coeffs = np.polynomial.polynomial.polyfromroots(list(roots)) if k else np.array([1.0])
    return mom @ coeffs


def gap_roots(endpoints: Sequence[float]) -> list[float]:
    """Roots l_0 < ... < l_{k-1}, one in each gap (a_{2j+1}, a_{2j+2}).

    The monic gap polynomial q(t) = t^k + c_{k-1} t^{k-1} + ... + c_0 makes
    every gap integral vanish; the conditions are linear in c. Roots are then
    isolated by bisection inside each gap.

    Raises:
        EquilibriumError: if a root is not bracketed by its gap.
    """
    a = _check_endpoints(endpoints)
    k = len(a) // 2 - 1
    if k == 0:
        return []
    mom = _gap_moments(a)
    # scale rows for conditioning
    mom = mom / np.max(np.abs(mom), axis=1, keepdims=True)
    c = np.linalg.solve(mom[:, :k], -mom[:, k])
    coeffs = np.concatenate([c, [1.0]])

    def q(t):
        return np.polynomial.polynomial.polyval(t, coeffs)

    roots = []
    for g in range(k):
        lo, hi = a[2 * g + 1], a[2 * g + 2]
        qlo, qhi = q(lo), q(hi)
        if qlo == 0:
            roots.append(lo)
            continue
        if qlo * qhi > 0:
            raise EquilibriumError(f"gap root not bracketed in ({lo}, {hi})")
        roots.append(float(optimize.bisect(q, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)))
    return roots


class EquilibriumDensity:
    """Common interface: ``eval(z)`` and ``cumulative(ref, z)``."""

    kind = "abstract"

    def eval(self, z):  # pragma: no cover - interface
        raise NotImplementedError

    def cumulative(self, ref, z) -> float:  # pragma: no cover - interface
        raise NotImplementedError

    def locate_mass(self, ref, mass: float):  # pragma: no cover - interface
        raise NotImplementedError

    def mass(self) -> float:  # pragma: no cover - interface
        raise NotImplementedError

    def moment(self, ref, z, f: Callable):  # pragma: no cover - interface
        raise NotImplementedError

    def __call__(self, z):
        return self.eval(z)


@dataclass(frozen=True)
class IntervalUnion(EquilibriumDensity):
    """Equilibrium density of a finite union of disjoint closed intervals.

    Attributes
    ----------
    endpoints : tuple of float
        a_0 < a_1 < ... < a_{2k+1}.
    gap_roots : tuple of float
        One root per gap.
    """

    endpoints: tuple
    gap_roots: tuple
    kind: str = field(default="interval_union", init=False)

    @property
    def intervals(self) -> list[tuple[float, float]]:
        a = self.endpoints
        return [(a[2 * i], a[2 * i + 1]) for i in range(len(a) // 2)]

    def eval(self, x):
        """Density at real x; inf at an endpoint, 0 outside the support."""
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=complex))
        if np.any(np.abs(xs.imag) > 1e-12):
            raise EquilibriumError("interval-union density is defined on the real line")
        xr = xs.real
        num = np.ones_like(xr)
        for lj in self.gap_roots:
            num *= np.abs(xr - lj)
        den = np.ones_like(xr)
        for aj in self.endpoints:
            den *= np.abs(xr - aj)
        inside = np.zeros(xr.shape, dtype=bool)
        for lo, hi in self.intervals:
            inside |= (xr >= lo) & (xr <= hi)
        with np.errstate(divide="ignore"):
            out = np.where(den > 0, num / (math.pi * np.sqrt(np.where(den > 0, den, 1.0))), math.inf)
        out = np.where(inside, out, 0.0)
        return float(out[0]) if scalar else out

    def _theta_integrand(self, i):
        lo, hi = self.intervals[i]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        others = [aj for j, aj in enumerate(self.endpoints) if j not in (2 * i, 2 * i + 1)]

        def g(theta):
            # x = mid - half cos(theta) runs from lo to hi; dx / sqrt((hi-x)(x-lo)) = dtheta
            x = mid - half * np.cos(theta)
            num = np.ones_like(x)
            for lj in self.gap_roots:
                num = num * np.abs(x - lj)
            den = np.ones_like(x)
            for aj in others:
                den = den * np.abs(x - aj)
            return num / (math.pi * np.sqrt(den))

        return g, mid, half

    def _theta(self, i, x):
        lo, hi = self.intervals[i]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return math.acos(min(1.0, max(-1.0, (mid - x) / half)))

    def _partial(self, i, t1, t2):
        """Mass over theta in [t1, t2] on interval i."""
        if t1 == t2:
            return 0.0
        g, _, _ = self._theta_integrand(i)
        rule = gauss_legendre(48)
        h = 0.5 * (t2 - t1)
        c = 0.5 * (t1 + t2)
        v1 = h * float(np.sum(rule.w * g(c + h * rule.x)))
        rule2 = gauss_legendre(96)
        v2 = h * float(np.sum(rule2.w * g(c + h * rule2.x)))
        if abs(v1 - v2) <= 1e-14 * max(1.0, abs(v2)):
            return v2
        val, _ = integrate.quad(g, t1, t2, epsabs=1e-15, epsrel=1e-14, limit=400)
        return float(val)

    def moment(self, ref, x, f: Callable):
        """Integral of f against the equilibrium measure from ``ref`` to ``x`` (same interval)."""
        ref, x = float(np.real(ref)), float(np.real(x))
        i = self._component(ref)
        if self._component(x) != i:
            raise EquilibriumError("moment endpoints must lie on one interval")
        g, mid, half = self._theta_integrand(i)
        t1, t2 = self._theta(i, ref), self._theta(i, x)
        return _gl_moment(lambda t: f(mid - half * np.cos(t)) * g(t), t1, t2)

    @cached_property
    def _masses(self) -> list[float]:
        return [self._partial(i, 0.0, math.pi) for i in range(len(self.intervals))]

    def _component(self, x):
        for i, (lo, hi) in enumerate(self.intervals):
            if lo - 1e-14 * max(1.0, abs(lo)) <= x <= hi + 1e-14 * max(1.0, abs(hi)):
                return i
        raise EquilibriumError(f"point {x} is not on the support")

    def _F(self, x):
        """Mass of the support to the left of x."""
        i = self._component(x)
        return sum(self._masses[:i]) + self._partial(i, 0.0, self._theta(i, x))

    def cumulative(self, ref, x) -> float:
        """Signed equilibrium mass between ``ref`` and ``x`` (positive when x > ref)."""
        ref, x = float(np.real(ref)), float(np.real(x))
        i, j = self._component(ref), self._component(x)
        if i == j:
            return self._partial(i, self._theta(i, ref), self._theta(i, x)) * 1.0
        return self._F(x) - self._F(ref)

    def mass(self) -> float:
        return float(sum(self._masses))

    def locate_mass(self, ref, mass: float):
        """Point x on the component of ``ref`` with cumulative(ref, x) = mass, or None past an end."""
        ref = float(np.real(ref))
        i = self._component(ref)
        g, mid, half = self._theta_integrand(i)
        t0 = self._theta(i, ref)
        if mass == 0:
            return ref
        end = math.pi if mass > 0 else 0.0
        avail = self._partial(i, t0, end)
        if abs(mass) > abs(avail) * (1 + 1e-13):
            return None
        if abs(abs(mass) - abs(avail)) <= 1e-13 * max(1.0, abs(avail)):
            return mid - half * math.cos(end)

        def f(t):
            return self._partial(i, t0, t) - mass

        lo, hi = (t0, end) if mass > 0 else (end, t0)
        t = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        # Newton polish with the smooth theta-density
        for _ in range(2):
            gt = float(g(np.array([t]))[0])
            if gt > 0:
                t = min(max(t - f(t) / gt, lo), hi)
        return mid - half * math.cos(t)


def _gl_moment(h: Callable, t1: float, t2: float):
    """Gauss-Legendre integral of a smooth h over [t1, t2], 48 against 96 nodes."""
    if t1 == t2:
        return 0.0
    c, r = 0.5 * (t1 + t2), 0.5 * (t2 - t1)
    vals = []
    for m in (48, 96):
        rule = gauss_legendre(m)
        vals.append(r * np.sum(rule.w * h(c + r * rule.x)))
    if abs(vals[0] - vals[1]) <= 1e-13 * max(1.0, abs(vals[1])):
        return vals[1]
    # fall back to splitting
    return _gl_moment(h, t1, c) + _gl_moment(h, c, t2)


def density_intervals(endpoints: Sequence[float]) -> IntervalUnion:
    """Equilibrium density of the union of [a_0, a_1], [a_2, a_3], ..."""
    a = _check_endpoints(endpoints)
    return IntervalUnion(a, tuple(gap_roots(a)))


def endpoint_constant(endpoints: Sequence[float], a: float) -> float:
    """M = lim sqrt|x - a| omega(x) at the endpoint ``a``.

    Equal to prod |a - l_j| / (pi sqrt(prod_{a_j != a} |a - a_j|)).
    """
    ends = _check_endpoints(endpoints)
    idx = [j for j, e in enumerate(ends) if e == float(a)]
    if not idx:
        raise EquilibriumError("a must be one of the endpoints")
    j0 = idx[0]
    roots = gap_roots(ends)
    num = math.prod(abs(float(a) - lj) for lj in roots)
    den = math.prod(abs(float(a) - aj) for j, aj in enumerate(ends) if j != j0)
    return num / (math.pi * math.sqrt(den))


@dataclass(frozen=True)
class CircleDensity(EquilibriumDensity):
    """Uniform density 1/(2 pi r) on the full circle |z - c| = r."""

    radius: float = 1.0
    center: complex = 0j
    kind: str = field(default="circle", init=False)

    def eval(self, z):
        val = 1.0 / (TWO_PI * self.radius)
        return val if np.ndim(z) == 0 else np.full(np.shape(z), val)

    def _angle(self, z):
        return cmath.phase(complex(z) - self.center)

    def cumulative(self, ref, z) -> float:
        """Counter-clockwise mass from ``ref`` to ``z``, reduced to (-1/2, 1/2]."""
        d = (self._angle(z) - self._angle(ref)) / TWO_PI
        d -= math.floor(d + 0.5)
        return d if d != -0.5 else 0.5

    def mass(self) -> float:
        return 1.0

    def moment(self, ref, z, f: Callable):
        t1 = self._angle(ref)
        t2 = t1 + TWO_PI * self.cumulative(ref, z)
        return _gl_moment(lambda t: f(self.center + self.radius * np.exp(1j * t)) / TWO_PI, t1, t2)

    def locate_mass(self, ref, mass: float):
        if abs(mass) > 0.5 + 1e-13:
            return None
        t = self._angle(ref) + TWO_PI * mass
        return self.center + self.radius * cmath.exp(1j * t)


def density_circle(radius: float = 1.0, center: complex = 0j) -> CircleDensity:
    if radius <= 0:
        raise EquilibriumError("radius must be positive")
    return CircleDensity(float(radius), complex(center))


@dataclass(frozen=True)
class LemniscateDensity(EquilibriumDensity):
    """Density |T'(z)| / (2 pi N) on the whole level set {|T| = 1}."""

    T: ComplexPolynomial
    N: int
    kind: str = field(default="lemniscate", init=False)

    @cached_property
    def _set(self) -> Lemniscate:
        return Lemniscate(self.T)

    @cached_property
    def _dT(self):
        return self.T.deriv()

    def eval(self, z):
        return np.abs(self._dT(np.asarray(z, dtype=complex) if np.ndim(z) else complex(z))) / (TWO_PI * self.N)

    def _locate(self, z):
        for piece in self._set.pieces():
            u = piece.locate(z, tol=1e-10)
            if u is not None:
                return piece, u
        raise EquilibriumError(f"point {z} is not on the lemniscate")

    def cumulative(self, ref, z) -> float:
        """Mass along the orientation of increasing arg T, reduced to its component (half-open)."""
        p1, u1 = self._locate(ref)
        p2, u2 = self._locate(z)
        if p1.start != p2.start:
            raise EquilibriumError("points lie on different components")
        per = p1.period
        d = (u2 - u1) / per
        d -= math.floor(d + 0.5)
        return d * per / (TWO_PI * self.N)

    def mass(self) -> float:
        return sum(p.period for p in self._set.pieces()) / (TWO_PI * self.N)

    def moment(self, ref, z, f: Callable):
        piece, u = self._locate(ref)
        du = self.cumulative(ref, z) * TWO_PI * self.N

        def h(v):
            pts, _ = piece.eval(np.asarray(v))
            return f(pts) / (TWO_PI * self.N)

        return _gl_moment(h, u, u + du)

    def locate_mass(self, ref, mass: float):
        piece, u = self._locate(ref)
        du = mass * TWO_PI * self.N
        if abs(du) > 0.5 * piece.period * (1 + 1e-13):
            return None
        return complex(piece.eval(np.array([u + du]))[0][0])


def density_lemniscate(T) -> LemniscateDensity:
    """Equilibrium density of the lemniscate {|T| = 1}.

    Raises:
        GeometryError: if the level set self-intersects.
    """
    if not isinstance(T, ComplexPolynomial):
        T = ComplexPolynomial(tuple(T))
    Lemniscate(T)  # validates the critical values
    return LemniscateDensity(T, T.degree)


def density_for(measure) -> EquilibriumDensity:
    """Equilibrium density of the support of a :class:`PowerWeightMeasure`.

    Raises:
        EquilibriumError: for supports without a closed-form density here.
    """
    comps = list(measure.components)
    if all(isinstance(c, RealInterval) for c in comps):
        ivs = sorted((float(c.a), float(c.b)) for c in comps)
        return density_intervals([e for iv in ivs for e in iv])
    if len(comps) == 1 and isinstance(comps[0], CircularArc):
        c = comps[0]
        if c.t2 - c.t1 >= TWO_PI * (1 - 1e-14):
            return density_circle(c.radius, c.center)
        raise EquilibriumError("equilibrium density of a proper circular arc is not implemented")
    if comps and all(isinstance(c, Lemniscate) for c in comps):
        Ts = {c.T for c in comps}
        if len(Ts) == 1:
            lem = comps[0]
            covered = {i for c in comps for i in ([c.which] if c.which is not None else range(len(c.cycles)))}
            if covered == set(range(len(lem.cycles))):
                return density_lemniscate(lem.T)
        raise EquilibriumError("only the full level set of one polynomial is supported")
    raise EquilibriumError("no equilibrium density available for this support")


def _complex_arc_integral(comp, g, tol):
    def re(z):
        return np.real(g(z))

    def im(z):
        return np.imag(g(z))

    return integrate_arc(comp, re, tol) + 1j * integrate_arc(comp, im, tol)


def pushforward_residual(T, g: Callable, tol: float = 1e-12) -> float:
    """|int_sigma g(T) |T'| ds - N int_0^{2 pi} g(e^{it}) dt| on sigma = {|T| = 1}.

    The left side is an arc-length quadrature over the traced level set, the
    right side a trapezoidal rule on the unit circle.
    """
    if not isinstance(T, ComplexPolynomial):
        T = ComplexPolynomial(tuple(T))
    dT = T.deriv()
    lem = Lemniscate(T)
    lhs = _complex_arc_integral(lem, lambda z: g(T(z)) * np.abs(dT(z)), tol)
    t = np.linspace(0.0, TWO_PI, 512, endpoint=False)
    rhs = T.degree * TWO_PI * np.mean(g(np.exp(1j * t)))
    return float(abs(lhs - rhs))


def symmetrization_residual(T, f: Callable, tol: float = 1e-12) -> float:
    """|int_sigma (sum_i f(z_i)) |T'| ds - N int_sigma f |T'| ds|.

    The z_i are the N solutions of T(u) = T(z), found with the Aberth iteration.
    """
    if not isinstance(T, ComplexPolynomial):
        T = ComplexPolynomial(tuple(T))
    dT = T.deriv()
    lem = Lemniscate(T)

    def summed(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape, dtype=complex)
        for k, zk in enumerate(z):
            pre = aberth_roots(T.shift(T(zk)).coeffs, tol=1e-13)
            out[k] = np.sum(np.broadcast_to(f(pre), pre.shape))
        return out * np.abs(dT(z))

    lhs = _complex_arc_integral(lem, summed, tol)
    rhs = T.degree * _complex_arc_integral(lem, lambda z: f(z) * np.abs(dT(z)), tol)
    return float(abs(lhs - rhs))
