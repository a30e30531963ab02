"""Support components: intervals, circles and arcs, polynomial lemniscates, parametric arcs.

Every component exposes ``pieces()``, a list of smooth parametrized curves.
A piece evaluates points and derivatives on numpy arrays in double precision
(``eval``) and on gmpy2 numbers at the current working precision
(``eval_xp``), and can locate a point on itself (``locate``).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import gmpy2
import numpy as np

from ._xp import mpc, mpfr, to_xp, workprec
from .polynomials import ComplexPolynomial, aberth_roots

__all__ = [
    "GeometryError",
    "RealInterval",
    "CircularArc",
    "UnitCircle",
    "Lemniscate",
    "ParametricArc",
    "RealPiece",
    "CirclePiece",
    "LemniscatePiece",
    "GenericPiece",
]

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Invalid support geometry."""


# --------------------------------------------------------------------- pieces


class RealPiece:
    """The segment [a, b] of the real line, parametrized by x itself."""

    kind = "real"
    closed = False

    def __init__(self, a: float, b: float):
        self.lo, self.hi = float(a), float(b)

    @property
    def period(self):
        return None

    def eval(self, u):
        u = np.asarray(u, dtype=float)
        return u.astype(float), np.ones_like(u)

    def eval_xp(self, us):
        return [mpfr(u) for u in us], [mpfr(1)] * len(us)

    def locate(self, z, tol=1e-12):
        z = complex(z)
        scale = max(1.0, abs(self.lo), abs(self.hi))
        if abs(z.imag) > tol * scale:
            return None
        if self.lo - tol * scale <= z.real <= self.hi + tol * scale:
            return min(max(z.real, self.lo), self.hi)
        return None

    def param_xp(self, u, z):
        return mpfr(u)

    def chord_ratio_xp(self, u, us):
        return mpfr(1)

    def speed_bound(self):
        return 1.0


class CirclePiece:
    """Arc {c + r e^{iu} : lo <= u <= hi}; closed when it is the full circle."""

    kind = "circle"

    def __init__(self, center: complex, radius: float, t1: float, t2: float):
        self.center = complex(center)
        self.radius = float(radius)
        self.lo, self.hi = float(t1), float(t2)
        self.closed = self.hi - self.lo >= TWO_PI * (1 - 1e-14)

    @property
    def period(self):
        return TWO_PI if self.closed else None

    def eval(self, u):
        u = np.asarray(u, dtype=float)
        e = np.exp(1j * u)
        return self.center + self.radius * e, 1j * self.radius * e

    def eval_xp(self, us):
        c = to_xp(self.center)
        r = mpfr(self.radius)
        zs, dzs = [], []
        for u in us:
            e = mpc(gmpy2.cos(u), gmpy2.sin(u))
            zs.append(c + r * e)
            dzs.append(mpc(0, 1) * r * e)
        return zs, dzs

    def locate(self, z, tol=1e-12):
        d = complex(z) - self.center
        if abs(abs(d) - self.radius) > tol * max(1.0, self.radius):
            return None
        t = cmath.phase(d)
        if self.closed:
            return self.lo + ((t - self.lo) % TWO_PI)
        k = math.floor((self.lo - t) / TWO_PI) + 1 if t < self.lo else 0
        t += k * TWO_PI
        if t > self.hi + tol and t - TWO_PI >= self.lo - tol:
            t -= TWO_PI
        if self.lo - tol <= t <= self.hi + tol:
            return min(max(t, self.lo), self.hi)
        return None

    def param_xp(self, u, z):
        """Angle of ``z`` at working precision, on the same branch as ``u``."""
        d = to_xp(z) - to_xp(self.center)
        if isinstance(d, mpfr):
            d = mpc(d, 0)
        t = gmpy2.atan2(d.imag, d.real)
        k = round((u - float(t)) / TWO_PI)
        return t + k * 2 * gmpy2.const_pi()

    def chord_ratio_xp(self, u, us):
        """|z(u) - z(us)| / |u - us| without cancellation."""
        h = u - us
        if h == 0:
            return mpfr(self.radius)
        return mpfr(self.radius) * 2 * abs(gmpy2.sin(h / 2)) / abs(h)

    def speed_bound(self):
        return self.radius


class LemniscatePiece:
    """One closed component of {|T(z)| = 1}, parametrized by phi with T(z(phi)) = e^{i phi}.

    The component is traced from ``start`` (a root of T(z) = 1) and ``d`` turns
    of phi cover it once, so the parameter range is [0, 2 pi d).
    """

    kind = "lemniscate"
    closed = True

    def __init__(self, T: ComplexPolynomial, start: complex, d: int):
        self.T = T
        self.dT = T.deriv()
        self.start = complex(start)
        self.d = int(d)
        self.lo, self.hi = 0.0, TWO_PI * self.d

    @property
    def period(self):
        return self.hi

    def _newton(self, z, target, iters=3):
        for _ in range(iters):
            z = z - (self.T(z) - target) / self.dT(z)
        return z

    def _rhs(self, z, phi):
        return 1j * cmath.exp(1j * phi) / self.dT(z)

    def trace(self, phis):
        """Points z(phi) for an array of parameters, by predictor-corrector continuation."""
        phis = np.asarray(phis, dtype=float)
        red = np.mod(phis - self.lo, self.period)
        order = np.argsort(red, kind="stable")
        out = np.empty(len(red), dtype=complex)
        z, phi = self.start, 0.0
        hmax = 0.02
        for idx in order:
            target = red[idx]
            while phi < target:
                h = min(hmax, target - phi)
                while True:
                    # classical Runge-Kutta predictor, Newton corrector
                    k1 = self._rhs(z, phi)
                    k2 = self._rhs(z + 0.5 * h * k1, phi + 0.5 * h)
                    k3 = self._rhs(z + 0.5 * h * k2, phi + 0.5 * h)
                    k4 = self._rhs(z + h * k3, phi + h)
                    zp = z + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
                    znew = self._newton(zp, cmath.exp(1j * (phi + h)))
                    if abs(znew - zp) <= 1e-6 * max(abs(h * k1), 1e-300) or h < 1e-8:
                        break
                    h *= 0.5
                z, phi = znew, phi + h
            out[idx] = z
        return out

    def eval(self, u):
        u = np.asarray(u, dtype=float)
        z = self.trace(u)
        dz = 1j * np.exp(1j * u) / self.dT(z)
        return z, dz

    def eval_xp(self, us):
        seeds = self.trace([float(u) for u in us])
        prec = gmpy2.get_context().precision
        zs, dzs = [], []
        for u, z in zip(us, seeds):
            target = mpc(gmpy2.cos(u), gmpy2.sin(u))
            zs.append(self._polish_xp(z, target, prec))
            dzs.append(mpc(0, 1) * target / self.dT(zs[-1]))
        return zs, dzs

    def _polish_xp(self, z, target, prec):
        z = mpc(z)
        bits = 53
        while bits < prec:
            bits = min(2 * bits, prec)
            with workprec(bits + 8):
                z = z - (self.T(z) - target) / self.dT(z)
        with workprec(prec):
            z = z - (self.T(z) - target) / self.dT(z)
        return z

    def locate(self, z, tol=1e-12):
        z = complex(z)
        tz = self.T(z)
        if abs(abs(tz) - 1) > max(tol, 1e-12) * max(1.0, abs(self.dT(z))):
            return None
        base = cmath.phase(tz) % TWO_PI
        cands = np.array([base + TWO_PI * j for j in range(self.d)])
        pts = self.trace(cands)
        dist = np.abs(pts - z)
        j = int(np.argmin(dist))
        if dist[j] > 1e-7 * max(1.0, abs(z)):
            return None
        return float(cands[j])

    def project_xp(self, z):
        """Point of the component with T = T(z)/|T(z)|, at working precision."""
        prec = gmpy2.get_context().precision
        zx = to_xp(complex(z))
        tz = self.T(mpc(zx))
        target = tz / abs(tz)
        return self._polish_xp(complex(z), target, prec)

    def param_xp(self, u, z):
        zx = mpc(to_xp(z))
        tz = self.T(zx)
        t = gmpy2.atan2(tz.imag, tz.real)
        k = round((u - float(t)) / TWO_PI)
        return t + k * 2 * gmpy2.const_pi()

    def chord_ratio_xp(self, u, us):
        h = u - us
        (za, zb), _ = self.eval_xp([u, us])
        if h == 0:
            return abs(mpc(0, 1) / self.dT(za))
        return abs(za - zb) / abs(h)

    def speed_bound(self):
        z = self.trace(np.linspace(0, self.hi, 64 * self.d, endpoint=False))
        return float(np.max(1.0 / np.abs(self.dT(z))))


class GenericPiece:
    """Curve gamma(u), u in [0, 1], supplied by callables."""

    kind = "generic"
    closed = False

    def __init__(self, gamma: Callable, dgamma: Callable):
        self.gamma, self.dgamma = gamma, dgamma
        self.lo, self.hi = 0.0, 1.0

    @property
    def period(self):
        return None

    def _call(self, f, u):
        u = np.asarray(u, dtype=float)
        try:
            v = np.asarray(f(u), dtype=complex)
            if v.shape == u.shape:
                return v
        except (TypeError, ValueError):
            pass
        return np.array([complex(f(float(t))) for t in u])

    def eval(self, u):
        return self._call(self.gamma, u), self._call(self.dgamma, u)

    def _call_xp(self, f, u):
        try:
            v = f(u)
            if hasattr(v, "precision"):
                return v
            return to_xp(v)
        except (TypeError, ValueError, AttributeError):
            return to_xp(complex(f(float(u))))

    def eval_xp(self, us):
        return [self._call_xp(self.gamma, u) for u in us], [self._call_xp(self.dgamma, u) for u in us]

    def locate(self, z, tol=1e-12):
        z = complex(z)
        grid = np.linspace(0.0, 1.0, 2001)
        pts, _ = self.eval(grid)
        j = int(np.argmin(np.abs(pts - z)))
        u = float(grid[j])
        for _ in range(30):
            g, dg = self.eval(np.array([u]))
            g, dg = g[0], dg[0]
            step = ((g - z) * dg.conjugate()).real / abs(dg) ** 2
            u = min(max(u - step, 0.0), 1.0)
            if abs(step) < 1e-15:
                break
        g, _ = self.eval(np.array([u]))
        scale = max(1.0, float(np.max(np.abs(pts))))
        if abs(g[0] - z) > max(tol, 1e-12) * scale:
            return None
        return u

    def param_xp(self, u, z):
        return mpfr(u)

    def chord_ratio_xp(self, u, us):
        h = u - us
        if h == 0:
            return abs(self.eval_xp([u])[1][0])
        (za, zb), _ = self.eval_xp([u, us])
        return abs(za - zb) / abs(h)

    def speed_bound(self):
        _, dz = self.eval(np.linspace(0.0, 1.0, 257))
        return float(np.max(np.abs(dz)))


# ----------------------------------------------------------------- components


@dataclass(frozen=True)
class RealInterval:
    a: float
    b: float

    def __post_init__(self):
        if not float(self.a) < float(self.b):
            raise GeometryError("RealInterval needs a < b")

    def pieces(self, anchor=None):
        return [RealPiece(self.a, self.b)]


@dataclass(frozen=True)
class CircularArc:
    center: complex = 0j
    radius: float = 1.0
    t1: float = 0.0
    t2: float = TWO_PI

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError("radius must be positive")
        if not (self.t1 < self.t2 <= self.t1 + TWO_PI * (1 + 1e-15)):
            raise GeometryError("CircularArc needs t1 < t2 <= t1 + 2 pi")

    def pieces(self, anchor=None):
        return [CirclePiece(self.center, self.radius, self.t1, self.t2)]


@dataclass(frozen=True)
class UnitCircle(CircularArc):
    """The full unit circle."""

    center: complex = 0j
    radius: float = 1.0
    t1: float = 0.0
    t2: float = TWO_PI


@dataclass(frozen=True)
class Lemniscate:
    """Level set {|T(z)| = 1} of a polynomial, or one of its closed components.

    ``which`` selects a component by index (components are ordered by their
    lexicographically smallest root of T(z) = 1); ``None`` keeps all of them.
    """

    T: ComplexPolynomial
    which: int | None = None

    def __post_init__(self):
        if not isinstance(self.T, ComplexPolynomial):
            object.__setattr__(self, "T", ComplexPolynomial(tuple(self.T)))
        if self.T.degree < 1:
            raise GeometryError("lemniscate polynomial must have degree >= 1")
        crit = critical_values(self.T)
        for v in crit:
            if abs(abs(v) - 1.0) <= 1e-9:
                raise GeometryError("lemniscate level set self-intersects (critical value on |T| = 1)")
        if self.which is not None and not 0 <= self.which < len(self.cycles):
            raise GeometryError("lemniscate component index out of range")

    @property
    def N(self) -> int:
        return self.T.degree

    @cached_property
    def cycles(self) -> list[tuple[complex, int]]:
        """(start root, turns) for each closed component of the level set."""
        roots = aberth_roots(self.T.shift(1.0).coeffs)
        piece = LemniscatePiece(self.T, roots[0], 1)
        images = []
        for r in roots:
            piece.start = complex(r)
            end = piece.trace(np.array([TWO_PI * (1 - 1e-15)]))[0]
            end = piece._newton(end, 1.0)
            images.append(int(np.argmin(np.abs(roots - end))))
        seen = [False] * len(roots)
        out = []
        for i in range(len(roots)):
            if seen[i]:
                continue
            j, d = i, 0
            while not seen[j]:
                seen[j] = True
                j = images[j]
                d += 1
            out.append((complex(roots[i]), d))
        return out

    def pieces(self, anchor=None):
        sel = self.cycles if self.which is None else [self.cycles[self.which]]
        return [LemniscatePiece(self.T, r, d) for r, d in sel]


def critical_values(T: ComplexPolynomial):
    dT = T.deriv()
    if dT.degree < 1:
        return []
    return [T(c) for c in aberth_roots(dT.coeffs)]


@dataclass(frozen=True)
class ParametricArc:
    gamma: Callable
    dgamma: Callable

    def __post_init__(self):
        _, dz = GenericPiece(self.gamma, self.dgamma).eval(np.linspace(0.0, 1.0, 257))
        if np.any(np.abs(dz) == 0):
            raise GeometryError("ParametricArc derivative vanishes")

    def pieces(self, anchor=None):
        return [GenericPiece(self.gamma, self.dgamma)]
