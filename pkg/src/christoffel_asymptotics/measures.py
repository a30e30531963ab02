"""Power-type measures w(z)|z - z0|^alpha ds on intervals, arcs and lemniscates.

The module discretizes such measures into extended-precision quadrature
nodes, assembles Gram matrices in a basis adapted to the geometry and
implements the square-root pullback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import gmpy2
import numpy as np

from ._xp import mpc, mpfr, to_xp, workprec, xsum
from .geometry import (
    CircularArc,
    GeometryError,
    Lemniscate,
    ParametricArc,
    RealInterval,
    UnitCircle,
)
from .quadrature import QuadratureError, gauss_jacobi

__all__ = [
    "MeasureError",
    "UnsupportedGeometry",
    "PowerWeightMeasure",
    "SingularPoint",
    "NodeGroup",
    "GramSystem",
    "ChebyshevBasis",
    "MonomialBasis",
    "LemniscateBasis",
    "make_measure",
    "total_mass",
    "discretize",
    "gram",
    "choose_basis",
    "sqrt_pullback",
    "RealInterval",
    "CircularArc",
    "UnitCircle",
    "Lemniscate",
    "ParametricArc",
]

LOCATE_TOL = 1e-12
GUARD_BITS = 24


class MeasureError(ValueError):
    """Invalid measure description."""


class UnsupportedGeometry(MeasureError):
    """The requested operation is not available for this support."""


@dataclass(frozen=True)
class SingularPoint:
    """A point carrying an algebraic factor |z - point|^exponent of the weight."""

    point: complex
    exponent: float


@dataclass(frozen=True)
class PowerWeightMeasure:
    """The measure w(z) |z - z0|^alpha prod |z - zeta_j|^beta_j ds on a union of components.

    Attributes:
        components: Support components.
        z0: Base point, on the support.
        alpha: Exponent at ``z0``, ``alpha > -1``.
        w: Positive continuous weight; ``None`` means the constant 1. It is
            called with gmpy2 numbers when possible and with Python numbers
            otherwise.
        label: Free text.
        factors: Extra algebraic factors as ``(zeta, beta)`` pairs. Points on
            the support are treated as singular by the quadrature.
        location: ``"interior"`` or ``"endpoint"``; derived.
    """

    components: tuple
    z0: complex
    alpha: float
    w: Callable | None = None
    label: str = ""
    factors: tuple = ()
    location: str = field(init=False, compare=False)
    base_piece: int = field(init=False, compare=False, repr=False)
    base_param: float = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "z0", complex(self.z0))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "factors", tuple((complex(p), float(b)) for p, b in self.factors))
        if not self.components:
            raise MeasureError("at least one support component is required")
        if not self.alpha > -1:
            raise MeasureError("alpha must exceed -1")
        for _, b in self.factors:
            if not b > -1:
                raise MeasureError("factor exponents must exceed -1")
        reals = sorted((float(c.a), float(c.b)) for c in self.components if isinstance(c, RealInterval))
        for (a1, b1), (a2, b2) in zip(reals, reals[1:]):
            if a2 < b1:
                raise MeasureError("real intervals overlap")
        hit = None
        for i, piece in enumerate(self.pieces):
            u = piece.locate(self.z0, LOCATE_TOL)
            if u is not None:
                hit = (i, u)
                break
        if hit is None:
            raise MeasureError(f"z0 = {self.z0} does not lie on the support")
        i, u = hit
        piece = self.pieces[i]
        loc = "interior"
        if not piece.closed and (u == piece.lo or u == piece.hi):
            loc = "endpoint"
        object.__setattr__(self, "location", loc)
        object.__setattr__(self, "base_piece", i)
        object.__setattr__(self, "base_param", float(u))
        if piece.kind == "real":
            object.__setattr__(self, "z0", complex(u, 0.0))
        if self.w is not None:
            for p in self.pieces:
                us = np.linspace(p.lo, p.hi, 9)
                zs, _ = p.eval(us)
                for z in zs:
                    if not _eval_weight_float(self.w, z) > 0:
                        raise MeasureError("weight must be positive on the support")

    @cached_property
    def pieces(self) -> list:
        out = []
        for c in self.components:
            out.extend(c.pieces())
        return out

    @property
    def singular_points(self) -> list[SingularPoint]:
        pts = [SingularPoint(self.z0, self.alpha)]
        pts.extend(SingularPoint(p, b) for p, b in self.factors)
        return pts

    @property
    def w0(self) -> float:
        """Smooth part of the weight at z0: w(z0) times the extra factors there."""
        val = 1.0 if self.w is None else _eval_weight_float(self.w, self.z0)
        for p, b in self.factors:
            val *= abs(self.z0 - p) ** b
        return val

    @property
    def is_real(self) -> bool:
        return all(p.kind == "real" for p in self.pieces)

    def scaled(self, c: float) -> "PowerWeightMeasure":
        """The measure c * mu."""
        c = float(c)
        base = self.w

        def w(z):
            return c * (1 if base is None else base(z))

        return PowerWeightMeasure(self.components, self.z0, self.alpha, w, self.label, self.factors)


def _eval_weight_float(w, z):
    z = complex(z)
    try:
        return float(w(z.real if z.imag == 0 else z))
    except TypeError:
        return float(w(z))


def _eval_weight_xp(w, z):
    try:
        v = w(z)
        if hasattr(v, "precision"):
            return v
        if isinstance(v, (int, float)) or hasattr(v, "man_exp"):
            return to_xp(v)
        return to_xp(float(v))
    except (TypeError, ValueError, AttributeError):
        return mpfr(_eval_weight_float(w, complex(z)))


def make_measure(
    components: Sequence,
    z0: complex,
    alpha: float = 0.0,
    w: Callable | None = None,
    label: str = "",
    factors: Sequence = (),
) -> PowerWeightMeasure:
    """Build and validate a power-type measure.

    Raises:
        MeasureError: if ``alpha <= -1`` or ``z0`` is not on the support.
        GeometryError: for a self-intersecting lemniscate or a degenerate component.
    """
    if not isinstance(components, (list, tuple)):
        components = [components]
    return PowerWeightMeasure(tuple(components), z0, alpha, w, label, tuple(factors))


# ------------------------------------------------------------ discretization


@dataclass
class NodeGroup:
    """Quadrature nodes of one piece: parameters, points and weights (gmpy2 numbers)."""

    piece: object
    params: list
    points: list
    weights: list


@dataclass
class _Panel:
    a: float
    b: float
    ax: object
    bx: object
    left: float
    right: float


@dataclass
class _Located:
    """A singular point as seen from one piece."""

    param: float | None
    point_xp: object
    exponent: float
    point: complex = 0j


def _locate_all(measure, piece):
    """Singular points relative to ``piece``; on-piece points are projected onto it."""
    out = []
    for sp in measure.singular_points:
        if sp.exponent == 0:
            continue
        u = piece.locate(sp.point, LOCATE_TOL)
        if u is None:
            out.append(_Located(None, to_xp(sp.point), sp.exponent))
        else:
            ux = _param_xp(piece, u, sp.point)
            out.append(_Located(u, piece.eval_xp([ux])[0][0], sp.exponent, sp.point))
    return out


def _param_xp(piece, u, point):
    if u in (piece.lo, piece.hi) or piece.kind in ("real", "generic"):
        return mpfr(u)
    return piece.param_xp(u, point)


def _panels(measure, piece, located):
    on = [(t.param, t.exponent, t.point) for t in located if t.param is not None]
    # the base point always splits its piece, even with alpha = 0
    u0 = piece.locate(measure.z0, LOCATE_TOL)
    if u0 is not None and all(not _same_param(piece, v, u0) for v, _, _ in on):
        on.append((u0, 0.0, measure.z0))
    merged = []
    for u, e, pt in sorted(on, key=lambda t: t[0]):
        for j, (v, f, q) in enumerate(merged):
            if _same_param(piece, v, u):
                merged[j] = (v, f + e, q)
                break
        else:
            merged.append((u, e, pt))
    xs = [_param_xp(piece, u, pt) for u, _, pt in merged]
    merged = [(u, e) for u, e, _ in merged]
    if piece.closed:
        per = piece.period
        per_x = 2 * gmpy2.const_pi() * (piece.d if piece.kind == "lemniscate" else 1)
        if not merged:
            merged = [(piece.lo, 0.0)]
            xs = [mpfr(piece.lo)]
        breaks = list(merged)
        bx = list(xs)
        if len(merged) == 1:
            breaks.append((merged[0][0] + per / 2, 0.0))
            bx.append(xs[0] + per_x / 2)
        breaks.append((merged[0][0] + per, merged[0][1]))
        bx.append(xs[0] + per_x)
    else:
        breaks, bx = [], []
        ends = {piece.lo: mpfr(piece.lo), piece.hi: mpfr(piece.hi)}
        table = {u: e for u, e in merged}
        keys = sorted(set(ends) | set(table))
        for u in keys:
            breaks.append((u, table.get(u, 0.0)))
            bx.append(ends[u] if u in ends else xs[[m[0] for m in merged].index(u)])
    return [
        _Panel(breaks[j][0], breaks[j + 1][0], bx[j], bx[j + 1], breaks[j][1], breaks[j + 1][1])
        for j in range(len(breaks) - 1)
    ]


def _exact_panel(measure, piece, panel, located):
    """Whether the weight on this real panel is exactly the Jacobi weight of its rule."""
    if piece.kind != "real" or measure.w is not None:
        return False
    for t in located:
        if t.param is None or t.param not in (panel.a, panel.b):
            return False
    return True


def discretize(measure: PowerWeightMeasure, real_degree: int, frequency: float, qbits: int, level: int = 0):
    """Quadrature nodes for integrating basis products against the measure.

    Each piece is cut at the singular points lying on it (closed pieces at
    least into two halves). A panel gets Gauss-Jacobi rules carrying the
    end exponents; the remaining smooth factor |z(u)-z(u_a)|/|u-u_a| is
    evaluated without cancellation where the geometry allows it.

    Args:
        measure: The measure.
        real_degree: Polynomial degree to integrate exactly on real pieces.
        frequency: Highest angular frequency (per unit of the piece parameter)
            to resolve on curved pieces.
        qbits: Target accuracy in bits for the smooth part of the integrand.
        level: Refinement level; higher levels add nodes.

    Returns:
        tuple: ``(groups, exact)``; ``exact`` means the rules are exact by
        construction, so no a-posteriori check is needed.
    """
    prec = gmpy2.get_context().precision
    rule_prec = prec + 8
    extra = int(math.ceil((qbits / 4.0 + 4) * 1.5**level))
    split = 2 ** max(0, level - 1)
    groups = []
    exact_all = True
    for piece in measure.pieces:
        located = _locate_all(measure, piece)
        panels = _panels(measure, piece, located)
        params, pts, wts = [], [], []
        for panel in panels:
            exact = _exact_panel(measure, piece, panel, located)
            if piece.kind == "real":
                m_poly = real_degree // 2 + 1
                if exact:
                    subs = [(panel.ax, panel.bx, panel.left, panel.right)]
                    m = m_poly
                else:
                    exact_all = False
                    m = m_poly + extra
                    subs = _split(panel, split)
            else:
                exact_all = False
                speed = 1.0 if piece.kind in ("circle", "lemniscate") else piece.speed_bound()
                omega = frequency * speed * (panel.b - panel.a) / 2.0
                # subpanels of at most one radian keep nearby complex singularities resolvable
                count = max(1, math.ceil(0.7 * omega / 100.0), math.ceil(panel.b - panel.a - 1e-9)) * split
                m = int(math.ceil(0.7 * omega / count)) + 1 + extra
                subs = _split(panel, count)
            for ax, bx, le, re in subs:
                rule = gauss_jacobi(m, re, le, rule_prec)
                us, ws = rule.mapped(ax, bx)
                zs, dzs = piece.eval_xp(us)
                ends = []
                if le:
                    ends.append((ax, piece.eval_xp([ax])[0][0], le))
                if re:
                    ends.append((bx, piece.eval_xp([bx])[0][0], re))
                others = [t for t in located if not _handled(piece, t, ax if le else None, bx if re else None)]
                for u, z, dz, wq in zip(us, zs, dzs, ws):
                    wt = wq if piece.kind == "real" else wq * abs(dz)
                    if measure.w is not None:
                        wt = wt * _eval_weight_xp(measure.w, z)
                    if not exact:
                        for ue, ze, e in ends:
                            wt = wt * _chord_ratio(piece, u, ue, z, ze) ** mpfr(e)
                        for t in others:
                            wt = wt * abs(z - t.point_xp) ** mpfr(t.exponent)
                    params.append(u)
                    pts.append(z)
                    wts.append(wt)
        groups.append(NodeGroup(piece, params, pts, wts))
    return groups, exact_all


def _handled(piece, located, ax, bx):
    if located.param is None:
        return False
    for end in (ax, bx):
        if end is not None and _same_param(piece, located.param, float(end)):
            return True
    return False


def _chord_ratio(piece, u, ue, z, ze):
    if piece.kind == "real":
        return mpfr(1)
    if piece.kind == "circle":
        return piece.chord_ratio_xp(u, ue)
    return abs(z - ze) / abs(u - ue)


def _split(panel, count):
    out = []
    width = (panel.bx - panel.ax) / count
    for i in range(count):
        ax = panel.ax + i * width
        bx = panel.bx if i == count - 1 else panel.ax + (i + 1) * width
        le = panel.left if i == 0 else 0.0
        re = panel.right if i == count - 1 else 0.0
        out.append((ax, bx, le, re))
    return out


def _same_param(piece, v, u):
    if abs(v - u) <= 1e-12 * max(1.0, abs(u)):
        return True
    if piece.period:
        d = (v - u) % piece.period
        return min(d, piece.period - d) <= 1e-12 * max(1.0, abs(u))
    return False


def total_mass(measure: PowerWeightMeasure) -> float:
    """Total mass mu(C) of the measure (double precision result)."""
    with workprec(128):
        groups, exact = discretize(measure, 0, 0.0, 64)
        m1 = xsum(w for g in groups for w in g.weights)
        if exact:
            return float(m1)
        groups, _ = discretize(measure, 0, 0.0, 64, level=1)
        m2 = xsum(w for g in groups for w in g.weights)
        if abs(m1 - m2) > mpfr(2) ** -50 * abs(m2):
            raise QuadratureError("total mass did not converge", estimate=float(m2), error=float(abs(m1 - m2)))
        return float(m2)


# --------------------------------------------------------------------- bases


class _Basis:
    name = "monomial"

    def requirements(self, n):
        """(real_degree, frequency) needed to integrate all Gram entries."""
        raise NotImplementedError

    def vector(self, measure, n):
        raise NotImplementedError

    def assemble(self, groups, n):
        raise NotImplementedError

    def evaluate(self, coeffs, z):
        raise NotImplementedError


def _hermitian_from_toeplitz(c, n):
    return [[c[j - k] if j >= k else c[k - j].conjugate() if isinstance(c[k - j], mpc) else c[k - j]
             for k in range(n + 1)] for j in range(n + 1)]


@dataclass(frozen=True)
class ChebyshevBasis(_Basis):
    """Chebyshev polynomials T_k of the affine map of [lo, hi] onto [-1, 1]."""

    lo: float
    hi: float
    name = "chebyshev-mapped"

    def _map(self, x):
        return (2 * x - (mpfr(self.lo) + mpfr(self.hi))) / (mpfr(self.hi) - mpfr(self.lo))

    def requirements(self, n):
        return 2 * n, 0.0

    def vector(self, measure, n):
        y = self._map(mpfr(measure.z0.real))
        return _cheb_values(y, n)

    def assemble(self, groups, n):
        mom = [mpfr(0)] * (2 * n + 1)
        ys, ws = [], []
        for g in groups:
            for x, w in zip(g.points, g.weights):
                ys.append(self._map(x))
                ws.append(w)
        cols = [ws]
        prev = ws
        cur = [w * y for w, y in zip(ws, ys)]
        mom[0] = gmpy2.fsum(ws)
        if 2 * n >= 1:
            mom[1] = gmpy2.fsum(cur)
        twoy = [2 * y for y in ys]
        for k in range(2, 2 * n + 1):
            nxt = [t * c - p for t, c, p in zip(twoy, cur, prev)]
            prev, cur = cur, nxt
            mom[k] = gmpy2.fsum(cur)
        del cols
        half = mpfr(1) / 2
        G = [[half * (mom[j + k] + mom[abs(j - k)]) for k in range(n + 1)] for j in range(n + 1)]
        return G, True

    def evaluate(self, coeffs, z):
        y = (2 * z - (self.lo + self.hi)) / (self.hi - self.lo)
        return np.polynomial.chebyshev.chebval(y, np.asarray(coeffs, dtype=complex))


def _cheb_values(y, n):
    vals = [mpfr(1)]
    if n >= 1:
        vals.append(+y)
    for _ in range(2, n + 1):
        vals.append(2 * y * vals[-1] - vals[-2])
    return vals


@dataclass(frozen=True)
class MonomialBasis(_Basis):
    """Powers ((z - center)/scale)^k; ``scale`` may be complex (a rotation)."""

    center: complex = 0j
    scale: complex = 1.0
    name: str = "monomial"

    def _u(self, z):
        c = to_xp(self.center)
        s = to_xp(self.scale)
        return (z - c) / s

    def requirements(self, n):
        return 2 * n, float(n)

    def vector(self, measure, n):
        u = self._u(to_xp(measure.z0))
        vals = [mpfr(1)]
        for _ in range(n):
            vals.append(vals[-1] * u)
        return _realify(vals)

    def assemble(self, groups, n):
        kinds = {g.piece.kind for g in groups}
        if kinds == {"real"} and complex(self.scale).imag == 0 and complex(self.center).imag == 0:
            return self._hankel(groups, n)
        if kinds == {"circle"} and self._on_circle(groups):
            return self._toeplitz(groups, n)
        return self._full(groups, n)

    def _on_circle(self, groups):
        c, r = complex(self.center), abs(complex(self.scale))
        return all(abs(g.piece.center - c) <= 1e-14 * max(1, r) and abs(g.piece.radius - r) <= 1e-14 * r
                   for g in groups)

    def _hankel(self, groups, n):
        us, ws = [], []
        for g in groups:
            for x, w in zip(g.points, g.weights):
                us.append(self._u(x).real if isinstance(x, mpc) else self._u(x))
                ws.append(w)
        mom = []
        cur = list(ws)
        for k in range(2 * n + 1):
            mom.append(gmpy2.fsum(cur))
            cur = [c * u for c, u in zip(cur, us)]
        return [[mom[j + k] for k in range(n + 1)] for j in range(n + 1)], True

    def _toeplitz(self, groups, n):
        # nodes on the circle |u| = 1: conj(u^k) = u^{-k}
        us, ws = [], []
        for g in groups:
            for z, w in zip(g.points, g.weights):
                u = self._u(z)
                us.append(u / abs(u))
                ws.append(w)
        re_parts, im_parts = [], []
        cur = [mpc(w) for w in ws]
        for _ in range(n + 1):
            re_parts.append(gmpy2.fsum([c.real for c in cur]))
            im_parts.append(gmpy2.fsum([c.imag for c in cur]))
            cur = [c * u for c, u in zip(cur, us)]
        mass = re_parts[0]
        thresh = mass * mpfr(2) ** (-(gmpy2.get_context().precision - 16))
        if all(abs(t) <= thresh for t in im_parts):
            c = re_parts
            return [[c[abs(j - k)] for k in range(n + 1)] for j in range(n + 1)], True
        c = [mpc(a, b) for a, b in zip(re_parts, im_parts)]
        return [[c[j - k] if j >= k else c[k - j].conjugate() for k in range(n + 1)] for j in range(n + 1)], False

    def _full(self, groups, n):
        rows = []
        ws = []
        for g in groups:
            for z, w in zip(g.points, g.weights):
                u = self._u(z)
                vals = [mpc(1)]
                for _ in range(n):
                    vals.append(vals[-1] * u)
                rows.append(vals)
                ws.append(w)
        G = [[None] * (n + 1) for _ in range(n + 1)]
        for j in range(n + 1):
            for k in range(j, n + 1):
                terms = [w * r[j] * r[k].conjugate() for w, r in zip(ws, rows)]
                v = mpc(gmpy2.fsum([t.real for t in terms]), gmpy2.fsum([t.imag for t in terms]))
                G[j][k] = v
                G[k][j] = v.conjugate()
        for j in range(n + 1):
            G[j][j] = mpc(G[j][j].real, 0)
        return G, False

    def evaluate(self, coeffs, z):
        u = (np.asarray(z, dtype=complex) - complex(self.center)) / complex(self.scale)
        return np.polynomial.polynomial.polyval(u, np.asarray(coeffs, dtype=complex))


def _realify(vals):
    if all(isinstance(v, mpfr) or (isinstance(v, mpc) and v.imag == 0) for v in vals):
        return [v.real if isinstance(v, mpc) else v for v in vals]
    return [mpc(v) for v in vals]


@dataclass(frozen=True)
class LemniscateBasis(_Basis):
    """Products z^r (T(z)/T(z0))^m, 0 <= r < N, indexed by k = m N + r (degree k)."""

    T: object
    phase0: float
    name: str = "laurent-symmetrized"

    def requirements(self, n):
        N = self.T.degree
        return 2 * n, float(n // N + 2 * N + 2)

    def vector(self, measure, n):
        N = self.T.degree
        z0 = to_xp(measure.z0)
        if isinstance(z0, mpfr):
            z0 = mpc(z0)
        pw = [mpc(1)]
        for _ in range(N - 1):
            pw.append(pw[-1] * z0)
        return _realify([pw[k % N] for k in range(n + 1)])

    def assemble(self, groups, n):
        N = self.T.degree
        M = n // N
        ph0 = mpfr(self.phase0)
        zp, es, ws = [], [], []
        for g in groups:
            for u, z, w in zip(g.params, g.points, g.weights):
                pw = [mpc(1)]
                for _ in range(N - 1):
                    pw.append(pw[-1] * z)
                zp.append(pw)
                es.append(mpc(gmpy2.cos(u - ph0), gmpy2.sin(u - ph0)))
                ws.append(w)
        # D[r][s][k] = sum w z^r conj(z^s) e^{i k (phi - phi0)}
        D = [[None] * N for _ in range(N)]
        for r in range(N):
            for s in range(N):
                cur = [w * a[r] * a[s].conjugate() for w, a in zip(ws, zp)]
                acc = []
                for _ in range(M + 1):
                    acc.append(mpc(gmpy2.fsum([c.real for c in cur]), gmpy2.fsum([c.imag for c in cur])))
                    cur = [c * e for c, e in zip(cur, es)]
                D[r][s] = acc
        G = [[None] * (n + 1) for _ in range(n + 1)]
        for i in range(n + 1):
            m, r = divmod(i, N)
            for j in range(i + 1):
                mm, s = divmod(j, N)
                G[i][j] = D[r][s][m - mm]
                # mirror so the matrix is Hermitian to the last bit
                G[j][i] = mpc(G[i][j].real, -G[i][j].imag)
        for i in range(n + 1):
            G[i][i] = mpc(G[i][i].real, 0)
        return G, False

    def evaluate(self, coeffs, z):
        z = np.asarray(z, dtype=complex)
        N = self.T.degree
        t = self.T(z) * np.exp(-1j * self.phase0)
        out = np.zeros_like(z)
        for k, c in enumerate(coeffs):
            m, r = divmod(k, N)
            out = out + complex(c) * z**r * t**m
        return out


def choose_basis(measure: PowerWeightMeasure, basis: str = "auto") -> _Basis:
    """Basis adapted to the support geometry.

    ``auto`` picks Chebyshev polynomials of the convex hull for real supports,
    rotated powers centred at the circle centre for circle supports, powers of
    T times low powers of z for lemniscates, and centred powers otherwise.
    """
    pieces = measure.pieces
    kinds = {p.kind for p in pieces}
    if basis not in ("auto", "chebyshev-mapped", "laurent-symmetrized", "monomial"):
        raise ValueError(f"unknown basis {basis!r}")
    if kinds == {"real"}:
        lo = min(p.lo for p in pieces)
        hi = max(p.hi for p in pieces)
        if basis in ("auto", "chebyshev-mapped"):
            return ChebyshevBasis(lo, hi)
        if basis == "monomial":
            return MonomialBasis(0.5 * (lo + hi), 0.5 * (hi - lo))
        raise UnsupportedGeometry("laurent-symmetrized basis needs a circle or lemniscate support")
    if basis == "chebyshev-mapped":
        raise UnsupportedGeometry("chebyshev-mapped basis needs a real support")
    if kinds == {"circle"}:
        c0, r0 = pieces[0].center, pieces[0].radius
        if all(abs(p.center - c0) <= 1e-14 and abs(p.radius - r0) <= 1e-14 for p in pieces):
            if basis == "monomial":
                return MonomialBasis(c0, r0)
            rot = (measure.z0 - c0) / abs(measure.z0 - c0)
            return MonomialBasis(c0, r0 * rot, name="laurent-symmetrized")
    if kinds == {"lemniscate"}:
        Ts = {p.T for p in pieces}
        if len(Ts) == 1 and basis != "monomial":
            T = pieces[0].T
            return LemniscateBasis(T, float(np.angle(T(measure.z0))))
    if basis == "laurent-symmetrized":
        raise UnsupportedGeometry("laurent-symmetrized basis needs a single circle or lemniscate")
    samples = np.concatenate([p.eval(np.linspace(p.lo, p.hi, 65))[0] for p in pieces])
    c = complex(np.mean(samples))
    s = float(np.max(np.abs(samples - c)))
    return MonomialBasis(c, s)


# ---------------------------------------------------------------------- Gram


@dataclass
class GramSystem:
    """Extended-precision Gram matrix of a basis with respect to a measure.

    Attributes
    ----------
    n : int
        Maximal degree.
    basis : str
        Basis name.
    entries : list of list
        The (n+1) x (n+1) Hermitian matrix (gmpy2 numbers).
    precision_bits : int
        Working precision of the entries.
    quad_tol : float
        Relative accuracy requested from the quadrature.
    vector : list
        Basis values at z0.
    real : bool
        Whether all entries are real.
    basis_obj : object
        The basis, used to evaluate polynomials given by coefficients.
    """

    n: int
    basis: str
    entries: list
    precision_bits: int
    quad_tol: float
    vector: list = field(default_factory=list)
    real: bool = True
    basis_obj: object = None
    quad_level: int = 0

    def leading(self, k: int) -> list:
        return [row[: k + 1] for row in self.entries[: k + 1]]


def _max_abs(G):
    return max(abs(x) for row in G for x in row)


def gram(measure: PowerWeightMeasure, n: int, basis: str = "auto", precision_bits: int | None = None) -> GramSystem:
    """Gram matrix of the chosen basis up to degree ``n``.

    Entries are integrated with relative accuracy 2^(-precision_bits/2); when
    the rules are not exact by construction the discretization is refined
    until two levels agree to that tolerance.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    b = choose_basis(measure, basis)
    if precision_bits is None:
        precision_bits = default_precision(n, b)
    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")
    qbits = precision_bits // 2
    with workprec(precision_bits + GUARD_BITS):
        deg, freq = b.requirements(n)
        groups, exact = discretize(measure, deg, freq, qbits)
        G, real = b.assemble(groups, n)
        level = 0
        if not exact:
            tol = mpfr(2) ** (-qbits)
            while True:
                level += 1
                if level > 6:
                    raise QuadratureError("Gram quadrature did not converge", error=float(diff / scale))
                groups, _ = discretize(measure, deg, freq, qbits, level=level)
                G2, real2 = b.assemble(groups, n)
                scale = _max_abs(G2)
                diff = max(abs(x - y) for r1, r2 in zip(G, G2) for x, y in zip(r1, r2))
                G, real = G2, real and real2
                if diff <= tol * scale:
                    break
        v = b.vector(measure, n)
        if not real:
            G = [[mpc(x) for x in row] for row in G]
            v = [mpc(x) for x in v]
        elif any(isinstance(x, mpc) for x in v):
            G = [[mpc(x) for x in row] for row in G]
            real = False
    return GramSystem(n, b.name, G, precision_bits, 2.0 ** (-qbits), v, real, b, level)


def default_precision(n: int, basis) -> int:
    """Starting precision: generous for raw powers, modest for adapted bases."""
    if isinstance(basis, MonomialBasis) and basis.name == "monomial":
        return max(192, 16 * n)
    return max(192, 2 * n)


# ------------------------------------------------------------------ pullback


def sqrt_pullback(measure: PowerWeightMeasure) -> PowerWeightMeasure:
    """The measure mu~ with d mu~(z) = (1/2) d mu(z^2), supported on the preimage under z -> z^2.

    Only real supports contained in [0, inf) with z0 = 0 are handled; 0 may be
    an endpoint or absent from the interior. The base exponent alpha becomes
    2 alpha + 1 and the weight becomes w(z^2).

    Raises:
        UnsupportedGeometry: for any other support.
    """
    if measure.z0 != 0:
        raise MeasureError("the square-root pullback needs z0 = 0")
    comps = []
    for c in measure.components:
        if not isinstance(c, RealInterval):
            raise UnsupportedGeometry("sqrt_pullback supports real intervals only")
        a, b = float(c.a), float(c.b)
        if a < 0:
            raise UnsupportedGeometry("sqrt_pullback needs the support inside [0, inf)")
        ra, rb = math.sqrt(a), math.sqrt(b)
        if a == 0:
            comps.append(RealInterval(-rb, rb))
        else:
            comps.append(RealInterval(-rb, -ra))
            comps.append(RealInterval(ra, rb))
    base = measure.w
    w = None
    if base is not None:
        def w(z, base=base):
            return base(z * z)

    factors = []
    for p, beta in measure.factors:
        r = complex(p) ** 0.5
        factors.append((r, beta))
        factors.append((-r, beta))
    label = f"pullback of {measure.label}" if measure.label else "pullback"
    return PowerWeightMeasure(tuple(comps), 0.0, 2 * measure.alpha + 1, w, label, tuple(factors))
