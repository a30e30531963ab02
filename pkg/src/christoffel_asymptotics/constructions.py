"""Local test polynomials built from Bessel-zero and equal-mass divisions.

Around an interior point z0 the support is cut at the points a_k where the
equilibrium mass from z0 equals j_{beta,k} / (pi n), and into cells of mass
1/n whose mass centres are xi_k. The polynomial

    C_n(z) = prod_{0<|k|<=N_n} (z - a_k)/(z0 - a_k) * prod_{|k|>N_n} (z - xi_k)/(z0 - xi_k)

equals 1 at z0 and imitates the Bessel kernel near z0.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .bessel import L_alpha, bessel_zeros, kernel_Jcal
from .equilibrium import CircleDensity, EquilibriumDensity, IntervalUnion, LemniscateDensity, density_for
from .quadrature import gauss_jacobi

__all__ = [
    "ConstructionError",
    "SignedSequence",
    "DivisionScheme",
    "default_tau",
    "default_N",
    "default_rho",
    "bessel_division",
    "equal_mass_division",
    "make_scheme",
    "build_Cn",
    "evaluate_Cn",
    "LocalReport",
    "verify_local_behavior",
]


class ConstructionError(ValueError):
    """The construction is not available for the given support or point."""


def default_tau(alpha: float) -> float:
    """tau = (15.5 + alpha) / (16.5 + alpha), so that (15 + alpha)(1 - tau) < tau."""
    return (15.5 + alpha) / (16.5 + alpha)


def default_N(n: int, tau: float) -> int:
    return int(math.floor(n ** (3.0 * (1.0 - tau))))


def default_rho(alpha: float, tau: float) -> float:
    return (alpha + 9.0) * (1.0 - tau)


@dataclass(frozen=True)
class SignedSequence:
    """Points indexed by k = -k0 .. k1 (stored left to right)."""

    points: tuple
    k0: int

    @property
    def k1(self) -> int:
        return len(self.points) - 1 - self.k0

    def __getitem__(self, k: int):
        if not -self.k0 <= k <= self.k1:
            raise IndexError(k)
        return self.points[k + self.k0]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def indices(self) -> range:
        return range(-self.k0, self.k1 + 1)

    def items(self):
        return zip(self.indices(), self.points)


def _as_complex(z):
    return complex(z)


def bessel_division(eq: EquilibriumDensity, z0, n: int, beta: float) -> SignedSequence:
    """Points a_k with signed equilibrium mass j_{beta,|k|}/(pi n) from z0 to a_k.

    The list stops on each side at the last index whose mass still fits on the
    component of z0 (truncation), and includes a_0 = z0.
    """
    if n < 1:
        raise ValueError("n must be positive")
    z0 = _as_complex(z0)
    right, left = [], []
    count = max(8, int(n) + 8)
    zeros = bessel_zeros(beta, count)
    for side, out in ((1.0, right), (-1.0, left)):
        k = 0
        while True:
            k += 1
            while k > len(zeros):
                zeros = bessel_zeros(beta, 2 * len(zeros))
            p = eq.locate_mass(z0, side * zeros[k - 1] / (math.pi * n))
            if p is None:
                break
            out.append(_as_complex(p))
    pts = tuple(reversed(left)) + (z0,) + tuple(right)
    return SignedSequence(pts, len(left))


def _centre(eq, p, q):
    m = eq.cumulative(p, q)
    return complex(eq.moment(p, q, lambda u: u)) / m, m


def equal_mass_division(eq: EquilibriumDensity, z0, n: int):
    """Equal-mass cells around z0 and their mass centres.

    The cell [b_0, b_1] contains z0 and has its mass centre at z0 (in the
    tangential coordinate); the following cells carry mass 1/n each. The
    leftover arcs at the two ends (mass < 1/n) are cells too; on a closed
    curve they merge into one cell opposite z0.

    Returns:
        (b_points, xi_points) as :class:`SignedSequence`; cell k is
        [b_k, b_{k+1}] with centre xi_k, and xi_0 = z0.
    """
    z0 = _as_complex(z0)
    cell = 1.0 / n
    tangent = _tangent(eq, z0)

    def offset(m_left):
        b0 = eq.locate_mass(z0, -m_left)
        b1 = eq.locate_mass(z0, cell - m_left)
        if b0 is None or b1 is None:
            return None
        first = complex(eq.moment(b0, b1, lambda u: u))
        return ((first / cell - z0) * tangent.conjugate()).real

    lo, hi = 1e-3 * cell, (1 - 1e-3) * cell
    flo, fhi = offset(lo), offset(hi)
    if flo is None or fhi is None or flo * fhi > 0:
        raise ConstructionError("z0 is too close to the end of its component for an equal-mass cell")
    m_left = optimize.brentq(offset, lo, hi, xtol=1e-17, rtol=1e-15)
    b0 = _as_complex(eq.locate_mass(z0, -m_left))
    b1 = _as_complex(eq.locate_mass(z0, cell - m_left))

    half = _half_mass(eq, z0)
    right_b, right_xi = [b1], []
    walked = cell - m_left
    while True:
        nxt = None if walked + cell > half * (1 + 1e-13) else eq.locate_mass(right_b[-1], cell)
        if nxt is None:
            break
        walked += cell
        nxt = _as_complex(nxt)
        right_xi.append(_centre(eq, right_b[-1], nxt)[0])
        right_b.append(nxt)
    left_b, left_xi = [b0], []
    walked = m_left
    while True:
        prv = None if walked + cell > half * (1 + 1e-13) else eq.locate_mass(left_b[-1], -cell)
        if prv is None:
            break
        walked += cell
        prv = _as_complex(prv)
        left_xi.append(_centre(eq, prv, left_b[-1])[0])
        left_b.append(prv)
    if math.isinf(half):
        # leftover arcs up to the interval ends
        right_end = eq.locate_mass(right_b[-1], eq.cumulative(right_b[-1], _end_point(eq, z0, 1)))
        left_end = eq.locate_mass(left_b[-1], eq.cumulative(left_b[-1], _end_point(eq, z0, -1)))
        for end, bs, xis, sign in ((right_end, right_b, right_xi, 1), (left_end, left_b, left_xi, -1)):
            end = _as_complex(end)
            if abs(eq.cumulative(bs[-1], end)) > 1e-14:
                p, q = (bs[-1], end) if sign > 0 else (end, bs[-1])
                xis.append(_centre(eq, p, q)[0])
                bs.append(end)
    else:
        rest = 1.0 - 2 * half + (half - (cell - m_left) - cell * len(right_xi)) + (half - m_left - cell * len(left_xi))
        if rest > 1e-14:
            # the arc from the last right point around to the last left point
            mid = eq.locate_mass(right_b[-1], 0.5 * rest)
            c1, m1 = _centre(eq, right_b[-1], mid)
            c2, m2 = _centre(eq, mid, left_b[-1]) if abs(eq.cumulative(mid, left_b[-1])) > 0 else (0j, 0.0)
            right_xi.append((c1 * m1 + c2 * m2) / (m1 + m2))
            right_b.append(left_b[-1])
    b_points = SignedSequence(tuple(reversed(left_b)) + tuple(right_b), len(left_b) - 1)
    xi_points = SignedSequence(tuple(reversed(left_xi)) + (z0,) + tuple(right_xi), len(left_xi))
    return b_points, xi_points


def _end_point(eq, z0, side):
    i = eq._component(z0.real)
    lo, hi = eq.intervals[i]
    return complex(hi if side > 0 else lo)


def _half_mass(eq, z0) -> float:
    """Mass available on each side of z0 on a closed component (inf on intervals)."""
    if isinstance(eq, CircleDensity):
        return 0.5
    if isinstance(eq, LemniscateDensity):
        piece, _ = eq._locate(z0)
        return 0.5 * piece.period / (2 * math.pi * eq.N)
    return math.inf


def _tangent(eq, z0) -> complex:
    if isinstance(eq, CircleDensity):
        d = (z0 - eq.center) / abs(z0 - eq.center)
        return 1j * d
    if isinstance(eq, IntervalUnion):
        return 1.0 + 0j
    p = eq.locate_mass(z0, 1e-7)
    m = eq.locate_mass(z0, -1e-7)
    t = complex(p) - complex(m)
    return t / abs(t)


@dataclass(frozen=True)
class DivisionScheme:
    """Both divisions for one degree n, with the splitting index N_n.

    Attributes
    ----------
    n : int
    z0 : complex
    alpha : float
    beta : float
        (alpha + 1) / 2.
    a_points, b_points, xi_points : SignedSequence
    tau : float
    N_n : int
        Number of Bessel-zero factors on each side.
    rho : float
        Exponent of the excluded windows 1/n^(1+rho).
    omega0 : float
        Equilibrium density at z0.
    conforming : bool
        False when tau was overridden to a value breaking (15 + alpha)(1 - tau) < tau.
    """

    n: int
    z0: complex
    alpha: float
    beta: float
    a_points: SignedSequence
    b_points: SignedSequence
    xi_points: SignedSequence
    tau: float
    N_n: int
    rho: float
    omega0: float
    conforming: bool = True
    eq: EquilibriumDensity | None = field(default=None, repr=False, compare=False)

    def roots(self) -> tuple[list[complex], list[complex]]:
        """Roots of the two factors: a_k for 0<|k|<=N_n and xi_k for |k|>N_n."""
        N = self.N_n
        a = [p for k, p in self.a_points.items() if 0 < abs(k) <= N]
        if sum(1 for k in self.a_points.indices() if 0 < abs(k) <= N) < 2 * N:
            raise ConstructionError("not enough Bessel-zero division points for N_n")
        xi = [p for k, p in self.xi_points.items() if abs(k) > N]
        return a, xi

    @property
    def degree(self) -> int:
        a, xi = self.roots()
        return len(a) + len(xi)


def make_scheme(eq: EquilibriumDensity, z0, n: int, alpha: float = 0.0, tau: float | None = None, N_n: int | None = None) -> DivisionScheme:
    """Build the division scheme; ``tau`` and ``N_n`` default to the conforming choice."""
    tau = default_tau(alpha) if tau is None else float(tau)
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    conforming = (15.0 + alpha) * (1.0 - tau) < tau
    N = default_N(n, tau) if N_n is None else int(N_n)
    if N_n is not None and N != default_N(n, tau):
        conforming = False
    beta = 0.5 * (alpha + 1.0)
    z0 = _as_complex(z0)
    a_pts = bessel_division(eq, z0, n, beta)
    b_pts, xi_pts = equal_mass_division(eq, z0, n)
    omega0 = float(np.real(eq.eval(z0 if not isinstance(eq, IntervalUnion) else z0.real)))
    return DivisionScheme(n, z0, float(alpha), beta, a_pts, b_pts, xi_pts, tau, N, default_rho(alpha, tau), omega0, conforming, eq)


def _log_factor_sums(z: np.ndarray, z0: complex, roots: Sequence[complex]):
    """Log-magnitude and phase of prod (z - r)/(z0 - r), compensated sums per point."""
    r = np.asarray(list(roots), dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    logmag = np.zeros(z.shape)
    phase = np.zeros(z.shape)
    zero = np.zeros(z.shape, dtype=bool)
    if r.size == 0:
        return logmag, phase, zero
    d = z0 - r
    ld, ad = np.log(np.abs(d)), np.angle(d)
    for idx, zi in enumerate(z):
        q = zi - r
        if np.any(q == 0):
            zero[idx] = True
            continue
        # differences cancel exactly at z = z0
        logmag[idx] = math.fsum(np.concatenate([np.log(np.abs(q)), -ld]))
        phase[idx] = math.fsum(np.concatenate([np.angle(q), -ad]))
    return logmag, phase, zero


def _assemble(logmag, phase, zero):
    val = np.exp(logmag) * np.exp(1j * np.mod(phase, 2 * math.pi))
    # exact unit for the empty or trivial product
    val = np.where((logmag == 0) & (np.mod(phase, 2 * math.pi) == 0), 1.0 + 0j, val)
    return np.where(zero, 0j, val)


def evaluate_Cn(scheme: DivisionScheme, z):
    """Vectorized (A, B, C) at an array of points."""
    a, xi = scheme.roots()
    la, pa, za = _log_factor_sums(z, scheme.z0, a)
    lb, pb, zb = _log_factor_sums(z, scheme.z0, xi)
    A = _assemble(la, pa, za)
    B = _assemble(lb, pb, zb)
    C = _assemble(la + lb, pa + pb, za | zb)
    return A, B, C


def build_Cn(scheme: DivisionScheme, z: complex) -> tuple[complex, complex, complex]:
    """(A_n(z), B_n(z), C_n(z)); exactly (1, 1, 1) at z0 and exactly 0 at a root."""
    A, B, C = evaluate_Cn(scheme, np.array([complex(z)]))
    return complex(A[0]), complex(B[0]), complex(C[0])


# ---------------------------------------------------------------- local checks


@dataclass
class LocalReport:
    """Measured local behaviour of C_n for each n of a ladder.

    Each row holds: n, N_n, tau, rho, degree, b_window_dev (max |B_n - 1| on
    the window |z - z0| <= n^-tau), b_modulus_dev (max ||B_n| - 1| there), a_kernel_dev (max relative deviation of
    A_n from the Bessel kernel away from its scaled zeros), sup_C, scaled_integral
    (n^(alpha+1) times the window integral of |C_n|^2 dmu), limit and
    integral_ratio.
    """

    alpha: float
    z0: complex
    w0: float
    omega0: float
    limit: float
    rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["z0"] = [self.z0.real, self.z0.imag]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def column(self, key: str) -> list:
        return [r[key] for r in self.rows]


class _Chart:
    """Arc-length chart s -> z around z0 on the component of z0."""

    def __init__(self, measure, eq):
        comps = measure.components
        z0 = measure.z0
        if isinstance(eq, IntervalUnion):
            comp = [c for c in comps if c.a <= z0.real <= c.b]
            if len(comp) != 1:
                raise ConstructionError("z0 must lie on one interval")
            c = comp[0]
            self.kind = "real"
            self.lo, self.hi = float(c.a) - z0.real, float(c.b) - z0.real
            self._z0 = z0
        elif isinstance(eq, CircleDensity):
            self.kind = "circle"
            self.c, self.r = eq.center, eq.radius
            self.t0 = cmath.phase(z0 - eq.center)
            self.lo, self.hi = -math.pi * self.r, math.pi * self.r
            self._z0 = z0
        else:
            raise ConstructionError("local checks need an interval or full-circle support")

    def point(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "real":
            return self._z0 + s + 0j
        return self.c + self.r * np.exp(1j * (self.t0 + s / self.r))

    def distance_ratio(self, s):
        """|z(s) - z0| / |s|, smooth and equal to 1 at s = 0."""
        s = np.asarray(s, dtype=float)
        if self.kind == "real":
            return np.ones_like(s)
        h = s / self.r
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(h == 0, 1.0, np.abs(2 * np.sin(0.5 * h)) / np.where(h == 0, 1.0, np.abs(h)))
        return out


def _smooth_weight(measure, z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if measure.w is None:
        w = np.ones(z.shape)
    else:
        w = np.array([float(measure.w(complex(v).real if measure.is_real else complex(v))) for v in z])
    for p, b in measure.factors:
        w = w * np.abs(z - p) ** b
    return w


def _window_integral(scheme, measure, chart, radius, order=96):
    """Integral of |C_n|^2 dmu over arc-length |s| <= radius (clipped to the component)."""
    alpha = measure.alpha
    rule = gauss_jacobi(order, 0.0, alpha)  # (1+u)^alpha on [-1, 1]
    total = 0.0
    for side, end in ((1.0, min(radius, chart.hi)), (-1.0, max(-radius, chart.lo))):
        length = abs(end)
        if length == 0:
            continue
        # s = side * length * (1 + u)/2, |s|^alpha = (length/2)^alpha (1+u)^alpha
        s = side * length * 0.5 * (1.0 + rule.x)
        z = chart.point(s)
        _, _, C = evaluate_Cn(scheme, z)
        f = np.abs(C) ** 2 * _smooth_weight(measure, z) * chart.distance_ratio(s) ** alpha
        total += (0.5 * length) ** (alpha + 1.0) * float(np.sum(rule.w * f))
    return total


def verify_local_behavior(
    scheme: DivisionScheme | None,
    measure,
    eq: EquilibriumDensity | None = None,
    n_list: Sequence[int] | None = None,
    tau: float | None = None,
    samples: int = 2001,
    sup_samples: int = 20,
) -> LocalReport:
    """Measure the local quantities of C_n for every n in ``n_list``.

    ``scheme`` may be ``None``; schemes are then built per n with ``tau``
    (default: the conforming choice). When ``n_list`` is omitted the single
    degree of ``scheme`` is used.

    Raises:
        ConstructionError: if the support is not a single interval or a full circle
            around z0, or z0 is an endpoint.
    """
    if measure.location != "interior":
        raise ConstructionError("local checks need an interior point")
    if eq is None:
        eq = density_for(measure)
    if n_list is None:
        if scheme is None:
            raise ValueError("either a scheme or n_list is required")
        n_list = [scheme.n]
    chart = _Chart(measure, eq)
    alpha = measure.alpha
    z0 = measure.z0
    omega0 = (eq.eval(z0.real) if isinstance(eq, IntervalUnion) else float(np.real(eq.eval(z0))))
    w0 = measure.w0
    limit = w0 * L_alpha(alpha) / (math.pi * omega0) ** (alpha + 1.0)
    report = LocalReport(alpha, z0, w0, float(omega0), limit)
    for n in n_list:
        sch = scheme if (scheme is not None and scheme.n == n) else make_scheme(eq, z0, n, alpha, tau)
        radius = n ** (-sch.tau)
        s = np.linspace(max(-radius, chart.lo), min(radius, chart.hi), samples)
        z = chart.point(s)
        A, B, C = evaluate_Cn(sch, z)
        b_dev = float(np.max(np.abs(B - 1.0)))
        b_mod_dev = float(np.max(np.abs(np.abs(B) - 1.0)))
        # scaled Bessel zeros in the window and their excluded neighbourhoods
        scale = n * math.pi * sch.omega0
        kmax = int(radius * scale / math.pi) + 4
        jz = np.array(bessel_zeros(sch.beta, kmax)) / scale
        keep = np.ones(s.shape, dtype=bool)
        width = n ** (-(1.0 + sch.rho))
        for t in np.concatenate([jz, -jz]):
            keep &= np.abs(s - t) >= width
        J = kernel_Jcal(sch.beta, scale * s[keep])
        a_dev = float(np.max(np.abs(A[keep] - J) / (1.0 + np.abs(J)))) if keep.any() else math.nan
        s_all = np.linspace(chart.lo, chart.hi, sup_samples * n + 1)
        if chart.kind == "circle":
            s_all = s_all[:-1]
        _, _, C_all = evaluate_Cn(sch, chart.point(s_all))
        sup_C = float(np.max(np.abs(C_all)))
        integral = _window_integral(sch, measure, chart, radius)
        scaled = n ** (alpha + 1.0) * integral
        report.rows.append(
            {
                "n": int(n),
                "N_n": sch.N_n,
                "tau": sch.tau,
                "rho": sch.rho,
                "conforming": sch.conforming,
                "degree": sch.degree,
                "b_window_dev": b_dev,
                "b_modulus_dev": b_mod_dev,
                "a_kernel_dev": a_dev,
                "sup_C": sup_C,
                "scaled_integral": scaled,
                "limit": limit,
                "integral_ratio": scaled / limit,
            }
        )
    return report
