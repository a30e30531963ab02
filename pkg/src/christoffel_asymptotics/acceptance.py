"""Acceptance suite: fifteen numbered checks, each printed as one pass/fail line."""

from __future__ import annotations

import cmath
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .asymptotics import extrapolate, predict_endpoint, predict_interior
from .bessel import L_alpha, bessel_zeros, endpoint_gamma_constant, kernel_square_integral
from .christoffel import lambda_sweep
from .constructions import verify_local_behavior
from .equilibrium import (
    density_intervals,
    density_lemniscate,
    endpoint_constant,
    gap_integrals,
    gap_roots,
    pushforward_residual,
    symmetrization_residual,
)
from .geometry import Lemniscate, RealInterval, UnitCircle
from .harness import ScenarioConfig, export, run_scenario
from .measures import make_measure, sqrt_pullback
from .polynomials import ComplexPolynomial
from .quadrature import integrate_arc

__all__ = ["CriterionResult", "CRITERIA", "run_acceptance", "run_criterion"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {flag}  {self.title}: {self.detail}"


def _rel(a, b) -> float:
    return abs(float(a) - float(b)) / abs(float(b))


@lru_cache(maxsize=None)
def _scenario(sid: str, alpha: float | None = None, ladder: tuple = ()):
    return run_scenario(ScenarioConfig(sid, alpha=alpha, n_ladder=ladder))


# ---------------------------------------------------------------- criteria


def c1():
    m = make_measure([UnitCircle()], 1.0)
    res = lambda_sweep(m, list(range(51)))
    err = max(_rel(r.lam, 2 * mpmath.pi / (r.n + 1)) for r in res)
    return err < 1e-10, f"max rel err {err:.2e} for n = 0..50 (tol 1e-10)"


def c2():
    m = make_measure([RealInterval(-1.0, 1.0)], 1.0)
    res = lambda_sweep(m, list(range(1, 51)))
    err = max(_rel(r.lam, mpmath.mpf(2) / (r.n + 1) ** 2) for r in res)
    return err < 1e-8, f"max rel err {err:.2e} for n = 1..50 (tol 1e-8)"


def c3():
    worst = 0.0
    ns = [5, 10, 20, 40]
    for a in (1, 2):
        left = make_measure([RealInterval(0.0, 1.0)], 0.0, 0.5 * (a - 1))
        right = make_measure([RealInterval(-1.0, 1.0)], 0.0, a)
        lr = lambda_sweep(left, ns)
        rr = lambda_sweep(right, [2 * n for n in ns])
        worst = max(worst, max(_rel(x.lam, y.lam) for x, y in zip(lr, rr)))
    return worst < 1e-8, f"max rel disagreement {worst:.2e} over alpha in {{1,2}}, n in {ns} (tol 1e-8)"


def c4():
    ns = [10, 20, 40]
    mu = make_measure([RealInterval(0.0, 1.0)], 0.0)
    tilde = sqrt_pullback(mu)
    lr = lambda_sweep(mu, ns)
    rr = lambda_sweep(tilde, [2 * n for n in ns])
    worst = max(_rel(x.lam, y.lam) for x, y in zip(lr, rr))
    M = endpoint_constant([0.0, 1.0], 0.0)
    om = density_intervals([-1.0, 1.0]).eval(0.0)
    derr = max(abs(M - 1 / math.pi), abs(om - 1 / math.pi), abs(M - om))
    ok = worst < 1e-8 and derr < 1e-10
    return ok, f"max rel disagreement {worst:.2e} (tol 1e-8); |M - omega(0)|, |M - 1/pi| <= {derr:.1e} (tol 1e-10)"


def c5():
    parts, ok = [], True
    for a in (0.0, 1.0):
        rep = _scenario("model1", a)
        target = endpoint_gamma_constant(a)
        r = _rel(rep.extrapolated_limit, target)
        ok &= r < 0.02
        parts.append(f"alpha={a:g}: {rep.extrapolated_limit:.6f} vs {target:g} ({100 * r:.3f}%)")
        if a == 0.0:
            ex = max(_rel(row.lam, 1.0 / (row.n + 1) ** 2) for row in rep.rows)
            ok &= ex < 1e-8
            parts.append(f"exact 1/(n+1)^2 rel err {ex:.1e}")
    return ok, "; ".join(parts) + " (tol 2%)"


def c6():
    parts, ok = [], True
    for a, target in ((0.0, math.pi), (1.0, 4.0)):
        ok &= abs(L_alpha(a) - target) <= 1e-12 * target
        rep = _scenario("model2", a)
        r = _rel(rep.extrapolated_limit, target)
        ok &= r < 0.02
        parts.append(f"alpha={a:g}: {rep.extrapolated_limit:.6f} vs {target:.6f} ({100 * r:.3f}%)")
    return ok, "; ".join(parts) + " (tol 2%)"


def c7():
    rep = _scenario("circle_power", 1.0)
    target = 4.0 * L_alpha(1.0)
    r = _rel(rep.extrapolated_limit, target)
    return r < 0.03 and abs(target - 16) < 1e-12, f"{rep.extrapolated_limit:.6f} vs {target:g} ({100 * r:.3f}%, tol 3%)"


def c8():
    T = ComplexPolynomial((-0.5, 0.0, 1.0))
    z0 = cmath.sqrt(0.5 + 1j)
    rep = _scenario("lemniscate_power", 0.0)
    omega = abs(2 * z0) / (4 * math.pi)
    target = L_alpha(0.0) / (math.pi * omega)
    ok_d = abs(float(density_lemniscate(T).eval(z0)) - omega) < 1e-14
    r = _rel(rep.extrapolated_limit, target)
    # degenerate lemniscate z^2: the unit circle traced twice in phi
    sq = ComplexPolynomial((0.0, 0.0, 1.0))
    lem = make_measure([Lemniscate(sq)], 1j, 1.0)
    pl = predict_interior(1.0, float(density_lemniscate(sq).eval(1j)), 1.0).limit
    pc = predict_interior(1.0, 1.0 / (2 * math.pi), 1.0).limit
    ladder = (16, 25, 40, 64, 100, 160, 200)
    ll = lambda_sweep(lem, list(ladder))
    cl = _scenario("circle_power", 1.0)
    lam_err = max(_rel(x.lam, y.lam) for x, y in zip(ll, cl.rows))
    ex_l = extrapolate([(x.n, float(x.lam) * x.n**2) for x in ll]).limit
    con = max(_rel(ex_l, cl.extrapolated_limit), _rel(pl, pc), lam_err)
    ok = r < 0.03 and ok_d and con < 1e-6
    return ok, (
        f"{rep.extrapolated_limit:.6f} vs {target:.6f} ({100 * r:.3f}%, tol 3%); "
        f"z^2 against circle: max rel diff {con:.1e} (tol 1e-6)"
    )


def c9():
    ends = [-1.0, -0.25, 0.25, 1.0]
    eq = density_intervals(ends)
    xs = np.concatenate([np.linspace(-0.99, -0.26, 50), np.linspace(0.26, 0.99, 50), [0.6]])
    closed = np.abs(xs) / (math.pi * np.sqrt((xs**2 - 1 / 16) * (1 - xs**2)))
    derr = float(np.max(np.abs(eq.eval(xs) - closed)))
    rep = _scenario("two_intervals_interior", 0.0)
    target = L_alpha(0.0) / (math.pi * float(eq.eval(0.6)))
    r = _rel(rep.extrapolated_limit, target)
    ok = r < 0.04 and derr < 1e-10
    return ok, f"{rep.extrapolated_limit:.6f} vs {target:.6f} ({100 * r:.3f}%, tol 4%); density agreement {derr:.1e} (tol 1e-10)"


def c10():
    rep = _scenario("interval_endpoint", 1.0)
    target = 2.0**2 * endpoint_gamma_constant(1.0)  # 2^(alpha+1) Gamma(2) Gamma(3) = 8
    known = predict_endpoint(1.0, 1 / (math.pi * math.sqrt(2)), 1.0).limit
    exact = max(_rel(row.lam, 8.0 / ((row.n + 1) * (row.n + 2)) ** 2) for row in rep.rows)
    r = _rel(rep.extrapolated_limit, target)
    ok = r < 0.04 and abs(known - target) < 1e-12 and exact < 1e-8
    return ok, (
        f"{rep.extrapolated_limit:.6f} vs {target:g} ({100 * r:.3f}%, tol 4%); "
        f"known limit {known:.12g}; exact Jacobi rel err {exact:.1e}"
    )


def c11():
    sets = [[-1.0, 0.0, 0.5, 1.0], [-1.0, -0.25, 0.25, 1.0], [-3.0, -2.0, 0.0, 1.0, 1.5, 4.0]]
    gi = max(float(np.max(np.abs(gap_integrals(s, gap_roots(s))))) for s in sets)
    masses = [density_intervals([-1.0, 1.0]).mass(), density_intervals([-1.0, -0.25, 0.25, 1.0]).mass()]
    masses.append(density_lemniscate(ComplexPolynomial((-0.5, 0.0, 1.0))).mass())
    # independent mass check of the lemniscate by arc-length quadrature of |T'|/(2 pi N)
    T = ComplexPolynomial((-0.5, 0.0, 1.0))
    dT = T.deriv()
    masses.append(integrate_arc(Lemniscate(T), lambda z: np.abs(dT(z)) / (4 * math.pi)))
    merr = max(abs(m - 1) for m in masses)
    sym = max(abs(gap_roots([-1.0, -a, a, 1.0])[0]) for a in (0.1, 0.25, 0.5, 0.9))
    ok = gi < 1e-10 and merr < 1e-9 and sym < 1e-12
    return ok, f"gap integrals {gi:.1e} (tol 1e-10); mass error {merr:.1e} (tol 1e-9); symmetric root {sym:.1e} (tol 1e-12)"


def _bisect_j0():
    # oracle independent of the package: mpmath J0 and plain bisection
    lo, hi = mpmath.mpf(2), mpmath.mpf(3)
    with mpmath.workdps(40):
        for _ in range(120):
            mid = (lo + hi) / 2
            if mpmath.besselj(0, lo) * mpmath.besselj(0, mid) <= 0:
                hi = mid
            else:
                lo = mid
    return float((lo + hi) / 2)


def c12():
    zs = bessel_zeros(0.5, 20)
    e1 = max(abs(z - (k + 1) * math.pi) for k, z in enumerate(zs))
    j0 = bessel_zeros(0.0, 1)[0]
    oracle = _bisect_j0()
    e2 = max(abs(j0 - 2.404825557695773), abs(j0 - oracle))
    k50 = kernel_square_integral(0.0, 50.0)
    in_range = math.pi - 0.04 <= k50 <= math.pi
    worst = -math.inf
    for a in (-0.5, 0.0, 1.0, 2.0):
        for A in (10.0, 50.0, 200.0):
            worst = max(worst, kernel_square_integral(a, A) / L_alpha(a) - 1)
    ok = e1 < 1e-12 and e2 < 1e-12 and in_range and worst <= 1e-9
    return ok, (
        f"|j_(1/2,k) - k pi| {e1:.1e}; |j_(0,1) - oracle| {e2:.1e} (tol 1e-12); "
        f"integral(0, 50) = {k50:.6f}; max integral/L_alpha - 1 = {worst:.2e} (tol 1e-9)"
    )


def c13():
    T = ComplexPolynomial((-0.5, 0.0, 1.0))
    gs = [lambda w: w**4 + 2 * w**-3 - 1j * w, lambda w: np.cos(np.angle(w) * 3) + w**-4, lambda w: np.ones_like(w)]
    fs = [lambda z: z**3 - 2 * z + 1j * z**2, lambda z: (1 + 2j) * z + 3, lambda z: z**2]
    r1 = max(pushforward_residual(T, g) for g in gs)
    r2 = max(symmetrization_residual(T, f) for f in fs)
    return max(r1, r2) < 1e-8, f"pushforward residual {r1:.1e}, symmetrization residual {r2:.1e} (tol 1e-8)"


def c14():
    m = make_measure([RealInterval(-1.0, 1.0)], 0.0)
    rep = verify_local_behavior(None, m, None, [200, 500, 1000])
    bdev = rep.column("b_window_dev")
    sups = rep.column("sup_C")
    integ = rep.rows[-1]["scaled_integral"]
    dec = all(b2 < b1 for b1, b2 in zip(bdev, bdev[1:]))
    growth = all(s2 < 10 * s1 for s1, s2 in zip(sups, sups[1:]))
    bound = integ <= 1.25 * math.pi
    ok = dec and growth and bound
    return ok, (
        f"max|B_n - 1| = {', '.join(f'{b:.4f}' for b in bdev)} (decreasing: {dec}), N_n = {rep.column('N_n')}; "
        f"n*int|C_n|^2 = {integ:.4f} <= {1.25 * math.pi:.4f}: {bound}; sup|C_n| = {', '.join(f'{s:.3f}' for s in sups)}"
    )


def c15():
    cfgs = [ScenarioConfig("two_intervals_interior"), ScenarioConfig("circle_wT", alpha=0.5, n_ladder=(8, 16, 32))]
    same = True
    with tempfile.TemporaryDirectory() as d:
        for k, cfg in enumerate(cfgs):
            blobs = []
            for rep in range(2):
                path = os.path.join(d, f"run{k}_{rep}.csv")
                export(run_scenario(cfg), "csv", path)
                with open(path, "rb") as fh:
                    blobs.append(fh.read())
            same &= blobs[0] == blobs[1] and len(blobs[0]) > 0
    return same, f"repeated runs byte-identical: {same}"


CRITERIA = {
    1: ("exact circle oracle", c1),
    2: ("exact Legendre endpoint oracle", c2),
    3: ("folding identity", c3),
    4: ("square-root pullback identity", c4),
    5: ("endpoint model limit on [0,1]", c5),
    6: ("interior model limit on [-1,1]", c6),
    7: ("circle power weight limit", c7),
    8: ("lemniscate limit and z^2 consistency", c8),
    9: ("interior limit on two intervals", c9),
    10: ("endpoint limit on [-1,1]", c10),
    11: ("equilibrium module", c11),
    12: ("Bessel module", c12),
    13: ("lemniscate pushforward identities", c13),
    14: ("local test polynomial trends", c14),
    15: ("determinism", c15),
}


def run_criterion(k: int) -> CriterionResult:
    title, fn = CRITERIA[k]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported on the line
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(k, title, bool(ok), detail, time.perf_counter() - t0)


def run_acceptance(only=None, stream=sys.stdout) -> list[CriterionResult]:
    """Run the selected criteria (all by default), printing one line each."""
    out = []
    for k in sorted(CRITERIA) if only is None else only:
        if k not in CRITERIA:
            raise ValueError(f"no criterion {k}")
        res = run_criterion(k)
        out.append(res)
        if stream is not None:
            print(res.line(), file=stream, flush=True)
    return out
