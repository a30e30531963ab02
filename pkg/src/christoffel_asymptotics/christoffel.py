"""Christoffel functions lambda_n(mu, z0) and extremal polynomials.

lambda_n = 1 / (v* G^{-1} v) with G the Gram matrix of a basis and v the basis
values at z0. With G = L L* the forward solve y = L^{-1} v gives every
lambda_k, k <= n, at once: 1/lambda_k = sum_{j<=k} |y_j|^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import gmpy2
import numpy as np

from ._xp import mpc, mpfr, workprec
from .measures import GUARD_BITS, PowerWeightMeasure, choose_basis, default_precision, gram

__all__ = [
    "ChristoffelResult",
    "IllConditionedError",
    "CholeskyBreakdown",
    "ExtremalPolynomial",
    "cholesky",
    "lambda_n",
    "lambda_sweep",
    "extremal_polynomial",
    "MAX_PRECISION",
]

MAX_PRECISION = 1 << 15


class CholeskyBreakdown(ArithmeticError):
    """A non-positive pivot was met."""

    def __init__(self, index):
        super().__init__(f"non-positive pivot at index {index}")
        self.index = index


class IllConditionedError(ArithmeticError):
    """The engine could not reach agreement below the precision cap.

    Attributes:
        condition_estimate: Squared ratio of extreme Cholesky pivots at the last
            successful factorization (``inf`` if none succeeded).
        best: Best available list of lambda values, or ``None``.
        precision_bits: Last precision tried.
    """

    def __init__(self, message, condition_estimate=float("inf"), best=None, precision_bits=None):
        super().__init__(message)
        self.condition_estimate = condition_estimate
        self.best = best
        self.precision_bits = precision_bits


@dataclass
class ChristoffelResult:
    """Value of the Christoffel function for one degree.

    Attributes
    ----------
    n : int
        Degree.
    lam : gmpy2.mpfr
        lambda_n at extended precision.
    precision_bits_used : int
        Precision of the accepted computation.
    error_estimate : float
        Absolute difference to the computation at half the precision.
    extremal_coeffs : list of complex or None
        Basis coefficients of the extremal polynomial, when requested.
    basis : str
        Name of the basis used.
    """

    n: int
    lam: object
    precision_bits_used: int
    error_estimate: float
    extremal_coeffs: list | None = None
    basis: str = ""
    condition_estimate: float = field(default=1.0, repr=False)

    @property
    def value(self) -> float:
        return float(self.lam)

    def __float__(self) -> float:
        return float(self.lam)


def _conj(x):
    return x.conjugate() if isinstance(x, mpc) else x


def _csum(terms):
    if terms and isinstance(terms[0], mpc) or any(isinstance(t, mpc) for t in terms):
        return mpc(gmpy2.fsum([mpc(t).real for t in terms]), gmpy2.fsum([mpc(t).imag for t in terms]))
    return gmpy2.fsum(terms) if terms else mpfr(0)


def cholesky(G: list, real: bool) -> list:
    """Lower-triangular L with G = L L* (rows of gmpy2 numbers).

    Raises:
        CholeskyBreakdown: on a non-positive pivot.
    """
    n = len(G)
    L = [[None] * (i + 1) for i in range(n)]
    if real:
        for j in range(n):
            row_j = L[j]
            d = G[j][j] - gmpy2.fsum([x * x for x in row_j[:j]]) if j else +G[j][j]
            if not d > 0:
                raise CholeskyBreakdown(j)
            ljj = gmpy2.sqrt(d)
            row_j[j] = ljj
            head = row_j[:j]
            for i in range(j + 1, n):
                row_i = L[i]
                s = gmpy2.fsum([a * b for a, b in zip(row_i[:j], head)]) if j else mpfr(0)
                row_i[j] = (G[i][j] - s) / ljj
        return L
    conj_rows = [None] * n
    for j in range(n):
        row_j = L[j]
        d = G[j][j].real - (gmpy2.fsum([gmpy2.norm(x) for x in row_j[:j]]) if j else 0)
        if not d > 0:
            raise CholeskyBreakdown(j)
        ljj = gmpy2.sqrt(d)
        row_j[j] = mpc(ljj)
        head = [x.conjugate() for x in row_j[:j]]
        conj_rows[j] = head
        for i in range(j + 1, n):
            row_i = L[i]
            s = _csum([a * b for a, b in zip(row_i[:j], head)]) if j else mpc(0)
            row_i[j] = (G[i][j] - s) / ljj
    return L


def _forward(L, v):
    y = []
    for i, row in enumerate(L):
        s = _csum([a * b for a, b in zip(row[:i], y)]) if i else 0
        y.append((v[i] - s) / row[i].real if isinstance(row[i], mpc) else (v[i] - s) / row[i])
    return y


def _backward_conj(L, y):
    """Solve L* x = y."""
    n = len(L)
    x = [None] * n
    for i in range(n - 1, -1, -1):
        s = _csum([_conj(L[k][i]) * x[k] for k in range(i + 1, n)]) if i < n - 1 else 0
        d = L[i][i].real if isinstance(L[i][i], mpc) else L[i][i]
        x[i] = (y[i] - s) / d
    return x


def _residual_ok(G, L, bits):
    """Probe ||G x - L (L* x)|| against 2^(-bits/2) ||G|| ||x||."""
    n = len(G)
    rng = np.random.default_rng(20240607)
    x = [mpfr(float(t)) for t in rng.uniform(-1.0, 1.0, n)]
    t = [_csum([_conj(L[k][i]) * x[k] for k in range(i, n)]) for i in range(n)]
    lt = [_csum([L[i][k] * t[k] for k in range(i + 1)]) for i in range(n)]
    gx = [_csum([G[i][k] * x[k] for k in range(n)]) for i in range(n)]
    err = max(abs(a - b) for a, b in zip(gx, lt))
    gnorm = max(gmpy2.fsum([abs(e) for e in row]) for row in G)
    xnorm = max(abs(e) for e in x)
    return err <= mpfr(2) ** (-bits // 2) * gnorm * xnorm


def _solve_at(measure, nmax, bits, basis):
    with workprec(bits + GUARD_BITS):
        gs = gram(measure, nmax, basis, bits)
        L = cholesky(gs.entries, gs.real)
        if not _residual_ok(gs.entries, L, bits):
            raise CholeskyBreakdown(-1)
        y = _forward(L, gs.vector)
        acc = mpfr(0)
        lams = []
        for yi in y:
            acc += gmpy2.norm(yi) if isinstance(yi, mpc) else yi * yi
            lams.append(1 / acc)
        piv = [float(abs(L[i][i])) for i in range(len(L))]
        cond = (max(piv) / min(piv)) ** 2
    return gs, L, y, lams, cond


def _agree(coarse, fine, bits):
    tol = mpfr(2) ** (-(bits // 4))
    return all(abs(a - b) <= tol * abs(b) for a, b in zip(coarse, fine))


def lambda_sweep(
    measure: PowerWeightMeasure,
    ns: Sequence[int],
    precision_bits: int | None = None,
    basis: str = "auto",
    with_coeffs: bool = False,
) -> list[ChristoffelResult]:
    """lambda_n for every n in ``ns`` from one Gram matrix of degree max(ns).

    The computation runs at precision p and 2p (doubling further when
    needed) until the two agree to relative accuracy 2^(-p/4); the finer
    values are returned with the difference as error estimate.

    Raises:
        IllConditionedError: when agreement is not reached below 2^15 bits.
    """
    ns = [int(n) for n in ns]
    if not ns:
        raise ValueError("ns must be non-empty")
    if any(n < 0 for n in ns) or ns != sorted(ns):
        raise ValueError("ns must be non-negative and ascending")
    nmax = ns[-1]
    b = choose_basis(measure, basis)
    bits = int(precision_bits) if precision_bits else default_precision(nmax, b)
    prev = None
    last_cond = float("inf")
    while bits <= MAX_PRECISION:
        try:
            gs, L, y, lams, cond = _solve_at(measure, nmax, bits, basis)
        except CholeskyBreakdown:
            prev = None
            bits *= 2
            continue
        last_cond = cond
        if prev is not None and _agree(prev[1], lams, prev[0]):
            coarse = prev[1]
            out = []
            for n in ns:
                err = float(abs(lams[n] - coarse[n]))
                coeffs = None
                if with_coeffs:
                    coeffs = _coefficients(L, y, lams, n, bits)
                out.append(ChristoffelResult(n, lams[n], bits, err, coeffs, gs.basis, cond))
            return out
        prev = (bits, lams)
        bits *= 2
    best = None if prev is None else [float(x) for x in prev[1]]
    raise IllConditionedError(
        "Christoffel computation did not converge below the precision cap",
        condition_estimate=last_cond,
        best=best,
        precision_bits=bits // 2,
    )


def _coefficients(L, y, lams, n, bits):
    with workprec(bits + GUARD_BITS):
        Ln = [row[: n + 1] for row in L[: n + 1]]
        x = _backward_conj(Ln, y[: n + 1])
        lam = lams[n]
        return [complex(_conj(t) * lam) for t in x]


def lambda_n(measure: PowerWeightMeasure, n: int, precision_bits: int | None = None, basis: str = "auto") -> ChristoffelResult:
    """Christoffel function lambda_n(mu, z0) = inf { int |P|^2 dmu : deg P <= n, P(z0) = 1 }."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return lambda_sweep(measure, [n], precision_bits, basis)[0]


class ExtremalPolynomial(list):
    """Basis coefficients of K_n(z, z0)/K_n(z0, z0); callable on complex arguments."""

    def __init__(self, coeffs, basis_obj, lam):
        super().__init__(coeffs)
        self.basis = basis_obj
        self.lam = lam

    def __call__(self, z):
        return self.basis.evaluate(list(self), z)


def extremal_polynomial(measure: PowerWeightMeasure, n: int, basis: str = "auto", precision_bits: int | None = None):
    """Coefficients of the extremal polynomial in the chosen basis."""
    res = lambda_sweep(measure, [n], precision_bits, basis, with_coeffs=True)[0]
    return ExtremalPolynomial(res.extremal_coeffs, choose_basis(measure, basis), res.lam)
