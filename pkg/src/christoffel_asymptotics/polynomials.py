"""Complex polynomials with Horner evaluation and an Aberth root finder."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["ComplexPolynomial", "aberth_roots"]


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with complex coefficients stored lowest degree first.

    Evaluation works for Python numbers, numpy arrays and gmpy2 ``mpc``/``mpfr``.
    """

    coeffs: tuple

    def __post_init__(self):
        c = [complex(x) for x in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0j]
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1.0) -> "ComplexPolynomial":
        c = np.array([complex(lead)])
        for r in roots:
            c = np.convolve(c, [-complex(r), 1.0])
        return cls(tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> complex:
        return self.coeffs[-1]

    def __call__(self, z):
        acc = self.coeffs[-1]
        if hasattr(z, "precision"):
            # avoid rounding the coefficients to double inside gmpy2 arithmetic
            from ._xp import to_xp

            acc = to_xp(acc)
            for c in reversed(self.coeffs[:-1]):
                acc = acc * z + to_xp(c)
            return acc
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + c
        return acc

    def deriv(self) -> "ComplexPolynomial":
        if self.degree == 0:
            return ComplexPolynomial((0j,))
        return ComplexPolynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def shift(self, c: complex) -> "ComplexPolynomial":
        """The polynomial p(z) - c."""
        co = list(self.coeffs)
        co[0] -= c
        return ComplexPolynomial(tuple(co))

    def roots(self, tol: float = 1e-13) -> np.ndarray:
        return aberth_roots(self.coeffs, tol=tol)


def aberth_roots(coeffs: Sequence[complex], tol: float = 1e-13, max_iter: int = 500) -> np.ndarray:
    """All roots of a polynomial by the Aberth-Ehrlich simultaneous iteration.

    Parameters
    ----------
    coeffs : sequence of complex
        Coefficients, lowest degree first; the leading one must be nonzero.
    tol : float
        Relative stopping tolerance on the Newton corrections.

    Returns
    -------
    numpy.ndarray
        Roots sorted lexicographically by (real, imag).
    """
    c = np.array([complex(x) for x in coeffs])
    while len(c) > 1 and c[-1] == 0:
        c = c[:-1]
    deg = len(c) - 1
    if deg < 1:
        return np.array([], dtype=complex)
    # zero roots are split off exactly
    nz = 0
    while nz < deg and c[nz] == 0:
        nz += 1
    c = c[nz:]
    deg_r = len(c) - 1
    roots = np.zeros(nz, dtype=complex)
    if deg_r >= 1:
        monic = c / c[-1]
        # Cauchy-type radius bound and staggered initial guesses
        radius = 1.0 + max(abs(x) for x in monic[:-1])
        rho = min(radius, max(abs(monic[0]) ** (1.0 / deg_r), 1e-3))
        z = rho * np.exp(1j * (2.0 * math.pi * np.arange(deg_r) / deg_r + 0.4))
        dcoef = np.array([k * monic[k] for k in range(1, deg_r + 1)])
        done = np.zeros(deg_r, dtype=bool)
        for _ in range(max_iter):
            pz = np.polyval(monic[::-1], z)
            dpz = np.polyval(dcoef[::-1], z)
            ratio = np.where(dpz != 0, pz / np.where(dpz != 0, dpz, 1), 0)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            denom = 1.0 - ratio * s
            step = np.where(denom != 0, ratio / np.where(denom != 0, denom, 1), ratio)
            step[done] = 0
            z = z - step
            done |= (np.abs(step) <= tol * np.maximum(1.0, np.abs(z))) | (pz == 0)
            if done.all():
                break
        # one Newton polish per root
        for _ in range(2):
            pz = np.polyval(monic[::-1], z)
            dpz = np.polyval(dcoef[::-1], z)
            ok = dpz != 0
            z[ok] = z[ok] - pz[ok] / dpz[ok]
        roots = np.concatenate([roots, z])
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]

