"""Thin helpers around gmpy2 for extended-precision arithmetic."""

from __future__ import annotations

import gmpy2
from gmpy2 import mpc, mpfr

__all__ = ["workprec", "mpfr", "mpc", "to_xp", "xp_pi", "xsum", "xdot"]


def workprec(bits: int):
    """Context manager setting the gmpy2 working precision to ``bits``."""
    return gmpy2.context(gmpy2.get_context(), precision=int(bits))


def to_xp(value):
    """Convert a Python/numpy/mpmath number to mpfr or mpc at the current precision."""
    if isinstance(value, (mpfr, mpc)):
        return +value
    if isinstance(value, complex) or hasattr(value, "imag") and not isinstance(value, (int, float)):
        re = getattr(value, "real", value)
        im = getattr(value, "imag", 0)
        if im == 0:
            return mpfr(_real(re))
        return mpc(_real(re), _real(im))
    return mpfr(_real(value))


def _real(value):
    if isinstance(value, (int, mpfr)):
        return value
    try:
        import mpmath

        if isinstance(value, mpmath.mpf):
            man, exp = value.man_exp
            return mpfr(man) * gmpy2.exp2(exp) if man else mpfr(0)
    except ImportError:  # pragma: no cover
        pass
    return float(value)


def xp_pi():
    return gmpy2.const_pi()


def xsum(values):
    """Sum of mpfr values (correctly rounded) or of mpc values."""
    values = list(values)
    if not values:
        return mpfr(0)
    if any(isinstance(v, mpc) for v in values):
        return mpc(gmpy2.fsum([mpc(v).real for v in values]), gmpy2.fsum([mpc(v).imag for v in values]))
    return gmpy2.fsum(values)


def xdot(a, b):
    """Dot product sum(a_i * b_i) without conjugation."""
    return xsum([x * y for x, y in zip(a, b)])
