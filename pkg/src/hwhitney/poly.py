"""Small exact-polynomial toolkit on ascending coefficient arrays.

Everything downstream (jet pieces, gap fillers, height lifts) stores curves as
plain coefficient vectors in ascending degree, so differentiation, products and
antiderivatives stay exact up to floating point roundoff.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import polynomial as npp


def as_coeffs(c) -> np.ndarray:
    """Coerce to a float coefficient array (ascending degree, length >= 1)."""
    arr = np.atleast_1d(np.asarray(c, dtype=float))
    if arr.ndim != 1:
        raise ValueError("coefficient data must be one-dimensional")
    if arr.size == 0:
        arr = np.zeros(1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite polynomial coefficient")
    return arr


def peval(c, s):
    """Evaluate p(s); s may be scalar or array."""
    return npp.polyval(np.asarray(s, dtype=float), as_coeffs(c))


def pder(c) -> np.ndarray:
    c = as_coeffs(c)
    if c.size == 1:
        return np.zeros(1)
    return npp.polyder(c)


def pint(c) -> np.ndarray:
    """Antiderivative with zero constant term."""
    return npp.polyint(as_coeffs(c))


def pmul(a, b) -> np.ndarray:
    return npp.polymul(as_coeffs(a), as_coeffs(b))


def padd(a, b) -> np.ndarray:
    return npp.polyadd(as_coeffs(a), as_coeffs(b))


def psub(a, b) -> np.ndarray:
    return npp.polysub(as_coeffs(a), as_coeffs(b))


def pair_area_rate(x_coeffs, y_coeffs) -> np.ndarray:
    """Coefficients of 2*(x'(t) y(t) - x(t) y'(t)).

    This is the plane's contribution to the height derivative of a horizontal
    lift, kept as an exact polynomial.
    """
    xc, yc = as_coeffs(x_coeffs), as_coeffs(y_coeffs)
    rate = psub(pmul(pder(xc), yc), pmul(xc, pder(yc)))
    return 2.0 * rate


def taylor_shift(c, s0: float) -> np.ndarray:
    """Coefficients b with p(s0 + u) = sum_k b_k u^k.

    Computed from derivatives at s0; degrees here never exceed ~8 so this is
    stable enough and exact in exact arithmetic.
    """
    c = as_coeffs(c)
    out = np.empty_like(c)
    cur = c
    fact = 1.0
    for k in range(c.size):
        out[k] = npp.polyval(s0, cur) / fact
        cur = npp.polyder(cur) if cur.size > 1 else np.zeros(1)
        fact *= k + 1
    return out


def sup_abs(c, lo: float, hi: float) -> float:
    """max |p| over [lo, hi], via critical points of p."""
    c = as_coeffs(c)
    if lo > hi:
        raise ValueError("empty interval")
    best = max(abs(float(npp.polyval(lo, c))), abs(float(npp.polyval(hi, c))))
    d = pder(c)
    if d.size > 1 or d[0] != 0.0:
        roots = npp.polyroots(d) if d.size > 1 else np.array([])
        for r in roots:
            if abs(r.imag) < 1e-12 * max(1.0, abs(r.real)):
                x = float(r.real)
                if lo <= x <= hi:
                    best = max(best, abs(float(npp.polyval(x, c))))
    return best


def poly_repr_ok(c) -> bool:
    """True when every coefficient survives a JSON round trip unchanged."""
    return all(float(repr(float(v))) == float(v) for v in as_coeffs(c))


def hypot_many(components: list[float]) -> float:
    return math.sqrt(sum(v * v for v in components))
