"""Heisenberg group primitives.

The group H^n is R^(2n+1) with coordinates (x1, y1, ..., xn, yn, t), the
polynomial group law, anisotropic dilations (r on the horizontal coordinates,
r^2 on the height), and the contact structure whose kernel is the horizontal
plane field.  A curve (gamma, h) is horizontal iff

    h'(s) = 2 * sum_j (fj'(s) gj(s) - fj(s) gj'(s)),

so the height of a horizontal curve is recovered from the planar projection by
integrating the symplectic pairing; that integral is the horizontal lift.

All operations here are pure and all values immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from . import poly


class DimensionError(ValueError):
    """Operands live in Heisenberg groups of different n."""


@dataclass(frozen=True)
class HPoint:
    """A point of H^n, coords ordered (x1, y1, ..., xn, yn, t)."""

    coords: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coords)
        if len(c) < 3 or len(c) % 2 == 0:
            raise ValueError(f"H^n point needs 2n+1 coordinates, got {len(c)}")
        if not all(math.isfinite(v) for v in c):
            raise ValueError("non-finite coordinate in H^n point")
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return (len(self.coords) - 1) // 2

    @property
    def height(self) -> float:
        return self.coords[-1]

    def planar(self) -> np.ndarray:
        """The projection to R^(2n)."""
        return np.asarray(self.coords[:-1])

    def plane(self, j: int) -> np.ndarray:
        """(x_j, y_j) for plane index j (0-based)."""
        return np.asarray(self.coords[2 * j : 2 * j + 2])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords)

    @staticmethod
    def origin(n: int) -> "HPoint":
        return HPoint((0.0,) * (2 * n + 1))

    @staticmethod
    def from_array(arr) -> "HPoint":
        return HPoint(tuple(float(v) for v in np.asarray(arr, dtype=float)))


@dataclass(frozen=True)
class PlanarPoint:
    """A point of one x_j y_j-plane."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("non-finite planar point")

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y], dtype=dtype or float)

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class SampledCurve:
    """A curve sampled on a strictly increasing grid, values row per point."""

    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if values.shape[0] != grid.shape[0]:
            raise ValueError("values not aligned with grid")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if self.derivs is not None:
            derivs = np.asarray(self.derivs, dtype=float)
            if derivs.shape != values.shape:
                raise ValueError("derivs not aligned with values")
            object.__setattr__(self, "derivs", derivs)


def _check_same_n(p: HPoint, q: HPoint):
    if p.n != q.n:
        raise DimensionError(f"mixed Heisenberg dimensions n={p.n} and n={q.n}")


def group_mul(p: HPoint, q: HPoint) -> HPoint:
    """Group product p * q.

    The height term sums 2n+2 products of mixed sign; it is accumulated with
    exact summation so chained products stay associative to a few ulp.
    """
    _check_same_n(p, q)
    a, b = p.as_array(), q.as_array()
    out = a + b
    terms = [a[-1], b[-1]]
    for j in range(p.n):
        terms.append(2.0 * b[2 * j] * a[2 * j + 1])
        terms.append(-2.0 * a[2 * j] * b[2 * j + 1])
    out[-1] = math.fsum(terms)
    return HPoint.from_array(out)


def group_inv(p: HPoint) -> HPoint:
    """Group inverse; equals coordinate negation, the bilinear height term cancels."""
    return HPoint.from_array(-p.as_array())


def dilate(r: float, p: HPoint) -> HPoint:
    """The dilation delta_r: r on horizontal coordinates, r^2 on the height."""
    if not (r > 0):
        raise ValueError(f"dilation factor must be positive, got {r}")
    out = r * p.as_array()
    out[-1] = r * r * p.height
    return HPoint.from_array(out)


def symplectic(u, v) -> float:
    """Standard symplectic form on R^2: u1 v2 - u2 v1."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u[0] * v[1] - u[1] * v[0])


def contact_residual(value, velocity) -> float:
    """h' - 2 sum_j (fj' gj - fj gj'); zero iff velocity is horizontal at value.

    `value` may be an HPoint or a (2n+1,) array; `velocity` a (2n+1,) array.
    """
    v = value.as_array() if isinstance(value, HPoint) else np.asarray(value, dtype=float)
    w = np.asarray(velocity, dtype=float)
    if v.shape != w.shape:
        raise DimensionError(f"value and velocity shapes differ: {v.shape} vs {w.shape}")
    if v.ndim != 1 or v.size < 3 or v.size % 2 == 0:
        raise DimensionError(f"expected 2n+1 components, got shape {v.shape}")
    f, g = v[:-1:2], v[1:-1:2]
    df, dg = w[:-1:2], w[1:-1:2]
    return float(w[-1] - 2.0 * (np.dot(df, g) - np.dot(f, dg)))


def pansu_quotient(pa: HPoint, pb: HPoint, step: float) -> HPoint:
    """Group-intrinsic difference quotient delta_(1/step)(pa^-1 * pb).

    The dilation is applied by dividing through by step (step^2 on the
    height) so the horizontal entries equal (gamma(b) - gamma(a)) / step
    bit-exactly, not just up to the rounding of a reciprocal.
    """
    if not (step > 0):
        raise ValueError(f"step must be positive, got {step}")
    prod = group_mul(group_inv(pa), pb).as_array()
    out = prod / step
    out[-1] = prod[-1] / (step * step)
    return HPoint.from_array(out)


class HeightFunction:
    """Height of a horizontal lift: h(s) = h0 + 2 sum_j int_a^s w(gj', gj)."""

    def __init__(self, h0: float, anchor: float):
        self.h0 = float(h0)
        self.anchor = float(anchor)

    def __call__(self, s):  # pragma: no cover - overridden
        raise NotImplementedError

    def derivative(self, s):  # pragma: no cover - overridden
        raise NotImplementedError


class PolynomialHeight(HeightFunction):
    """Exact closed-form lift of a tuple of planar polynomial pairs."""

    def __init__(self, planes: Sequence[tuple], h0: float, anchor: float):
        super().__init__(h0, anchor)
        rate = np.zeros(1)
        for fc, gc in planes:
            rate = poly.padd(rate, poly.pair_area_rate(fc, gc))
        anti = poly.pint(rate)
        offset = h0 - float(poly.peval(anti, anchor))
        self.coeffs = poly.padd(anti, np.array([offset]))
        self.rate_coeffs = rate

    def __call__(self, s):
        return poly.peval(self.coeffs, s)

    def derivative(self, s):
        return poly.peval(self.rate_coeffs, s)


class QuadratureHeight(HeightFunction):
    """Adaptive-quadrature lift for non-polynomial planar curves."""

    def __init__(
        self,
        gamma: Callable,
        dgamma: Callable,
        h0: float,
        interval: tuple[float, float],
        tol: float = 1e-12,
    ):
        super().__init__(h0, interval[0])
        self.interval = (float(interval[0]), float(interval[1]))
        self.tol = float(tol)
        self._gamma = gamma
        self._dgamma = dgamma

    def _rate(self, s: float) -> float:
        g = np.asarray(self._gamma(s), dtype=float).reshape(-1, 2)
        dg = np.asarray(self._dgamma(s), dtype=float).reshape(-1, 2)
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(dg))):
            raise ValueError(f"non-finite planar data at s={s}")
        return 2.0 * float(np.sum(dg[:, 0] * g[:, 1] - g[:, 0] * dg[:, 1]))

    def __call__(self, s):
        if np.ndim(s) > 0:
            return np.array([self(v) for v in np.asarray(s, dtype=float)])
        val, err = integrate.quad(
            self._rate, self.anchor, float(s), epsabs=self.tol, epsrel=0.0, limit=200
        )
        if err > max(self.tol, 1e-10 * abs(val)):
            raise ArithmeticError(
                f"lift quadrature did not converge: requested {self.tol}, achieved {err}"
            )
        return self.h0 + val

    def derivative(self, s):
        if np.ndim(s) > 0:
            return np.array([self._rate(v) for v in np.asarray(s, dtype=float)])
        return self._rate(float(s))


def horizontal_lift(
    planar,
    h0: float,
    interval: tuple[float, float],
    dgamma: Callable | None = None,
    tol: float = 1e-12,
) -> HeightFunction:
    """Height function of the horizontal lift with starting height h(a) = h0.

    `planar` is either a sequence of (f_coeffs, g_coeffs) pairs, one per plane
    (closed-form lift, exact), or a callable s -> (n, 2) array of planar values
    with its derivative supplied in `dgamma` (adaptive quadrature, absolute
    tolerance `tol`).
    """
    a, b = float(interval[0]), float(interval[1])
    if not (math.isfinite(a) and math.isfinite(b) and a <= b):
        raise ValueError(f"bad lift interval {interval}")
    if callable(planar):
        if dgamma is None:
            raise ValueError("quadrature lift needs the planar derivative")
        return QuadratureHeight(planar, dgamma, h0, (a, b), tol=tol)
    planes = [(poly.as_coeffs(fc), poly.as_coeffs(gc)) for fc, gc in planar]
    return PolynomialHeight(planes, h0, a)
