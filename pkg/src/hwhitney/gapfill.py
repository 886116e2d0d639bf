"""Planar gap fillers: one C1 curve per gap and plane, with prescribed data.

Working in a frame where the gap is [0, delta] and the chord points along the
positive x-axis, the filler must hit (0,0) and (ell, 0), match the projected
endpoint derivatives (alpha, mu) and (beta, nu), stay inside the envelope
P(eps) = C' (sqrt(eps) + eps^2), and sweep a prescribed signed area lam:

    2 * integral_0^delta (x' y - x y') = lam.

Two constructions cover all admissible parameters, split by the size of
|alpha + beta - 9 ell / delta| against sqrt(eps):

  * a cubic x paired with a quartic y whose coefficients solve the area
    equation in closed form (well-posed exactly when the split quantity is
    large), and
  * a three-piece curve - cubic ramp, full circle of radius |H|^(1/2)/(2
    sqrt(pi)) traversed once, cubic ramp - whose circle absorbs the area
    budget H = lam - delta ell (mu - nu) / 15.

Both branches were checked symbolically; the tests re-verify every condition
against an independent quadrature oracle.  An isometric relocation (rotation
plus translation) then carries the filler onto the actual gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import poly

TWO_SQRT_PI = 2.0 * math.sqrt(math.pi)


class AdmissibilityError(ValueError):
    """A gap's parameters violate one of the pre-construction bounds."""


class Branch(Enum):
    POLYNOMIAL = "polynomial"
    CIRCLE = "circle"


@dataclass(frozen=True)
class GapFrame:
    """Chord-aligned orthonormal frame of a gap in one plane.

    `rot` maps the local frame (chord direction, counterclockwise normal) to
    the plane; `shift` is the curve value at the left endpoint.  A zero chord
    degenerates to the identity rotation.
    """

    u: np.ndarray
    v: np.ndarray
    ell: float
    rot: np.ndarray
    shift: np.ndarray
    degenerate: bool


def gap_frame(pa, pb) -> GapFrame:
    """Frame for the chord from pa to pb; identity frame when pa == pb."""
    pa = np.asarray(pa, dtype=float)
    pb = np.asarray(pb, dtype=float)
    chord = pb - pa
    ell = float(np.linalg.norm(chord))
    if ell == 0.0:
        u = np.array([1.0, 0.0])
        v = np.array([0.0, 1.0])
        rot = np.eye(2)
        degenerate = True
    else:
        u = chord / ell
        v = np.array([-u[1], u[0]])
        rot = np.column_stack([u, v])
        degenerate = False
    return GapFrame(u=u, v=v, ell=ell, rot=rot, shift=pa.copy(), degenerate=degenerate)


@dataclass(frozen=True)
class LemmaParams:
    """Scalar data of one gap filler, already expressed in the gap frame.

    delta: gap length; ell: chord length; alpha/beta: chordwise derivative
    components at the endpoints; mu/nu: normal components; lam: the plane's
    signed-area share; eps: the gap's scale bound; big_m: derivative/chord
    bound; c_prime: envelope constant.
    """

    delta: float
    ell: float
    alpha: float
    beta: float
    mu: float
    nu: float
    lam: float
    eps: float
    big_m: float
    c_prime: float

    def __post_init__(self):
        if not (self.delta > 0):
            raise AdmissibilityError(f"gap length must be positive, got {self.delta}")
        if not (self.eps > 0):
            raise AdmissibilityError(f"epsilon must be positive, got {self.eps}")
        if self.ell < 0:
            raise AdmissibilityError("chord length cannot be negative")
        bounds = {
            "delta < eps": self.delta < self.eps,
            "ell < eps": self.ell < self.eps,
            "|lam|/delta^2 < eps": abs(self.lam) / self.delta**2 < self.eps,
            "|alpha - ell/delta| < eps": abs(self.alpha - self.ell / self.delta) < self.eps,
            "|beta - ell/delta| < eps": abs(self.beta - self.ell / self.delta) < self.eps,
            "|mu| < eps": abs(self.mu) < self.eps,
            "|nu| < eps": abs(self.nu) < self.eps,
        }
        bad = [name for name, ok in bounds.items() if not ok]
        if bad:
            raise AdmissibilityError(
                "gap parameters violate pre-construction bounds: " + "; ".join(bad)
            )

    @property
    def chord_rate(self) -> float:
        return self.ell / self.delta

    def envelope(self) -> float:
        """P(eps) = C'(sqrt(eps) + eps^2)."""
        return self.c_prime * (math.sqrt(self.eps) + self.eps**2)


def default_c_prime(big_m: float) -> float:
    """Envelope constant from the explicit construction estimates, with headroom."""
    return max(
        6.0 * big_m + 5.0,
        12.0,
        2.0 * big_m + 2.0,
        2.0 * math.sqrt(46656.0 * math.pi),
        300.0,
    )


def lemma_params(jet, gap, j: int, c_prime: float | None = None) -> LemmaParams:
    """Extract the frame-aligned construction scalars for plane j of a gap.

    Requires gap.epsilon to be populated; raises AdmissibilityError naming the
    violated bound if the epsilon is too small for this jet.
    """
    if gap.epsilon is None:
        raise ValueError("gap has no epsilon assigned; run epsilon_sequence first")
    if not (0 <= j < jet.n):
        raise ValueError(f"plane index {j} out of range for n={jet.n}")
    va, vb = jet.value(gap.a), jet.value(gap.b)
    da, db = jet.deriv(gap.a), jet.deriv(gap.b)
    sl = slice(2 * j, 2 * j + 2)
    frame = gap_frame(va[sl], vb[sl])
    delta = gap.length
    cross = sum(
        vb[2 * m] * va[2 * m + 1] - va[2 * m] * vb[2 * m + 1] for m in range(jet.n)
    )
    lam = (vb[-1] - va[-1] - 2.0 * cross) / jet.n
    from .jets import big_m as jet_big_m

    m_bound = jet_big_m(jet)
    return LemmaParams(
        delta=delta,
        ell=frame.ell,
        alpha=float(np.dot(da[sl], frame.u)),
        beta=float(np.dot(db[sl], frame.u)),
        mu=float(np.dot(da[sl], frame.v)),
        nu=float(np.dot(db[sl], frame.v)),
        lam=float(lam),
        eps=float(gap.epsilon),
        big_m=m_bound,
        c_prime=default_c_prime(m_bound) if c_prime is None else float(c_prime),
    )


def branch_test(p: LemmaParams) -> Branch:
    """Construction dispatch; ties go to the circle branch."""
    split = abs(p.alpha + p.beta - 9.0 * p.chord_rate)
    return Branch.POLYNOMIAL if split > math.sqrt(p.eps) else Branch.CIRCLE


# ---------------------------------------------------------------------------
# Curve pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialPiece:
    """Planar polynomial pair on [domain[0], domain[1]], local u = s - tref."""

    x_coeffs: np.ndarray
    y_coeffs: np.ndarray
    domain: tuple[float, float]
    tref: float = 0.0

    def _u(self, s):
        return np.asarray(s, dtype=float) - self.tref

    def value_many(self, s) -> np.ndarray:
        u = self._u(s)
        return np.stack([poly.peval(self.x_coeffs, u), poly.peval(self.y_coeffs, u)], axis=-1)

    def deriv_many(self, s) -> np.ndarray:
        u = self._u(s)
        return np.stack(
            [poly.peval(poly.pder(self.x_coeffs), u), poly.peval(poly.pder(self.y_coeffs), u)],
            axis=-1,
        )

    def value(self, s: float) -> np.ndarray:
        return self.value_many(s)

    def deriv(self, s: float) -> np.ndarray:
        return self.deriv_many(s)

    def area_rate_coeffs(self) -> np.ndarray:
        return poly.pair_area_rate(self.x_coeffs, self.y_coeffs)

    def area_rate(self, s) -> float:
        return poly.peval(self.area_rate_coeffs(), self._u(s))

    def area_integral(self, s=None) -> float:
        """integral of 2(x'y - xy') from domain start to s (default: full piece)."""
        s = self.domain[1] if s is None else s
        anti = poly.pint(self.area_rate_coeffs())
        u0 = self.domain[0] - self.tref
        return float(poly.peval(anti, self._u(s)) - poly.peval(anti, u0))

    def translated(self, offset: float) -> "PolynomialPiece":
        return PolynomialPiece(
            self.x_coeffs.copy(),
            self.y_coeffs.copy(),
            (self.domain[0] + offset, self.domain[1] + offset),
            self.tref + offset,
        )

    def rotated(self, rot: np.ndarray, shift: np.ndarray) -> "PolynomialPiece":
        xc = rot[0, 0] * self.x_coeffs
        xc = poly.padd(xc, rot[0, 1] * self.y_coeffs)
        xc = poly.padd(xc, np.array([float(shift[0])]))
        yc = rot[1, 0] * self.x_coeffs
        yc = poly.padd(yc, rot[1, 1] * self.y_coeffs)
        yc = poly.padd(yc, np.array([float(shift[1])]))
        return PolynomialPiece(xc, yc, self.domain, self.tref)

    def to_json_dict(self) -> dict:
        return {
            "kind": "polynomial",
            "x": list(self.x_coeffs),
            "y": list(self.y_coeffs),
            "domain": [self.domain[0], self.domain[1]],
            "tref": self.tref,
        }


@dataclass(frozen=True)
class ArcPiece:
    """Circular arc x = R cos(tau(u)) + cx, y = R sin(tau(u)) + cy, tau cubic.

    `tau_coeffs` already carries the traversal sign; `sign` records the
    branch (+1 when the swept area budget H was <= 0).
    """

    radius: float
    center: np.ndarray
    tau_coeffs: np.ndarray
    sign: int
    domain: tuple[float, float]
    tref: float = 0.0

    def _u(self, s):
        return np.asarray(s, dtype=float) - self.tref

    def tau(self, s):
        return poly.peval(self.tau_coeffs, self._u(s))

    def tau_rate(self, s):
        return poly.peval(poly.pder(self.tau_coeffs), self._u(s))

    def value_many(self, s) -> np.ndarray:
        th = self.tau(s)
        return np.stack(
            [
                self.radius * np.cos(th) + self.center[0],
                self.radius * np.sin(th) + self.center[1],
            ],
            axis=-1,
        )

    def deriv_many(self, s) -> np.ndarray:
        th = self.tau(s)
        dth = self.tau_rate(s)
        return np.stack(
            [-self.radius * np.sin(th) * dth, self.radius * np.cos(th) * dth],
            axis=-1,
        )

    def value(self, s: float) -> np.ndarray:
        return self.value_many(s)

    def deriv(self, s: float) -> np.ndarray:
        return self.deriv_many(s)

    def area_rate(self, s) -> float:
        # 2(x'y - xy') = -2 R^2 tau' - 2 R tau' (cy sin + cx cos)
        th = self.tau(s)
        dth = self.tau_rate(s)
        cx, cy = float(self.center[0]), float(self.center[1])
        return float(
            -2.0 * self.radius**2 * dth
            - 2.0 * self.radius * dth * (cy * np.sin(th) + cx * np.cos(th))
        )

    def area_integral(self, s=None) -> float:
        s = self.domain[1] if s is None else s
        th0 = float(self.tau(self.domain[0]))
        th1 = float(self.tau(s))
        cx, cy = float(self.center[0]), float(self.center[1])
        swirl = -self.radius**2 * (th1 - th0)
        wobble = -self.radius * (
            cx * (math.sin(th1) - math.sin(th0)) - cy * (math.cos(th1) - math.cos(th0))
        )
        return 2.0 * (swirl + wobble)

    def translated(self, offset: float) -> "ArcPiece":
        return ArcPiece(
            self.radius,
            self.center.copy(),
            self.tau_coeffs.copy(),
            self.sign,
            (self.domain[0] + offset, self.domain[1] + offset),
            self.tref + offset,
        )

    def rotated(self, rot: np.ndarray, shift: np.ndarray) -> "ArcPiece":
        theta = math.atan2(rot[1, 0], rot[0, 0])
        tau = self.tau_coeffs.copy()
        tau[0] += theta
        return ArcPiece(
            self.radius,
            rot @ self.center + np.asarray(shift, dtype=float),
            tau,
            self.sign,
            self.domain,
            self.tref,
        )

    def to_json_dict(self) -> dict:
        return {
            "kind": "arc",
            "radius": self.radius,
            "center": [float(self.center[0]), float(self.center[1])],
            "tau": list(self.tau_coeffs),
            "sign": self.sign,
            "domain": [self.domain[0], self.domain[1]],
            "tref": self.tref,
        }


PlanarPiece = PolynomialPiece | ArcPiece


def piece_from_json_dict(data: dict) -> PlanarPiece:
    kind = data.get("kind")
    domain = (float(data["domain"][0]), float(data["domain"][1]))
    tref = float(data.get("tref", 0.0))
    if kind == "polynomial":
        return PolynomialPiece(
            poly.as_coeffs(data["x"]), poly.as_coeffs(data["y"]), domain, tref
        )
    if kind == "arc":
        return ArcPiece(
            float(data["radius"]),
            np.asarray(data["center"], dtype=float),
            poly.as_coeffs(data["tau"]),
            int(data["sign"]),
            domain,
            tref,
        )
    raise ValueError(f"unknown piece kind {kind!r}")


# ---------------------------------------------------------------------------
# The two constructions (local frame, domain [0, delta])
# ---------------------------------------------------------------------------


def eta_polynomial(p: LemmaParams) -> PolynomialPiece:
    """Cubic/quartic filler for the well-separated case."""
    d, l = p.delta, p.ell
    al, be, mu, nu, lam = p.alpha, p.beta, p.mu, p.nu, p.lam
    q = d * (al + be) - 9.0 * l
    if abs(q) < math.sqrt(p.eps) * d:
        raise ArithmeticError(
            "polynomial-branch denominator degenerate; branch dispatch violated"
        )
    xc = np.array(
        [
            0.0,
            al,
            (-d * (2.0 * al + be) + 3.0 * l) / d**2,
            (d * (al + be) - 2.0 * l) / d**3,
        ]
    )
    dcoef = 7.0 * (6.0 * d * l * (mu - nu) + d**2 * (al * nu - be * mu) - 15.0 * lam) / (
        2.0 * d**4 * q
    )
    ecoef = (
        d * l * (33.0 * nu - 51.0 * mu)
        + d**2 * (al * (mu - 6.0 * nu) + be * (8.0 * mu + nu))
        + 105.0 * lam
    ) / (d**3 * q)
    fcoef = -(
        d * l * (24.0 * nu - 78.0 * mu)
        + d**2 * (4.0 * al * mu + 11.0 * be * mu - 5.0 * al * nu + 2.0 * be * nu)
        + 105.0 * lam
    ) / (2.0 * d**2 * q)
    yc = np.array([0.0, mu, fcoef, ecoef, dcoef])
    return PolynomialPiece(xc, yc, (0.0, d))


def eta_circle(p: LemmaParams) -> list[PlanarPiece]:
    """Three-piece filler: cubic ramp, area-absorbing circle, cubic ramp."""
    d, l = p.delta, p.ell
    al, be, mu, nu, lam = p.alpha, p.beta, p.mu, p.nu, p.lam
    left = PolynomialPiece(
        np.array([0.0, al, (-12.0 * d * al + 27.0 * l) / (2.0 * d**2), (9.0 * d * al - 27.0 * l) / d**3]),
        np.array([0.0, mu, -6.0 * mu / d, 9.0 * mu / d**2]),
        (0.0, d / 3.0),
    )
    right = PolynomialPiece(
        np.array(
            [
                -4.0 * d * be + 14.5 * l,
                (16.0 * d * be - 54.0 * l) / d,
                (-42.0 * d * be + 135.0 * l) / (2.0 * d**2),
                (9.0 * d * be - 27.0 * l) / d**3,
            ]
        ),
        np.array([-4.0 * d * nu, 16.0 * nu, -21.0 * nu / d, 9.0 * nu / d**2]),
        (2.0 * d / 3.0, d),
    )
    swept = lam - d * l * (mu - nu) / 15.0
    radius = math.sqrt(abs(swept)) / TWO_SQRT_PI
    sign = 1 if swept <= 0 else -1
    tau = sign * np.array(
        [10.0 * math.pi, -72.0 * math.pi / d, 162.0 * math.pi / d**2, -108.0 * math.pi / d**3]
    )
    arc = ArcPiece(
        radius=radius,
        center=np.array([l / 2.0 - radius, 0.0]),
        tau_coeffs=tau,
        sign=sign,
        domain=(d / 3.0, 2.0 * d / 3.0),
    )
    return [left, arc, right]


def build_eta(p: LemmaParams) -> list[PlanarPiece]:
    """Dispatch on the branch test; output is C1 across seams by construction."""
    if branch_test(p) is Branch.POLYNOMIAL:
        return [eta_polynomial(p)]
    return eta_circle(p)


@dataclass(frozen=True)
class EnvelopeReport:
    """Measured filler size against the P(eps) envelope."""

    sup_value: float
    sup_deriv_dev: float
    bound: float
    value_ok: bool
    deriv_ok: bool
    c_prime: float
    eps: float

    def to_dict(self) -> dict:
        return {
            "supValue": self.sup_value,
            "supDerivDeviation": self.sup_deriv_dev,
            "bound": self.bound,
            "valueOk": self.value_ok,
            "derivOk": self.deriv_ok,
            "cPrime": self.c_prime,
            "eps": self.eps,
        }


def envelope_check(
    pieces: list[PlanarPiece], p: LemmaParams, samples_per_piece: int = 2000
) -> EnvelopeReport:
    """Dense-grid sup of |eta| and |eta' - (alpha, mu)| against P(eps)."""
    ref = np.array([p.alpha, p.mu])
    sup_v = 0.0
    sup_d = 0.0
    for piece in pieces:
        grid = np.linspace(piece.domain[0], piece.domain[1], samples_per_piece)
        vals = piece.value_many(grid)
        ders = piece.deriv_many(grid)
        sup_v = max(sup_v, float(np.max(np.linalg.norm(vals, axis=1))))
        sup_d = max(sup_d, float(np.max(np.linalg.norm(ders - ref, axis=1))))
    bound = p.envelope()
    return EnvelopeReport(
        sup_value=sup_v,
        sup_deriv_dev=sup_d,
        bound=bound,
        value_ok=sup_v < bound,
        deriv_ok=sup_d < bound,
        c_prime=p.c_prime,
        eps=p.eps,
    )


def relocate(
    pieces: list[PlanarPiece], frame: GapFrame, gap_start: float
) -> list[PlanarPiece]:
    """Carry local-frame pieces onto the gap: rotate, shift, move the domain."""
    return [
        piece.rotated(frame.rot, frame.shift).translated(gap_start) for piece in pieces
    ]


def fill_gap_plane(jet, gap, j: int, c_prime: float | None = None):
    """Build and relocate the filler for one plane of one gap.

    Returns (pieces on [gap.a, gap.b], LemmaParams, GapFrame).
    """
    params = lemma_params(jet, gap, j, c_prime)
    va, vb = jet.value(gap.a), jet.value(gap.b)
    sl = slice(2 * j, 2 * j + 2)
    frame = gap_frame(va[sl], vb[sl])
    local = build_eta(params)
    return relocate(local, frame, gap.a), params, frame
