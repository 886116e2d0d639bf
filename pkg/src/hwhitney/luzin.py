"""Luzin-type C1 approximation of piecewise-polynomial horizontal curves.

Given a horizontal curve that may fail to be C1 at finitely many knots, find a
compact E inside its domain missing less than a prescribed measure, such that
the restriction to E is an extendable Whitney jet; the extension then agrees
with the curve, values and derivatives, on all of E.

Selection works on a uniform cell grid with two local moduli per cell,

    psi_k(t) = sup over |s - t| < 1/k of the first-order Taylor quotient,
    phi_k(t) = sup over |s - t| < 1/k of the second-order area quotient,

evaluated with certified same-piece bounds (Taylor remainders deflate exactly,
leaving a polynomial sup computed from critical points) plus dense sampling of
knot-crossing pairs.  Cells touching a knot are always dropped.  The rung
ladder pairs window 2^-j with threshold 2^-j; the finest rung whose removal
fits the budget wins.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import poly
from .extension import ExtendedCurve, VerificationReport, extend, verify
from .heisenberg import PolynomialHeight
from .jets import CompactSet, JetPiece, Tolerances, WhitneyJet

KNOT_C1_TOL = 1e-12
CROSS_SAMPLES = 96


class BudgetError(RuntimeError):
    """No rung meets the removal budget; ask for a finer grid or larger eps."""


@dataclass(frozen=True)
class PiecewiseCurve:
    """Piecewise-polynomial planar curve with its horizontal lift.

    `knots` are the piece boundaries (first = a, last = b); piece i holds n
    (f_coeffs, g_coeffs) pairs in the absolute parameter.  The height is the
    lift anchored at h(a) = h0, accumulated continuously across knots, so the
    curve is horizontal wherever it is differentiable.
    """

    n: int
    knots: tuple[float, ...]
    planes: tuple[tuple[tuple[np.ndarray, np.ndarray], ...], ...]
    heights: tuple[np.ndarray, ...]
    h0: float

    @staticmethod
    def from_planar(n: int, knots, gamma_pieces, h0: float = 0.0) -> "PiecewiseCurve":
        kn = tuple(float(k) for k in knots)
        if len(kn) < 2 or any(b <= a for a, b in zip(kn, kn[1:])):
            raise ValueError("knots must be strictly increasing with at least 2 entries")
        if len(gamma_pieces) != len(kn) - 1:
            raise ValueError("need one planar piece per knot interval")
        planes = tuple(
            tuple((poly.as_coeffs(fc), poly.as_coeffs(gc)) for fc, gc in piece)
            for piece in gamma_pieces
        )
        for piece in planes:
            if len(piece) != n:
                raise ValueError("each piece needs one (f, g) pair per plane")
        # Continuity of the planar data across knots is required.
        for i, knot in enumerate(kn[1:-1], start=1):
            left, right = planes[i - 1], planes[i]
            for (fl, gl), (fr, gr) in zip(left, right):
                if (
                    abs(poly.peval(fl, knot) - poly.peval(fr, knot)) > 1e-9
                    or abs(poly.peval(gl, knot) - poly.peval(gr, knot)) > 1e-9
                ):
                    raise ValueError(f"planar curve discontinuous at knot {knot}")
        heights = []
        level = float(h0)
        for i, piece in enumerate(planes):
            lift = PolynomialHeight(list(piece), level, kn[i])
            heights.append(lift.coeffs)
            level = float(poly.peval(lift.coeffs, kn[i + 1]))
        return PiecewiseCurve(int(n), kn, planes, tuple(heights), float(h0))

    @property
    def domain(self) -> tuple[float, float]:
        return (self.knots[0], self.knots[-1])

    def piece_index(self, s: float, side: int = 0) -> int:
        kn = self.knots
        if not (kn[0] <= s <= kn[-1]):
            raise ValueError(f"{s} outside domain {self.domain}")
        idx = int(np.searchsorted(kn, s, side="right")) - 1
        idx = min(max(idx, 0), len(kn) - 2)
        if side < 0 and idx > 0 and s == kn[idx]:
            idx -= 1
        return idx

    def value(self, s: float, side: int = 0) -> np.ndarray:
        i = self.piece_index(s, side)
        out = np.empty(2 * self.n + 1)
        for j, (fc, gc) in enumerate(self.planes[i]):
            out[2 * j] = poly.peval(fc, s)
            out[2 * j + 1] = poly.peval(gc, s)
        out[-1] = poly.peval(self.heights[i], s)
        return out

    def value_many(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        idx = np.clip(
            np.searchsorted(self.knots, s, side="right") - 1, 0, len(self.knots) - 2
        )
        out = np.empty((s.size, 2 * self.n + 1))
        for i in np.unique(idx):
            m = idx == i
            for j, (fc, gc) in enumerate(self.planes[i]):
                out[m, 2 * j] = poly.peval(fc, s[m])
                out[m, 2 * j + 1] = poly.peval(gc, s[m])
            out[m, -1] = poly.peval(self.heights[i], s[m])
        return out

    def deriv(self, s: float, side: int = 0) -> np.ndarray:
        i = self.piece_index(s, side)
        out = np.empty(2 * self.n + 1)
        for j, (fc, gc) in enumerate(self.planes[i]):
            out[2 * j] = poly.peval(poly.pder(fc), s)
            out[2 * j + 1] = poly.peval(poly.pder(gc), s)
        out[-1] = poly.peval(poly.pder(self.heights[i]), s)
        return out

    def c1_at_knot(self, knot: float) -> bool:
        dl = self.deriv(knot, side=-1)
        dr = self.deriv(knot, side=+1)
        return bool(np.max(np.abs(dl - dr)) <= KNOT_C1_TOL)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "knots": list(self.knots),
            "pieces": [
                {"gamma": [[list(fc), list(gc)] for fc, gc in piece]}
                for piece in self.planes
            ],
            "h0": self.h0,
        }

    @staticmethod
    def from_json_dict(data: dict) -> "PiecewiseCurve":
        return PiecewiseCurve.from_planar(
            int(data["n"]),
            data["knots"],
            [piece["gamma"] for piece in data["pieces"]],
            float(data.get("h0", 0.0)),
        )


def load_curve(path) -> PiecewiseCurve:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}"
            ) from exc
    return PiecewiseCurve.from_json_dict(data)


# ---------------------------------------------------------------------------
# Local moduli
# ---------------------------------------------------------------------------


class _PieceEnvelopes:
    """Per-piece Taylor-coefficient envelopes for the two local moduli.

    The first-order remainder of component c has an exact double root at
    s = t, so |remainder|/|s-t| <= r * sum_{k>=2} sup|c^(k)|/k! * r^(k-2) with
    r the window reach.  The area defect of a horizontal piece has an exact
    triple root, giving the analogous cubic-deflated envelope.  The derivative
    sups are root-isolated once per piece; per-cell evaluation is then a tiny
    polynomial in r.
    """

    def __init__(self, curve: "PiecewiseCurve"):
        self.psi_coeffs: list[np.ndarray] = []
        self.phi_coeffs: list[np.ndarray] = []
        for i in range(len(curve.knots) - 1):
            lo, hi = curve.knots[i], curve.knots[i + 1]
            comps = [c for pair in curve.planes[i] for c in pair] + [curve.heights[i]]
            deg = max(c.size - 1 for c in comps)
            sups = np.zeros((len(comps), deg + 1))
            for ci, coeffs in enumerate(comps):
                cur = coeffs
                fact = 1.0
                for k in range(coeffs.size):
                    if k >= 2:
                        sups[ci, k] = poly.sup_abs(cur, lo, hi) / fact
                    cur = poly.pder(cur) if cur.size > 1 else np.zeros(1)
                    fact *= k + 1
            # vector envelope: componentwise sum over k of sup * r^(k-2)
            self.psi_coeffs.append(sups[:, 2:])
            gam = curve.planes[i]
            g_sup = [poly.sup_abs(gc, lo, hi) for _, gc in gam]
            f_sup = [poly.sup_abs(fc, lo, hi) for fc, _ in gam]
            phi_env = np.zeros(max(1, deg - 2))
            for m in range(3, deg + 1):
                fact = math.factorial(m)
                total = 0.0
                cur_h = curve.heights[i]
                for _ in range(m):
                    cur_h = poly.pder(cur_h)
                total += poly.sup_abs(cur_h, lo, hi)
                for j, (fc, gc) in enumerate(gam):
                    cf, cg = fc, gc
                    for _ in range(m):
                        cf = poly.pder(cf)
                        cg = poly.pder(cg)
                    total += 2.0 * (poly.sup_abs(cf, lo, hi) * g_sup[j] + f_sup[j] * poly.sup_abs(cg, lo, hi))
                phi_env[m - 3] = total / fact
            self.phi_coeffs.append(phi_env)

    def psi(self, i: int, reach: float) -> float:
        env = self.psi_coeffs[i]
        if env.size == 0 or reach <= 0:
            return 0.0
        powers = np.power(reach, np.arange(env.shape[1]))
        comp = env @ powers
        return reach * float(np.sqrt(np.sum(comp * comp)))

    def phi(self, i: int, reach: float) -> float:
        env = self.phi_coeffs[i]
        if env.size == 0 or reach <= 0:
            return 0.0
        return reach * float(env @ np.power(reach, np.arange(env.size)))


def _cross_knot_quotients(
    curve: PiecewiseCurve, t: float, lo: float, hi: float
) -> tuple[float, float]:
    """Sampled psi/phi contributions from pairs across knots in the window."""
    vt = curve.value(t)
    dt = curve.deriv(t)
    psi = phi = 0.0
    for knot in curve.knots[1:-1]:
        if not (lo < knot < hi) or knot == t:
            continue
        if knot > t:
            seg = np.linspace(knot, hi, CROSS_SAMPLES)
        else:
            seg = np.linspace(lo, knot, CROSS_SAMPLES)
        seg = seg[(seg != t) & (seg != knot)]
        if seg.size == 0:
            continue
        vs = curve.value_many(seg)
        sep = np.abs(seg - t)
        rem = vs - vt[None, :] - (seg - t)[:, None] * dt[None, :]
        psi = max(psi, float(np.max(np.linalg.norm(rem, axis=1) / sep)))
        f_s, g_s = vs[:, :-1:2], vs[:, 1:-1:2]
        f_t, g_t = vt[:-1:2], vt[1:-1:2]
        cross = f_s @ g_t - g_s @ f_t
        phi = max(
            phi,
            float(np.max(np.abs(vs[:, -1] - vt[-1] - 2.0 * cross) / (sep * sep))),
        )
    return psi, phi


def _cell_moduli(
    curve: PiecewiseCurve,
    env: _PieceEnvelopes,
    cell: tuple[float, float],
    k: float,
):
    """psi_k / phi_k for a cell, maximized over its endpoints and midpoint."""
    a, b = curve.domain
    psi = phi = 0.0
    for t in (cell[0], 0.5 * (cell[0] + cell[1]), cell[1]):
        lo = max(a, t - 1.0 / k)
        hi = min(b, t + 1.0 / k)
        i = curve.piece_index(t)
        piece_lo = max(lo, curve.knots[i])
        piece_hi = min(hi, curve.knots[i + 1])
        reach = max(piece_hi - t, t - piece_lo)
        psi = max(psi, env.psi(i, reach))
        phi = max(phi, env.phi(i, reach))
        if any(lo < knot < hi for knot in curve.knots[1:-1]):
            cp, cf = _cross_knot_quotients(curve, t, lo, hi)
            psi = max(psi, cp)
            phi = max(phi, cf)
    return psi, phi


# ---------------------------------------------------------------------------
# Selection and extension
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LuzinResult:
    kept: CompactSet
    measure_removed: float
    eps: float
    rung: int
    window_param: float
    threshold: float
    psi: np.ndarray
    phi: np.ndarray
    rung_table: tuple[dict, ...]
    jet: WhitneyJet
    extension: ExtendedCurve
    report: VerificationReport

    def to_json_dict(self) -> dict:
        return {
            "eps": self.eps,
            "measureRemoved": self.measure_removed,
            "kept": [[l, r] for l, r in self.kept.intervals],
            "rung": self.rung,
            "windowParam": self.window_param,
            "threshold": self.threshold,
            "rungTable": list(self.rung_table),
            "psi": list(map(float, self.psi)),
            "phi": list(map(float, self.phi)),
        }


def _knot_cells(curve: PiecewiseCurve, edges: np.ndarray) -> np.ndarray:
    """Cells whose closure touches an interior knot (always removed)."""
    bad = np.zeros(edges.size - 1, dtype=bool)
    for knot in curve.knots[1:-1]:
        for c in range(edges.size - 1):
            if edges[c] <= knot <= edges[c + 1]:
                bad[c] = True
    return bad


def approximate(
    curve: PiecewiseCurve,
    eps: float,
    cells: int = 512,
    tolerances: Tolerances | None = None,
    samples_per_segment: int = 400,
) -> LuzinResult:
    """Compact E with |domain \\ E| < eps and a C1 horizontal match on E."""
    if not (eps > 0):
        raise ValueError("eps must be positive")
    if cells < 4:
        raise ValueError("need at least 4 grid cells")
    a, b = curve.domain
    width = (b - a) / cells
    edges = a + width * np.arange(cells + 1)
    edges[-1] = b
    knot_bad = _knot_cells(curve, edges)

    envelopes = _PieceEnvelopes(curve)
    max_rung = max(0, int(math.floor(math.log2(1.0 / (2.0 * width))))) if width < 0.5 else 0
    chosen = None
    rung_table = []
    for j in range(max_rung + 1):
        k = 2.0**j
        tau = 2.0 ** (-j)
        psi = np.empty(cells)
        phi = np.empty(cells)
        for c in range(cells):
            psi[c], phi[c] = _cell_moduli(
                curve, envelopes, (float(edges[c]), float(edges[c + 1])), k
            )
        keep = (~knot_bad) & (psi <= tau) & (phi <= tau)
        removed = float(np.sum(~keep) * width)
        rung_table.append(
            {"rung": j, "window": 1.0 / k, "threshold": tau, "removed": removed}
        )
        # Among rungs inside the budget keep the one removing least (ties to
        # the finer rung); a tighter budget then never enlarges the kept set.
        if removed < eps and (chosen is None or removed <= chosen[-1]):
            chosen = (j, k, tau, keep, psi, phi, removed)
    if chosen is None:
        raise BudgetError(
            f"could not keep removal below {eps} at resolution {cells}; "
            "try a finer grid or a larger budget"
        )
    j, k, tau, keep, psi, phi, _removed = chosen

    intervals = []
    c = 0
    while c < cells:
        if keep[c]:
            start = c
            while c + 1 < cells and keep[c + 1]:
                c += 1
            intervals.append((float(edges[start]), float(edges[c + 1])))
        c += 1
    if not intervals:
        raise BudgetError("selection kept nothing; refine the grid")
    kept = CompactSet(tuple(intervals))
    removed = (b - a) - kept.measure()

    pieces = []
    for l, r in kept.intervals:
        i = curve.piece_index(0.5 * (l + r))
        gamma = curve.planes[i]
        pieces.append(
            JetPiece(
                (l, r),
                tuple((fc.copy(), gc.copy()) for fc, gc in gamma),
                curve.heights[i].copy(),
                tuple((poly.pder(fc), poly.pder(gc)) for fc, gc in gamma),
                poly.pder(curve.heights[i]),
            )
        )
    jet = WhitneyJet(curve.n, kept, tuple(pieces))

    ext = extend(jet, window=(a, b), tolerances=tolerances)
    report = verify(ext, samples_per_segment=samples_per_segment)
    return LuzinResult(
        kept=kept,
        measure_removed=float(removed),
        eps=float(eps),
        rung=j,
        window_param=k,
        threshold=tau,
        psi=psi,
        phi=phi,
        rung_table=tuple(rung_table),
        jet=jet,
        extension=ext,
        report=report,
    )
