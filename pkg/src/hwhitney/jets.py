"""Whitney jets on compact subsets of R and their compatibility moduli.

A jet is a pair (curve values, candidate derivatives) on a finite union of
disjoint closed intervals; isolated points are degenerate intervals carrying
free derivative data.  Extendability to a C1 horizontal curve is governed by
three measurable quantities:

  * the first-order Whitney modulus    sup |G(b)-G(a)-(b-a)G'(a)| / |b-a|,
  * the second-order area modulus      sup |h(b)-h(a) - 2 sum_j (fj(b)gj(a)-fj(a)gj(b))| / |b-a|^2,
  * the pointwise horizontality defect |h'(s) - 2 sum_j (fj'(s)gj(s)-fj(s)gj'(s))|.

The sups here run over sampled pairs; sampling density is part of every
report, never hidden.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import poly

DEFAULT_DEGREE_CAP = 6
DEFAULT_SAMPLES = 64
EPSILON_FLOOR = 1e-12
EPSILON_HEADROOM = 1.01


class JetFormatError(ValueError):
    """Malformed compact set or jet data."""


@dataclass(frozen=True)
class CompactSet:
    """Finite union of disjoint closed intervals, sorted left to right."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple((float(l), float(r)) for l, r in self.intervals)
        if not ivs:
            raise JetFormatError("compact set must be nonempty")
        for l, r in ivs:
            if not (math.isfinite(l) and math.isfinite(r)):
                raise JetFormatError("non-finite interval endpoint")
            if l > r:
                raise JetFormatError(f"interval [{l}, {r}] has l > r")
        for (_, r0), (l1, _) in zip(ivs, ivs[1:]):
            if not (r0 < l1):
                raise JetFormatError("intervals must be strictly disjoint and sorted")
        object.__setattr__(self, "intervals", ivs)

    @property
    def hull(self) -> tuple[float, float]:
        return (self.intervals[0][0], self.intervals[-1][1])

    def measure(self) -> float:
        return float(sum(r - l for l, r in self.intervals))

    def gap_intervals(self) -> list[tuple[float, float]]:
        return [(r0, l1) for (_, r0), (l1, _) in zip(self.intervals, self.intervals[1:])]

    def locate(self, s: float) -> int | None:
        for k, (l, r) in enumerate(self.intervals):
            if l <= s <= r:
                return k
        return None


@dataclass(frozen=True)
class JetPiece:
    """Jet data on one component of K: exact polynomials per coordinate.

    On a nondegenerate interval the derivative descriptions are the exact
    polynomial derivatives of the value descriptions; on an isolated point
    they are free values (stored as constant polynomials).
    """

    interval: tuple[float, float]
    gamma: tuple[tuple[np.ndarray, np.ndarray], ...]
    height: np.ndarray
    gamma_prime: tuple[tuple[np.ndarray, np.ndarray], ...]
    height_prime: np.ndarray

    @property
    def degenerate(self) -> bool:
        return self.interval[0] == self.interval[1]

    @property
    def n(self) -> int:
        return len(self.gamma)

    def value_many(self, s) -> np.ndarray:
        """(m, 2n+1) array of jet values at parameters s."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty((s.size, 2 * self.n + 1))
        for j, (fc, gc) in enumerate(self.gamma):
            out[:, 2 * j] = poly.peval(fc, s)
            out[:, 2 * j + 1] = poly.peval(gc, s)
        out[:, -1] = poly.peval(self.height, s)
        return out

    def deriv_many(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty((s.size, 2 * self.n + 1))
        for j, (fc, gc) in enumerate(self.gamma_prime):
            out[:, 2 * j] = poly.peval(fc, s)
            out[:, 2 * j + 1] = poly.peval(gc, s)
        out[:, -1] = poly.peval(self.height_prime, s)
        return out

    def value(self, s: float) -> np.ndarray:
        return self.value_many([s])[0]

    def deriv(self, s: float) -> np.ndarray:
        return self.deriv_many([s])[0]


def _build_piece(
    interval: tuple[float, float],
    gamma: Sequence[tuple],
    height,
    gamma_prime: Sequence[tuple] | None,
    height_prime,
    degree_cap: int,
) -> JetPiece:
    l, r = float(interval[0]), float(interval[1])
    g = tuple((poly.as_coeffs(fc), poly.as_coeffs(gc)) for fc, gc in gamma)
    h = poly.as_coeffs(height)
    for arr in [h, *(c for pair in g for c in pair)]:
        if arr.size - 1 > degree_cap:
            raise JetFormatError(
                f"polynomial degree {arr.size - 1} exceeds cap {degree_cap}"
            )
    exact_gp = tuple((poly.pder(fc), poly.pder(gc)) for fc, gc in g)
    exact_hp = poly.pder(h)
    if l == r:
        if gamma_prime is None or height_prime is None:
            raise JetFormatError(
                f"isolated point {l} needs explicit derivative data"
            )
        gp = tuple((poly.as_coeffs(fc), poly.as_coeffs(gc)) for fc, gc in gamma_prime)
        hp = poly.as_coeffs(height_prime)
    else:
        gp, hp = exact_gp, exact_hp
        if gamma_prime is not None:
            given = tuple(
                (poly.as_coeffs(fc), poly.as_coeffs(gc)) for fc, gc in gamma_prime
            )
            for (efc, egc), (ufc, ugc) in zip(exact_gp, given):
                if not (
                    np.array_equal(np.trim_zeros(efc, "b"), np.trim_zeros(ufc, "b"))
                    and np.array_equal(np.trim_zeros(egc, "b"), np.trim_zeros(ugc, "b"))
                ):
                    raise JetFormatError(
                        "declared planar derivative is not the exact derivative "
                        f"of the values on [{l}, {r}]"
                    )
        if height_prime is not None:
            uhp = poly.as_coeffs(height_prime)
            if not np.array_equal(np.trim_zeros(exact_hp, "b"), np.trim_zeros(uhp, "b")):
                raise JetFormatError(
                    f"declared height derivative inconsistent on [{l}, {r}]"
                )
    return JetPiece((l, r), g, h, gp, hp)


@dataclass(frozen=True)
class WhitneyJet:
    """Candidate 1-jet of a horizontal curve on a compact set."""

    n: int
    set: CompactSet
    pieces: tuple[JetPiece, ...]

    def __post_init__(self):
        if self.n < 1:
            raise JetFormatError("n must be a positive integer")
        if len(self.pieces) != len(self.set.intervals):
            raise JetFormatError("pieces not aligned with intervals")
        for piece, interval in zip(self.pieces, self.set.intervals):
            if piece.interval != interval:
                raise JetFormatError("piece interval mismatch")
            if piece.n != self.n:
                raise JetFormatError("piece has wrong number of planes")

    @staticmethod
    def from_data(
        n: int,
        intervals: Sequence,
        pieces: Sequence[dict],
        degree_cap: int = DEFAULT_DEGREE_CAP,
    ) -> "WhitneyJet":
        cs = CompactSet(tuple((float(l), float(r)) for l, r in intervals))
        if len(pieces) != len(cs.intervals):
            raise JetFormatError("need exactly one piece per interval")
        built = []
        for interval, raw in zip(cs.intervals, pieces):
            built.append(
                _build_piece(
                    interval,
                    raw["gamma"],
                    raw["height"],
                    raw.get("gammaPrime"),
                    raw.get("heightPrime"),
                    degree_cap,
                )
            )
        return WhitneyJet(int(n), cs, tuple(built))

    def piece_at(self, s: float) -> JetPiece:
        k = self.set.locate(s)
        if k is None:
            raise ValueError(f"parameter {s} is not in K")
        return self.pieces[k]

    def value(self, s: float) -> np.ndarray:
        return self.piece_at(s).value(s)

    def deriv(self, s: float) -> np.ndarray:
        return self.piece_at(s).deriv(s)

    def sample_points(self, samples_per_interval: int = DEFAULT_SAMPLES) -> np.ndarray:
        """Sampling grid over K: interval endpoints plus a uniform fill."""
        if samples_per_interval < 2:
            raise ValueError("need at least 2 samples per interval")
        pts = []
        for l, r in self.set.intervals:
            if l == r:
                pts.append(np.array([l]))
            else:
                pts.append(np.linspace(l, r, samples_per_interval))
        return np.concatenate(pts)

    def to_json_dict(self) -> dict:
        out_pieces = []
        for piece in self.pieces:
            entry = {
                "gamma": [[list(fc), list(gc)] for fc, gc in piece.gamma],
                "height": list(piece.height),
            }
            if piece.degenerate:
                entry["gammaPrime"] = [
                    [list(fc), list(gc)] for fc, gc in piece.gamma_prime
                ]
                entry["heightPrime"] = list(piece.height_prime)
            out_pieces.append(entry)
        return {
            "n": self.n,
            "intervals": [[l, r] for l, r in self.set.intervals],
            "pieces": out_pieces,
        }

    @staticmethod
    def from_json_dict(data: dict, degree_cap: int = DEFAULT_DEGREE_CAP) -> "WhitneyJet":
        try:
            return WhitneyJet.from_data(
                data["n"], data["intervals"], data["pieces"], degree_cap=degree_cap
            )
        except (KeyError, TypeError) as exc:
            raise JetFormatError(f"malformed jet JSON: {exc}") from exc


def load_jet(path) -> WhitneyJet:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise JetFormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    return WhitneyJet.from_json_dict(data)


def save_jet(jet: WhitneyJet, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(jet.to_json_dict(), fh, indent=2)
        fh.write("\n")


def restrict_polynomial_curve(
    n: int,
    planes: Sequence[tuple],
    intervals: Sequence,
    h0: float = 0.0,
    anchor: float | None = None,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> WhitneyJet:
    """Jet obtained by restricting a global polynomial horizontal curve to K.

    `planes` holds n (f_coeffs, g_coeffs) pairs in the global parameter; the
    height is their horizontal lift anchored at `anchor` (default: min K).
    """
    cs = CompactSet(tuple((float(l), float(r)) for l, r in intervals))
    if len(planes) != n:
        raise JetFormatError("need one planar pair per plane")
    from .heisenberg import PolynomialHeight

    a0 = cs.hull[0] if anchor is None else float(anchor)
    lift = PolynomialHeight([(fc, gc) for fc, gc in planes], h0, a0)
    pieces = []
    for l, r in cs.intervals:
        if l == r:
            gamma = tuple(
                (
                    np.array([float(poly.peval(fc, l))]),
                    np.array([float(poly.peval(gc, l))]),
                )
                for fc, gc in planes
            )
            gamma_prime = tuple(
                (
                    np.array([float(poly.peval(poly.pder(fc), l))]),
                    np.array([float(poly.peval(poly.pder(gc), l))]),
                )
                for fc, gc in planes
            )
            pieces.append(
                JetPiece(
                    (l, r),
                    gamma,
                    np.array([float(poly.peval(lift.coeffs, l))]),
                    gamma_prime,
                    np.array([float(poly.peval(lift.rate_coeffs, l))]),
                )
            )
        else:
            gamma = tuple((poly.as_coeffs(fc), poly.as_coeffs(gc)) for fc, gc in planes)
            pieces.append(
                JetPiece(
                    (l, r),
                    gamma,
                    lift.coeffs.copy(),
                    tuple((poly.pder(fc), poly.pder(gc)) for fc, gc in gamma),
                    poly.pder(lift.coeffs),
                )
            )
    for piece in pieces:
        for arr in [piece.height, *(c for pair in piece.gamma for c in pair)]:
            if arr.size - 1 > degree_cap:
                raise JetFormatError(
                    f"restricted curve needs degree {arr.size - 1} > cap {degree_cap}"
                )
    return WhitneyJet(n, cs, tuple(pieces))


# ---------------------------------------------------------------------------
# Gaps and the epsilon sequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Gap:
    """A complementary interval (a, b) of K inside its hull."""

    a: float
    b: float
    epsilon: float | None = None

    def __post_init__(self):
        if not (self.a < self.b):
            raise ValueError(f"gap must have a < b, got ({self.a}, {self.b})")
        if self.epsilon is not None and not (self.b - self.a < self.epsilon):
            raise ValueError("gap length must be strictly below its epsilon")

    @property
    def length(self) -> float:
        return self.b - self.a


def gaps(jet: WhitneyJet) -> list[Gap]:
    """Complementary open intervals of K in its hull, left to right."""
    return [Gap(a, b) for a, b in jet.set.gap_intervals()]


def _gap_quantities(jet: WhitneyJet, gap: Gap) -> np.ndarray:
    """The five per-gap scales that the epsilon sequence must dominate."""
    va, vb = jet.value(gap.a), jet.value(gap.b)
    da, db = jet.deriv(gap.a), jet.deriv(gap.b)
    length = gap.length
    dg = vb[:-1] - va[:-1]
    chord = float(np.linalg.norm(dg))
    rem_a = float(np.linalg.norm(dg - length * da[:-1])) / length
    rem_b = float(np.linalg.norm(dg - length * db[:-1])) / length
    cross = sum(
        vb[2 * j] * va[2 * j + 1] - va[2 * j] * vb[2 * j + 1] for j in range(jet.n)
    )
    area_rate = abs(vb[-1] - va[-1] - 2.0 * cross) / (jet.n * length * length)
    q = np.array([length, chord, rem_a, rem_b, area_rate])
    if not np.all(np.isfinite(q)):
        raise ArithmeticError(f"non-finite epsilon quantity on gap ({gap.a}, {gap.b})")
    return q


def _gap_epsilon(quantities) -> float:
    return max(EPSILON_FLOOR, EPSILON_HEADROOM * float(np.max(quantities)))


def epsilon_sequence(jet: WhitneyJet, gap_list: Sequence[Gap]) -> list[Gap]:
    """Populate per-gap epsilons, non-increasing along decreasing gap length.

    Each epsilon strictly dominates the gap's five scale quantities (headroom
    factor 1.01, floor 1e-12); monotonization is a running maximum taken from
    the shortest gap back to the longest.
    """
    if not gap_list:
        return []
    raw = np.array([_gap_epsilon(_gap_quantities(jet, g)) for g in gap_list])
    order = sorted(range(len(gap_list)), key=lambda i: -gap_list[i].length)
    eps_sorted = raw[order]
    eps_sorted = np.maximum.accumulate(eps_sorted[::-1])[::-1]
    eps = np.empty_like(raw)
    for rank, idx in enumerate(order):
        eps[idx] = eps_sorted[rank]
    return [Gap(g.a, g.b, float(e)) for g, e in zip(gap_list, eps)]


# ---------------------------------------------------------------------------
# Moduli
# ---------------------------------------------------------------------------


def _pair_tables(jet: WhitneyJet, samples_per_interval: int):
    """Separations and quotient tables over all ordered sampled pairs."""
    s = jet.sample_points(samples_per_interval)
    pos = 0
    chunks_v, chunks_d, chunks_i = [], [], []
    for idx, piece in enumerate(jet.pieces):
        cnt = 1 if piece.degenerate else samples_per_interval
        seg = s[pos : pos + cnt]
        chunks_v.append(piece.value_many(seg))
        chunks_d.append(piece.deriv_many(seg))
        chunks_i.append(np.full(cnt, idx))
        pos += cnt
    vals = np.vstack(chunks_v)
    ders = np.vstack(chunks_d)
    itab = np.concatenate(chunks_i)

    sep = s[None, :] - s[:, None]           # sep[a, b] = s_b - s_a
    absep = np.abs(sep)
    same = itab[:, None] == itab[None, :]
    diff = vals[None, :, :] - vals[:, None, :]
    rem = diff - sep[:, :, None] * ders[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        whit_full = np.linalg.norm(rem, axis=2) / absep
        whit_planar = np.linalg.norm(rem[:, :, :-1], axis=2) / absep
        whit_height = np.abs(rem[:, :, -1]) / absep
        f = vals[:, :-1:2]
        g = vals[:, 1:-1:2]
        cross = np.einsum("bj,aj->ab", f, g) - np.einsum("aj,bj->ab", f, g)
        area = np.abs(diff[:, :, -1] - 2.0 * cross) / (absep * absep)
    np.fill_diagonal(whit_full, np.nan)
    np.fill_diagonal(whit_planar, np.nan)
    np.fill_diagonal(whit_height, np.nan)
    np.fill_diagonal(area, np.nan)
    return absep, same, {
        "whitney": whit_full,
        "whitney_planar": whit_planar,
        "whitney_height": whit_height,
        "area": area,
    }, vals


def _masked_sup(
    table: np.ndarray, absep: np.ndarray, t: float, pair_mask: np.ndarray | None = None
) -> float:
    mask = (absep > 0) & (absep <= t) & np.isfinite(table)
    if pair_mask is not None:
        mask &= pair_mask
    if not np.any(mask):
        return math.nan
    return float(np.max(table[mask]))


def whitney_modulus(
    jet: WhitneyJet, t: float, samples_per_interval: int = DEFAULT_SAMPLES
) -> float:
    """Sampled sup of the first-order Taylor quotient over pairs |b-a| <= t."""
    if not (t > 0):
        raise ValueError(f"scale t must be positive, got {t}")
    absep, _, tables, _ = _pair_tables(jet, samples_per_interval)
    v = _masked_sup(tables["whitney"], absep, t)
    return 0.0 if math.isnan(v) else v


def area_modulus(
    jet: WhitneyJet, t: float, samples_per_interval: int = DEFAULT_SAMPLES
) -> float:
    """Sampled sup of the second-order area quotient over pairs |b-a| <= t."""
    if not (t > 0):
        raise ValueError(f"scale t must be positive, got {t}")
    absep, _, tables, _ = _pair_tables(jet, samples_per_interval)
    v = _masked_sup(tables["area"], absep, t)
    return 0.0 if math.isnan(v) else v


def horizontality_defect(
    jet: WhitneyJet, samples_per_interval: int = DEFAULT_SAMPLES
) -> float:
    """Max over sampled s in K of |h'(s) - 2 sum_j (fj' gj - fj gj')(s)|."""
    worst = 0.0
    for piece in jet.pieces:
        l, r = piece.interval
        seg = np.array([l]) if l == r else np.linspace(l, r, samples_per_interval)
        v = piece.value_many(seg)
        d = piece.deriv_many(seg)
        f, g = v[:, :-1:2], v[:, 1:-1:2]
        df, dg = d[:, :-1:2], d[:, 1:-1:2]
        res = d[:, -1] - 2.0 * (np.sum(df * g, axis=1) - np.sum(f * dg, axis=1))
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def big_m(jet: WhitneyJet) -> float:
    """Strict bound on per-plane chord quotients and endpoint derivative norms.

    Returns 1 + the max over planes and gaps of |gamma_j(b)-gamma_j(a)|/(b-a),
    |gamma_j'(a)| and |gamma_j'(b)|; the floor 1 keeps downstream envelope
    constants positive for trivial jets.
    """
    worst = 0.0
    for gap in jet.set.gap_intervals():
        a, b = gap
        va, vb = jet.value(a), jet.value(b)
        da, db = jet.deriv(a), jet.deriv(b)
        for j in range(jet.n):
            sl = slice(2 * j, 2 * j + 2)
            worst = max(
                worst,
                float(np.linalg.norm(vb[sl] - va[sl])) / (b - a),
                float(np.linalg.norm(da[sl])),
                float(np.linalg.norm(db[sl])),
            )
    return 1.0 + worst


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tolerances:
    """Acceptance thresholds for jet validation and extension verification.

    The Whitney/area conditions are limits; a finite ladder can only certify a
    decay trend.  A condition passes when its value at the smallest conclusive
    scale is below `modulus`, or has decayed against the largest scale at
    least like (t_min/t_max)**decay_exponent up to the `decay_headroom`
    factor.  Restrictions of C1 horizontal polynomial curves decay linearly,
    so they always pass; a ladder that stays flat never does.
    """

    modulus: float = 1e-6
    decay_headroom: float = 1.35
    decay_exponent: float = 0.5
    trend_range: float = 0.25
    horizontality: float = 1e-8
    seam_value: float = 1e-10
    seam_deriv: float = 1e-9
    lift_residual: float = 1e-9
    match_on_k: float = 1e-12

    def __post_init__(self):
        for name in ("modulus", "horizontality", "seam_value", "seam_deriv",
                     "lift_residual", "match_on_k"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"tolerance {name} must be positive")
        if not (self.decay_headroom >= 1):
            raise ValueError("decay_headroom must be >= 1")
        if not (0 < self.decay_exponent <= 1):
            raise ValueError("decay_exponent must lie in (0, 1]")
        if not (0 < self.trend_range < 1):
            raise ValueError("trend_range must lie in (0, 1)")


def _nan_list(arr: np.ndarray) -> list:
    return [None if math.isnan(v) else float(v) for v in arr]


@dataclass(frozen=True)
class ModulusReport:
    """Moduli along a dyadic ladder of probe scales.

    Each sup is reported three ways: over all sampled pairs, over same-interval
    pairs only (probing smoothness on components, meaningful at every scale),
    and over cross-interval pairs only (probing compatibility across gaps,
    meaningful only down to the smallest gap).  Scales where a pair family is
    empty are reported as NaN rather than read as evidence.
    """

    scales: np.ndarray
    conclusive: np.ndarray
    within_conclusive: np.ndarray
    cross_conclusive: np.ndarray
    whitney: np.ndarray
    whitney_within: np.ndarray
    whitney_cross: np.ndarray
    whitney_planar: np.ndarray
    whitney_height: np.ndarray
    area: np.ndarray
    area_within: np.ndarray
    area_cross: np.ndarray
    horizontality: float
    big_m: float
    samples_per_interval: int

    def smallest_conclusive(self) -> int | None:
        idx = np.nonzero(self.conclusive)[0]
        return int(idx[-1]) if idx.size else None

    def to_dict(self) -> dict:
        return {
            "scales": list(map(float, self.scales)),
            "conclusive": [bool(v) for v in self.conclusive],
            "withinConclusive": [bool(v) for v in self.within_conclusive],
            "crossConclusive": [bool(v) for v in self.cross_conclusive],
            "whitney": _nan_list(self.whitney),
            "whitneyWithin": _nan_list(self.whitney_within),
            "whitneyCross": _nan_list(self.whitney_cross),
            "whitneyPlanar": _nan_list(self.whitney_planar),
            "whitneyHeight": _nan_list(self.whitney_height),
            "area": _nan_list(self.area),
            "areaWithin": _nan_list(self.area_within),
            "areaCross": _nan_list(self.area_cross),
            "horizontality": float(self.horizontality),
            "bigM": float(self.big_m),
            "samplesPerInterval": self.samples_per_interval,
        }


@dataclass(frozen=True)
class ValidationVerdict:
    extendable: bool
    failing: tuple[str, ...]
    report: ModulusReport
    tolerances: Tolerances
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "extendable": self.extendable,
            "failing": list(self.failing),
            "notes": list(self.notes),
            "report": self.report.to_dict(),
        }


def modulus_report(
    jet: WhitneyJet,
    samples_per_interval: int = DEFAULT_SAMPLES,
    num_scales: int = 12,
) -> ModulusReport:
    """Evaluate all moduli on the dyadic scale ladder diam(I) * 2^-k."""
    absep, same, tables, _ = _pair_tables(jet, samples_per_interval)
    lo, hi = jet.set.hull
    diam = hi - lo
    if diam <= 0:
        scales = np.array([1.0])
    else:
        scales = diam * np.power(0.5, np.arange(num_scales))
    gap_lengths = [b - a for a, b in jet.set.gap_intervals()]
    min_gap = min(gap_lengths) if gap_lengths else None
    if min_gap is not None and diam > 0:
        # The smallest gap is the last scale still probing cross-gap pairs;
        # always include it so that range is not grid-truncated.
        scales = np.array(sorted(set(scales.tolist()) | {min_gap}, reverse=True))

    def family_sups(pair_mask: np.ndarray | None):
        seps = absep[(absep > 0) & (pair_mask if pair_mask is not None else True)]
        floor = float(np.min(seps)) if seps.size else math.inf
        flags = scales >= floor
        out = {}
        for key in ("whitney", "area"):
            col = np.full(scales.size, math.nan)
            for i, t in enumerate(scales):
                if flags[i]:
                    col[i] = _masked_sup(tables[key], absep, float(t), pair_mask)
            out[key] = col
        return flags, out

    all_flags, all_cols = family_sups(None)
    within_flags, within_cols = family_sups(same)
    cross_flags, cross_cols = family_sups(~same)

    planar = np.full(scales.size, math.nan)
    height = np.full(scales.size, math.nan)
    for i, t in enumerate(scales):
        if all_flags[i]:
            planar[i] = _masked_sup(tables["whitney_planar"], absep, float(t))
            height[i] = _masked_sup(tables["whitney_height"], absep, float(t))

    return ModulusReport(
        scales=scales,
        conclusive=all_flags,
        within_conclusive=within_flags,
        cross_conclusive=cross_flags,
        whitney=all_cols["whitney"],
        whitney_within=within_cols["whitney"],
        whitney_cross=cross_cols["whitney"],
        whitney_planar=planar,
        whitney_height=height,
        area=all_cols["area"],
        area_within=within_cols["area"],
        area_cross=cross_cols["area"],
        horizontality=horizontality_defect(jet, samples_per_interval),
        big_m=big_m(jet),
        samples_per_interval=samples_per_interval,
    )


def _trend_ok(
    values: np.ndarray,
    scales: np.ndarray,
    conclusive: np.ndarray,
    tol: Tolerances,
    narrow_vacuous: bool,
):
    """A vanishing-limit condition holds if the ladder is small or decaying.

    The sampled sup is monotone in the scale, so the largest conclusive scale
    anchors the decay comparison.  A cross-gap ladder whose scale range is too
    narrow to show a trend (range ratio above `trend_range`) is unfalsifiable:
    finitely many comparable gaps always admit a direct construction, so it is
    reported as vacuous rather than guessed.
    """
    idx = np.nonzero(conclusive)[0]
    if idx.size == 0:
        return True, "no qualifying pairs; condition vacuous at this sampling"
    v = values[idx]
    t = scales[idx]
    vmin = float(v[-1])
    vmax = float(v[0])
    range_ratio = float(t[-1]) / float(t[0])
    if vmin <= tol.modulus or vmax <= tol.modulus:
        return True, None
    if narrow_vacuous and range_ratio > tol.trend_range:
        return True, (
            f"scale range ratio {range_ratio:.3g} too narrow for a trend; vacuous"
        )
    allowed = tol.decay_headroom * vmax * range_ratio**tol.decay_exponent
    if vmin <= allowed:
        return True, None
    return False, None


def validate(
    jet: WhitneyJet,
    tolerances: Tolerances | None = None,
    samples_per_interval: int = DEFAULT_SAMPLES,
    num_scales: int = 12,
) -> ValidationVerdict:
    """Decide extendability from the three moduli.

    The Whitney and area conditions are limits; at finite sampling each is
    judged by a decay trend, separately on same-interval pairs (smoothness of
    the pieces, probed to the sampling floor) and on cross-gap pairs (whose
    quotients must shrink with the gaps - the quantity the gap construction
    actually consumes).  Horizontality is a pointwise check.
    """
    tol = tolerances or Tolerances()
    rep = modulus_report(jet, samples_per_interval, num_scales)
    failing = []
    notes = []
    single_gap = len(jet.set.gap_intervals()) <= 1
    checks = {
        "whitney": (rep.whitney_within, rep.whitney_cross),
        "area": (rep.area_within, rep.area_cross),
    }
    for name, (within, cross) in checks.items():
        ok_w, note_w = _trend_ok(within, rep.scales, rep.within_conclusive, tol, False)
        if single_gap:
            # One gap exposes no trend toward zero; a single bridge is always
            # directly constructible, so the cross condition is unfalsifiable.
            ok_c, note_c = True, "at most one gap; cross condition vacuous"
        else:
            ok_c, note_c = _trend_ok(cross, rep.scales, rep.cross_conclusive, tol, True)
        for part, note in (("components", note_w), ("cross-gap", note_c)):
            if note:
                notes.append(f"{name} ({part}): {note}")
        if not (ok_w and ok_c):
            failing.append(name)
    if rep.horizontality > tol.horizontality:
        failing.append("horizontality")
    return ValidationVerdict(
        extendable=not failing,
        failing=tuple(failing),
        report=rep,
        tolerances=tol,
        notes=tuple(notes),
    )
