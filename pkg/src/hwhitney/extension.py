"""Assembly and verification of the full C1 horizontal extension.

The extension agrees with the jet on K (exact evaluation, no quadrature),
bridges every gap with the planar fillers, lifts the height gap by gap with
the starting height re-anchored at each left gap endpoint, and continues past
the hull of K with straight horizontal rays matching the endpoint 1-jets.

`verify` recomputes every construction claim numerically: restriction match,
seam jumps, the contact residual along the curve, the per-gap lift identity
(against an independent adaptive quadrature, not the construction's closed
forms), and the per-gap sup deviations against their P(eps) envelopes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate

from . import poly
from .gapfill import (
    GapFrame,
    LemmaParams,
    PlanarPiece,
    branch_test,
    default_c_prime,
    fill_gap_plane,
    piece_from_json_dict,
)
from .heisenberg import SampledCurve, contact_residual
from .jets import (
    Gap,
    Tolerances,
    ValidationVerdict,
    WhitneyJet,
    big_m,
    epsilon_sequence,
    gaps,
    validate,
)


class ExtensionRefused(RuntimeError):
    """The jet failed validation and no override was requested."""

    def __init__(self, verdict: ValidationVerdict):
        self.verdict = verdict
        failing = ", ".join(verdict.failing) or "unknown"
        super().__init__(
            f"jet rejected: failing condition(s): {failing}; "
            "pass force=True to build anyway"
        )


@dataclass(frozen=True)
class OnKSegment:
    """The extension restricted to one component of K: the jet itself."""

    piece_index: int
    interval: tuple[float, float]
    jet: WhitneyJet

    @property
    def domain(self) -> tuple[float, float]:
        return self.interval

    def value(self, s: float, side: int = 0) -> np.ndarray:
        return self.jet.pieces[self.piece_index].value(s)

    def deriv(self, s: float, side: int = 0) -> np.ndarray:
        return self.jet.pieces[self.piece_index].deriv(s)


@dataclass(frozen=True)
class GapSegment:
    """One filled gap: per-plane pieces plus the re-anchored height."""

    gap: Gap
    planes: tuple[tuple[PlanarPiece, ...], ...]
    h_start: float
    branches: tuple[str, ...]
    prefix: tuple[tuple[float, ...], ...] = field(default=None)

    def __post_init__(self):
        if self.prefix is None:
            pref = []
            for pieces in self.planes:
                acc, row = 0.0, []
                for piece in pieces:
                    row.append(acc)
                    acc += piece.area_integral()
                pref.append(tuple(row))
            object.__setattr__(self, "prefix", tuple(pref))

    @property
    def domain(self) -> tuple[float, float]:
        return (self.gap.a, self.gap.b)

    def _locate(self, pieces: tuple[PlanarPiece, ...], s: float, side: int) -> int:
        for k, piece in enumerate(pieces):
            lo, hi = piece.domain
            if lo <= s <= hi:
                if s == hi and side > 0 and k + 1 < len(pieces):
                    continue
                if s == lo and side < 0 and k > 0:
                    return k - 1
                return k
        raise ValueError(f"{s} outside gap [{self.gap.a}, {self.gap.b}]")

    def seam_points(self) -> list[float]:
        pts = set()
        for pieces in self.planes:
            for piece in pieces[:-1]:
                pts.add(piece.domain[1])
        return sorted(pts)

    def value(self, s: float, side: int = 0) -> np.ndarray:
        n = len(self.planes)
        out = np.empty(2 * n + 1)
        height = self.h_start
        for j, pieces in enumerate(self.planes):
            k = self._locate(pieces, s, side)
            out[2 * j : 2 * j + 2] = pieces[k].value(s)
            height += self.prefix[j][k] + pieces[k].area_integral(s)
        out[-1] = height
        return out

    def deriv(self, s: float, side: int = 0) -> np.ndarray:
        n = len(self.planes)
        out = np.empty(2 * n + 1)
        rate = 0.0
        for j, pieces in enumerate(self.planes):
            k = self._locate(pieces, s, side)
            out[2 * j : 2 * j + 2] = pieces[k].deriv(s)
            rate += pieces[k].area_rate(s)
        out[-1] = rate
        return out

    def to_json_dict(self) -> dict:
        return {
            "kind": "gap",
            "a": self.gap.a,
            "b": self.gap.b,
            "epsilon": self.gap.epsilon,
            "hStart": self.h_start,
            "branches": list(self.branches),
            "planes": [[piece.to_json_dict() for piece in pieces] for pieces in self.planes],
        }


@dataclass(frozen=True)
class TailSegment:
    """Horizontal straight ray matching the 1-jet at a hull endpoint.

    The planar part is affine, so the symplectic rate w(direction, position)
    is constant in s and the induced lift is exactly horizontal.
    """

    side: str
    anchor: float
    base: np.ndarray
    direction: np.ndarray
    h_anchor: float
    domain: tuple[float, float]

    @property
    def h_slope(self) -> float:
        f, g = self.base[::2], self.base[1::2]
        df, dg = self.direction[::2], self.direction[1::2]
        return float(2.0 * (np.dot(df, g) - np.dot(f, dg)))

    def value(self, s: float, side: int = 0) -> np.ndarray:
        dt = s - self.anchor
        return np.concatenate(
            [self.base + dt * self.direction, [self.h_anchor + self.h_slope * dt]]
        )

    def deriv(self, s: float, side: int = 0) -> np.ndarray:
        return np.concatenate([self.direction, [self.h_slope]])

    def to_json_dict(self) -> dict:
        return {
            "kind": "tail",
            "side": self.side,
            "anchor": self.anchor,
            "base": list(map(float, self.base)),
            "direction": list(map(float, self.direction)),
            "hAnchor": self.h_anchor,
            "domain": [self.domain[0], self.domain[1]],
        }


Segment = OnKSegment | GapSegment | TailSegment


@dataclass(frozen=True)
class ExtendedCurve:
    """A materialized C1 horizontal extension on a finite window."""

    n: int
    window: tuple[float, float]
    segments: tuple[Segment, ...]
    jet: WhitneyJet
    c_prime: float

    def gap_segments(self) -> list[GapSegment]:
        return [s for s in self.segments if isinstance(s, GapSegment)]

    def _segment_for(self, s: float, side: int = 0) -> Segment:
        if not (self.window[0] <= s <= self.window[1]):
            raise ValueError(f"{s} outside window {self.window}")
        hits = [seg for seg in self.segments if seg.domain[0] <= s <= seg.domain[1]]
        if not hits:
            raise ValueError(f"no segment covers {s}")
        if side < 0:
            for seg in reversed(hits):
                if seg.domain[0] < s or s == self.window[0]:
                    return seg
            return hits[0]
        if side > 0:
            for seg in hits:
                if seg.domain[1] > s or s == self.window[1]:
                    return seg
            return hits[-1]
        # Unbiased: prefer exact jet data at points of K.
        for seg in hits:
            if isinstance(seg, OnKSegment):
                return seg
        return hits[0]

    def value(self, s: float, side: int = 0) -> np.ndarray:
        return self._segment_for(s, side).value(s, side)

    def deriv(self, s: float, side: int = 0) -> np.ndarray:
        return self._segment_for(s, side).deriv(s, side)

    def seam_points(self) -> list[float]:
        pts = set()
        for seg in self.segments:
            for endpoint in seg.domain:
                if self.window[0] < endpoint < self.window[1]:
                    pts.add(endpoint)
            if isinstance(seg, GapSegment):
                pts.update(seg.seam_points())
        return sorted(pts)

    def sample(self, grid) -> SampledCurve:
        grid = np.asarray(grid, dtype=float)
        values = np.vstack([self.value(s) for s in grid])
        derivs = np.vstack([self.deriv(s) for s in grid])
        return SampledCurve(grid, values, derivs)


def extend(
    jet: WhitneyJet,
    window: tuple[float, float] | None = None,
    c_prime: float | None = None,
    force: bool = False,
    tolerances: Tolerances | None = None,
    samples_per_interval: int = 64,
) -> ExtendedCurve:
    """Build the C1 horizontal extension of a validated jet.

    Validation runs first and a failing jet is refused unless `force` is set
    (negative tests want the machinery anyway). The window must contain the
    hull of K; tail rays appear only where it is strictly larger.
    """
    verdict = validate(jet, tolerances, samples_per_interval)
    if not verdict.extendable and not force:
        raise ExtensionRefused(verdict)
    lo_k, hi_k = jet.set.hull
    if window is None:
        window = (lo_k, hi_k)
    window = (float(window[0]), float(window[1]))
    if window[0] > lo_k or window[1] < hi_k:
        raise ValueError(f"window {window} does not contain the hull [{lo_k}, {hi_k}]")
    cp = default_c_prime(big_m(jet)) if c_prime is None else float(c_prime)

    gap_list = epsilon_sequence(jet, gaps(jet))
    segments: list[Segment] = []
    if window[0] < lo_k:
        v, d = jet.value(lo_k), jet.deriv(lo_k)
        segments.append(
            TailSegment(
                side="left",
                anchor=lo_k,
                base=v[:-1],
                direction=d[:-1],
                h_anchor=float(v[-1]),
                domain=(window[0], lo_k),
            )
        )
    for idx, interval in enumerate(jet.set.intervals):
        segments.append(OnKSegment(idx, interval, jet))
        if idx < len(gap_list):
            gap = gap_list[idx]
            planes = []
            branches = []
            for j in range(jet.n):
                pieces, params, _frame = fill_gap_plane(jet, gap, j, cp)
                planes.append(tuple(pieces))
                branches.append(branch_test(params).value)
            segments.append(
                GapSegment(
                    gap=gap,
                    planes=tuple(planes),
                    h_start=float(jet.value(gap.a)[-1]),
                    branches=tuple(branches),
                )
            )
    if window[1] > hi_k:
        v, d = jet.value(hi_k), jet.deriv(hi_k)
        segments.append(
            TailSegment(
                side="right",
                anchor=hi_k,
                base=v[:-1],
                direction=d[:-1],
                h_anchor=float(v[-1]),
                domain=(hi_k, window[1]),
            )
        )
    return ExtendedCurve(
        n=jet.n, window=window, segments=tuple(segments), jet=jet, c_prime=cp
    )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    """Numerical audit of every construction claim, never asserting."""

    match_value: float
    match_deriv: float
    seam_value_jump: float
    seam_deriv_jump: float
    horizontality_residual: float
    gap_lift_residual: tuple[float, ...]
    gap_lift_residual_scaled: tuple[float, ...]
    gap_sup_value: tuple[float, ...]
    gap_sup_deriv_planar: tuple[float, ...]
    gap_sup_deriv_full: tuple[float, ...]
    gap_epsilon: tuple[float, ...]
    gap_envelope: tuple[float, ...]
    gap_area_rate: tuple[float, ...]
    samples_per_segment: int

    def passed(self, tol: Tolerances | None = None) -> bool:
        tol = tol or Tolerances()
        envelope_ok = all(
            v < e and d < e
            for v, d, e in zip(self.gap_sup_value, self.gap_sup_deriv_planar, self.gap_envelope)
        )
        return (
            self.match_value <= tol.match_on_k
            and self.match_deriv <= tol.match_on_k
            and self.seam_value_jump <= tol.seam_value
            and self.seam_deriv_jump <= tol.seam_deriv
            and self.horizontality_residual <= tol.lift_residual
            and all(r <= tol.lift_residual for r in self.gap_lift_residual_scaled)
            and envelope_ok
        )

    def worst_offender(self, tol: Tolerances | None = None) -> str | None:
        tol = tol or Tolerances()
        checks = [
            ("match on K (values)", self.match_value, tol.match_on_k),
            ("match on K (derivatives)", self.match_deriv, tol.match_on_k),
            ("seam value jump", self.seam_value_jump, tol.seam_value),
            ("seam derivative jump", self.seam_deriv_jump, tol.seam_deriv),
            ("horizontality residual", self.horizontality_residual, tol.lift_residual),
        ]
        for i, r in enumerate(self.gap_lift_residual_scaled):
            checks.append((f"gap {i} lift identity", r, tol.lift_residual))
        for i, (v, d, e) in enumerate(
            zip(self.gap_sup_value, self.gap_sup_deriv_planar, self.gap_envelope)
        ):
            checks.append((f"gap {i} value envelope", v, e))
            checks.append((f"gap {i} derivative envelope", d, e))
        bad = [(name, val, lim) for name, val, lim in checks if val > lim]
        if not bad:
            return None
        name, val, lim = max(bad, key=lambda rec: rec[1] / rec[2] if rec[2] > 0 else math.inf)
        return f"{name}: {val!r} exceeds {lim!r}"

    def to_dict(self) -> dict:
        return {
            "matchValue": self.match_value,
            "matchDeriv": self.match_deriv,
            "seamValueJump": self.seam_value_jump,
            "seamDerivJump": self.seam_deriv_jump,
            "horizontalityResidual": self.horizontality_residual,
            "gapLiftResidual": list(self.gap_lift_residual),
            "gapLiftResidualScaled": list(self.gap_lift_residual_scaled),
            "gapSupValue": list(self.gap_sup_value),
            "gapSupDerivPlanar": list(self.gap_sup_deriv_planar),
            "gapSupDerivFull": list(self.gap_sup_deriv_full),
            "gapEpsilon": list(self.gap_epsilon),
            "gapEnvelope": list(self.gap_envelope),
            "gapAreaRate": list(self.gap_area_rate),
            "samplesPerSegment": self.samples_per_segment,
        }


def _gap_lift_oracle(seg: GapSegment, tol: float = 1e-12) -> float:
    """Independent quadrature of the lift rate over the gap."""

    def rate(s: float) -> float:
        total = 0.0
        for j, pieces in enumerate(seg.planes):
            k = seg._locate(pieces, s, 0)
            p = pieces[k].value(s)
            d = pieces[k].deriv(s)
            total += 2.0 * (d[0] * p[1] - p[0] * d[1])
        return total

    cuts = [seg.gap.a, *seg.seam_points(), seg.gap.b]
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        val, _err = integrate.quad(rate, lo, hi, epsabs=tol, epsrel=0.0, limit=200)
        total += val
    return total


def verify(ext: ExtendedCurve, samples_per_segment: int = 400) -> VerificationReport:
    """Measure every residual of the extension; reports, never raises."""
    jet = ext.jet
    match_v = match_d = 0.0
    for idx, piece in enumerate(jet.pieces):
        l, r = piece.interval
        grid = np.array([l]) if l == r else np.linspace(l, r, min(samples_per_segment, 200))
        for s in grid:
            dv = ext.value(float(s)) - piece.value(float(s))
            dd = ext.deriv(float(s)) - piece.deriv(float(s))
            match_v = max(match_v, float(np.max(np.abs(dv))))
            match_d = max(match_d, float(np.max(np.abs(dd))))

    seam_v = seam_d = 0.0
    for s in ext.seam_points():
        vl, vr = ext.value(s, side=-1), ext.value(s, side=+1)
        dl, dr = ext.deriv(s, side=-1), ext.deriv(s, side=+1)
        seam_v = max(seam_v, float(np.max(np.abs(vl - vr))))
        seam_d = max(seam_d, float(np.max(np.abs(dl - dr))))

    horiz = 0.0
    for seg in ext.segments:
        lo, hi = seg.domain
        if hi <= lo:
            grid = [lo]
        else:
            grid = np.linspace(lo, hi, samples_per_segment)
        for s in grid:
            horiz = max(horiz, abs(contact_residual(seg.value(float(s)), seg.deriv(float(s)))))

    lift_res, lift_res_scaled = [], []
    sup_val, sup_dpl, sup_dfull = [], [], []
    eps_list, env_list, rate_list = [], [], []
    for seg in ext.gap_segments():
        a, b = seg.gap.a, seg.gap.b
        va, vb = jet.value(a), jet.value(b)
        da = jet.deriv(a)
        target = float(vb[-1] - va[-1])
        res = abs(_gap_lift_oracle(seg) - target)
        lift_res.append(res)
        lift_res_scaled.append(res / max(1.0, abs(target)))

        grid = np.linspace(a, b, max(samples_per_segment, 400))
        vals = np.vstack([seg.value(float(s)) for s in grid])
        ders = np.vstack([seg.deriv(float(s)) for s in grid])
        plane_v = 0.0
        plane_d = 0.0
        for j in range(ext.n):
            sl = slice(2 * j, 2 * j + 2)
            plane_v = max(plane_v, float(np.max(np.linalg.norm(vals[:, sl] - va[sl], axis=1))))
            plane_d = max(plane_d, float(np.max(np.linalg.norm(ders[:, sl] - da[sl], axis=1))))
        sup_val.append(plane_v)
        sup_dpl.append(plane_d)
        sup_dfull.append(float(np.max(np.linalg.norm(ders - da, axis=1))))
        eps = seg.gap.epsilon if seg.gap.epsilon is not None else math.nan
        eps_list.append(eps)
        env_list.append(ext.c_prime * (math.sqrt(eps) + eps**2) if eps == eps else math.nan)
        cross = sum(
            vb[2 * j] * va[2 * j + 1] - va[2 * j] * vb[2 * j + 1] for j in range(ext.n)
        )
        rate_list.append(abs(target - 2.0 * cross) / (b - a) ** 2)

    return VerificationReport(
        match_value=match_v,
        match_deriv=match_d,
        seam_value_jump=seam_v,
        seam_deriv_jump=seam_d,
        horizontality_residual=horiz,
        gap_lift_residual=tuple(lift_res),
        gap_lift_residual_scaled=tuple(lift_res_scaled),
        gap_sup_value=tuple(sup_val),
        gap_sup_deriv_planar=tuple(sup_dpl),
        gap_sup_deriv_full=tuple(sup_dfull),
        gap_epsilon=tuple(eps_list),
        gap_envelope=tuple(env_list),
        gap_area_rate=tuple(rate_list),
        samples_per_segment=samples_per_segment,
    )


def sample(ext: ExtendedCurve, grid) -> SampledCurve:
    """Evaluate the extension (values and derivatives) on an increasing grid."""
    return ext.sample(grid)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def to_manifest_dict(ext: ExtendedCurve, report: VerificationReport | None = None) -> dict:
    segments = []
    for seg in ext.segments:
        if isinstance(seg, OnKSegment):
            segments.append({"kind": "onK", "interval": [seg.interval[0], seg.interval[1]]})
        else:
            segments.append(seg.to_json_dict())
    return {
        "n": ext.n,
        "window": [ext.window[0], ext.window[1]],
        "cPrime": ext.c_prime,
        "jet": ext.jet.to_json_dict(),
        "segments": segments,
        "report": report.to_dict() if report is not None else None,
    }


def from_manifest_dict(data: dict) -> ExtendedCurve:
    jet = WhitneyJet.from_json_dict(data["jet"])
    segments: list[Segment] = []
    on_k = 0
    for raw in data["segments"]:
        kind = raw["kind"]
        if kind == "onK":
            segments.append(OnKSegment(on_k, tuple(map(float, raw["interval"])), jet))
            on_k += 1
        elif kind == "gap":
            planes = tuple(
                tuple(piece_from_json_dict(p) for p in plane) for plane in raw["planes"]
            )
            segments.append(
                GapSegment(
                    gap=Gap(float(raw["a"]), float(raw["b"]), raw.get("epsilon")),
                    planes=planes,
                    h_start=float(raw["hStart"]),
                    branches=tuple(raw.get("branches", ())),
                )
            )
        elif kind == "tail":
            segments.append(
                TailSegment(
                    side=raw["side"],
                    anchor=float(raw["anchor"]),
                    base=np.asarray(raw["base"], dtype=float),
                    direction=np.asarray(raw["direction"], dtype=float),
                    h_anchor=float(raw["hAnchor"]),
                    domain=tuple(map(float, raw["domain"])),
                )
            )
        else:
            raise ValueError(f"unknown segment kind {kind!r}")
    return ExtendedCurve(
        n=int(data["n"]),
        window=tuple(map(float, data["window"])),
        segments=tuple(segments),
        jet=jet,
        c_prime=float(data["cPrime"]),
    )


def save_manifest(ext: ExtendedCurve, report: VerificationReport | None, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_manifest_dict(ext, report), fh, indent=2)
        fh.write("\n")


def load_manifest(path) -> ExtendedCurve:
    with open(path, "r", encoding="utf-8") as fh:
        return from_manifest_dict(json.load(fh))


def csv_header(n: int) -> str:
    cols = ["s"]
    for j in range(1, n + 1):
        cols += [f"x{j}", f"y{j}"]
    cols.append("t")
    for j in range(1, n + 1):
        cols += [f"dx{j}", f"dy{j}"]
    cols.append("dt")
    return ",".join(cols)


def write_csv(sampled: SampledCurve, path):
    """Plot-ready CSV: one row per grid point, shortest round-trip decimals."""
    n = (sampled.values.shape[1] - 1) // 2
    lines = [csv_header(n)]
    derivs = sampled.derivs
    if derivs is None:
        derivs = np.zeros_like(sampled.values)
    for s, v, d in zip(sampled.grid, sampled.values, derivs):
        row = [repr(float(s))]
        row += [repr(float(x)) for x in v]
        row += [repr(float(x)) for x in d]
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
