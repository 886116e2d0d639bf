"""A jet that is Whitney-regular yet admits no C1 horizontal extension.

K stacks the intervals [1 - 2^-k, 1 - (3/4) 2^-k] toward the point 1; the jet
is constant (0, 0, 3^-k) on the k-th interval with zero derivative.  First
order Taylor quotients decay like (2/3)^k, so the jet is honestly C1 in the
Whitney sense, but the height must cross 3^-k - 3^-(k+1) over a gap of length
2^-(k+2), so the second-order area quotient blows up at the exact rate
(32/3) (4/3)^k.  The infinite union is materialized truncated to `levels`
intervals plus {1}; every per-level rate is unaffected by the truncation.
"""

from __future__ import annotations

import numpy as np

from .jets import CompactSet, JetPiece, WhitneyJet, whitney_modulus


def interval_endpoints(k: int) -> tuple[float, float]:
    """The k-th interval [1 - 2^-k, 1 - (3/4) 2^-k]; exact dyadics."""
    return (1.0 - 2.0 ** (-k), 1.0 - 0.75 * 2.0 ** (-k))


def build(levels: int) -> WhitneyJet:
    """Truncated counterexample jet on `levels` intervals plus {1}."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    zeros = ((np.zeros(1), np.zeros(1)),)
    pieces = []
    intervals = []
    for k in range(levels):
        c, d = interval_endpoints(k)
        intervals.append((c, d))
        pieces.append(
            JetPiece((c, d), zeros, np.array([3.0 ** (-k)]), zeros, np.zeros(1))
        )
    intervals.append((1.0, 1.0))
    pieces.append(JetPiece((1.0, 1.0), zeros, np.zeros(1), zeros, np.zeros(1)))
    return WhitneyJet(1, CompactSet(tuple(intervals)), tuple(pieces))


def blowup_ratio(level_index: int, jet: WhitneyJet | None = None) -> float:
    """|h(c_{k+1}) - h(d_k)| / |c_{k+1} - d_k|^2, measured from the jet.

    Equals (32/3) (4/3)^k in closed form.
    """
    if level_index < 0:
        raise ValueError("level index must be >= 0")
    if jet is None:
        jet = build(level_index + 2)
    _, d_k = interval_endpoints(level_index)
    c_next, _ = interval_endpoints(level_index + 1)
    h_hi = float(jet.value(d_k)[-1])
    h_lo = float(jet.value(c_next)[-1])
    gap = c_next - d_k
    return abs(h_lo - h_hi) / (gap * gap)


def blowup_ratio_closed_form(level_index: int) -> float:
    return (32.0 / 3.0) * (4.0 / 3.0) ** level_index


def whitney_bound_value(level_index: int) -> float:
    """The proof's first-order bound 4 (2/3)^k at probe scale 2^-(k+2)."""
    return 4.0 * (2.0 / 3.0) ** level_index


def whitney_bound(level_index: int, levels: int | None = None) -> float:
    """Measured Whitney modulus at scale 2^-(level_index+2).

    Interval endpoints realize the sup for this piecewise-constant jet, so
    endpoint-only sampling is an exact pair enumeration.  Raises if the
    measured value ever exceeded the 4 (2/3)^k bound (it cannot).
    """
    if level_index < 0:
        raise ValueError("level index must be >= 0")
    if levels is None:
        levels = level_index + 2
    if levels < level_index + 2:
        raise ValueError("need at least level_index + 2 levels for this scale")
    jet = build(levels)
    measured = whitney_modulus(jet, 2.0 ** (-(level_index + 2)), samples_per_interval=2)
    if measured > whitney_bound_value(level_index):
        raise ArithmeticError(
            f"whitney modulus {measured} exceeds bound {whitney_bound_value(level_index)} "
            f"at level {level_index}"
        )
    return measured


def ratio_table(levels: int) -> list[dict]:
    """Per-level rates for the CSV table: blow-up ratios and Whitney bounds."""
    if levels < 2:
        raise ValueError("table needs at least 2 levels")
    jet = build(levels)
    rows = []
    for k in range(levels - 1):
        _, d_k = interval_endpoints(k)
        c_next, _ = interval_endpoints(k + 1)
        rows.append(
            {
                "level": k,
                "gapLength": c_next - d_k,
                "areaRatio": blowup_ratio(k, jet),
                "areaRatioClosedForm": blowup_ratio_closed_form(k),
                "whitneyScale": 2.0 ** (-(k + 2)),
                "whitneyMeasured": whitney_modulus(
                    jet, 2.0 ** (-(k + 2)), samples_per_interval=2
                ),
                "whitneyBound": whitney_bound_value(k),
            }
        )
    return rows
