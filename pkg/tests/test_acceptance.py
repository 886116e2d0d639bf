"""Acceptance suite: one test per exit criterion, one printed line each.

Every tolerance here is fixed; nothing is calibrated after the fact.  The
whole module is meant to run in well under a minute on commodity hardware.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from conftest import admissible_params, random_planes
from hwhitney import counterexample as cx
from hwhitney.extension import extend, verify
from hwhitney.gapfill import (
    Branch,
    branch_test,
    build_eta,
    envelope_check,
    eta_circle,
)
from hwhitney.heisenberg import HPoint, contact_residual, dilate, group_inv, group_mul
from hwhitney.jets import (
    Tolerances,
    modulus_report,
    restrict_polynomial_curve,
    validate,
)
from hwhitney.luzin import PiecewiseCurve, approximate


def report(criterion: int, ok: bool, detail: str):
    print(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
    assert ok, detail


def random_hpoint(rng, n):
    return HPoint(tuple(rng.uniform(-10.0, 10.0, 2 * n + 1)))


def test_criterion_1_group_law_suite():
    rng = np.random.default_rng(101)
    worst = 0.0
    for n in (1, 3):
        e = HPoint.origin(n)
        for _ in range(10_000):
            p, q, r = (random_hpoint(rng, n) for _ in range(3))
            lhs = group_mul(group_mul(p, q), r).as_array()
            rhs = group_mul(p, group_mul(q, r)).as_array()
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            worst = max(worst, float(np.max(np.abs(group_mul(e, p).as_array() - p.as_array()))))
            worst = max(
                worst, float(np.max(np.abs(group_mul(p, group_inv(p)).as_array())))
            )
            lam = float(rng.uniform(0.25, 1.5))
            dh = group_mul(dilate(lam, p), dilate(lam, q)).as_array()
            worst = max(
                worst, float(np.max(np.abs(dilate(lam, group_mul(p, q)).as_array() - dh)))
            )
    report(1, worst <= 1e-12, f"group-law residual over 10^4 triples in H^1 and H^3: {worst:.3e}")


def test_criterion_2_lift_horizontality():
    rng = np.random.default_rng(202)
    from hwhitney.heisenberg import horizontal_lift
    from hwhitney import poly

    worst = 0.0
    for trial in range(100):
        n = 1 + trial % 2
        planes = [(rng.uniform(-1, 1, 5), rng.uniform(-1, 1, 5)) for _ in range(n)]
        lift = horizontal_lift(planes, float(rng.uniform(-1, 1)), (0.0, 1.0))
        grid = np.linspace(0.0, 1.0, 1000)
        vals = np.empty((grid.size, 2 * n + 1))
        ders = np.empty_like(vals)
        for j, (fc, gc) in enumerate(planes):
            vals[:, 2 * j] = poly.peval(fc, grid)
            vals[:, 2 * j + 1] = poly.peval(gc, grid)
            ders[:, 2 * j] = poly.peval(poly.pder(fc), grid)
            ders[:, 2 * j + 1] = poly.peval(poly.pder(gc), grid)
        vals[:, -1] = lift(grid)
        ders[:, -1] = poly.peval(lift.rate_coeffs, grid)
        f, g = vals[:, :-1:2], vals[:, 1:-1:2]
        df, dg = ders[:, :-1:2], ders[:, 1:-1:2]
        res = ders[:, -1] - 2.0 * (np.sum(df * g, axis=1) - np.sum(f * dg, axis=1))
        worst = max(worst, float(np.max(np.abs(res))))
    report(2, worst <= 1e-9, f"lift contact residual over 100 degree-4 tuples: {worst:.3e}")


def test_criterion_3_lemma_suite():
    rng = np.random.default_rng(303)

    def quad_area(pieces):
        total = 0.0
        for piece in pieces:
            val, _ = integrate.quad(
                lambda s: 2.0
                * (piece.deriv(s)[0] * piece.value(s)[1] - piece.value(s)[0] * piece.deriv(s)[1]),
                piece.domain[0],
                piece.domain[1],
                epsabs=1e-13,
                epsrel=0.0,
                limit=200,
            )
            total += val
        return total

    worst_point = worst_deriv = worst_area = worst_seam_v = worst_seam_d = 0.0
    worst_arc_rel = 0.0
    envelope_failures = 0
    for branch in (Branch.POLYNOMIAL, Branch.CIRCLE):
        for _ in range(500):
            p = admissible_params(rng, branch)
            pieces = build_eta(p)
            v0, v1 = pieces[0].value(0.0), pieces[-1].value(p.delta)
            d0, d1 = pieces[0].deriv(0.0), pieces[-1].deriv(p.delta)
            worst_point = max(
                worst_point,
                float(np.max(np.abs(v0))),
                abs(v1[0] - p.ell),
                abs(v1[1]),
            )
            worst_deriv = max(
                worst_deriv,
                abs(d0[0] - p.alpha),
                abs(d0[1] - p.mu),
                abs(d1[0] - p.beta),
                abs(d1[1] - p.nu),
            )
            worst_area = max(worst_area, abs(quad_area(pieces) - p.lam))
            if branch is Branch.CIRCLE:
                for left, right in zip(pieces, pieces[1:]):
                    s = left.domain[1]
                    worst_seam_v = max(
                        worst_seam_v, float(np.max(np.abs(left.value(s) - right.value(s))))
                    )
                    worst_seam_d = max(
                        worst_seam_d, float(np.max(np.abs(left.deriv(s) - right.deriv(s))))
                    )
                arc = pieces[1]
                swept = p.lam - p.delta * p.ell * (p.mu - p.nu) / 15.0
                closed = arc.area_integral()
                if swept != 0.0:
                    worst_arc_rel = max(worst_arc_rel, abs(closed - swept) / abs(swept))
                    expected = -arc.sign * 4.0 * math.pi * arc.radius**2
                    worst_arc_rel = max(worst_arc_rel, abs(closed - expected) / abs(swept))
            env = envelope_check(pieces, p, samples_per_piece=1500)
            if not (env.value_ok and env.deriv_ok):
                envelope_failures += 1
    ok = (
        worst_point <= 1e-10
        and worst_deriv <= 1e-10
        and worst_area <= 1e-9
        and worst_seam_v <= 1e-10
        and worst_seam_d <= 1e-10
        and worst_arc_rel <= 1e-10
        and envelope_failures == 0
    )
    report(
        3,
        ok,
        "lemma suite (500 params/branch): "
        f"point {worst_point:.2e}, deriv {worst_deriv:.2e}, area {worst_area:.2e}, "
        f"seam {worst_seam_v:.2e}/{worst_seam_d:.2e}, arc rel {worst_arc_rel:.2e}, "
        f"envelope failures {envelope_failures}",
    )


def test_criterion_4_counterexample_rates():
    jet = cx.build(12)
    worst_rel = 0.0
    for n in range(11):
        got = cx.blowup_ratio(n, jet)
        want = cx.blowup_ratio_closed_form(n)
        worst_rel = max(worst_rel, abs(got - want) / want)
    bounds_ok = True
    for n in range(10):
        measured = cx.whitney_bound(n, levels=11)
        bounds_ok = bounds_ok and measured <= 4.0 * (2.0 / 3.0) ** n
    verdict = validate(cx.build(11))
    rejected = (not verdict.extendable) and ("area" in verdict.failing)
    ok = worst_rel <= 1e-12 and bounds_ok and rejected
    report(
        4,
        ok,
        f"counterexample: ratio rel err {worst_rel:.2e}, whitney bounds hold: {bounds_ok}, "
        f"validate rejects naming {verdict.failing}",
    )


def test_criterion_5_end_to_end_extension():
    rng = np.random.default_rng(505)
    tol = Tolerances()
    failures = []
    for trial in range(20):
        n = 1 + trial % 2
        planes = random_planes(rng, n, 3)
        count = int(rng.integers(2, 7))
        cuts = np.sort(rng.uniform(0.0, 3.0, 2 * count))
        intervals = []
        last = -1.0
        for k in range(count):
            a = max(float(cuts[2 * k]), last + 0.01)
            b = max(float(cuts[2 * k + 1]), a + 0.02)
            intervals.append((a, b))
            last = b
        jet = restrict_polynomial_curve(n, planes, intervals, h0=float(rng.uniform(-1, 1)))
        ext = extend(jet)
        rep = verify(ext, samples_per_segment=250)
        checks = {
            "match": rep.match_value == 0.0 and rep.match_deriv == 0.0,
            "seams": rep.seam_deriv_jump <= 1e-9 and rep.seam_value_jump <= 1e-10,
            "horizontality": rep.horizontality_residual <= 1e-9,
            "lift": all(r <= 1e-9 for r in rep.gap_lift_residual_scaled),
        }
        if not all(checks.values()):
            failures.append((trial, {k: v for k, v in checks.items() if not v}))
    report(5, not failures, f"20 random restriction jets extend and verify: failures {failures}")


def test_criterion_6_shrinking_gap_trend():
    rng = np.random.default_rng(606)
    planes = random_planes(rng, 1, 3)
    sup_vals, sup_ders, envs = [], [], []
    for step in range(8):
        width = 0.5 * 2.0**-step
        jet = restrict_polynomial_curve(
            1, planes, [(0.0, 1.0 - width / 2.0), (1.0 + width / 2.0, 2.0)], h0=0.2
        )
        rep = verify(extend(jet), samples_per_segment=300)
        sup_vals.append(rep.gap_sup_value[0])
        sup_ders.append(rep.gap_sup_deriv_planar[0])
        envs.append(rep.gap_envelope[0])
    monotone = all(a > b for a, b in zip(sup_vals, sup_vals[1:])) and all(
        a > b for a, b in zip(sup_ders, sup_ders[1:])
    )
    below = all(v < e and d < e for v, d, e in zip(sup_vals, sup_ders, envs))
    report(
        6,
        monotone and below,
        f"shrinking gaps: sup deviations decrease {monotone}, below P(eps) {below}",
    )


def test_criterion_7_luzin_corner():
    curve = PiecewiseCurve.from_planar(
        1,
        [-1.0, 0.0, 1.0],
        [
            [[[0.0, 1.0], [0.0, -1.0]]],
            [[[0.0, 1.0], [0.0, 1.0]]],
        ],
        h0=0.0,
    )
    tol = Tolerances()
    ok = True
    details = []
    for eps in (0.2, 0.05):
        result = approximate(curve, eps, cells=512)
        removed_ok = result.measure_removed < eps
        battery_ok = result.report.passed(tol)
        match = 0.0
        for l, r in result.kept.intervals:
            for s in np.linspace(l, r, 5):
                s = float(s)
                match = max(
                    match,
                    float(np.max(np.abs(result.extension.value(s) - curve.value(s)))),
                    float(np.max(np.abs(result.extension.deriv(s) - curve.deriv(s)))),
                )
        ok = ok and removed_ok and battery_ok and match <= 1e-9
        details.append(f"eps={eps}: removed {result.measure_removed:.4f}, match {match:.1e}")
    report(7, ok, "luzin corner curve: " + "; ".join(details))


def test_criterion_8_height_whitney_implied():
    rng = np.random.default_rng(808)
    failures = 0
    for trial in range(50):
        n = 1 + trial % 2
        planes = random_planes(rng, n, 3)
        count = int(rng.integers(2, 5))
        cuts = np.sort(rng.uniform(0.0, 3.0, 2 * count))
        intervals = []
        last = -1.0
        for k in range(count):
            a = max(float(cuts[2 * k]), last + 0.01)
            b = max(float(cuts[2 * k + 1]), a + 0.02)
            intervals.append((a, b))
            last = b
        jet = restrict_polynomial_curve(n, planes, intervals, h0=float(rng.uniform(-1, 1)))
        rep = modulus_report(jet)
        k = rep.smallest_conclusive()
        if k is None:
            failures += 1
            continue
        t = float(rep.scales[k])
        gmax = 0.0
        for s in jet.sample_points(64):
            v = jet.value(float(s))
            for j in range(n):
                gmax = max(gmax, float(np.linalg.norm(v[2 * j : 2 * j + 2])))
        bound = t * rep.area[k] + 2.0 * math.sqrt(n) * gmax * rep.whitney_planar[k]
        if not rep.whitney_height[k] <= bound + 1e-9:
            failures += 1
    report(
        8,
        failures == 0,
        f"height Whitney modulus bounded by area+planar moduli on 50 jets: failures {failures}",
    )
