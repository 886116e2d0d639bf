import math

import numpy as np
import pytest

from conftest import restriction_jet, random_planes
from hwhitney import jets
from hwhitney.jets import (
    CompactSet,
    Gap,
    JetFormatError,
    Tolerances,
    WhitneyJet,
    _gap_epsilon,
    _gap_quantities,
    area_modulus,
    big_m,
    epsilon_sequence,
    gaps,
    horizontality_defect,
    modulus_report,
    restrict_polynomial_curve,
    validate,
    whitney_modulus,
)


def constant_jet(intervals, value=(0.0, 0.0, 0.0)):
    pieces = []
    for l, r in intervals:
        data = {
            "gamma": [[[value[0]], [value[1]]]],
            "height": [value[2]],
        }
        if l == r:
            data["gammaPrime"] = [[[0.0], [0.0]]]
            data["heightPrime"] = [0.0]
        pieces.append(data)
    return WhitneyJet.from_data(1, intervals, pieces)


class TestCompactSet:
    def test_rejects_overlap(self):
        with pytest.raises(JetFormatError):
            CompactSet(((0.0, 1.0), (1.0, 2.0)))

    def test_rejects_unsorted(self):
        with pytest.raises(JetFormatError):
            CompactSet(((2.0, 3.0), (0.0, 1.0)))

    def test_rejects_empty(self):
        with pytest.raises(JetFormatError):
            CompactSet(())

    def test_degenerate_ok(self):
        cs = CompactSet(((0.0, 0.0), (1.0, 2.0)))
        assert cs.hull == (0.0, 2.0)
        assert cs.measure() == 1.0


class TestGaps:
    def test_single_interval(self):
        assert gaps(constant_jet([(0.0, 1.0)])) == []

    def test_two_intervals(self):
        got = gaps(constant_jet([(0.0, 1.0), (2.0, 3.0)]))
        assert [(g.a, g.b) for g in got] == [(1.0, 2.0)]

    def test_points_and_intervals(self):
        got = gaps(constant_jet([(0.0, 0.0), (1.0, 2.0), (5.0, 5.0)]))
        assert [(g.a, g.b) for g in got] == [(0.0, 1.0), (2.0, 5.0)]


class TestPieceConsistency:
    def test_isolated_point_needs_derivatives(self):
        with pytest.raises(JetFormatError):
            WhitneyJet.from_data(
                1, [(0.0, 0.0)], [{"gamma": [[[1.0], [0.0]]], "height": [0.0]}]
            )

    def test_inconsistent_declared_derivative(self):
        with pytest.raises(JetFormatError):
            WhitneyJet.from_data(
                1,
                [(0.0, 1.0)],
                [
                    {
                        "gamma": [[[0.0, 1.0], [0.0]]],
                        "height": [0.0],
                        "gammaPrime": [[[2.0], [0.0]]],
                        "heightPrime": [0.0],
                    }
                ],
            )

    def test_degree_cap(self):
        with pytest.raises(JetFormatError):
            WhitneyJet.from_data(
                1,
                [(0.0, 1.0)],
                [{"gamma": [[[0.0] * 8, [0.0]]], "height": [0.0]}],
            )

    def test_evaluation_outside_k(self):
        jet = constant_jet([(0.0, 1.0), (2.0, 3.0)])
        with pytest.raises(ValueError):
            jet.value(1.5)


class TestModuli:
    def test_constant_jet_zero(self):
        jet = constant_jet([(0.0, 1.0), (2.0, 3.0)], value=(1.0, -2.0, 0.5))
        # a constant jet has nonzero area numerator unless gamma is constant too:
        # h(b)-h(a) = 0 and the cross term cancels for equal endpoint values
        assert whitney_modulus(jet, 5.0) == 0.0
        assert area_modulus(jet, 5.0) == 0.0
        assert horizontality_defect(jet) == 0.0

    def test_scale_domain_error(self):
        jet = constant_jet([(0.0, 1.0)])
        with pytest.raises(ValueError):
            whitney_modulus(jet, 0.0)
        with pytest.raises(ValueError):
            area_modulus(jet, -1.0)

    def test_restriction_modulus_vanishes_linearly(self, rng):
        jet, _ = restriction_jet(rng, n=1, count=2)
        big = whitney_modulus(jet, 1.0)
        small = whitney_modulus(jet, 0.01)
        assert small <= 0.05 * big + 1e-9

    def test_moduli_monotone_in_scale(self, rng):
        jet, _ = restriction_jet(rng, n=2, count=3)
        scales = [2.0, 1.0, 0.5, 0.25, 0.125]
        w = [whitney_modulus(jet, t) for t in scales]
        a = [area_modulus(jet, t) for t in scales]
        assert all(x >= y - 1e-15 for x, y in zip(w, w[1:]))
        assert all(x >= y - 1e-15 for x, y in zip(a, a[1:]))

    def test_defect_detects_height_perturbation(self):
        jet = WhitneyJet.from_data(
            1,
            [(0.0, 1.0), (2.0, 2.0)],
            [
                {"gamma": [[[0.0], [0.0]]], "height": [0.0]},
                {
                    "gamma": [[[0.0], [0.0]]],
                    "height": [0.0],
                    "gammaPrime": [[[0.0], [0.0]]],
                    "heightPrime": [1.0],
                },
            ],
        )
        assert horizontality_defect(jet) >= 1.0

    def test_lift_constructed_jet_has_zero_defect(self, rng):
        jet, _ = restriction_jet(rng, n=2, count=3)
        assert horizontality_defect(jet) <= 1e-12


class TestBigM:
    def test_linear_chord_example(self):
        # single gap (0,1); gamma runs linearly from (0,0) to (3,4)
        jet = WhitneyJet.from_data(
            1,
            [(-1.0, 0.0), (1.0, 2.0)],
            [
                {"gamma": [[[3.0, 3.0], [4.0, 4.0]]], "height": [0.0]},
                {"gamma": [[[0.0, 3.0], [1.0, 4.0]]], "height": [0.0]},
            ],
        )
        # chord quotient |(3,4)|/1 = 5, derivative norms 5 -> M = 6
        assert big_m(jet) == pytest.approx(6.0, abs=1e-12)

    def test_no_gaps_floor(self):
        assert big_m(constant_jet([(0.0, 1.0)])) == 1.0

    def test_constant_jet_floor(self):
        assert big_m(constant_jet([(0.0, 1.0), (2.0, 3.0)])) == 1.0


class TestEpsilonSequence:
    def test_degenerate_floor(self):
        assert _gap_epsilon(np.zeros(5)) == 1e-12

    def test_dominates_quantities_and_monotone(self, rng):
        jet, _ = restriction_jet(rng, n=1, count=5)
        glist = epsilon_sequence(jet, gaps(jet))
        for g in glist:
            q = _gap_quantities(jet, g)
            assert np.all(q < g.epsilon)
            assert g.length < g.epsilon
        ordered = sorted(glist, key=lambda g: -g.length)
        eps = [g.epsilon for g in ordered]
        assert all(x >= y for x, y in zip(eps, eps[1:]))

    def test_epsilons_shrink_with_gaps(self, rng):
        planes = random_planes(rng, 1, 3)
        eps_prev = None
        for width in (0.4, 0.1, 0.025):
            jet = restrict_polynomial_curve(
                1, planes, [(0.0, 1.0 - width / 2), (1.0 + width / 2, 2.0)]
            )
            g = epsilon_sequence(jet, gaps(jet))[0]
            if eps_prev is not None:
                assert g.epsilon < eps_prev
            eps_prev = g.epsilon

    def test_gap_invariant(self):
        with pytest.raises(ValueError):
            Gap(1.0, 1.0)
        with pytest.raises(ValueError):
            Gap(0.0, 1.0, epsilon=0.5)


class TestValidate:
    def test_restriction_extendable(self, rng):
        for n in (1, 2):
            jet, _ = restriction_jet(rng, n=n, count=3, allow_points=True)
            verdict = validate(jet)
            assert verdict.extendable, verdict.failing

    def test_horizontality_violation_detected(self):
        jet = WhitneyJet.from_data(
            1,
            [(0.0, 1.0), (2.0, 2.0)],
            [
                {"gamma": [[[0.0], [0.0]]], "height": [0.0]},
                {
                    "gamma": [[[0.0], [0.0]]],
                    "height": [0.0],
                    "gammaPrime": [[[0.0], [0.0]]],
                    "heightPrime": [1.0],
                },
            ],
        )
        verdict = validate(jet)
        assert not verdict.extendable
        assert "horizontality" in verdict.failing

    def test_single_point_vacuous(self):
        jet = constant_jet([(0.5, 0.5)])
        verdict = validate(jet)
        assert verdict.extendable
        assert any("vacuous" in note for note in verdict.notes)

    def test_monotone_under_shrinking_k(self, rng):
        planes = random_planes(rng, 1, 3)
        intervals = [(0.0, 0.5), (0.8, 1.2), (1.5, 1.7), (2.0, 2.75)]
        full = restrict_polynomial_curve(1, planes, intervals)
        assert validate(full).extendable
        for keep in ([0, 1, 2], [0, 2, 3], [1, 3], [2]):
            sub = restrict_polynomial_curve(1, planes, [intervals[i] for i in keep])
            assert validate(sub).extendable

    def test_report_fields(self, rng):
        jet, _ = restriction_jet(rng, n=1, count=2)
        rep = modulus_report(jet)
        assert rep.scales.shape == rep.whitney.shape == rep.area.shape
        assert rep.samples_per_interval == 64
        assert rep.big_m >= 1.0
        d = rep.to_dict()
        assert set(d) >= {"scales", "whitney", "area", "horizontality", "bigM"}

    def test_remark_h_component_bound(self, rng):
        # With horizontality holding pointwise, the height Whitney modulus is
        # controlled by the area modulus and the planar Whitney modulus.
        for _ in range(10):
            n = int(rng.integers(1, 3))
            jet, _ = restriction_jet(rng, n=n, count=3)
            rep = modulus_report(jet)
            k = rep.smallest_conclusive()
            assert k is not None
            t = float(rep.scales[k])
            pts = jet.sample_points(64)
            gmax = 0.0
            for s in pts:
                v = jet.value(float(s))
                for j in range(n):
                    gmax = max(gmax, float(np.linalg.norm(v[2 * j : 2 * j + 2])))
            bound = t * rep.area[k] + 2.0 * math.sqrt(n) * gmax * rep.whitney_planar[k]
            assert rep.whitney_height[k] <= bound + 1e-9


class TestJsonRoundTrip:
    def test_round_trip_exact(self, rng, tmp_path):
        jet, _ = restriction_jet(rng, n=2, count=3, allow_points=True)
        path = tmp_path / "jet.json"
        jets.save_jet(jet, path)
        back = jets.load_jet(path)
        assert back.n == jet.n
        assert back.set.intervals == jet.set.intervals
        for a, b in zip(back.pieces, jet.pieces):
            assert np.array_equal(a.height, b.height)
            for (fa, ga), (fb, gb) in zip(a.gamma, b.gamma):
                assert np.array_equal(fa, fb)
                assert np.array_equal(ga, gb)
            assert np.array_equal(a.height_prime, b.height_prime)

    def test_malformed_json_reports_location(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 1, "intervals": [[0, 1],]}')
        with pytest.raises(JetFormatError, match="line"):
            jets.load_jet(path)

    def test_missing_keys(self):
        with pytest.raises(JetFormatError):
            WhitneyJet.from_json_dict({"n": 1})
