import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds, tree_from_seed
from continua import gallery
from continua.geometry import hausdorff_distance
from continua.golab import (
    SCENARIOS,
    chain_bound_check,
    comb,
    diameter_chain_bound_check,
    get_scenario,
    lemma_instances,
    localized_bound_check,
    region_boundary,
    scenario,
    semicontinuity_report,
    staircase,
)
from continua.graph import epsilon_net, h1, is_connected, components


class TestScenarios:
    def test_staircase(self):
        g = scenario("staircase", 4)
        assert h1(g) == pytest.approx(2.0, abs=1e-15)
        diag = epsilon_net(get_scenario("staircase").limit, 0.005).points
        d = hausdorff_distance(epsilon_net(g, 0.005).points, diag)
        assert abs(d - math.sqrt(2) / 8) <= 2 * 0.005

    def test_comb(self):
        assert h1(scenario("comb", 16)) == pytest.approx(5.0, abs=1e-12)

    def test_dust(self):
        assert h1(scenario("dust", 10)) == 0.0
        assert scenario("dust", 1).vertices.tolist() == [[0.5, 0.5]]

    def test_polygon_and_twocomp(self):
        assert h1(scenario("polygon", 8)) == pytest.approx(16 * math.sin(math.pi / 8))
        g = scenario("twocomp", 4)
        assert len(components(g)) == 2
        assert h1(g) == pytest.approx(0.75)

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown scenario"):
            scenario("spiral", 3)

    def test_bad_n(self):
        with pytest.raises(ValueError):
            scenario("staircase", 0)
        with pytest.raises(ValueError):
            scenario("twocomp", 1)
        with pytest.raises(ValueError):
            scenario("polygon", 2)

    @pytest.mark.parametrize("name", sorted(SCENARIOS))
    @pytest.mark.parametrize("n", [3, 8, 33])
    def test_members_validate(self, name, n):
        g = scenario(name, n)
        bound = get_scenario(name).component_bound
        if bound is not None:
            assert len(components(g)) <= bound

    @pytest.mark.parametrize("name", ["staircase", "comb", "polygon", "twocomp"])
    def test_hausdorff_decreases(self, name):
        rep = semicontinuity_report(name, [4, 8, 16, 32, 64], 0.004)
        d = [r.d_hausdorff for r in rep.rows]
        assert all(b <= a + rep.hausdorff_error_bound for a, b in zip(d, d[1:]))
        assert d[-1] < d[0]


class TestReports:
    def test_staircase(self):
        rep = semicontinuity_report("staircase", [2, 4, 8, 16, 32], 0.01)
        assert all(r.h1 == pytest.approx(2.0, abs=1e-12) for r in rep.rows)
        assert rep.verdict == "holds"
        assert rep.gap == pytest.approx(2 - math.sqrt(2), abs=1e-9)

    def test_polygon(self):
        rep = semicontinuity_report("polygon", [8, 16, 32, 64], 0.01)
        lengths = [r.h1 for r in rep.rows]
        assert lengths == sorted(lengths)
        assert all(x < 2 * 256 * math.sin(math.pi / 256) for x in lengths)
        assert rep.verdict == "holds"

    def test_dust_violates(self):
        rep = semicontinuity_report("dust", [10, 100], 0.01)
        assert [r.h1 for r in rep.rows] == [0.0, 0.0]
        assert rep.verdict == "violated" == rep.expected_verdict
        assert rep.rows[-1].d_hausdorff < 0.02

    def test_comb_diverges(self):
        rep = semicontinuity_report("comb", [4, 16, 64, 256], 0.01)
        assert [r.h1 for r in rep.rows] == pytest.approx([3.0, 5.0, 9.0, 17.0])
        assert rep.verdict == "holds"
        assert rep.rows[-1].d_hausdorff <= 1 / 16 + rep.hausdorff_error_bound

    def test_twocomp(self):
        rep = semicontinuity_report("twocomp", [2, 4, 8, 16], 0.01)
        assert rep.verdict == "holds" == rep.expected_verdict

    def test_verdict_dict(self):
        rep = semicontinuity_report("staircase", [2, 4], 0.05)
        v = rep.verdict_dict()
        assert v["dH_error_bound"] == pytest.approx(0.1)
        assert set(v) >= {"verdict", "expected", "gap", "tolerance"}

    @pytest.mark.parametrize("n_list, eps", [([], 0.1), ([4, 2], 0.1), ([2], 0.0)])
    def test_bad_arguments(self, n_list, eps):
        with pytest.raises(ValueError):
            semicontinuity_report("staircase", n_list, eps)


class TestChainBound:
    def test_segment(self):
        res = chain_bound_check(gallery.segment(), 0.1, 0.05)
        assert res and res.ratio == pytest.approx(0.25)

    def test_tripod(self):
        assert chain_bound_check(gallery.tripod(), 0.1, 0.05).ratio == pytest.approx(2 / 12)

    def test_eps_above_delta(self):
        with pytest.raises(ValueError):
            chain_bound_check(gallery.segment(), 0.1, 0.2)

    def test_disconnected(self):
        with pytest.raises(ValueError):
            chain_bound_check(gallery.disjoint_segments(2), 0.1, 0.1)

    @given(seeds, st.sampled_from([(0.2, 0.1), (0.1, 0.1), (0.3, 0.05)]))
    def test_random_trees(self, seed, de):
        res = chain_bound_check(tree_from_seed(seed), *de)
        assert res and res.ratio <= 1.0


class TestDiameterBound:
    def test_segment(self):
        net = epsilon_net(gallery.segment(), 0.1)
        res = diameter_chain_bound_check(gallery.segment(), net.points, 0.1, 1)
        assert res and res.lhs == 1.0 and res.rhs == pytest.approx(0.9)

    def test_two_segments(self):
        k = gallery.disjoint_segments(2)
        net = epsilon_net(k, 0.1)
        one = [p for p, loc in zip(net.points, net.locations) if loc is not None and loc.edge == 0]
        res = diameter_chain_bound_check(k, one, 0.1, 2)
        assert res and res.rhs == pytest.approx(1.0 - 0.2)

    def test_not_delta_connected(self):
        with pytest.raises(ValueError, match="delta-connected"):
            diameter_chain_bound_check(gallery.segment(), [[0, 0], [1, 0]], 0.5, 1)

    def test_too_many_components(self):
        with pytest.raises(ValueError):
            diameter_chain_bound_check(gallery.disjoint_segments(3), [[0, 0]], 0.1, 2)


class TestLocalizedBound:
    TRIPOD_REGION = {0: [(0.0, 1.0)], 1: [(0.0, 0.3)], 2: [(0.0, 0.3)]}

    def test_whole_space(self):
        g = gallery.segment()
        pts = epsilon_net(g, 0.1).points
        assert region_boundary(g, None).shape == (0, 2)
        res = localized_bound_check(g, pts, None, 1e6, 0.1, 1)
        assert res and res.rhs == pytest.approx((1 - 1e-7) * 1.0 - 0.1)

    def test_tripod_leg(self):
        g = gallery.tripod()
        net = epsilon_net(g, 0.05)
        # the tripod's first leg runs from the centre to (1, 0)
        leg = [p for p, loc in zip(net.points, net.locations) if loc is not None and loc.edge == 0 and loc.s > 0.3]
        bd = region_boundary(g, self.TRIPOD_REGION)
        assert sorted(map(tuple, bd.round(12))) == [(-0.3, 0.0), (0.0, 0.3)]
        res = localized_bound_check(g, leg, self.TRIPOD_REGION, 0.3, 0.05, 1)
        assert res
        assert res.lhs == pytest.approx(1.6)
        assert res.lhs - res.rhs > 0

    def test_margin_failure(self):
        g = gallery.tripod()
        leg = epsilon_net(gallery.segment(), 0.05).points  # the first leg, including the centre
        with pytest.raises(ValueError, match="margin precondition fails"):
            localized_bound_check(g, leg, self.TRIPOD_REGION, 0.5, 0.05, 1)

    def test_not_contained(self):
        g = gallery.tripod()
        with pytest.raises(ValueError, match="not contained"):
            localized_bound_check(g, [[0, 1.0]], self.TRIPOD_REGION, 0.1, 0.05, 1)

    def test_zero_diameter(self):
        g = gallery.segment()
        res = localized_bound_check(g, [[0.5, 0.0]], {0: [(0.25, 0.75)]}, 0.25, 0.05, 1)
        assert res and res.rhs == pytest.approx(-0.05)

    def test_boundary_is_relative_to_k(self):
        # a region reaching a leaf of K has no boundary point there
        g = gallery.segment()
        assert region_boundary(g, {0: [(0.5, 1.0)]}).tolist() == [[0.5, 0.0]]


def test_seeded_suite():
    insts = lemma_instances(seed=7, count=100)
    assert sum(i.region is None for i in insts) == 10
    for inst in insts:
        assert localized_bound_check(inst.graph, inst.kprime, inst.region, inst.r, inst.delta, inst.m)
        assert diameter_chain_bound_check(inst.graph, inst.kprime, inst.delta, inst.m)


def test_generators_are_pure():
    assert np.array_equal(staircase(5).vertices, staircase(5).vertices)
    assert comb(9).edges == comb(9).edges
    assert is_connected(comb(9))
