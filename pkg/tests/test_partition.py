import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds, tree_from_seed
from continua import gallery
from continua.graph import EmbeddedGraph, GraphPoint, h1
from continua.partition import (
    ORACLE_MAX_CELLS,
    DeltaPartition,
    delta_partition,
    diameter_sum,
    l_delta_bruteforce,
    l_delta_lower_bound,
    make_cells,
)


def piece_is_connected(piece) -> bool:
    """Sub-arcs as nodes, joined when they share an endpoint."""
    g = piece.graph
    arcs = piece.straight_parts()
    ends = [(g.point(GraphPoint(k, a)), g.point(GraphPoint(k, b))) for k, a, b in arcs]
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for j in range(len(arcs)):
            if j not in seen and any(np.allclose(p, q, atol=1e-12) for p in ends[i] for q in ends[j]):
                seen.add(j)
                stack.append(j)
    return len(seen) == len(arcs)


class TestDeltaPartition:
    def test_segment_quarters(self):
        p = delta_partition(gallery.segment(), 0.25)
        assert len(p) == 4
        assert all(piece.diam == pytest.approx(0.25, abs=1e-15) for piece in p.pieces)
        assert diameter_sum(p) == pytest.approx(1.0, abs=1e-15)

    def test_segment_single_piece(self):
        p = delta_partition(gallery.segment(), 2.0)
        assert len(p) == 1
        assert diameter_sum(p) == 1.0

    def test_polygon_range(self):
        g = gallery.polygon(64)
        s = diameter_sum(delta_partition(g, 0.15))
        assert 6.21 <= s <= h1(g)

    def test_tripod_single_piece(self):
        p = delta_partition(gallery.tripod(), 5.0)
        assert len(p) == 1
        assert diameter_sum(p) == pytest.approx(2.0)
        assert diameter_sum(p) <= h1(gallery.tripod())

    def test_empty_graph(self):
        p = delta_partition(EmbeddedGraph([[0, 0]]), 0.5)
        assert diameter_sum(p) == 0.0
        assert diameter_sum(DeltaPartition(gallery.segment(), 0.5, ())) == 0.0

    def test_disconnected_rejected(self):
        with pytest.raises(ValueError, match="apply per component"):
            delta_partition(gallery.disjoint_segments(2), 0.5)

    def test_nonpositive_delta(self):
        with pytest.raises(ValueError):
            delta_partition(gallery.segment(), 0.0)

    def test_deterministic(self):
        g = gallery.theta_graph()
        a, b = delta_partition(g, 0.3), delta_partition(g, 0.3)
        assert [p.intervals for p in a.pieces] == [p.intervals for p in b.pieces]

    @given(seeds, st.floats(0.05, 3.0))
    def test_invariants_on_random_trees(self, seed, delta):
        g = tree_from_seed(seed, n_edges=5)
        p = delta_partition(g, delta)
        assert p.violations() == []
        assert all(piece_is_connected(piece) for piece in p.pieces)
        assert sum(piece.h1 for piece in p.pieces) == pytest.approx(h1(g), rel=1e-12)
        assert diameter_sum(p) <= h1(g)

    @pytest.mark.parametrize("name", ["segment", "tripod", "square", "heptagon", "theta", "grid", "v_shape"])
    def test_invariants_on_gallery(self, named_graphs, name):
        g = named_graphs[name]
        for delta in (0.1, 0.37, 1.0):
            p = delta_partition(g, delta)
            assert p.violations() == []
            assert all(piece_is_connected(piece) for piece in p.pieces)

    @pytest.mark.parametrize("name", ["segment", "tripod", "square", "heptagon", "theta", "grid", "v_shape"])
    def test_diameter_sum_approaches_length(self, named_graphs, name):
        g = named_graphs[name]
        total = h1(g)
        sums = []
        for k in range(11):
            sums.append(diameter_sum(delta_partition(g, total / 2**k)))
            assert sums[-1] <= total
            if sums[-1] >= 0.99 * total:
                break
        assert sums[-1] >= 0.99 * total


class TestLowerBound:
    def test_segment_is_lossless(self):
        for delta in (0.1, 0.25, 0.5, 1.0):
            assert l_delta_lower_bound(gallery.segment(), delta) == pytest.approx(1.0, abs=1e-15)

    def test_tripod(self):
        assert 2.9 <= l_delta_lower_bound(gallery.tripod(), 0.5) <= 3.0

    def test_l_shape(self):
        assert l_delta_lower_bound(gallery.l_shape(), 0.5) == pytest.approx(2.0, abs=1e-15)

    def test_per_component(self):
        assert l_delta_lower_bound(gallery.disjoint_segments(3), 0.3) == pytest.approx(3.0)

    def test_dust(self):
        assert l_delta_lower_bound(EmbeddedGraph([[0, 0], [1, 1]]), 0.5) == 0.0

    @given(seeds, st.floats(0.05, 2.0))
    def test_sandwich(self, seed, delta):
        g = tree_from_seed(seed, n_edges=5)
        lower = l_delta_lower_bound(g, delta)
        assert diameter_sum(delta_partition(g, delta)) <= lower + 1e-12
        assert lower <= h1(g)


class TestBruteforce:
    def test_segment(self):
        assert l_delta_bruteforce(gallery.segment(), 0.5, 4) == pytest.approx(1.0)

    def test_v_shape_prefers_two_straight_pieces(self):
        g = gallery.v_shape(0.3)
        # the whole V is a single admissible piece but its diameter is below 2
        assert delta_partition(g, 2.1).pieces[0].diam < 2.0
        for r in (1, 2, 4, 8, 16, 32):
            assert l_delta_bruteforce(g, 2.1, r) == pytest.approx(2.0)

    def test_dust(self):
        assert l_delta_bruteforce(EmbeddedGraph([[0, 0], [1, 1]]), 0.5, 4) == 0.0

    def test_too_large(self):
        with pytest.raises(ValueError, match="oracle limited to desk scale"):
            l_delta_bruteforce(gallery.tripod(), 0.5, ORACLE_MAX_CELLS)

    def test_cells_longer_than_delta_are_unusable(self):
        assert l_delta_bruteforce(gallery.segment(), 0.4, 2) == 0.0

    def test_packing_beats_single_piece(self):
        # a bent piece would waste length, separate straight pieces do not
        g = gallery.l_shape()
        assert l_delta_bruteforce(g, 1.5, 1) == pytest.approx(2.0)

    def test_exhaustive_on_tiny_instance(self):
        # segment with 3 cells of 1/3 and delta 2/3: every grouping sums to 1
        assert l_delta_bruteforce(gallery.segment(), 2 / 3, 3) == pytest.approx(1.0)

    def test_bent_only_option(self):
        # V of two unit legs at 60 degrees, delta below 1: only sub-cells fit
        g = gallery.v_shape(math.radians(60))
        assert l_delta_bruteforce(g, 0.9, 1) == 0.0
        assert l_delta_bruteforce(g, 0.9, 2) == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "graph, delta, resolutions",
        [
            (gallery.segment(), 0.3, [1, 2, 4, 8, 16, 32, 64]),
            (gallery.tripod(), 0.5, [1, 2, 4, 8, 16]),
            (gallery.square_boundary(), 0.6, [1, 2, 4, 8, 16]),
            (gallery.v_shape(0.3), 2.1, [1, 2, 4, 8]),
            (gallery.polyline([[0, 0], [1, 0], [1.5, 0.8], [2.5, 0.8]]), 0.7, [1, 2, 4, 8, 16]),
        ],
    )
    def test_consistency_and_monotone(self, graph, delta, resolutions):
        values = [l_delta_bruteforce(graph, delta, r) for r in resolutions]
        assert all(v <= h1(graph) + 1e-12 for v in values)
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        assert values[-1] >= l_delta_lower_bound(graph, delta) - 1e-12


def test_cell_adjacency_at_vertices():
    cells = make_cells(gallery.tripod(), [2, 2, 2])
    # first cells of the three legs all touch the centre
    assert set(cells.neighbors[0]) == {1, 2, 4}
    assert set(cells.neighbors[1]) == {0}
