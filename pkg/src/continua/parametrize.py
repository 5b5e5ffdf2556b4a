"""Closed constant-speed paths covering a connected graph exactly twice.

``canonical_parametrization`` builds the path by repeatedly attaching the
farthest uncovered part through an out-and-back spur; ``double_cover_euler``
is an independent construction from an Euler circuit of the doubled graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import point_segment_distance
from .graph import (
    EmbeddedGraph,
    GraphPoint,
    Leg,
    SplitNetwork,
    is_connected,
    merge_intervals,
    shortest_route,
)
from .path import PolylinePath, TraversalLedger, constant_speed_reparam, edge_multiplicity, join

#: spurs shorter than this are treated as numerical noise at a junction
MIN_SPUR = 1e-12
#: distances within this of the maximum count as tied
TIE_TOL = 1e-12


@dataclass(frozen=True)
class ParametrizationResult:
    path: PolylinePath
    ledger: TraversalLedger
    iterations: int
    spur_lengths: tuple[float, ...]
    #: farthest distance to the covered set at each attachment step
    farthest_distances: tuple[float, ...] = field(default=())

    def is_double_cover(self) -> bool:
        ledger = self.ledger
        return ledger.is_uniform() and all(
            ledger.counts(k) == (1, 1) for k in range(ledger.graph.n_edges)
        )


Covered = dict[int, list[tuple[float, float]]]


def _covered_from(covered: TraversalLedger | Covered) -> Covered:
    if isinstance(covered, TraversalLedger):
        return covered.covered_intervals()
    return {k: merge_intervals(v) for k, v in covered.items() if v}


def _add_legs(covered: Covered, legs) -> None:
    for leg in legs:
        covered.setdefault(leg.edge, []).append((min(leg.s0, leg.s1), max(leg.s0, leg.s1)))
    for k in list(covered):
        covered[k] = merge_intervals(covered[k])


@dataclass
class _Frontier:
    """Split network cut at the covered-set boundary, with distances to the covered set."""

    net: SplitNetwork
    link_covered: list[bool]
    node_covered: np.ndarray
    dist: np.ndarray
    pred: list


def _frontier(g: EmbeddedGraph, covered: Covered) -> _Frontier:
    cuts = [GraphPoint(k, s) for k, ivs in covered.items() for iv in ivs for s in iv]
    net = SplitNetwork.build(g, cuts)
    link_covered = []
    node_covered = np.zeros(net.n_nodes, dtype=bool)
    for link in net.links:
        lo, hi = min(link.s_u, link.s_v), max(link.s_u, link.s_v)
        mid = (lo + hi) / 2
        inside = any(a <= mid <= b for a, b in covered.get(link.edge, []))
        link_covered.append(inside)
        if inside:
            node_covered[link.u] = node_covered[link.v] = True
    for (k, s), node in net.cut_nodes.items():
        # isolated covered points (zero-length intervals) still count
        if any(a <= s <= b for a, b in covered.get(k, [])):
            node_covered[node] = True
    for v in range(g.n_vertices):
        for k in g.incident[v]:
            s = 0.0 if g.edges[k][0] == v else 1.0
            if any(a <= s <= b for a, b in covered.get(k, [])):
                node_covered[v] = True
    sources = {int(n): 0.0 for n in np.flatnonzero(node_covered)}
    dist, pred = net.dijkstra(sources)
    return _Frontier(net, link_covered, node_covered, dist, pred)


@dataclass(frozen=True)
class _Candidate:
    distance: float
    point: GraphPoint
    link: int | None  # interior point of this link, or None for a node
    node: int | None


def _candidates(fr: _Frontier) -> list[_Candidate]:
    net, dist = fr.net, fr.dist
    out = []
    for idx, link in enumerate(net.links):
        if fr.link_covered[idx]:
            continue
        du, dv, ell = dist[link.u], dist[link.v], link.length
        for node in (link.u, link.v):
            if not fr.node_covered[node]:
                out.append(_Candidate(float(dist[node]), net.node_point(node), None, node))
        if abs(du - dv) < ell - TIE_TOL * max(1.0, ell):
            x = (dv - du + ell) / 2.0
            s = link.s_u + (x / ell) * (link.s_v - link.s_u)
            out.append(_Candidate(float((du + dv + ell) / 2.0), GraphPoint(link.edge, float(s)), idx, None))
    return out


def _pick(cands: list[_Candidate]) -> _Candidate:
    top = max(c.distance for c in cands)
    tied = [c for c in cands if c.distance >= top - TIE_TOL * max(1.0, top)]
    return min(tied, key=lambda c: (c.point.edge, c.point.s))


def farthest_uncovered_point(g: EmbeddedGraph, covered: TraversalLedger | Covered) -> tuple[GraphPoint, float]:
    """Uncovered point of maximal intrinsic distance to the covered set.

    ``covered`` is a ledger or per-edge offset intervals.  Ties go to the
    lowest edge index, then the lowest offset.
    """
    g.check()
    cov = _covered_from(covered)
    if not any(cov.values()):
        raise ValueError("covered set is empty")
    fr = _frontier(g, cov)
    cands = _candidates(fr)
    if not cands:
        raise ValueError("nothing uncovered")
    best = _pick(cands)
    return best.point, best.distance


def _chain_to_cover(fr: _Frontier, node: int) -> list[Leg]:
    """Legs from ``node`` along the distance tree to the first covered node."""
    legs = []
    u = node
    while not fr.node_covered[u]:
        prev, li = fr.pred[u]
        link = fr.net.links[li]
        legs.append(Leg(link.edge, link.s_u, link.s_v) if link.u == u else Leg(link.edge, link.s_v, link.s_u))
        u = prev
    return legs


def _spur_legs(fr: _Frontier, cand: _Candidate) -> list[Leg]:
    """Legs of the spur from the covered set out to the chosen point (contact point first)."""
    net = fr.net
    if cand.link is None:
        out = _chain_to_cover(fr, cand.node)
    else:
        link = net.links[cand.link]
        s = cand.point.s
        if fr.node_covered[link.u] and fr.node_covered[link.v]:
            # both ends already covered: traverse the whole link, otherwise the
            # farthest point would keep halving the remaining gap
            return [Leg(link.edge, link.s_u, link.s_v)]
        # equidistant either way; leave through an uncovered end so a new vertex is reached
        end = link.u if not fr.node_covered[link.u] else link.v
        s_end = link.s_u if end == link.u else link.s_v
        out = [Leg(link.edge, s, s_end)] + _chain_to_cover(fr, end)
    return [Leg(leg.edge, leg.s1, leg.s0) for leg in reversed(out)]


def _leg_points(g: EmbeddedGraph, legs: list[Leg]) -> np.ndarray:
    pts = [g.point(GraphPoint(legs[0].edge, legs[0].s0))]
    pts.extend(g.point(GraphPoint(leg.edge, leg.s1)) for leg in legs)
    return np.array(pts)


def _first_hit(path: PolylinePath, x: np.ndarray) -> float:
    """Smallest parameter at which the path passes through x."""
    pts, t = path.points, path.params
    for i in range(path.n_segments):
        p, q = pts[i], pts[i + 1]
        if np.array_equal(p, x):
            return float(t[i])
        if point_segment_distance(x, p, q) <= 1e-12:
            d = q - p
            lam = float((x - p) @ d) / float(d @ d)
            lam = min(1.0, max(0.0, lam))
            if lam == 1.0:
                return float(t[i + 1])
            return float(t[i] + lam * (t[i + 1] - t[i]))
    if np.array_equal(pts[-1], x):
        return 1.0
    raise RuntimeError("contact point not on the current path")


def _legs_length(g: EmbeddedGraph, legs) -> float:
    return math.fsum(abs(leg.s1 - leg.s0) * g.edge_lengths[leg.edge] for leg in legs)


def _finish(g: EmbeddedGraph, path: PolylinePath, iterations: int, spurs, farthest) -> ParametrizationResult:
    path = constant_speed_reparam(path)
    ledger = edge_multiplicity(path, g)
    result = ParametrizationResult(path, ledger, iterations, tuple(spurs), tuple(farthest))
    if not result.is_double_cover():
        raise RuntimeError("construction did not produce an exact double cover (report bug)")
    return result


def _require_connected(g: EmbeddedGraph) -> None:
    g.check()
    if g.n_edges == 0:
        raise ValueError("graph has zero length")
    if not is_connected(g):
        raise ValueError("graph is disconnected")


def canonical_parametrization(g: EmbeddedGraph) -> ParametrizationResult:
    """Closed path of constant speed covering every edge once in each direction.

    The first loop runs out and back along a geodesic from vertex 0 to the
    point farthest from it.  Each later step takes the uncovered point
    farthest from the covered set, the shortest path from there back to the
    covered set, and splices that path in as an out-and-back excursion at
    its first contact with the current loop.
    """
    _require_connected(g)
    seed = g.at_vertex(0)
    covered: Covered = {}
    # distance from the seed = distance to the one-point covered set
    start_cov = {seed.edge: [(seed.s, seed.s)]}
    x0, _ = farthest_uncovered_point(g, start_cov)
    length, legs = shortest_route(g, seed, x0)
    pts = _leg_points(g, legs)
    loop = PolylinePath.through(np.vstack([pts, pts[-2::-1]]))
    _add_legs(covered, legs)
    spurs = [length]
    farthest: list[float] = []
    iterations = 1
    cap = 2 * g.n_edges + g.n_vertices
    while True:
        fr = _frontier(g, covered)
        cands = _candidates(fr)
        if not cands:
            break
        cand = _pick(cands)
        legs = _spur_legs(fr, cand)
        spur_len = _legs_length(g, legs)
        if spur_len < MIN_SPUR:
            break
        iterations += 1
        if iterations > cap:
            raise RuntimeError("non-termination (report bug): iteration cap exceeded")
        farthest.append(cand.distance)
        spurs.append(spur_len)
        spur_pts = _leg_points(g, legs)
        t0 = _first_hit(loop, spur_pts[0])
        anchor = loop(t0)
        spur_pts[0] = anchor
        loop = join(loop, PolylinePath.through(spur_pts), t0)
        _add_legs(covered, legs)
    return _finish(g, loop, iterations, spurs, farthest)


def double_cover_euler(g: EmbeddedGraph) -> ParametrizationResult:
    """Euler circuit of the graph with every edge doubled into two opposite arcs.

    Hierholzer's algorithm from the lowest vertex, always leaving along the
    unused arc towards the smallest neighbour.
    """
    _require_connected(g)
    out: list[list[tuple[int, int]]] = [[] for _ in range(g.n_vertices)]
    for k, (i, j) in enumerate(g.edges):
        out[i].append((j, k))
        out[j].append((i, k))
    for arcs in out:
        arcs.sort(reverse=True)  # pop() yields the smallest
    start = next(v for v in range(g.n_vertices) if out[v])
    stack, circuit = [start], []
    while stack:
        v = stack[-1]
        if out[v]:
            w, _ = out[v].pop()
            stack.append(w)
        else:
            circuit.append(stack.pop())
    circuit.reverse()
    path = PolylinePath.through(g.vertices[circuit])
    return _finish(g, path, 0, (), ())
