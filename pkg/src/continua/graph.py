"""Continua and compacta represented as straight-segment graphs embedded in R^d.

A point of the graph is addressed as ``GraphPoint(edge, s)`` with ``s`` the
barycentric offset along the edge, so membership is exact and no snapping to
segments is ever needed.  Shortest-path queries run on a *split network*: the
graph with extra nodes inserted at selected offsets, which lets arbitrary
points act as temporary vertices.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geometry import segment_distances

#: absolute tolerance of the segment-overlap tests
OVERLAP_TOL = 1e-12
#: offsets this close to 0 or 1 denote the end vertex (avoids sub-tolerance links)
VERTEX_SNAP = 1e-12


class InvalidGraphError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid graph: " + "; ".join(self.violations))


@dataclass(frozen=True, order=True)
class GraphPoint:
    """A point on edge ``edge`` at offset ``s`` (0 = first endpoint, 1 = second)."""

    edge: int
    s: float


class EmbeddedGraph:
    """Vertices in R^d joined by straight edges.

    Construction only normalizes array shapes; call :func:`validate` (or any
    operation that needs a valid graph) to check the embedding invariants.
    """

    def __init__(self, vertices, edges: Iterable[Sequence[int]] = ()):
        verts = np.array(vertices, dtype=float)
        if verts.size == 0:
            verts = verts.reshape(0, verts.shape[-1] if verts.ndim == 2 else 2)
        if verts.ndim != 2:
            raise ValueError(f"vertices must be an (n, d) array, got shape {verts.shape}")
        verts.setflags(write=False)
        self.vertices = verts
        self.edges: tuple[tuple[int, int], ...] = tuple((int(i), int(j)) for i, j in edges)

    def __repr__(self) -> str:
        return f"EmbeddedGraph(n_vertices={self.n_vertices}, n_edges={self.n_edges}, dim={self.dim})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddedGraph):
            return NotImplemented
        return (
            self.edges == other.edges
            and self.vertices.shape == other.vertices.shape
            and bool(np.array_equal(self.vertices, other.vertices))
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        if not self.edges:
            return np.zeros(0)
        e = np.array(self.edges)
        return np.linalg.norm(self.vertices[e[:, 1]] - self.vertices[e[:, 0]], axis=1)

    @cached_property
    def violations(self) -> tuple[str, ...]:
        return tuple(_find_violations(self))

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        """Edge indices incident to each vertex, ascending."""
        inc: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for k, (i, j) in enumerate(self.edges):
            inc[i].append(k)
            inc[j].append(k)
        return tuple(tuple(x) for x in inc)

    def check(self) -> "EmbeddedGraph":
        if self.violations:
            raise InvalidGraphError(self.violations)
        return self

    def point(self, p: GraphPoint) -> np.ndarray:
        """Coordinates of a graph point."""
        self._check_point(p)
        i, j = self.edges[p.edge]
        a, b = self.vertices[i], self.vertices[j]
        if p.s == 0.0:
            return a.copy()
        if p.s == 1.0:
            return b.copy()
        return a + p.s * (b - a)

    def points(self, pts: Sequence[GraphPoint]) -> np.ndarray:
        if not pts:
            return np.zeros((0, self.dim))
        return np.array([self.point(p) for p in pts])

    def vertex_of(self, p: GraphPoint) -> int | None:
        """Vertex index if ``p`` sits on a vertex (up to ``VERTEX_SNAP``), else None."""
        if p.s <= VERTEX_SNAP:
            return self.edges[p.edge][0]
        if p.s >= 1.0 - VERTEX_SNAP:
            return self.edges[p.edge][1]
        return None

    def at_vertex(self, v: int) -> GraphPoint:
        """Canonical GraphPoint of vertex ``v`` (on its lowest incident edge)."""
        if not self.incident[v]:
            raise ValueError(f"vertex {v} is isolated and has no GraphPoint")
        k = self.incident[v][0]
        return GraphPoint(k, 0.0 if self.edges[k][0] == v else 1.0)

    def canonical(self, p: GraphPoint) -> GraphPoint:
        v = self.vertex_of(p)
        return p if v is None else self.at_vertex(v)

    def _check_point(self, p: GraphPoint) -> None:
        if not 0 <= p.edge < self.n_edges:
            raise ValueError(f"invalid GraphPoint: edge {p.edge} out of range")
        if not 0.0 <= p.s <= 1.0:
            raise ValueError(f"invalid GraphPoint: offset {p.s} outside [0, 1]")


def _find_violations(g: EmbeddedGraph) -> list[str]:
    out: list[str] = []
    n, verts = g.n_vertices, g.vertices
    if g.dim < 1:
        out.append("vertex dimension must be at least 1")
    bad = np.where(~np.all(np.isfinite(verts), axis=1))[0] if n else []
    out.extend(f"vertex {i}: non-finite coordinates" for i in bad)
    if len(bad):
        return out

    ok_edges: list[int] = []
    seen: dict[tuple[int, int], int] = {}
    for k, (i, j) in enumerate(g.edges):
        if not (0 <= i < n and 0 <= j < n):
            out.append(f"edge {k}: vertex index out of range")
        elif i == j:
            out.append(f"edge {k}: endpoints are the same vertex")
        elif (min(i, j), max(i, j)) in seen:
            out.append(f"edge {k}: duplicate of edge {seen[(min(i, j), max(i, j))]}")
        elif g.edge_lengths[k] <= OVERLAP_TOL:
            out.append(f"edge {k}: zero length")
        else:
            seen[(min(i, j), max(i, j))] = k
            ok_edges.append(k)

    if n >= 2:
        close = sorted(cKDTree(verts).query_pairs(OVERLAP_TOL))
        out.extend(f"vertices {i} and {j} coincide" for i, j in close)

    if not ok_edges:
        return out
    e = np.array([g.edges[k] for k in ok_edges])
    a, b = verts[e[:, 0]], verts[e[:, 1]]

    # vertices lying on a non-incident edge
    vi, ek = np.meshgrid(np.arange(n), np.arange(len(ok_edges)), indexing="ij")
    vi, ek = vi.ravel(), ek.ravel()
    keep = (e[ek, 0] != vi) & (e[ek, 1] != vi)
    vi, ek = vi[keep], ek[keep]
    if len(vi):
        d = segment_distances(verts[vi], verts[vi], a[ek], b[ek])
        for v, k in zip(vi[d <= OVERLAP_TOL], ek[d <= OVERLAP_TOL]):
            out.append(f"vertex {v} lies on edge {ok_edges[k]}")

    # pairwise segment tests
    jj, kk = np.triu_indices(len(ok_edges), k=1)
    if len(jj):
        shared = (
            (e[jj, 0][:, None] == e[kk][:, [0, 1]]).any(axis=1).astype(int)
            + (e[jj, 1][:, None] == e[kk][:, [0, 1]]).any(axis=1).astype(int)
        )
        disjoint = shared == 0
        d = segment_distances(a[jj[disjoint]], b[jj[disjoint]], a[kk[disjoint]], b[kk[disjoint]])
        for j, k in zip(jj[disjoint][d <= OVERLAP_TOL], kk[disjoint][d <= OVERLAP_TOL]):
            out.append(f"edges {ok_edges[j]} and {ok_edges[k]}: interior intersection")
        one = np.where(shared == 1)[0]
        for idx in one:
            j, k = jj[idx], kk[idx]
            common = set(e[j]) & set(e[k])
            (c,) = common
            other_j = e[j][0] if e[j][1] == c else e[j][1]
            other_k = e[k][0] if e[k][1] == c else e[k][1]
            # two segments from a common vertex overlap iff one far end lies on the other
            dj = segment_distances(verts[other_j], verts[other_j], verts[c], verts[other_k])[0]
            dk = segment_distances(verts[other_k], verts[other_k], verts[c], verts[other_j])[0]
            if min(dj, dk) <= OVERLAP_TOL:
                out.append(f"edges {ok_edges[j]} and {ok_edges[k]}: overlap beyond shared vertex")
    return out


def validate(g: EmbeddedGraph) -> list[str]:
    """List of invariant violations; empty when the graph is a valid embedding."""
    return list(g.violations)


def h1(g: EmbeddedGraph) -> float:
    """One-dimensional Hausdorff measure of the union of the edges.

    Exact for a valid graph: the segments meet only at shared vertices, so
    the measure is additive over edges.
    """
    g.check()
    return math.fsum(g.edge_lengths)


def component_labels(g: EmbeddedGraph) -> np.ndarray:
    """Label per vertex; labels are numbered by the lowest vertex in each component."""
    parent = list(range(g.n_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in g.edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = [find(v) for v in range(g.n_vertices)]
    relabel: dict[int, int] = {}
    return np.array([relabel.setdefault(r, len(relabel)) for r in roots], dtype=int)


def is_connected(g: EmbeddedGraph) -> bool:
    return g.n_vertices > 0 and int(component_labels(g).max()) == 0


def components(g: EmbeddedGraph) -> list[EmbeddedGraph]:
    """Connected components as separate graphs, ordered by their lowest vertex."""
    g.check()
    return [sub for sub, _ in _component_parts(g)]


def _component_parts(g: EmbeddedGraph) -> list[tuple[EmbeddedGraph, np.ndarray]]:
    """Components together with the original indices of their vertices."""
    labels = component_labels(g)
    parts = []
    for c in range(int(labels.max()) + 1 if len(labels) else 0):
        idx = np.where(labels == c)[0]
        remap = {int(v): k for k, v in enumerate(idx)}
        edges = [(remap[i], remap[j]) for i, j in g.edges if labels[i] == c]
        parts.append((EmbeddedGraph(g.vertices[idx], edges), idx))
    return parts


# ---------------------------------------------------------------------------
# split networks and shortest paths
# ---------------------------------------------------------------------------


@dataclass
class Link:
    """Sub-interval of ``edge`` between offsets ``s_u`` (at node u) and ``s_v`` (at node v)."""

    u: int
    v: int
    length: float
    edge: int
    s_u: float
    s_v: float


@dataclass
class SplitNetwork:
    """The graph with extra nodes inserted at interior offsets of its edges.

    Nodes ``0..n_vertices-1`` are the graph vertices; inserted nodes follow in
    order of (edge, offset).
    """

    graph: EmbeddedGraph
    links: list[Link] = field(default_factory=list)
    adjacency: list[list[int]] = field(default_factory=list)
    cut_nodes: dict[tuple[int, float], int] = field(default_factory=dict)

    @classmethod
    def build(cls, g: EmbeddedGraph, cuts: Iterable[GraphPoint] = ()) -> "SplitNetwork":
        per_edge: dict[int, set[float]] = {}
        for p in cuts:
            g._check_point(p)
            if g.vertex_of(p) is None:
                per_edge.setdefault(p.edge, set()).add(p.s)
        net = cls(g)
        n_nodes = g.n_vertices
        lengths = g.edge_lengths
        for k, (i, j) in enumerate(g.edges):
            offsets = sorted(per_edge.get(k, ()))
            chain = [(i, 0.0)]
            for s in offsets:
                net.cut_nodes[(k, s)] = n_nodes
                chain.append((n_nodes, s))
                n_nodes += 1
            chain.append((j, 1.0))
            for (u, su), (v, sv) in zip(chain, chain[1:]):
                net.links.append(Link(u, v, (sv - su) * lengths[k], k, su, sv))
        net.adjacency = [[] for _ in range(n_nodes)]
        for idx, link in enumerate(net.links):
            net.adjacency[link.u].append(idx)
            net.adjacency[link.v].append(idx)
        return net

    @property
    def n_nodes(self) -> int:
        return len(self.adjacency)

    def node(self, p: GraphPoint) -> int:
        v = self.graph.vertex_of(p)
        if v is not None:
            return v
        return self.cut_nodes[(p.edge, p.s)]

    def node_point(self, node: int) -> GraphPoint:
        if node < self.graph.n_vertices:
            return self.graph.at_vertex(node)
        for (k, s), idx in self.cut_nodes.items():
            if idx == node:
                return GraphPoint(k, s)
        raise KeyError(node)

    def other(self, link_idx: int, node: int) -> int:
        link = self.links[link_idx]
        return link.v if link.u == node else link.u

    def dijkstra(
        self,
        sources: dict[int, float],
        usable=None,
        absorbing: set[int] | frozenset[int] = frozenset(),
    ) -> tuple[np.ndarray, list[tuple[int, int] | None]]:
        """Multi-source shortest distances.

        ``usable(link_idx)`` filters links; nodes in ``absorbing`` are reached
        but never expanded.  Returns distances and, per node, the
        ``(previous node, link index)`` on one shortest path.
        """
        dist = np.full(self.n_nodes, np.inf)
        pred: list[tuple[int, int] | None] = [None] * self.n_nodes
        heap = []
        for node, d0 in sorted(sources.items()):
            if d0 < dist[node]:
                dist[node] = d0
                heap.append((d0, node))
        heapq.heapify(heap)
        done = np.zeros(self.n_nodes, dtype=bool)
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            if u in absorbing and u not in sources:
                continue
            for li in self.adjacency[u]:
                if usable is not None and not usable(li):
                    continue
                v = self.other(li, u)
                nd = d + self.links[li].length
                if nd < dist[v]:
                    dist[v] = nd
                    pred[v] = (u, li)
                    heapq.heappush(heap, (nd, v))
        return dist, pred


@dataclass(frozen=True)
class Leg:
    """Traversal of edge ``edge`` from offset ``s0`` to offset ``s1``."""

    edge: int
    s0: float
    s1: float


def _node_path(net: SplitNetwork, a: int, b: int) -> tuple[float, list[int], list[int]]:
    """Shortest node path a -> b, lexicographically smallest among ties."""
    da, pred = net.dijkstra({a: 0.0})
    total = float(da[b])
    if not math.isfinite(total):
        return math.inf, [], []
    db, _ = net.dijkstra({b: 0.0})
    tol = 1e-9 * max(1.0, total)
    nodes, links = [a], []
    seen = {a}
    u = a
    while u != b:
        best = None
        for li in net.adjacency[u]:
            v = net.other(li, u)
            if v in seen:  # links shorter than tol would otherwise allow stepping back
                continue
            w = net.links[li].length
            if abs(da[u] + w - da[v]) > tol or abs(da[v] + db[v] - total) > tol:
                continue
            if best is None or v < best[0]:
                best = (v, li)
        if best is None:
            return total, *_pred_path(pred, a, b)
        u = best[0]
        seen.add(u)
        nodes.append(u)
        links.append(best[1])
    return total, nodes, links


def _pred_path(pred, a: int, b: int) -> tuple[list[int], list[int]]:
    nodes, links = [b], []
    while nodes[-1] != a:
        u, li = pred[nodes[-1]]
        nodes.append(u)
        links.append(li)
    return nodes[::-1], links[::-1]


def _legs_from_links(net: SplitNetwork, nodes: list[int], links: list[int]) -> list[Leg]:
    legs = []
    for u, li in zip(nodes, links):
        link = net.links[li]
        if link.u == u:
            legs.append(Leg(link.edge, link.s_u, link.s_v))
        else:
            legs.append(Leg(link.edge, link.s_v, link.s_u))
    return legs


def shortest_route(g: EmbeddedGraph, p: GraphPoint, q: GraphPoint) -> tuple[float, list[Leg]]:
    """Length and edge legs of a shortest path from ``p`` to ``q`` through the graph.

    Ties between equal-length routes are broken lexicographically on the
    sequence of visited node indices.  Returns ``(inf, [])`` across components.
    """
    g.check()
    net = SplitNetwork.build(g, [p, q])
    a, b = net.node(p), net.node(q)
    if a == b:
        return 0.0, []
    total, nodes, links = _node_path(net, a, b)
    return total, _legs_from_links(net, nodes, links)


def intrinsic_distance(g: EmbeddedGraph, p: GraphPoint, q: GraphPoint) -> float:
    """Length of the shortest path inside the graph; ``inf`` across components."""
    g.check()
    net = SplitNetwork.build(g, [p, q])
    dist, _ = net.dijkstra({net.node(p): 0.0})
    return float(dist[net.node(q)])


# ---------------------------------------------------------------------------
# epsilon nets, balls, interval sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonNet:
    """Samples of a graph with consecutive spacing at most ``spacing`` along every edge.

    ``points`` holds the coordinates; ``locations[k]`` is the GraphPoint of
    sample ``k`` (None for isolated vertices).  The first ``graph.n_vertices``
    samples are the vertices, in index order.
    """

    graph: EmbeddedGraph
    spacing: float
    points: np.ndarray
    locations: tuple[GraphPoint | None, ...]

    def __len__(self) -> int:
        return len(self.points)

    def subset(self, indices: Sequence[int]) -> np.ndarray:
        return self.points[np.asarray(indices, dtype=int)]


def epsilon_net(g: EmbeddedGraph, eps: float) -> EpsilonNet:
    """Vertices plus equal subdivisions of every edge into ceil(L / eps) pieces."""
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    g.check()
    locs: list[GraphPoint | None] = [
        g.at_vertex(v) if g.incident[v] else None for v in range(g.n_vertices)
    ]
    pts = [g.vertices[v] for v in range(g.n_vertices)]
    for k, (i, j) in enumerate(g.edges):
        pieces = math.ceil(g.edge_lengths[k] / eps)
        a, b = g.vertices[i], g.vertices[j]
        for m in range(1, pieces):
            s = m / pieces
            locs.append(GraphPoint(k, s))
            pts.append(a + s * (b - a))
    points = np.array(pts) if pts else np.zeros((0, g.dim))
    points.setflags(write=False)
    return EpsilonNet(g, float(eps), points, tuple(locs))


def merge_intervals(intervals: Iterable[tuple[float, float]], gap: float = 0.0) -> list[tuple[float, float]]:
    """Union of closed intervals as a sorted disjoint list; gaps <= ``gap`` are closed."""
    out: list[list[float]] = []
    for a, b in sorted((min(a, b), max(a, b)) for a, b in intervals):
        if out and a <= out[-1][1] + gap:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def interval_set_length(g: EmbeddedGraph, intervals: dict[int, list[tuple[float, float]]]) -> float:
    """H^1 of a union of sub-arcs given as per-edge offset intervals."""
    return math.fsum(
        (b - a) * g.edge_lengths[k] for k, ivs in intervals.items() for a, b in merge_intervals(ivs)
    )


def intrinsic_ball(g: EmbeddedGraph, center: GraphPoint, radius: float) -> dict[int, list[tuple[float, float]]]:
    """Closed intrinsic ball as per-edge offset intervals (zero-length pieces dropped)."""
    g.check()
    net = SplitNetwork.build(g, [center])
    dist, _ = net.dijkstra({net.node(center): 0.0})
    raw: dict[int, list[tuple[float, float]]] = {}
    for link in net.links:
        du, dv, ell = dist[link.u], dist[link.v], link.length
        pieces = []
        if radius >= du:
            pieces.append((0.0, min(ell, radius - du)))
        if radius >= dv:
            pieces.append((max(0.0, ell - (radius - dv)), ell))
        for x0, x1 in pieces:
            if x1 <= x0:
                continue
            s0 = link.s_u + (x0 / ell) * (link.s_v - link.s_u)
            s1 = link.s_u + (x1 / ell) * (link.s_v - link.s_u)
            raw.setdefault(link.edge, []).append((float(s0), float(s1)))
    return {k: merge_intervals(v) for k, v in sorted(raw.items())}
