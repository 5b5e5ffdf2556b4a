"""δ-chains on point samples and exact geodesics on graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial import cKDTree

from .geometry import as_points
from .graph import EmbeddedGraph, EpsilonNet, GraphPoint, component_labels, shortest_route
from .path import PolylinePath

# slack on the gap test so that exact subdivision spacings count as <= delta
_GAP_RTOL = 1e-12


@dataclass(frozen=True)
class DeltaChain:
    """A finite point sequence whose consecutive gaps are at most ``delta``."""

    points: np.ndarray
    delta: float

    def __post_init__(self):
        pts = as_points(self.points)
        if len(pts) == 0:
            raise ValueError("a delta-chain needs at least one point")
        gaps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(gaps > self.delta * (1 + _GAP_RTOL)):
            raise ValueError(f"gap {gaps.max():.6g} exceeds delta={self.delta}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def length(self) -> float:
        return chain_length(self)


def chain_length(chain: DeltaChain | np.ndarray) -> float:
    """Sum of consecutive Euclidean gaps; 0 for a single point."""
    pts = chain.points if isinstance(chain, DeltaChain) else as_points(chain)
    if len(pts) < 2:
        return 0.0
    return math.fsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))


def proximity_graph(points, delta: float) -> csr_matrix:
    """Sparse symmetric matrix of Euclidean gaps between samples at distance <= delta."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    pts = as_points(points)
    n = len(pts)
    tree = cKDTree(pts)
    pairs = tree.query_pairs(delta * (1 + _GAP_RTOL), output_type="ndarray")
    if len(pairs) == 0:
        return csr_matrix((n, n))
    w = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
    # coincident samples would vanish as explicit zeros; keep them reachable
    w = np.maximum(w, np.finfo(float).tiny)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    return csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(n, n))


def _points(net: EpsilonNet | np.ndarray) -> np.ndarray:
    return net.points if isinstance(net, EpsilonNet) else as_points(net)


def is_delta_connected(net: EpsilonNet | np.ndarray, delta: float) -> bool:
    """True iff every two samples are joined by a chain with gaps <= delta."""
    pts = _points(net)
    if len(pts) <= 1:
        if not delta > 0:
            raise ValueError("delta must be positive")
        return True
    n_comp, _ = connected_components(proximity_graph(pts, delta), directed=False)
    return n_comp == 1


def chain_distances(net: EpsilonNet | np.ndarray, delta: float, sources=None) -> np.ndarray:
    """Shortest δ-chain lengths from ``sources`` (default: all samples) to every sample."""
    pts = _points(net)
    return dijkstra(proximity_graph(pts, delta), directed=False, indices=sources)


def shortest_delta_chain(net: EpsilonNet | np.ndarray, a: int, b: int, delta: float) -> DeltaChain:
    """Minimum-length chain of net samples from sample ``a`` to sample ``b`` with gaps <= delta."""
    pts = _points(net)
    n = len(pts)
    if not (0 <= a < n and 0 <= b < n):
        raise IndexError(f"sample index out of range (net has {n} samples)")
    dist, pred = dijkstra(proximity_graph(pts, delta), directed=False, indices=a, return_predecessors=True)
    if not math.isfinite(dist[b]):
        raise ValueError(f"no δ-chain between samples {a} and {b} at delta={delta}")
    order = [b]
    while order[-1] != a:
        order.append(int(pred[order[-1]]))
    return DeltaChain(pts[order[::-1]], float(delta))


def geodesic(g: EmbeddedGraph, p: GraphPoint, q: GraphPoint) -> PolylinePath:
    """Injective constant-speed path inside ``g`` of minimal length from p to q.

    Among equal-length routes the one with the lexicographically smallest
    node sequence is returned.
    """
    g.check()
    g._check_point(p)
    g._check_point(q)
    if g.canonical(p) == g.canonical(q):
        raise ValueError("degenerate geodesic: p and q coincide")
    labels = component_labels(g)
    if labels[g.edges[p.edge][0]] != labels[g.edges[q.edge][0]]:
        raise ValueError("p and q lie in different components")
    _, legs = shortest_route(g, p, q)
    pts = [g.point(GraphPoint(legs[0].edge, legs[0].s0))]
    pts.extend(g.point(GraphPoint(leg.edge, leg.s1)) for leg in legs)
    return PolylinePath.through(pts)
