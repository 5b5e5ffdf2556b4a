"""δ-partitions of embedded graphs and lower bounds for L_δ.

Everything works on a subdivision of the edges into equal *cells*.  A piece
is a connected union of cells, so its diameter is attained at cell
endpoints and can be computed exactly from finitely many points.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import EmbeddedGraph, components, h1, is_connected, merge_intervals

#: slack on the diameter test so that pieces of diameter exactly δ qualify
DIAM_TOL = 1e-12
#: largest cell count the exhaustive oracle accepts
ORACLE_MAX_CELLS = 64


@dataclass(frozen=True)
class Cells:
    """Equal subdivision of every edge; cell ``c`` is ``(edge[c], index[c])``."""

    graph: EmbeddedGraph
    counts: np.ndarray  # cells per edge
    edge: np.ndarray
    index: np.ndarray
    start: np.ndarray  # coordinates of the low-offset endpoint
    stop: np.ndarray
    length: np.ndarray
    neighbors: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.edge)

    def interval(self, c: int) -> tuple[float, float]:
        m = self.counts[self.edge[c]]
        i = self.index[c]
        return i / m, 1.0 if i + 1 == m else (i + 1) / m


def make_cells(g: EmbeddedGraph, counts) -> Cells:
    """Cells with ``counts[k]`` equal pieces on edge k, plus their adjacency.

    Cells along one edge are adjacent in sequence; all cells touching a
    common vertex are mutually adjacent.
    """
    counts = np.asarray(counts, dtype=int)
    first = np.concatenate([[0], np.cumsum(counts)])
    edge = np.repeat(np.arange(g.n_edges), counts)
    index = np.arange(len(edge)) - first[edge]
    if g.n_edges:
        e = np.array(g.edges)
        a, b = g.vertices[e[edge, 0]], g.vertices[e[edge, 1]]
        m = counts[edge][:, None]
        start = a + (index[:, None] / m) * (b - a)
        stop = np.where(index[:, None] + 1 == m, b, a + ((index[:, None] + 1) / m) * (b - a))
        length = g.edge_lengths[edge] / counts[edge]
    else:
        start = stop = np.zeros((0, g.dim))
        length = np.zeros(0)
    nbrs: list[set[int]] = [set() for _ in range(len(edge))]
    at_vertex: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for k, (i, j) in enumerate(g.edges):
        lo, hi = first[k], first[k + 1] - 1
        for c in range(lo, hi):
            nbrs[c].add(c + 1)
            nbrs[c + 1].add(c)
        at_vertex[i].append(lo)
        at_vertex[j].append(hi)
    for cells in at_vertex:
        for c in cells:
            nbrs[c].update(x for x in cells if x != c)
    return Cells(g, counts, edge, index, start, stop, length, tuple(tuple(sorted(int(x) for x in s)) for s in nbrs))


def _cells_for_delta(g: EmbeddedGraph, delta: float) -> Cells:
    # every cell at most delta/8 long
    counts = [max(1, math.ceil(8.0 * L / delta)) for L in g.edge_lengths]
    return make_cells(g, counts)


def _max_dist(p: np.ndarray, pts: np.ndarray) -> float:
    if len(pts) == 0:
        return 0.0
    return float(np.sqrt(np.max(np.sum((pts - p) ** 2, axis=1))))


@dataclass(frozen=True)
class PartitionPiece:
    """A connected union of sub-arcs of a graph.

    ``intervals`` maps edge index to disjoint sorted offset intervals.
    """

    graph: EmbeddedGraph
    intervals: dict[int, list[tuple[float, float]]]
    diam: float
    h1: float

    def straight_parts(self) -> list[tuple[int, float, float]]:
        """The maximal sub-arcs of the piece lying inside single edges."""
        return [(k, a, b) for k, ivs in sorted(self.intervals.items()) for a, b in ivs]


@dataclass(frozen=True)
class DeltaPartition:
    graph: EmbeddedGraph
    delta: float
    pieces: tuple[PartitionPiece, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.pieces)

    def violations(self) -> list[str]:
        """Invariant failures: oversized pieces, overlaps of positive length, or uncovered length."""
        out = []
        for n, piece in enumerate(self.pieces):
            if piece.diam > self.delta + DIAM_TOL:
                out.append(f"piece {n} has diameter {piece.diam} > delta")
        per_edge: dict[int, list[tuple[float, float]]] = {}
        for piece in self.pieces:
            for k, ivs in piece.intervals.items():
                per_edge.setdefault(k, []).extend(ivs)
        for k in range(self.graph.n_edges):
            ivs = sorted(per_edge.get(k, []))
            overlap = sum(max(0.0, ivs[n][1] - ivs[n + 1][0]) for n in range(len(ivs) - 1))
            if overlap > 1e-12:
                out.append(f"edge {k}: pieces overlap on length {overlap * self.graph.edge_lengths[k]}")
            covered = sum(b - a for a, b in merge_intervals(ivs))
            if covered < 1.0 - 1e-12:
                out.append(f"edge {k}: only {covered:.12g} of the edge covered")
        return out


def _grow_pieces(cells: Cells, delta: float) -> list[list[int]]:
    """Greedy region growing in (edge, offset) order; returns cell lists per piece."""
    owner = np.full(cells.n, -1)
    pieces: list[list[int]] = []
    limit = delta + DIAM_TOL
    for seed in range(cells.n):
        if owner[seed] >= 0:
            continue
        pid = len(pieces)
        members = [seed]
        owner[seed] = pid
        pts = np.vstack([cells.start[seed], cells.stop[seed]])
        diam = float(cells.length[seed])
        rejected: set[int] = set()
        queue = deque([seed])
        while queue:
            c = queue.popleft()
            for nb in cells.neighbors[c]:
                if owner[nb] >= 0 or nb in rejected:
                    continue
                new = np.vstack([cells.start[nb], cells.stop[nb]])
                cand = max(diam, float(cells.length[nb]), _max_dist(new[0], pts), _max_dist(new[1], pts))
                if cand > limit:
                    rejected.add(nb)
                    continue
                diam = cand
                pts = np.vstack([pts, new])
                owner[nb] = pid
                members.append(nb)
                queue.append(nb)
        pieces.append(members)
    return pieces


def _piece(cells: Cells, members: list[int]) -> PartitionPiece:
    per_edge: dict[int, list[tuple[float, float]]] = {}
    for c in members:
        per_edge.setdefault(int(cells.edge[c]), []).append(cells.interval(c))
    intervals = {k: merge_intervals(v) for k, v in sorted(per_edge.items())}
    pts = np.vstack([cells.start[members], cells.stop[members]])
    diff = pts[:, None, :] - pts[None, :, :]
    diam = float(np.sqrt(np.max(np.sum(diff * diff, axis=-1))))
    length = math.fsum(cells.length[members])
    return PartitionPiece(cells.graph, intervals, diam, length)


def delta_partition(g: EmbeddedGraph, delta: float) -> DeltaPartition:
    """Exact-cover partition of a connected graph into connected pieces of diameter <= delta.

    Cells of length <= delta/8 are grouped greedily: each piece starts at the
    first unassigned cell (lowest edge, then lowest offset) and grows
    breadth-first, accepting a neighbouring cell only if the diameter stays
    within delta.  A graph without edges yields an empty partition.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    g.check()
    if g.n_edges == 0:
        return DeltaPartition(g, float(delta), ())
    if not is_connected(g):
        raise ValueError("graph is disconnected: apply per component")
    cells = _cells_for_delta(g, delta)
    return DeltaPartition(g, float(delta), tuple(_piece(cells, m) for m in _grow_pieces(cells, delta)))


def diameter_sum(partition: DeltaPartition) -> float:
    """Sum of piece diameters; never exceeds the total length of the graph."""
    total = math.fsum(p.diam for p in partition.pieces)
    bound = h1(partition.graph)
    assert total <= bound * (1 + 1e-12) + 1e-15, f"diameter sum {total} exceeds H1 {bound}"
    return total


def _refined_sum(partition: DeltaPartition) -> float:
    # a piece may be swapped for its straight sub-arcs, whose diameters add up to its length
    g = partition.graph
    total = []
    for piece in partition.pieces:
        straight = math.fsum((b - a) * g.edge_lengths[k] for k, a, b in piece.straight_parts())
        total.append(max(piece.diam, straight))
    return math.fsum(total)


def l_delta_lower_bound(g: EmbeddedGraph, delta: float) -> float:
    """Certified lower bound for L_δ(G), applied component by component.

    Per component, the larger of the greedy diameter sum and the sum after
    splitting every piece into its straight sub-arcs.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    g.check()
    parts = []
    for comp in components(g):
        if comp.n_edges == 0:
            continue
        p = delta_partition(comp, delta)
        parts.append(min(max(diameter_sum(p), _refined_sum(p)), h1(comp)))
    return math.fsum(parts)


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------


def _connected_subsets(cells: Cells, delta: float) -> list[list[tuple[int, float]]]:
    """For each cell c, every connected cell set with minimum c and diameter <= delta, as (bitmask, diam)."""
    limit = delta + DIAM_TOL
    ends = [np.vstack([cells.start[c], cells.stop[c]]) for c in range(cells.n)]
    by_min: list[list[tuple[int, float]]] = [[] for _ in range(cells.n)]
    for root in range(cells.n):
        if cells.length[root] > limit:
            continue
        seen: set[int] = set()
        # extension-based enumeration: each connected set is produced once
        stack = [(1 << root, np.asarray(ends[root]), float(cells.length[root]),
                  frozenset(n for n in cells.neighbors[root] if n > root))]
        while stack:
            mask, pts, diam, frontier = stack.pop()
            if mask in seen:
                continue
            seen.add(mask)
            by_min[root].append((mask, diam))
            for nb in sorted(frontier):
                if mask >> nb & 1:
                    continue
                new = ends[nb]
                cand = max(diam, float(cells.length[nb]), _max_dist(new[0], pts), _max_dist(new[1], pts))
                if cand > limit:
                    continue
                nxt = mask | (1 << nb)
                if nxt in seen:
                    continue
                grow = (frontier | {n for n in cells.neighbors[nb] if n > root}) - {nb}
                stack.append((nxt, np.vstack([pts, new]), cand, frozenset(grow)))
    return by_min


def l_delta_bruteforce(g: EmbeddedGraph, delta: float, resolution: int) -> float:
    """Exact maximum of the diameter sum over disjoint connected cell unions of diameter <= delta.

    Each edge is cut into ``resolution`` equal cells; at most 64 cells in total.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    g.check()
    n_cells = resolution * g.n_edges
    if n_cells > ORACLE_MAX_CELLS:
        raise ValueError(f"oracle limited to desk scale: {n_cells} cells > {ORACLE_MAX_CELLS}")
    if n_cells == 0:
        return 0.0
    cells = make_cells(g, [resolution] * g.n_edges)
    options = _connected_subsets(cells, delta)
    lengths = cells.length
    for root in range(cells.n):
        # least wasteful pieces first: weight close to length
        options[root].sort(key=lambda md: (sum(lengths[i] for i in range(cells.n) if md[0] >> i & 1) - md[1], md[0]))
    usable = np.array([len(options[c]) > 0 for c in range(cells.n)])
    # optimistic bound: a piece never weighs more than its length
    best = [0.0]

    def remaining(i: int, used: int) -> float:
        return sum(lengths[c] for c in range(i, cells.n) if usable[c] and not used >> c & 1)

    def search(i: int, used: int, value: float) -> None:
        while i < cells.n and used >> i & 1:
            i += 1
        if i == cells.n:
            best[0] = max(best[0], value)
            return
        if value + remaining(i, used) <= best[0] + 1e-15:
            return
        for mask, d in options[i]:
            if mask & used:
                continue
            search(i + 1, used | mask, value + d)
        search(i + 1, used | (1 << i), value)

    search(0, 0, 0.0)
    return float(best[0])
