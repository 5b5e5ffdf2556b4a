"""Named test graphs and seeded random trees/forests."""

from __future__ import annotations

import math

import numpy as np

from .geometry import segment_distances
from .graph import EmbeddedGraph


def segment(length: float = 1.0) -> EmbeddedGraph:
    return EmbeddedGraph([[0.0, 0.0], [length, 0.0]], [(0, 1)])


def tripod() -> EmbeddedGraph:
    """Center (0,0) with unit legs to (1,0), (-1,0), (0,1)."""
    return EmbeddedGraph([[0, 0], [1, 0], [-1, 0], [0, 1]], [(0, 1), (0, 2), (0, 3)])


def polygon(n: int, radius: float = 1.0) -> EmbeddedGraph:
    """Regular n-gon inscribed in the circle of given radius, as a cycle graph."""
    if n < 3:
        raise ValueError("a polygon needs at least 3 vertices")
    ang = 2 * math.pi * np.arange(n) / n
    verts = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    return EmbeddedGraph(verts, [(k, (k + 1) % n) for k in range(n)])


def polyline(points) -> EmbeddedGraph:
    pts = np.asarray(points, dtype=float)
    return EmbeddedGraph(pts, [(k, k + 1) for k in range(len(pts) - 1)])


def l_shape() -> EmbeddedGraph:
    return polyline([[0, 0], [1, 0], [1, 1]])


def v_shape(theta: float) -> EmbeddedGraph:
    """(-1,0) - (0,0) - (cos theta, sin theta)."""
    return polyline([[-1, 0], [0, 0], [math.cos(theta), math.sin(theta)]])


def square_boundary() -> EmbeddedGraph:
    return EmbeddedGraph([[0, 0], [1, 0], [1, 1], [0, 1]], [(0, 1), (1, 2), (2, 3), (3, 0)])


def theta_graph(arc_points: int = 8) -> EmbeddedGraph:
    """Two junctions (-1,0), (1,0) joined by a straight edge and two polygonized arcs."""
    verts = [[-1.0, 0.0], [1.0, 0.0]]
    edges = [(0, 1)]
    for sign in (1.0, -1.0):
        prev = 0
        for k in range(1, arc_points):
            a = math.pi * (1 - k / arc_points)
            verts.append([math.cos(a), sign * 0.6 * math.sin(a)])
            edges.append((prev, len(verts) - 1))
            prev = len(verts) - 1
        edges.append((prev, 1))
    return EmbeddedGraph(verts, edges)


def disjoint_segments(m: int, gap: float = 0.5) -> EmbeddedGraph:
    """m parallel unit segments stacked ``gap`` apart."""
    verts, edges = [], []
    for k in range(m):
        verts += [[0.0, k * gap], [1.0, k * gap]]
        edges.append((2 * k, 2 * k + 1))
    return EmbeddedGraph(verts, edges)


def _angle_ok(u: np.ndarray, dirs: list[np.ndarray], min_angle: float) -> bool:
    return all(math.acos(max(-1.0, min(1.0, float(u @ w)))) >= min_angle for w in dirs)


def random_tree(
    rng: np.random.Generator,
    n_edges: int = 8,
    *,
    length_range: tuple[float, float] = (0.5, 1.5),
    clearance: float = 0.3,
    min_angle: float = math.radians(45),
    max_degree: int = 4,
    origin=(0.0, 0.0),
    avoid: list[tuple[np.ndarray, np.ndarray]] | None = None,
) -> EmbeddedGraph:
    """Planar tree grown edge by edge from ``origin``.

    Each new edge keeps distance >= ``clearance`` from every non-incident edge
    (and from segments in ``avoid``), and makes an angle >= ``min_angle`` with
    the edges already at its attachment vertex.
    """
    verts = [np.asarray(origin, dtype=float)]
    edges: list[tuple[int, int]] = []
    dirs: list[list[np.ndarray]] = [[]]
    avoid = avoid or []
    attempts = 0
    while len(edges) < n_edges:
        attempts += 1
        if attempts > 200 * (n_edges + 1):
            raise RuntimeError("could not place a tree with the requested constraints")
        v = int(rng.integers(len(verts)))
        if len(dirs[v]) >= max_degree:
            continue
        phi = rng.uniform(0, 2 * math.pi)
        u = np.array([math.cos(phi), math.sin(phi)])
        if not _angle_ok(u, dirs[v], min_angle):
            continue
        w = verts[v] + rng.uniform(*length_range) * u
        segs_a = [verts[i] for i, j in edges if v not in (i, j)] + [a for a, _ in avoid]
        segs_b = [verts[j] for i, j in edges if v not in (i, j)] + [b for _, b in avoid]
        if segs_a:
            k = len(segs_a)
            d = segment_distances(np.tile(verts[v], (k, 1)), np.tile(w, (k, 1)), np.array(segs_a), np.array(segs_b))
            if d.min() < clearance:
                continue
        # the new far end must also keep clear of the edges at v
        near = [verts[j if i == v else i] for i, j in edges if v in (i, j)]
        if near and min(float(np.linalg.norm(w - p)) for p in near) < clearance:
            continue
        verts.append(w)
        dirs.append([-u])
        dirs[v].append(u)
        edges.append((v, len(verts) - 1))
    return EmbeddedGraph(np.array(verts), edges)


def random_forest(rng: np.random.Generator, m: int, n_edges: int = 4, spacing: float = 6.0) -> EmbeddedGraph:
    """m random trees placed side by side along the x axis."""
    verts, edges = [], []
    for c in range(m):
        t = random_tree(rng, n_edges, origin=(c * spacing, 0.0), length_range=(0.4, 1.2))
        off = len(verts)
        verts.extend(t.vertices.tolist())
        edges.extend((i + off, j + off) for i, j in t.edges)
    return EmbeddedGraph(np.array(verts), edges)


def child_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """n independent generators derived from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]
