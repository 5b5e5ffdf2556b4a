"""Piecewise-linear paths: length, reparametrization, multiplicity, line integrals, joins."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import segment_distances
from .graph import EmbeddedGraph, GraphPoint, merge_intervals

#: how far a path breakpoint may sit from a graph edge and still count as on it
ON_GRAPH_TOL = 1e-9
#: offsets closer than this along one edge are treated as the same point
OFFSET_MERGE_TOL = 1e-9


class PolylinePath:
    """A path [0, 1] -> R^d, linear between breakpoints ``(params[k], points[k])``."""

    def __init__(self, params, points):
        t = np.array(params, dtype=float)
        p = np.array(points, dtype=float)
        if p.ndim == 1:
            p = p[:, None]
        if t.ndim != 1 or len(t) != len(p) or len(t) < 2:
            raise ValueError("a path needs at least two breakpoints with matching parameters")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise ValueError("path parameters must start at 0 and end at 1")
        if not np.all(np.diff(t) > 0):
            raise ValueError("path parameters must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(p))):
            raise ValueError("path breakpoints must be finite")
        t.setflags(write=False)
        p.setflags(write=False)
        self.params = t
        self.points = p

    @classmethod
    def through(cls, points) -> "PolylinePath":
        """Path visiting ``points`` in order at constant speed (uniform steps if all points coincide)."""
        pts = np.asarray(points, dtype=float)
        if len(pts) == 1:
            pts = np.vstack([pts, pts])
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        total = seg.sum()
        if total > 0:
            t = np.concatenate([[0.0], np.cumsum(seg) / total])
        else:
            t = np.linspace(0.0, 1.0, len(pts))
        t[-1] = 1.0
        # repeated points at constant speed: drop the duplicates, keeping the final point itself
        keep = np.concatenate([[True], np.diff(t) > 0])
        if not keep[-1]:
            keep[np.flatnonzero(keep)[-1]] = False
            keep[-1] = True
        return cls(t[keep], pts[keep])

    @classmethod
    def constant(cls, point) -> "PolylinePath":
        p = np.asarray(point, dtype=float)
        return cls([0.0, 1.0], [p, p])

    def __repr__(self) -> str:
        return f"PolylinePath(n_breakpoints={len(self.params)}, dim={self.dim}, length={self.length():.6g})"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.stack([np.interp(t, self.params, self.points[:, k]) for k in range(self.dim)], axis=-1)
        return out

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_segments(self) -> int:
        return len(self.params) - 1

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)

    @property
    def cumulative_length(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.segment_lengths)])

    def length(self, t0: float = 0.0, t1: float = 1.0) -> float:
        return path_length(self, t0, t1)

    def is_closed(self, tol: float = 1e-12) -> bool:
        return float(np.linalg.norm(self.points[0] - self.points[-1])) <= tol

    def reversed(self) -> "PolylinePath":
        return PolylinePath((1.0 - self.params[::-1]).clip(0.0, 1.0), self.points[::-1])

    def to_dict(self) -> dict:
        return {"breakpoints": [[float(t), [float(x) for x in p]] for t, p in zip(self.params, self.points)]}

    @classmethod
    def from_dict(cls, data: dict) -> "PolylinePath":
        bps = data["breakpoints"]
        return cls([b[0] for b in bps], [b[1] for b in bps])


def path_length(path: PolylinePath, t0: float = 0.0, t1: float = 1.0) -> float:
    """Exact arc length of ``path`` restricted to [t0, t1]; partial segments are prorated."""
    if t0 > t1:
        raise ValueError(f"empty parameter interval [{t0}, {t1}]")
    if t0 < 0.0 or t1 > 1.0:
        raise ValueError("parameter interval must lie in [0, 1]")
    cum = path.cumulative_length
    return float(np.interp(t1, path.params, cum) - np.interp(t0, path.params, cum))


@dataclass(frozen=True)
class LengthMeasure:
    """The measure on [0, 1] assigning to [t0, t1] the path length over it."""

    path: PolylinePath
    cumulative: np.ndarray

    def __call__(self, t0: float, t1: float) -> float:
        if t0 > t1:
            raise ValueError(f"empty parameter interval [{t0}, {t1}]")
        return float(np.interp(t1, self.path.params, self.cumulative) - np.interp(t0, self.path.params, self.cumulative))

    @property
    def total(self) -> float:
        return float(self.cumulative[-1])


def length_measure(path: PolylinePath) -> LengthMeasure:
    return LengthMeasure(path, path.cumulative_length)


def constant_speed_reparam(path: PolylinePath) -> PolylinePath:
    """Same image and order of breakpoints, traversed at constant speed.

    Stretches where the path stands still are collapsed first (the left
    inverse of the arc-length map picks their first parameter).
    """
    seg = path.segment_lengths
    total = math.fsum(seg)
    if total <= 0.0:
        raise ValueError("cannot reparametrize a degenerate (zero-length) path")
    keep = np.concatenate([[True], seg > 0.0])
    pts = path.points[keep]
    cum = np.concatenate([[0.0], np.cumsum(seg[seg > 0.0])])
    t = cum / cum[-1]
    t[-1] = 1.0
    return PolylinePath(t, pts)


def is_simple(path: PolylinePath, tol: float = 1e-12) -> bool:
    """True if the path is injective: no point of the image is visited twice."""
    pts = path.points
    seg = path.segment_lengths
    if np.any(seg <= tol):
        return False
    n = len(seg)
    for i in range(n):
        a0, a1 = pts[i], pts[i + 1]
        # adjacent segment must not fold back over this one
        if i + 1 < n:
            u, v = a1 - a0, pts[i + 2] - a1
            cross = np.linalg.norm(np.outer(u, v) - np.outer(v, u))
            if cross <= tol * seg[i] * seg[i + 1] and float(u @ v) < 0:
                return False
        if i + 2 <= n - 1:
            js = np.arange(i + 2, n)
            d = segment_distances(
                np.tile(a0, (len(js), 1)), np.tile(a1, (len(js), 1)), pts[js], pts[js + 1]
            )
            if np.any(d <= tol):
                return False
    return True


# ---------------------------------------------------------------------------
# multiplicity on a reference graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Coverage:
    """Constant traversal counts over the offset interval [s0, s1] of one edge."""

    edge: int
    s0: float
    s1: float
    fwd: int
    bwd: int

    @property
    def multiplicity(self) -> int:
        return self.fwd + self.bwd


@dataclass(frozen=True)
class TraversalLedger:
    """Per-edge traversal counts of a path lying on a reference graph.

    ``pieces`` partitions every edge's offset range [0, 1] into intervals of
    constant (forward, backward) counts; the multiplicity of the path at a
    generic point of a piece is ``fwd + bwd``.
    """

    graph: EmbeddedGraph
    pieces: tuple[Coverage, ...]

    def edge_pieces(self, edge: int) -> list[Coverage]:
        return [c for c in self.pieces if c.edge == edge]

    def counts(self, edge: int) -> tuple[int, int]:
        """(fwd, bwd) for an edge traversed uniformly along its whole length."""
        pcs = self.edge_pieces(edge)
        if len(pcs) != 1:
            raise ValueError(f"edge {edge} is not traversed uniformly")
        return pcs[0].fwd, pcs[0].bwd

    def is_uniform(self) -> bool:
        return all(len(self.edge_pieces(k)) == 1 for k in range(self.graph.n_edges))

    def multiplicity(self, p: GraphPoint) -> int:
        """Multiplicity at a point; meaningful at generic (non-breakpoint) points."""
        for c in self.edge_pieces(p.edge):
            if c.s0 <= p.s <= c.s1:
                return c.multiplicity
        raise ValueError("point not on ledger graph")

    def is_balanced(self) -> bool:
        """Every piece traversed equally often in both directions."""
        return all(c.fwd == c.bwd for c in self.pieces)

    def is_even(self) -> bool:
        return all(c.multiplicity % 2 == 0 for c in self.pieces)

    def is_surjective(self) -> bool:
        return all(c.multiplicity > 0 for c in self.pieces)

    def weighted_length(self) -> float:
        """Integral of the multiplicity against H^1 over the graph."""
        lengths = self.graph.edge_lengths
        return math.fsum(c.multiplicity * (c.s1 - c.s0) * lengths[c.edge] for c in self.pieces)

    def covered_length(self) -> float:
        """H^1 of the image of the path."""
        lengths = self.graph.edge_lengths
        return math.fsum((c.s1 - c.s0) * lengths[c.edge] for c in self.pieces if c.multiplicity > 0)

    def covered_intervals(self) -> dict[int, list[tuple[float, float]]]:
        out: dict[int, list[tuple[float, float]]] = {}
        for c in self.pieces:
            if c.multiplicity > 0:
                out.setdefault(c.edge, []).append((c.s0, c.s1))
        return {k: merge_intervals(v) for k, v in out.items()}

    def table(self) -> list[tuple[int, float, float, int, int]]:
        return [(c.edge, c.s0, c.s1, c.fwd, c.bwd) for c in self.pieces]

    def to_dict(self) -> dict:
        rows = []
        for c in self.pieces:
            row = {"edge": c.edge, "fwd": c.fwd, "bwd": c.bwd}
            if (c.s0, c.s1) != (0.0, 1.0):
                row.update(s0=c.s0, s1=c.s1)
            rows.append(row)
        return {"edges": rows}


def _locate_segment(g: EmbeddedGraph, p: np.ndarray, q: np.ndarray) -> tuple[int, float, float] | None:
    e = np.array(g.edges)
    a, b = g.vertices[e[:, 0]], g.vertices[e[:, 1]]
    k = len(e)
    dp = segment_distances(np.tile(p, (k, 1)), np.tile(p, (k, 1)), a, b)
    dq = segment_distances(np.tile(q, (k, 1)), np.tile(q, (k, 1)), a, b)
    hits = np.where((dp <= ON_GRAPH_TOL) & (dq <= ON_GRAPH_TOL))[0]
    if not len(hits):
        return None
    edge = int(hits[0])
    ab = b[edge] - a[edge]
    den = float(ab @ ab)

    def offset(x):
        s = min(1.0, max(0.0, float((x - a[edge]) @ ab) / den))
        if s < OFFSET_MERGE_TOL:
            return 0.0
        if s > 1.0 - OFFSET_MERGE_TOL:
            return 1.0
        return s

    return edge, offset(p), offset(q)


def _cluster(values: list[float]) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if out and v - out[-1] <= OFFSET_MERGE_TOL:
            continue
        out.append(v)
    return out


def edge_multiplicity(path: PolylinePath, g: EmbeddedGraph) -> TraversalLedger:
    """Traversal ledger of a path whose every segment lies inside a single edge of ``g``.

    Raises
    ------
    ValueError
        If some path segment is not contained in an edge ("path not on graph").
    """
    g.check()
    if g.n_edges == 0:
        raise ValueError("path not on graph: reference graph has no edges")
    passes: dict[int, list[tuple[float, float, int]]] = {}
    pts = path.points
    for i in range(path.n_segments):
        p, q = pts[i], pts[i + 1]
        if np.array_equal(p, q):
            continue
        loc = _locate_segment(g, p, q)
        if loc is None:
            raise ValueError(f"path not on graph: segment {i} leaves the graph")
        edge, sp, sq = loc
        if sp == sq:
            continue
        passes.setdefault(edge, []).append((min(sp, sq), max(sp, sq), 1 if sq > sp else -1))

    pieces: list[Coverage] = []
    for k in range(g.n_edges):
        plist = passes.get(k, [])
        cuts = _cluster([0.0, 1.0] + [x for a, b, _ in plist for x in (a, b)])
        cuts[0], cuts[-1] = 0.0, 1.0
        snap = {}
        for a, b, _ in plist:
            for x in (a, b):
                snap[x] = min(cuts, key=lambda c: abs(c - x))
        merged: list[list] = []
        for lo, hi in zip(cuts, cuts[1:]):
            fwd = sum(1 for a, b, d in plist if d > 0 and snap[a] <= lo and snap[b] >= hi)
            bwd = sum(1 for a, b, d in plist if d < 0 and snap[a] <= lo and snap[b] >= hi)
            if merged and merged[-1][3] == fwd and merged[-1][4] == bwd:
                merged[-1][2] = hi
            else:
                merged.append([k, lo, hi, fwd, bwd])
        pieces.extend(Coverage(*m) for m in merged)
    return TraversalLedger(g, tuple(pieces))


def area_formula_check(path: PolylinePath, g: EmbeddedGraph) -> tuple[float, float]:
    """(path length, integral of the multiplicity over the graph); these agree for on-graph paths."""
    ledger = edge_multiplicity(path, g)
    return path_length(path), ledger.weighted_length()


# ---------------------------------------------------------------------------
# line integrals
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL_NODES = (_GL_NODES + 1.0) / 2.0
_GL_WEIGHTS = _GL_WEIGHTS / 2.0
_QUAD_RTOL = 1e-10
_MAX_PANELS = 1 << 12


@dataclass(frozen=True)
class Field:
    """A scalar field on R^d used as integrand or integrator in ``f dg``.

    ``value`` and ``gradient`` act on (k, d) arrays.  ``affine`` = (a, c)
    marks x -> a.x + c, which enables closed-form integration.  ``kinks(p, q)``
    lists parameters u in (0, 1) where the field restricted to the segment
    p + u (q - p) fails to be smooth; quadrature splits there.
    """

    value: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    gradient: Callable[[np.ndarray], np.ndarray] | None = None
    affine: tuple[np.ndarray, float] | None = None
    kinks: Callable[[np.ndarray, np.ndarray], list[float]] | None = None
    name: str = "field"

    @classmethod
    def linear(cls, a, c: float = 0.0, name: str | None = None) -> "Field":
        a = np.asarray(a, dtype=float)
        return cls(
            value=lambda x: np.asarray(x, dtype=float) @ a + c,
            lipschitz=float(np.linalg.norm(a)),
            gradient=lambda x: np.broadcast_to(a, np.shape(x)),
            affine=(a, float(c)),
            name=name or f"linear({a.tolist()}, {c})",
        )

    @classmethod
    def constant(cls, c: float, dim: int) -> "Field":
        return cls.linear(np.zeros(dim), c, name=f"const({c})")

    @classmethod
    def coordinate(cls, i: int, dim: int) -> "Field":
        return cls.linear(np.eye(dim)[i], 0.0, name=f"x{i}")

    @classmethod
    def distance(cls, center) -> "Field":
        c = np.asarray(center, dtype=float)

        def grad(x):
            diff = np.asarray(x, dtype=float) - c
            r = np.linalg.norm(diff, axis=-1, keepdims=True)
            return np.divide(diff, r, out=np.zeros_like(diff), where=r > 0)

        return cls(
            value=lambda x: np.linalg.norm(np.asarray(x, dtype=float) - c, axis=-1),
            lipschitz=1.0,
            gradient=grad,
            kinks=lambda p, q: _radius_crossings(p, q, c, 0.0),
            name=f"dist({c.tolist()})",
        )

    @classmethod
    def bump(cls, center, radius: float) -> "Field":
        """Tent function max(0, 1 - |x - center| / radius)."""
        c = np.asarray(center, dtype=float)

        def grad(x):
            diff = np.asarray(x, dtype=float) - c
            r = np.linalg.norm(diff, axis=-1, keepdims=True)
            inside = (r > 0) & (r < radius)
            return np.divide(-diff, radius * r, out=np.zeros_like(diff), where=inside)

        return cls(
            value=lambda x: np.maximum(0.0, 1.0 - np.linalg.norm(np.asarray(x, dtype=float) - c, axis=-1) / radius),
            lipschitz=1.0 / radius,
            gradient=grad,
            kinks=lambda p, q: _radius_crossings(p, q, c, 0.0) + _radius_crossings(p, q, c, radius),
            name=f"bump({c.tolist()}, {radius})",
        )

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], lipschitz: float, gradient=None, name="custom") -> "Field":
        return cls(value=fn, lipschitz=float(lipschitz), gradient=gradient, name=name)


def _radius_crossings(p, q, c, r) -> list[float]:
    """Parameters u in (0, 1) with |p + u (q - p) - c| = r (r = 0: passing through c)."""
    d = q - p
    w = p - c
    a = float(d @ d)
    if a == 0.0:
        return []
    if r == 0.0:
        u = -float(w @ d) / a
        closest = np.linalg.norm(w + u * d)
        return [u] if 0.0 < u < 1.0 and closest <= 1e-12 * math.sqrt(a) else []
    b = 2 * float(w @ d)
    cc = float(w @ w) - r * r
    disc = b * b - 4 * a * cc
    if disc <= 0.0:
        return []
    sq = math.sqrt(disc)
    return [u for u in ((-b - sq) / (2 * a), (-b + sq) / (2 * a)) if 0.0 < u < 1.0]


def _segment_integrand(f: Field, g: Field, p: np.ndarray, q: np.ndarray):
    d = q - p
    if g.gradient is not None:
        def integrand(u):
            x = p + u[:, None] * d
            return f.value(x) * (g.gradient(x) @ d)
    else:
        h = 1e-6

        def integrand(u):
            x = p + u[:, None] * d
            slope = (g.value(x + h * d) - g.value(x - h * d)) / (2 * h)
            return f.value(x) * slope
    return integrand


def _gauss(fun, a: float, b: float, scale: float) -> float:
    def composite(panels: int) -> float:
        edges = np.linspace(a, b, panels + 1)
        width = (b - a) / panels
        u = (edges[:-1, None] + width * _GL_NODES[None, :]).ravel()
        vals = fun(u)
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite field values on the path image")
        return float(np.sum(vals.reshape(panels, -1) * _GL_WEIGHTS[None, :]) * width)

    panels = 1
    prev = composite(panels)
    while panels < _MAX_PANELS:
        panels *= 2
        cur = composite(panels)
        if abs(cur - prev) <= _QUAD_RTOL * max(abs(cur), scale):
            return cur
        prev = cur
    return prev


def _segment_integral(f: Field, g: Field, p: np.ndarray, q: np.ndarray) -> float:
    d = q - p
    if f.affine is not None and g.affine is not None:
        mid = (p + q) / 2.0
        return float((f.affine[0] @ mid + f.affine[1]) * (g.affine[0] @ d))
    breaks = {0.0, 1.0}
    for fld in (f, g):
        if fld.kinks is not None:
            breaks.update(fld.kinks(p, q))
    cuts = sorted(breaks)
    integrand = _segment_integrand(f, g, p, q)
    probe = f.value(p + np.linspace(0, 1, 9)[:, None] * d)
    scale = float(np.max(np.abs(probe))) * g.lipschitz * float(np.linalg.norm(d))
    return math.fsum(_gauss(integrand, a, b, scale * (b - a)) for a, b in zip(cuts, cuts[1:]))


def line_integral(path: PolylinePath, f: Field, g: Field) -> float:
    """Integral of (f o path) d/dt (g o path) dt over [0, 1].

    Each segment contributes the integral of f dg along it, which does not
    depend on how the segment is parametrized.  Segments are evaluated in a
    canonical orientation and the sign applied afterwards, so a segment
    traversed once each way cancels exactly.
    """
    parts = []
    pts = path.points
    for i in range(path.n_segments):
        p, q = pts[i], pts[i + 1]
        if np.array_equal(p, q):
            continue
        if tuple(p) <= tuple(q):
            parts.append(_segment_integral(f, g, p, q))
        else:
            parts.append(-_segment_integral(f, g, q, p))
    total = math.fsum(parts)
    if not math.isfinite(total):
        raise ValueError("non-finite field values on the path image")
    return total


def _sup_abs(f: Field, path: PolylinePath) -> float:
    pts = path.points
    if f.affine is not None:
        return float(np.max(np.abs(f.value(pts))))
    u = np.linspace(0.0, 1.0, 17)
    samples = [pts]
    for i in range(path.n_segments):
        p, q = pts[i], pts[i + 1]
        extra = [] if f.kinks is None else f.kinks(p, q)
        uu = np.concatenate([u, extra])
        samples.append(p + uu[:, None] * (q - p))
    return float(np.max(np.abs(f.value(np.vstack(samples)))))


def default_test_family(path: PolylinePath, seed: int = 0, n_random: int = 20) -> list[tuple[Field, Field]]:
    """Coordinate pairs (f in {1, x_i}, g = x_j) plus seeded random bump/distance pairs."""
    dim = path.dim
    family = []
    for j in range(dim):
        g = Field.coordinate(j, dim)
        family.append((Field.constant(1.0, dim), g))
        family.extend((Field.coordinate(i, dim), g) for i in range(dim))
    rng = np.random.default_rng(seed)
    lo, hi = path.points.min(axis=0), path.points.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-3)
    pad = 0.25 * span
    for _ in range(n_random):
        cf = rng.uniform(lo - pad, hi + pad)
        cg = rng.uniform(lo - pad, hi + pad)
        f = Field.bump(cf, rng.uniform(0.2, 1.0) * span)
        if rng.random() < 0.5:
            g = Field.distance(cg)
        else:
            g = Field.bump(cg, rng.uniform(0.2, 1.0) * span)
        family.append((f, g))
    return family


@dataclass(frozen=True)
class DegreeZeroResult:
    passed: bool
    worst_residual: float
    worst_pair: tuple[str, str] | None

    def __bool__(self) -> bool:
        return self.passed


def degree_zero_test(
    path: PolylinePath,
    family: Sequence[tuple[Field, Field]] | None = None,
    tol: float = 1e-9,
    seed: int = 0,
) -> DegreeZeroResult:
    """Check that f dg integrates to zero along the path for every test pair.

    Residuals are normalized by Lip(g) * length(path) * sup|f| over the image.
    """
    if family is None:
        family = default_test_family(path, seed=seed)
    length = path_length(path)
    worst, worst_pair = 0.0, None
    for f, g in family:
        scale = g.lipschitz * length * _sup_abs(f, path)
        if scale == 0.0:
            continue
        res = abs(line_integral(path, f, g)) / scale
        if worst_pair is None or res > worst:
            worst, worst_pair = res, (f.name, g.name)
    return DegreeZeroResult(worst <= tol, worst, worst_pair)


# ---------------------------------------------------------------------------
# joining a closed path with a spur
# ---------------------------------------------------------------------------


def join(loop: PolylinePath, spur: PolylinePath, t0: float) -> PolylinePath:
    """Closed path running ``loop`` up to t0, then ``spur`` out and back, then the rest of ``loop``.

    On [0, t0/3] it follows loop(3t); on [t0/3, (t0+1)/3] spur(3t - t0); on
    [(t0+1)/3, (t0+2)/3] spur(t0 + 2 - 3t); on [(t0+2)/3, 1] loop(3t - 2).
    """
    if not loop.is_closed():
        raise ValueError("join needs a closed base path")
    if not 0.0 <= t0 <= 1.0:
        raise ValueError("join parameter must lie in [0, 1]")
    anchor = loop(t0)
    if float(np.linalg.norm(anchor - spur.points[0])) > 1e-12:
        raise ValueError("join point mismatch: spur does not start at loop(t0)")
    j1, j2, j3 = t0 / 3.0, (t0 + 1.0) / 3.0, (t0 + 2.0) / 3.0

    params: list[float] = []
    points: list[np.ndarray] = []

    def push(t: float, p: np.ndarray) -> None:
        if params and t <= params[-1]:
            return  # junction already present
        params.append(t)
        points.append(p)

    for t, p in zip(loop.params, loop.points):
        if t < t0:
            push(t / 3.0, p)
    push(j1, anchor)
    for s, p in zip(spur.params[1:-1], spur.points[1:-1]):
        push(j1 + s / 3.0, p)
    push(j2, spur.points[-1])
    for s, p in zip(spur.params[-2:0:-1], spur.points[-2:0:-1]):
        push(j2 + (1.0 - s) / 3.0, p)
    push(j3, anchor)
    for t, p in zip(loop.params, loop.points):
        if t > t0:
            push(min(1.0, (t + 2.0) / 3.0), p)
    if params[-1] != 1.0:
        params.append(1.0)
        points.append(loop.points[-1])
    return PolylinePath(params, points)
