"""Converging sequences of compacta and numerical checks of the length lower bounds.

Scenarios are sequences K_n -> K in the Hausdorff distance.  The report
compares H^1(K_n) on the tail of the sequence against H^1(K); the bound
checkers evaluate the chain-length and diameter inequalities on concrete
graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import gallery
from .chain import chain_distances, is_delta_connected
from .geometry import as_points, diam, hausdorff_distance, point_segment_distance, set_distance
from .graph import (
    EmbeddedGraph,
    GraphPoint,
    component_labels,
    epsilon_net,
    h1,
    interval_set_length,
    intrinsic_ball,
    is_connected,
    merge_intervals,
)

LIMIT_POLYGON = 256
#: tolerance slack, in units of the largest Hausdorff distance on the tail
TOLERANCE_SLACK = 4.0


def staircase(n: int) -> EmbeddedGraph:
    """n-step staircase from (0,0) to (1,1): right 1/n, then up 1/n, repeated."""
    pts = [[0.0, 0.0]]
    for k in range(n):
        pts.append([(k + 1) / n, k / n])
        pts.append([(k + 1) / n, (k + 1) / n])
    return gallery.polyline(pts)


def comb(n: int) -> EmbeddedGraph:
    """Unit base with n teeth of height 1/sqrt(n) at x = (k - 1/2)/n."""
    height = 1.0 / math.sqrt(n)
    xs = [(k - 0.5) / n for k in range(1, n + 1)]
    base = [[0.0, 0.0]] + [[x, 0.0] for x in xs] + [[1.0, 0.0]]
    verts = base + [[x, height] for x in xs]
    edges = [(k, k + 1) for k in range(len(base) - 1)]
    edges += [(k + 1, len(base) + k) for k in range(n)]
    return EmbeddedGraph(verts, edges)


def dust(n: int) -> EmbeddedGraph:
    """n isolated points evenly spread on the diagonal of the unit square."""
    if n == 1:
        return EmbeddedGraph([[0.5, 0.5]])
    t = np.arange(n) / (n - 1)
    return EmbeddedGraph(np.column_stack([t, t]))


def twocomp(n: int) -> EmbeddedGraph:
    """Two collinear segments covering [0, 1] except a gap of width 1/n around 1/2."""
    if n < 2:
        raise ValueError("twocomp needs n >= 2")
    h = 0.5 / n
    return EmbeddedGraph([[0.0, 0.0], [0.5 - h, 0.0], [0.5 + h, 0.0], [1.0, 0.0]], [(0, 1), (2, 3)])


def _diagonal() -> EmbeddedGraph:
    return gallery.polyline([[0.0, 0.0], [1.0, 1.0]])


@dataclass(frozen=True)
class Scenario:
    name: str
    generator: Callable[[int], EmbeddedGraph]
    limit: EmbeddedGraph
    component_bound: int | None  # None: unbounded

    @property
    def expected_verdict(self) -> str:
        return "holds" if self.component_bound is not None else "violated"


SCENARIOS: dict[str, Callable[[], Scenario]] = {
    "staircase": lambda: Scenario("staircase", staircase, _diagonal(), 1),
    "comb": lambda: Scenario("comb", comb, gallery.segment(), 1),
    "polygon": lambda: Scenario("polygon", gallery.polygon, gallery.polygon(LIMIT_POLYGON), 1),
    "dust": lambda: Scenario("dust", dust, _diagonal(), None),
    "twocomp": lambda: Scenario("twocomp", twocomp, gallery.segment(), 2),
}


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]()
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}") from None


def scenario(name: str, n: int) -> EmbeddedGraph:
    """The n-th member of a named sequence."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return get_scenario(name).generator(n).check()


@dataclass(frozen=True)
class ReportRow:
    n: int
    d_hausdorff: float
    h1: float


@dataclass(frozen=True)
class SemicontinuityReport:
    scenario: str
    eps: float
    rows: tuple[ReportRow, ...]
    h1_limit: float
    liminf_estimate: float
    tolerance: float
    verdict: str
    expected_verdict: str

    @property
    def gap(self) -> float:
        return self.liminf_estimate - self.h1_limit

    @property
    def hausdorff_error_bound(self) -> float:
        """Each net lies within eps of its set, so net distances are off by at most 2 eps."""
        return 2.0 * self.eps

    def verdict_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "eps": self.eps,
            "dH_error_bound": self.hausdorff_error_bound,
            "h1_limit": self.h1_limit,
            "liminf_estimate": self.liminf_estimate,
            "gap": self.gap,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "expected": self.expected_verdict,
        }


def _net_points(g: EmbeddedGraph, eps: float) -> np.ndarray:
    return epsilon_net(g, eps).points


def semicontinuity_report(
    s: Scenario | str, n_list: Sequence[int], eps: float, abs_tol: float = 1e-9
) -> SemicontinuityReport:
    """Compare H^1 along the tail of a sequence with H^1 of its limit.

    The liminf is estimated by the minimum of H^1(K_n) over the last half of
    ``n_list``.  The verdict is "holds" when that minimum is at least
    H^1(K) minus ``abs_tol + 4 * (largest Hausdorff distance on the tail)``.
    """
    if isinstance(s, str):
        s = get_scenario(s)
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list must be nonempty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    if not eps > 0:
        raise ValueError("eps must be positive")
    limit_pts = _net_points(s.limit, eps)
    rows = []
    for n in n_list:
        g = s.generator(n).check()
        rows.append(ReportRow(n, hausdorff_distance(_net_points(g, eps), limit_pts), h1(g)))
    tail = rows[len(rows) // 2:]
    liminf = min(r.h1 for r in tail)
    tolerance = abs_tol + TOLERANCE_SLACK * max(r.d_hausdorff for r in tail)
    h_lim = h1(s.limit)
    verdict = "holds" if liminf >= h_lim - tolerance else "violated"
    return SemicontinuityReport(s.name, float(eps), tuple(rows), h_lim, liminf, tolerance, verdict, s.expected_verdict)


# ---------------------------------------------------------------------------
# inequality checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundCheck:
    """Outcome of checking lhs <= rhs (for chain bounds) or lhs >= rhs (for length bounds)."""

    holds: bool
    lhs: float
    rhs: float

    def __bool__(self) -> bool:
        return self.holds

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else math.inf


def chain_bound_check(g: EmbeddedGraph, delta: float, eps: float) -> BoundCheck:
    """Longest shortest δ-chain between net samples against 4 H^1(G).

    ``lhs`` is the worst chain length, ``rhs`` = 4 H^1(G); ``ratio`` is the
    worst observed fraction of the bound.
    """
    g.check()
    if not is_connected(g):
        raise ValueError("graph must be connected")
    if eps > delta:
        raise ValueError("net spacing eps must not exceed delta")
    net = epsilon_net(g, eps)
    d = chain_distances(net, delta)
    if not np.all(np.isfinite(d)):
        raise RuntimeError("net of a connected graph is not delta-connected (report bug)")
    worst = float(d.max())
    bound = 4.0 * h1(g)
    return BoundCheck(worst <= bound, worst, bound)


def _component_count(g: EmbeddedGraph) -> int:
    return len(set(component_labels(g).tolist()))


def diameter_chain_bound_check(k: EmbeddedGraph, kprime, delta: float, m: int) -> BoundCheck:
    """H^1(K) >= diam(K') - m δ for a δ-connected sample K' of K with at most m components."""
    k.check()
    pts = as_points(kprime)
    if _component_count(k) > m:
        raise ValueError(f"K has more than m={m} components")
    if not is_delta_connected(pts, delta):
        raise ValueError("K' is not delta-connected")
    lhs, rhs = h1(k), diam(pts) - m * delta
    return BoundCheck(lhs >= rhs, lhs, rhs)


Region = dict[int, list[tuple[float, float]]]


def _whole(k: EmbeddedGraph) -> Region:
    return {e: [(0.0, 1.0)] for e in range(k.n_edges)}


def region_boundary(k: EmbeddedGraph, region: Region | None) -> np.ndarray:
    """Points of the region that are limits of points of K outside it (boundary relative to K)."""
    if region is None:
        return np.zeros((0, k.dim))
    reg = {e: merge_intervals(ivs) for e, ivs in region.items() if ivs}
    pts = []
    for e, ivs in reg.items():
        for a, b in ivs:
            if a > 0.0:
                pts.append(k.point(GraphPoint(e, a)))
            if b < 1.0:
                pts.append(k.point(GraphPoint(e, b)))

    def touches(e: int, s: float) -> bool:
        return any(a <= s <= b for a, b in reg.get(e, []))

    def full_near(e: int, s: float) -> bool:
        # edge e is in the region on a neighbourhood of its end s
        return any(a <= s <= b and b > a for a, b in reg.get(e, []))

    for v in range(k.n_vertices):
        ends = [(e, 0.0 if k.edges[e][0] == v else 1.0) for e in k.incident[v]]
        if any(touches(e, s) for e, s in ends) and not all(full_near(e, s) for e, s in ends):
            pts.append(k.vertices[v])
    if not pts:
        return np.zeros((0, k.dim))
    return np.unique(np.array(pts), axis=0)


def _in_region(k: EmbeddedGraph, region: Region, p: np.ndarray, tol: float = 1e-9) -> bool:
    for e, ivs in region.items():
        i, j = k.edges[e]
        a, b = k.vertices[i], k.vertices[j]
        for s0, s1 in ivs:
            if point_segment_distance(p, a + s0 * (b - a), a + s1 * (b - a)) <= tol:
                return True
    return False


def localized_bound_check(
    k: EmbeddedGraph, kprime, region: Region | None, r: float, delta: float, m: int
) -> BoundCheck:
    """H^1(K ∩ U) >= (1 - δ/r) diam(K') - m δ.

    ``region`` gives K ∩ U as per-edge offset intervals (None: all of K,
    so the boundary is empty).  The boundary is taken relative to K and the
    margin dist(K', boundary) >= r is verified before evaluating the bound.
    """
    k.check()
    if not r > 0:
        raise ValueError("margin r must be positive")
    pts = as_points(kprime)
    if _component_count(k) > m:
        raise ValueError(f"K has more than m={m} components")
    if not is_delta_connected(pts, delta):
        raise ValueError("K' is not delta-connected")
    reg = _whole(k) if region is None else region
    if not all(_in_region(k, reg, p) for p in pts):
        raise ValueError("K' is not contained in U")
    margin = set_distance(pts, region_boundary(k, region))
    if margin < r:
        raise ValueError(f"margin precondition fails: dist(K', boundary of U) = {margin:.6g} < r = {r}")
    lhs = interval_set_length(k, reg)
    rhs = (1.0 - delta / r) * diam(pts) - m * delta
    return BoundCheck(lhs >= rhs, lhs, rhs)


# ---------------------------------------------------------------------------
# seeded random suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LemmaInstance:
    graph: EmbeddedGraph
    m: int
    delta: float
    kprime: np.ndarray
    region: Region | None
    r: float


def lemma_instances(seed: int = 0, count: int = 100) -> list[LemmaInstance]:
    """Random forests with a δ-connected sample K' inside an intrinsic ball U.

    Every tenth instance uses U = K (empty boundary).
    """
    out = []
    for idx, rng in enumerate(gallery.child_rngs(seed, count)):
        m = int(rng.integers(1, 4))
        g = gallery.random_forest(rng, m, n_edges=int(rng.integers(2, 6)))
        delta = float(rng.choice([0.05, 0.1, 0.2]))
        net = epsilon_net(g, delta / 2)
        center = GraphPoint(int(rng.integers(g.n_edges)), float(rng.uniform()))
        radius = float(rng.uniform(0.4, 2.0))
        inner = intrinsic_ball(g, center, radius / 2)
        chosen = [
            i for i, loc in enumerate(net.locations)
            if loc is not None and any(a - 1e-12 <= loc.s <= b + 1e-12 for a, b in inner.get(loc.edge, []))
        ]
        kprime = net.subset(chosen) if chosen else g.point(center)[None, :]
        if idx % 10 == 0:
            region, r = None, 1.0
        else:
            region = intrinsic_ball(g, center, radius)
            r = set_distance(kprime, region_boundary(g, region))
            r = 1.0 if math.isinf(r) else r
        out.append(LemmaInstance(g, m, delta, kprime, region, r))
    return out
