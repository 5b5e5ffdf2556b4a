"""The acceptance criteria as plain functions, shared by the test suite and ``continua selftest``.

Each criterion returns a ``Criterion`` with a deterministic one-line detail
(no timings), so two runs with the same seed print identical reports.
"""

from __future__ import annotations

import math
import subprocess
import sys
from dataclasses import dataclass

import numpy as np

from . import gallery
from .chain import chain_distances, chain_length, geodesic, shortest_delta_chain
from .golab import (
    chain_bound_check,
    comb,
    diameter_chain_bound_check,
    lemma_instances,
    localized_bound_check,
    semicontinuity_report,
)
from .graph import GraphPoint, epsilon_net, h1, intrinsic_distance, shortest_route
from .parametrize import canonical_parametrization, double_cover_euler
from .partition import delta_partition, diameter_sum, l_delta_bruteforce, l_delta_lower_bound
from .path import (
    PolylinePath,
    area_formula_check,
    default_test_family,
    degree_zero_test,
    edge_multiplicity,
    is_simple,
)


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def _g(x: float) -> str:
    return format(float(x), ".6g")


def gallery_graphs(seed: int, n_trees: int = 10):
    """Named graphs used by several criteria: segment, tripod, 64-gon, theta graph, random trees."""
    graphs = [("segment", gallery.segment()), ("tripod", gallery.tripod()),
              ("64-gon", gallery.polygon(64)), ("theta", gallery.theta_graph())]
    graphs += [(f"tree{k}", gallery.random_tree(r)) for k, r in enumerate(gallery.child_rngs(seed + 7, n_trees))]
    return graphs


# ---------------------------------------------------------------------------


def criterion_1(seed: int) -> Criterion:
    seg, tri, poly = h1(gallery.segment()), h1(gallery.tripod()), h1(gallery.polygon(64))
    exact = 2 * 64 * math.sin(math.pi / 64)
    ok = seg == 1.0 and tri == 3.0 and abs(poly - exact) <= 1e-12
    return Criterion(1, "exact length", ok, f"segment={seg!r} tripod={tri!r} 64-gon err={_g(abs(poly - exact))}")


def criterion_2(seed: int) -> Criterion:
    graphs = [gallery.segment(), gallery.tripod(), gallery.polygon(256)]
    graphs += [gallery.random_tree(r) for r in gallery.child_rngs(seed + 2, 3)]
    ok, reached = True, []
    for g in graphs:
        total = h1(g)
        hit = None
        for k in range(11):
            s = diameter_sum(delta_partition(g, total / 2**k))
            ok &= s <= total
            if s >= 0.99 * total:
                hit = k
                break
        reached.append(hit)
        ok &= hit is not None
    return Criterion(2, "L_delta convergence", ok, "first k with sum >= 0.99 h1: " + ",".join(str(k) for k in reached))


def criterion_3(seed: int) -> Criterion:
    cases = [
        ("segment", gallery.segment(), 0.5, [1, 2, 4, 8, 16, 32, 64]),
        ("tripod", gallery.tripod(), 0.5, [1, 2, 4, 8, 16]),
        ("L", gallery.l_shape(), 0.5, [1, 2, 4, 8, 16, 32]),
        ("V", gallery.v_shape(0.3), 2.1, [1, 2, 4, 8, 16, 32]),
        ("square", gallery.square_boundary(), 0.6, [1, 2, 4, 8, 16]),
    ]
    ok, notes = True, []
    for name, g, delta, resolutions in cases:
        total = h1(g)
        values = [l_delta_bruteforce(g, delta, r) for r in resolutions]
        greedy = diameter_sum(delta_partition(g, delta))
        lower = l_delta_lower_bound(g, delta)
        ok &= all(v <= total + 1e-12 for v in values)
        ok &= all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        ok &= values[-1] >= max(greedy, lower) - 1e-12
        notes.append(f"{name}:{_g(values[0])}->{_g(values[-1])}")
    return Criterion(3, "oracle agreement", ok, " ".join(notes))


def criterion_4(seed: int) -> Criterion:
    ok, worst = True, 0.0
    for r in gallery.child_rngs(seed + 4, 100):
        g = gallery.random_tree(r)
        for eps in (0.2, 0.1):
            check = chain_bound_check(g, eps, eps)
            ok &= check.holds
            worst = max(worst, check.ratio)
    return Criterion(4, "chain bound", ok, f"100 trees, worst chain/(4 h1) = {_g(worst)}")


def _constant_speed_error(path: PolylinePath, rng: np.random.Generator, trials: int = 20) -> float:
    total = path.length()
    worst = 0.0
    for _ in range(trials):
        t0, t1 = sorted(rng.uniform(0, 1, 2))
        worst = max(worst, abs(path.length(t0, t1) - total * (t1 - t0)))
    return worst


def criterion_5(seed: int) -> Criterion:
    tri = gallery.tripod()
    tri_len = geodesic(tri, GraphPoint(0, 1.0), GraphPoint(2, 1.0)).length()
    ok = tri_len == 2.0
    worst_speed, worst_gap = 0.0, 0.0
    for r in gallery.child_rngs(seed + 5, 50):
        g = gallery.random_tree(r, max_degree=3, min_angle=math.radians(100))
        a, b = (int(x) for x in r.choice(g.n_vertices, 2, replace=False))
        p, q = g.at_vertex(a), g.at_vertex(b)
        gam = geodesic(g, p, q)
        dist = intrinsic_distance(g, p, q)
        ledger = edge_multiplicity(gam, g)
        ok &= is_simple(gam) and all(c.multiplicity <= 1 for c in ledger.pieces)
        ok &= abs(gam.length() - dist) <= 1e-12 * max(1.0, dist) and gam.length() <= h1(g)
        worst_speed = max(worst_speed, _constant_speed_error(gam, r))
        prev = -math.inf
        for eps in (0.2, 0.1, 0.05):
            c = chain_length(shortest_delta_chain(epsilon_net(g, eps), a, b, eps))
            gap = dist - c
            worst_gap = max(worst_gap, gap / eps)
            ok &= -1e-12 <= gap <= 2 * eps and c >= prev - 1e-12
            prev = c
    ok &= worst_speed <= 1e-12
    return Criterion(5, "geodesics", ok,
                     f"tripod={tri_len!r} speed err={_g(worst_speed)} worst (geo-chain)/eps={_g(worst_gap)}")


def random_walk_path(g, rng: np.random.Generator, steps: int = 8, closed: bool = False) -> PolylinePath:
    """On-graph PL path: a vertex walk that sometimes turns back mid-edge."""
    v = int(rng.integers(g.n_vertices))
    pts = [g.vertices[v]]
    nbrs = [[(j if i == u else i) for i, j in (g.edges[k] for k in g.incident[u])] for u in range(g.n_vertices)]
    for _ in range(steps):
        w = int(rng.choice(nbrs[v]))
        if rng.random() < 0.3:
            s = rng.uniform(0.1, 0.9)
            pts.append(g.vertices[v] + s * (g.vertices[w] - g.vertices[v]))
            pts.append(g.vertices[v])
        else:
            pts.append(g.vertices[w])
            v = w
    if closed:
        start = g.at_vertex(int(np.flatnonzero((g.vertices == pts[0]).all(axis=1))[0]))
        _, legs = shortest_route(g, g.at_vertex(v), start)
        pts.extend(g.point(GraphPoint(leg.edge, leg.s1)) for leg in legs)
    return PolylinePath.through(pts)


def criterion_6(seed: int) -> Criterion:
    worst = 0.0
    seg = gallery.segment()
    paths = [(seg, PolylinePath([0, 0.5, 1], [[0, 0], [1, 0], [0, 0]]))]
    for r in gallery.child_rngs(seed + 6, 20):
        g = gallery.random_tree(r)
        paths.append((g, random_walk_path(g, r)))
    for _, g in gallery_graphs(seed):
        paths.append((g, canonical_parametrization(g).path))
    for g, p in paths:
        lhs, rhs = area_formula_check(p, g)
        worst = max(worst, abs(lhs - rhs) / lhs)
    return Criterion(6, "area formula", worst <= 1e-9, f"{len(paths)} paths, worst relative gap {_g(worst)}")


def criterion_7(seed: int) -> Criterion:
    ok, notes = True, []
    for name, g in gallery_graphs(seed):
        total = h1(g)
        res = canonical_parametrization(g)
        euler = double_cover_euler(g)
        path = res.path
        speeds = path.segment_lengths / np.diff(path.params)
        ok &= abs(path.length() - 2 * total) <= 1e-9 * total
        ok &= res.is_double_cover() and euler.is_double_cover()
        ok &= bool(degree_zero_test(path))
        ok &= float(np.max(np.abs(speeds - path.length()))) <= 1e-9 * path.length()
        ok &= abs(euler.path.length() - path.length()) <= 1e-9 * total
        ok &= sorted(euler.ledger.table()) == sorted(res.ledger.table())
        notes.append(str(res.iterations))
    return Criterion(7, "canonical parametrization", ok, "iterations " + ",".join(notes))


def criterion_8(seed: int) -> Criterion:
    """Balanced on-graph paths pass; single straight traversals fail on coordinate pairs."""
    even_worst, odd_best = 0.0, math.inf
    ok = True
    evens = [PolylinePath([0, 0.5, 1], [[0, 0], [1, 0], [0, 0]])]
    rngs = gallery.child_rngs(seed + 8, 30)
    for r in rngs[:20]:
        g = gallery.random_tree(r)
        p = random_walk_path(g, r, closed=True)
        ok &= edge_multiplicity(p, g).is_balanced()
        evens.append(p)
    evens += [canonical_parametrization(g).path for _, g in gallery_graphs(seed, n_trees=2)]
    for p in evens:
        res = degree_zero_test(p, seed=seed)
        ok &= res.passed
        even_worst = max(even_worst, res.worst_residual)
    for r in rngs[20:]:
        g = gallery.random_tree(r)
        k = int(r.integers(g.n_edges))
        i, j = g.edges[k]
        s0, s1 = sorted(r.uniform(0, 1, 2))
        a, b = g.vertices[i], g.vertices[j]
        p = PolylinePath([0, 1], [a + s0 * (b - a), a + s1 * (b - a)])
        coord = default_test_family(p, n_random=0)
        res = degree_zero_test(p, family=coord)
        ok &= not res.passed and res.worst_residual >= 0.5
        odd_best = min(odd_best, res.worst_residual)
    return Criterion(8, "degree-zero parity", ok,
                     f"balanced worst residual {_g(even_worst)}, single-traversal min residual {_g(odd_best)}")


def criterion_9(seed: int) -> Criterion:
    st = semicontinuity_report("staircase", [2, 4, 8, 16, 32], 0.01)
    cb = semicontinuity_report("comb", [4, 16, 64, 256], 0.01)
    pg = semicontinuity_report("polygon", [8, 16, 32, 64], 0.01)
    du = semicontinuity_report("dust", [10, 100], 0.01)
    comb_err = max(abs(h1(comb(r.n)) - (1 + math.sqrt(r.n))) for r in cb.rows)
    ok = st.verdict == "holds" and abs(st.gap - (2 - math.sqrt(2))) <= 1e-9
    ok &= cb.verdict == "holds" and comb_err <= 1e-12
    ok &= pg.verdict == "holds" and abs(pg.gap) <= pg.tolerance
    ok &= du.verdict == "violated" and du.expected_verdict == "violated"
    return Criterion(9, "Golab harness", ok,
                     f"staircase gap={_g(st.gap)} comb err={_g(comb_err)} polygon gap={_g(pg.gap)} dust={du.verdict} (expected)")


def criterion_10(seed: int) -> Criterion:
    ok, empty = True, 0
    slack0 = slack1 = math.inf
    insts = lemma_instances(seed=seed, count=100)
    for inst in insts:
        a = diameter_chain_bound_check(inst.graph, inst.kprime, inst.delta, inst.m)
        b = localized_bound_check(inst.graph, inst.kprime, inst.region, inst.r, inst.delta, inst.m)
        ok &= a.holds and b.holds
        empty += inst.region is None
        slack0, slack1 = min(slack0, a.lhs - a.rhs), min(slack1, b.lhs - b.rhs)
    ok &= empty > 0
    return Criterion(10, "quantitative lemmas", ok,
                     f"{len(insts)} instances ({empty} with empty boundary), min slack {_g(slack0)} / {_g(slack1)}")


def selftest_command(seed: int, criteria: str = "1,2,3,4,5,6,7,8,9,10") -> list[str]:
    return [sys.executable, "-m", "continua", "selftest", "--seed", str(seed), "--criteria", criteria]


def criterion_11(seed: int) -> Criterion:
    runs = [subprocess.run(selftest_command(seed), capture_output=True, check=False) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout and runs[0].returncode == runs[1].returncode
    ok = same and runs[0].returncode == 0 and bool(runs[0].stdout)
    return Criterion(11, "reproducibility", ok, f"two selftest runs byte-identical: {same} ({len(runs[0].stdout)} bytes)")


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11,
}


def run_criterion(number: int, seed: int = 0) -> Criterion:
    try:
        return CRITERIA[number](seed)
    except Exception as exc:  # a crash is a failure, reported like one
        return Criterion(number, CRITERIA[number].__name__, False, f"error: {type(exc).__name__}: {exc}")


def run_all(seed: int = 0, only=None) -> list[Criterion]:
    numbers = sorted(only) if only else sorted(CRITERIA)
    unknown = [n for n in numbers if n not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown criteria: {unknown}")
    return [run_criterion(n, seed) for n in numbers]


def render(results: list[Criterion], seed: int) -> str:
    lines = [f"selftest seed={seed}"] + [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"
