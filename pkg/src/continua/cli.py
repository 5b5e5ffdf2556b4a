"""Command-line interface: ``continua <subcommand> ...``.

Exit status is 0 on success, 1 when a computation fails and 2 for usage or
input errors (bad flags, unreadable or malformed graph files).
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

from .graph import EmbeddedGraph, GraphPoint, InvalidGraphError, components, epsilon_net, h1

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class GraphParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + where)
        self.line = line
        self.column = column


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# graph text format
# ---------------------------------------------------------------------------


def _tokens(line: str) -> list[tuple[str, int]]:
    """Whitespace-separated tokens with 1-based columns."""
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse_graph(text: str) -> EmbeddedGraph:
    """Parse ``v x y [...]`` and ``e i j`` lines (``#`` starts a comment) into a validated graph."""
    verts: list[list[float]] = []
    edges: list[tuple[int, int]] = []
    edge_lines: list[tuple[int, int, int]] = []  # line, column of i, column of j
    dim = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw.split("#", 1)[0])
        if not toks:
            continue
        kind, col = toks[0]
        if kind == "v":
            if len(toks) < 3:
                raise GraphParseError("vertex needs at least 2 coordinates", lineno, col)
            coords = []
            for tok, c in toks[1:]:
                try:
                    x = float(tok)
                except ValueError:
                    raise GraphParseError(f"bad coordinate {tok!r}", lineno, c) from None
                if not math.isfinite(x):
                    raise GraphParseError(f"non-finite coordinate {tok!r}", lineno, c)
                coords.append(x)
            if dim is None:
                dim = len(coords)
            elif len(coords) != dim:
                raise GraphParseError(f"vertex has {len(coords)} coordinates, expected {dim}", lineno, col)
            verts.append(coords)
        elif kind == "e":
            if len(toks) != 3:
                raise GraphParseError("edge needs exactly 2 vertex indices", lineno, col)
            ids = []
            for tok, c in toks[1:]:
                if not re.fullmatch(r"\d+", tok):
                    raise GraphParseError(f"bad vertex index {tok!r}", lineno, c)
                ids.append(int(tok))
            edges.append((ids[0], ids[1]))
            edge_lines.append((lineno, toks[1][1], toks[2][1]))
        else:
            raise GraphParseError(f"unknown record type {kind!r}", lineno, col)
    if not verts:
        raise GraphParseError("graph has no vertices")
    for (i, j), (lineno, ci, cj) in zip(edges, edge_lines):
        for idx, c in ((i, ci), (j, cj)):
            if idx >= len(verts):
                raise GraphParseError("vertex index out of range", lineno, c)
    g = EmbeddedGraph(verts, edges)
    if g.violations:
        def cite(msg: str) -> str:
            ks = [int(x) for x in re.findall(r"(?:edges?|and|of edge) (\d+)", msg)] if "edge" in msg else []
            lines = ", ".join(str(edge_lines[k][0]) for k in ks if k < len(edge_lines))
            return f"{msg} (lines {lines})" if lines else msg

        raise GraphParseError("invalid graph: " + "; ".join(cite(v) for v in g.violations))
    return g


def format_graph(g: EmbeddedGraph) -> str:
    """Text form that parses back to an identical graph."""
    lines = ["v " + " ".join(repr(float(x)) for x in p) for p in g.vertices]
    lines += [f"e {i} {j}" for i, j in g.edges]
    return "\n".join(lines) + "\n"


def read_graph(path: str) -> EmbeddedGraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_graph(text)
    except GraphParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# stable output
# ---------------------------------------------------------------------------


def fmt_float(x: float) -> str:
    """17 significant digits, independent of locale."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def to_json(obj, indent: int = 0) -> str:
    """JSON with floats written by ``fmt_float``; dict order is preserved."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not any(isinstance(v, dict) for v in obj):
            return "[" + ", ".join(to_json(v, indent + 1) for v in obj) + "]"
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "tolist"):
        return to_json(obj.tolist(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _path_json(path) -> dict:
    return {"breakpoints": [[float(t), [float(x) for x in p]] for t, p in zip(path.params, path.points)]}


def _ledger_json(ledger) -> dict:
    return ledger.to_dict()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _parse_point(text: str) -> GraphPoint:
    m = re.fullmatch(r"\s*(\d+)\s*:\s*([-+0-9.eE]+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected EDGE:OFFSET, got {text!r}")
    return GraphPoint(int(m.group(1)), float(m.group(2)))


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0 or not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return x


def cmd_h1(args) -> str:
    return repr(h1(read_graph(args.graph))) + "\n"


def cmd_hausdorff(args) -> str:
    from .geometry import hausdorff_distance

    a, b = read_graph(args.graph_a), read_graph(args.graph_b)
    d = hausdorff_distance(epsilon_net(a, args.eps).points, epsilon_net(b, args.eps).points)
    return to_json({"dH": d, "eps": args.eps, "error_bound": 2 * args.eps}) + "\n"


def cmd_ldelta(args) -> str:
    from .partition import delta_partition, diameter_sum

    g = read_graph(args.graph)
    total = h1(g)
    deltas = args.delta if args.delta else [total / 2**k for k in range(11)]
    rows = ["delta,diameter_sum,h1"]
    for d in deltas:
        if not d > 0:
            raise UsageError("delta must be positive")
        s = math.fsum(diameter_sum(delta_partition(c, d)) for c in components(g) if c.n_edges)
        rows.append(f"{fmt_float(d)},{fmt_float(s)},{fmt_float(total)}")
    return "\n".join(rows) + "\n"


def cmd_geodesic(args) -> str:
    from .chain import geodesic

    g = read_graph(args.graph)
    return to_json(_path_json(geodesic(g, args.source, args.target))) + "\n"


def cmd_parametrize(args) -> str:
    from .parametrize import canonical_parametrization, double_cover_euler

    g = read_graph(args.graph)
    build = double_cover_euler if args.method == "euler" else canonical_parametrization
    res = build(g)
    length, total = res.path.length(), h1(g)
    summary = f"length={length!r} h1={total!r} ratio={length / total!r}\n"
    if args.out:
        payload = {
            "path": _path_json(res.path),
            "ledger": _ledger_json(res.ledger),
            "iterations": res.iterations,
            "spur_lengths": list(res.spur_lengths),
        }
        Path(args.out).write_text(to_json(payload) + "\n")
    return summary


def cmd_degzero(args) -> str:
    from .path import PolylinePath, degree_zero_test, edge_multiplicity

    try:
        data = json.loads(Path(args.path).read_text())
        path = PolylinePath.from_dict(data.get("path", data))
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        raise UsageError(f"{args.path}: not a polyline JSON file ({exc})") from None
    res = degree_zero_test(path, tol=args.tol, seed=args.seed)
    out = {
        "passed": res.passed,
        "worst_residual": res.worst_residual,
        "worst_pair": list(res.worst_pair) if res.worst_pair else None,
        "seed": args.seed,
        "tol": args.tol,
    }
    if args.graph:
        ledger = edge_multiplicity(path, read_graph(args.graph))
        out["ledger"] = _ledger_json(ledger)
        out["ledger_even"] = ledger.is_even()
        out["ledger_balanced"] = ledger.is_balanced()
    return to_json(out) + "\n"


def cmd_golab(args) -> str:
    from .golab import semicontinuity_report

    rep = semicontinuity_report(args.scenario, args.n, args.eps)
    lines = ["n,dH,h1"] + [f"{r.n},{fmt_float(r.d_hausdorff)},{fmt_float(r.h1)}" for r in rep.rows]
    return "\n".join(lines) + "\n" + to_json(rep.verdict_dict()) + "\n"


def cmd_selftest(args) -> str:
    from .acceptance import render, run_all

    results = run_all(seed=args.seed, only=args.criteria)
    args._failed = not all(r.passed for r in results)
    return render(results, args.seed)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="continua", description="Length, partitions, geodesics and double covers of embedded graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--out", help="write the report to this file instead of standard output")
        sp.set_defaults(func=func)
        return sp

    sp = add("h1", cmd_h1, "total length of a graph")
    sp.add_argument("graph")

    sp = add("hausdorff", cmd_hausdorff, "Hausdorff distance between two graphs, computed on eps-nets")
    sp.add_argument("graph_a")
    sp.add_argument("graph_b")
    sp.add_argument("--eps", type=_positive, default=0.01)

    sp = add("ldelta", cmd_ldelta, "greedy delta-partition diameter sums as CSV")
    sp.add_argument("graph")
    sp.add_argument("--delta", type=_float_list, help="comma-separated deltas (default h1/2^k, k=0..10)")

    sp = add("geodesic", cmd_geodesic, "shortest path between two graph points, as polyline JSON")
    sp.add_argument("graph")
    sp.add_argument("--from", dest="source", type=_parse_point, required=True, metavar="EDGE:OFFSET")
    sp.add_argument("--to", dest="target", type=_parse_point, required=True, metavar="EDGE:OFFSET")

    sp = sub.add_parser("parametrize", help="closed double-cover path; summary on stdout, JSON via --out")
    sp.add_argument("graph")
    sp.add_argument("--method", choices=["canonical", "euler"], default="canonical")
    sp.add_argument("--out", help="write path and ledger JSON to this file")
    sp.set_defaults(func=cmd_parametrize, _summary_only=True)

    sp = add("degzero", cmd_degzero, "degree-zero test of a polyline JSON path")
    sp.add_argument("path")
    sp.add_argument("--graph", help="reference graph for the traversal ledger")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=_positive, default=1e-9)

    sp = add("golab", cmd_golab, "semicontinuity report for a scenario sequence")
    sp.add_argument("--scenario", required=True, choices=["staircase", "comb", "polygon", "dust", "twocomp"])
    sp.add_argument("--n", type=_int_list, required=True, help="comma-separated increasing sizes")
    sp.add_argument("--eps", type=_positive, default=0.01)

    sp = add("selftest", cmd_selftest, "run the acceptance criteria")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--criteria", type=_int_list, help="comma-separated criterion numbers (default all)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except UsageError as exc:
        print(f"continua {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidGraphError, ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"continua {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = getattr(args, "out", None)
    if out and not getattr(args, "_summary_only", False):
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_FAIL if getattr(args, "_failed", False) else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
