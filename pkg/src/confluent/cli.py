"""Command-line entry point: ``confluent <group> <command> [options]``.

Every command prints one canonical JSON envelope on stdout and a one-line
summary on stderr.  Exit codes: 0 ok, 1 violation, 2 usage or IO error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from confluent.bipartite import BuildError, SCAN_CAP, build_bip_soc, scan_orders
from confluent.cliquewidth import (
    MAX_LABELS, BuildLog, ExpressionError, KExpression, build_16_expression, evaluate, width,
)
from confluent.diagram import (
    ConfluentDiagram, DiagramError, Verdict, check_strict, classify_tree_like, derive_graph,
    is_reduced, validate_embedding,
)
from confluent.graph import Graph, GraphError, SizeCapExceeded, is_isomorphic
from confluent.pursuit import SOLVER_CAP, StrategyError, play, robber_policy, solve_cop_number_at_most
from confluent.strings import TraceSet, build_traces, certify_outer_string, intersection_graph
from confluent.svg import render_svg
from confluent.unit_interval import IntervalLayout, LayoutError, build_sc_diagram, normalize_intervals, verify_build

SCHEMA = "confluent/1"
EXIT = {"ok": 0, "violation": 1, "error": 2}


class UsageError(Exception):
    """Bad arguments or unreadable input; maps to exit code 2."""


@dataclass
class CommandResult:
    status: str
    payload: dict = field(default_factory=dict)
    summary: str = ""

    @property
    def exit_code(self) -> int:
        return EXIT[self.status]

    def envelope(self, command: str) -> dict:
        return {"schema": SCHEMA, "command": command, "status": self.status,
                "summary": self.summary, "payload": self.payload}


def _plain(o):
    """JSON fallback for witnesses: dataclasses, sets and other iterables."""
    if hasattr(o, "to_json"):
        return o.to_json()
    if dataclasses.is_dataclass(o):
        return dataclasses.asdict(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o, key=repr)
    if hasattr(o, "__iter__"):
        return list(o)
    return repr(o)


def canonical(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=False, default=_plain) + "\n"


def write_artifact(path, doc: dict) -> None:
    Path(path).write_text(canonical({**doc, "schema": SCHEMA}))


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not JSON: {exc}") from exc


def load_diagram(path) -> ConfluentDiagram:
    try:
        return ConfluentDiagram.from_json(_read_json(path))
    except (DiagramError, GraphError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def load_graph(path) -> Graph:
    """A graph file, or a diagram file whose derived graph is used."""
    doc = _read_json(path)
    try:
        if "vertices" in doc:
            return Graph.from_json(doc)
        return derive_graph(ConfluentDiagram.from_json(doc))
    except (DiagramError, GraphError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def load_expression(path) -> KExpression:
    doc = _read_json(path)
    try:
        return KExpression.from_json(doc.get("expression", doc))
    except (ExpressionError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: malformed expression: {exc}") from exc


def _verdict(v: Verdict) -> dict:
    return {"ok": v.ok, "kind": v.kind, "witness": v.witness}


def _result(checks: dict, payload: dict, summary: str) -> CommandResult:
    """Status ok iff every entry of ``checks`` is true."""
    payload = {**payload, "checks": checks}
    bad = sorted(k for k, v in checks.items() if not v)
    if bad:
        return CommandResult("violation", payload, f"{summary}; FAILED: {', '.join(bad)}")
    return CommandResult("ok", payload, summary)


# --- commands ------------------------------------------------------------------

def cmd_derive(a) -> CommandResult:
    d = load_diagram(a.input)
    g = derive_graph(d)
    if a.out:
        write_artifact(a.out, g.to_json())
    return CommandResult("ok", {"graph": g.to_json()}, f"{len(g)} vertices, {len(g.edges)} edges")


def cmd_check(a) -> CommandResult:
    d = load_diagram(a.input)
    fn = {"strict": check_strict, "reduced": is_reduced, "embedding": validate_embedding,
          "tree-like": classify_tree_like}[a.what]
    v = fn(d)
    return CommandResult("ok" if v.ok else "violation", {"verdict": _verdict(v)}, f"{a.what}: {v.kind}")


def _trio(d: ConfluentDiagram, g: Graph) -> dict:
    h = derive_graph(d)
    return {"strict": check_strict(d).ok, "embedding": validate_embedding(d).ok,
            "isomorphic": is_isomorphic(h, g)}


def _save_diagram(a, d: ConfluentDiagram, traces: TraceSet | None = None) -> None:
    if a.out:
        write_artifact(a.out, d.to_json())
    if getattr(a, "svg", None):
        Path(a.svg).write_text(render_svg(d, traces))


def cmd_build(a) -> CommandResult:
    if a.what == "unit-interval":
        doc = _read_json(a.input)
        try:
            lay = normalize_intervals(IntervalLayout.from_json(doc).intervals)
        except (LayoutError, KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{a.input}: {exc}") from exc
        d = build_sc_diagram(lay)
        rep = verify_build(lay, d)
        checks = {"strict": rep["strict"], "embedding": rep["embedding"], "isomorphic": rep["isomorphic"]}
        g = lay.graph()
    else:
        g = load_graph(a.input)
        try:
            d = build_bip_soc(g)
        except BuildError as exc:
            return CommandResult("violation", {"reason": str(exc)}, f"not buildable: {exc}")
        checks = _trio(d, g)
    _save_diagram(a, d)
    return _result(checks, {"diagram": d.to_json()},
                   f"{a.what}: {len(d.nodes)} nodes, {len(d.junctions)} junctions")


def cmd_strings(a) -> CommandResult:
    d = load_diagram(a.input)
    if a.what == "build":
        t = build_traces(d)
        if a.out:
            write_artifact(a.out, t.to_json())
        if a.svg:
            Path(a.svg).write_text(render_svg(d, t))
    else:
        if not a.traces:
            raise UsageError("strings certify needs --traces")
        try:
            t = TraceSet.from_json(_read_json(a.traces))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{a.traces}: malformed traces: {exc}") from exc
    checks = {"intersection_graph": intersection_graph(t) == derive_graph(d)}
    payload = {"traces": t.to_json()} if a.what == "build" else {}
    if d.outer_order is not None:
        cert = certify_outer_string(d, t)
        checks["outer_string"] = cert.ok
        payload["certificate"] = _verdict(cert)
    return _result(checks, payload, f"{len(t.traces)} traces")


def cmd_orders(a) -> CommandResult:
    g = load_graph(a.input)
    order = scan_orders(g, cap=a.cap or SCAN_CAP)
    if order is None:
        return CommandResult("violation", {"order": None}, "no fully representable order")
    return CommandResult("ok", {"order": order}, "order: " + " ".join(order))


def cmd_cops(a) -> CommandResult:
    if a.what == "solve":
        g = load_graph(a.graph or a.input or _missing("--graph"))
        win = solve_cop_number_at_most(g, a.k, cap=a.cap or SOLVER_CAP)
        return CommandResult("ok", {"k": a.k, "cops_win": win},
                             f"{a.k} cop{'s' if a.k > 1 else ''} {'win' if win else 'lose'}")
    d = load_diagram(a.diagram or a.input or _missing("--diagram"))
    g = derive_graph(d)
    kw = {}
    if a.robber == "interactive":
        kw = {"ask": input, "say": lambda s: print(s, file=sys.stderr)}
    elif a.robber == "random":
        kw = {"seed": a.seed}
    try:
        robber = robber_policy(a.robber, g, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = play(d, robber, max_moves=a.max_moves)
    limit = 4 * len(d.nodes)
    checks = {"captured": out.captured, "within_bound": out.moves <= limit}
    return _result(checks, {"game": out.to_json(), "bound": limit},
                   f"captured={str(out.captured).lower()} after {out.moves} moves (bound {limit})")


def _missing(flag: str):
    raise UsageError(f"missing {flag}")


def cmd_cw(a) -> CommandResult:
    if a.what == "eval":
        e = load_expression(a.input)
        g, labels = evaluate(e)
        return CommandResult("ok", {"graph": g.to_json(), "labels": labels, "width": width(e)},
                             f"width={width(e)}, {len(g)} vertices, {len(g.edges)} edges")
    if a.what == "build":
        d = load_diagram(a.input)
        log = BuildLog([])
        e = build_16_expression(d, log)
        if a.out:
            write_artifact(a.out, {"expression": e.to_json()})
        target = derive_graph(d)
    else:
        if not a.expr:
            raise UsageError("cw verify needs --expr")
        e = load_expression(a.expr)
        target = load_graph(a.input)
    g, _ = evaluate(e)
    w = width(e)
    checks = {"width_le_16": w <= MAX_LABELS, "isomorphic": is_isomorphic(g, target)}
    payload = {"width": w}
    if a.what == "build":
        payload["expression"] = e.to_json()
        payload["log"] = log.to_json()
    return _result(checks, payload,
                   f"width={w}{'≤' if w <= MAX_LABELS else '>'}{MAX_LABELS}, "
                   f"isomorphic={str(checks['isomorphic']).lower()}")


def cmd_render(a) -> CommandResult:
    d = load_diagram(a.input)
    t = None
    if a.traces:
        try:
            t = TraceSet.from_json(_read_json(a.traces))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{a.traces}: malformed traces: {exc}") from exc
    svg = render_svg(d, t, size=a.size)
    if a.out:
        Path(a.out).write_text(svg)
    return CommandResult("ok", {"bytes": len(svg), "out": a.out}, f"rendered {len(d.nodes)} nodes")


# --- argument parsing --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parser() -> argparse.ArgumentParser:
    p = _Parser(prog="confluent", description="Strict confluent diagrams and their algorithms.")
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def cmd(name, fn, choices=None, **kw):
        q = sub.add_parser(name, **kw)
        if choices:
            q.add_argument("what", choices=choices)
        q.add_argument("--in", dest="input", help="input JSON file")
        q.add_argument("--out", help="output file")
        q.add_argument("--seed", type=int, default=0, help="seed for randomized policies")
        q.add_argument("--cap", type=int, default=None, help="override exhaustive-search size guard")
        q.set_defaults(fn=fn)
        return q

    cmd("derive", cmd_derive, help="derived graph of a diagram")
    cmd("check", cmd_check, ["strict", "reduced", "embedding", "tree-like"], help="verify a diagram")
    b = cmd("build", cmd_build, ["unit-interval", "bipartite-soc"], help="construct a diagram")
    b.add_argument("--svg", help="also write an SVG drawing")
    s = cmd("strings", cmd_strings, ["build", "certify"], help="string representations")
    s.add_argument("--traces", help="trace file to certify")
    s.add_argument("--svg", help="also write an SVG with the traces")
    cmd("orders", cmd_orders, ["scan"], help="search for a fully representable cyclic order")
    c = cmd("cops", cmd_cops, ["play", "solve"], help="cops and robber")
    c.add_argument("--diagram", help="diagram file for play")
    c.add_argument("--graph", help="graph or diagram file for solve")
    c.add_argument("--robber", default="optimal", help="optimal, greedy, random[:SEED] or interactive")
    c.add_argument("--k", type=int, choices=[1, 2], default=2)
    c.add_argument("--max-moves", type=int, default=None)
    w = cmd("cw", cmd_cw, ["build", "eval", "verify"], help="clique-width expressions")
    w.add_argument("--expr", help="expression file for verify")
    r = cmd("render", cmd_render, ["svg"], help="draw a diagram")
    r.add_argument("--traces", help="trace file to overlay")
    r.add_argument("--size", type=int, default=480)
    return p


def command_name(argv) -> str:
    return " ".join(x for x in argv[:2] if not x.startswith("-"))


def run(argv) -> CommandResult:
    try:
        a = parser().parse_args(argv)
        if a.fn not in (cmd_cops,) and not a.input:
            raise UsageError("missing --in")
        return a.fn(a)
    except UsageError as exc:
        return CommandResult("error", {"error": str(exc)}, f"usage: {exc}")
    except SizeCapExceeded as exc:
        return CommandResult("error", {"error": str(exc)}, f"{exc} (raise with --cap)")
    except OSError as exc:
        return CommandResult("error", {"error": str(exc)}, f"io: {exc}")
    except (DiagramError, GraphError, ExpressionError, StrategyError, BuildError, LayoutError) as exc:
        return CommandResult("violation", {"error": type(exc).__name__, "message": str(exc)},
                             f"{type(exc).__name__}: {exc}")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        parser().print_help()
        return 0 if argv else 2
    res = run(argv)
    sys.stdout.write(canonical(res.envelope(command_name(argv))))
    print(res.summary, file=sys.stderr)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
