"""Command-line front end. Every subcommand prints one JSON run report.

Exit codes: 0 ok, 1 negative answer (invalid input object, no containment,
no simulation, failed suite), 2 usage or malformed input, 3 resource guard.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import signal
import sys
import time
from contextlib import contextmanager

from . import __version__
from .assemblage import (AssemblageError, anchored_from_obj, anchored_violation, assemblage_from_obj,
                         assemblage_to_obj, decoration_from_decomposition, encoding_at,
                         gamma_elevation, node_realizer, simulates, simulation_violation)
from .decorated import DecorationError, decorated_to_obj, is_decorated
from .graph import GraphError, Multigraph, dumps, graph_from_obj, graph_to_obj
from .qorder import QuasiOrderError, quasi_order_from_obj
from .refine import RefineError, SearchCapExceeded, refine_driver, signature
from .separations import SeparationError
from .strips import StripError, break_strip, depth_and_elevation, find_strips
from .suites import SUITES, run_suite
from .topominor import (SearchLimit, antichain_member, find_embedding, labelled_antichain_member,
                        robertson_chain)
from .treedecomp import (DecompositionError, RootedDecomposition, decomposition_from_obj,
                         decomposition_to_obj, metrics, validate)

OK, NEGATIVE, USAGE, GUARD = 0, 1, 2, 3

INPUT_ERRORS = (GraphError, DecompositionError, QuasiOrderError, AssemblageError, DecorationError,
                SeparationError, json.JSONDecodeError, OSError, KeyError, TypeError, ValueError)


class UsageError(Exception):
    pass


class Deadline(Exception):
    pass


class Negative(Exception):
    """Carries results for a well-formed run whose answer is negative."""

    def __init__(self, results):
        super().__init__("negative")
        self.results = results


@contextmanager
def deadline(ms: int | None):
    if not ms or not hasattr(signal, "setitimer"):
        yield
        return

    def fire(signum, frame):
        raise Deadline()

    old = signal.signal(signal.SIGALRM, fire)
    signal.setitimer(signal.ITIMER_REAL, ms / 1000.0)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


# input loading ------------------------------------------------------------------

class Inputs:
    def __init__(self):
        self.digests: dict[str, str] = {}

    def load(self, role: str, path: str):
        with open(path, "rb") as fh:
            raw = fh.read()
        self.digests[role] = hashlib.sha256(raw).hexdigest()
        return json.loads(raw.decode("utf-8"))

    def graphs(self, args, need: int) -> list[Multigraph]:
        paths = args.graph or []
        if len(paths) < need:
            raise UsageError(f"needs {need} --graph file(s)")
        return [graph_from_obj(self.load(f"graph{i}" if i else "graph", p)) for i, p in enumerate(paths)]

    def decomposition(self, args, g: Multigraph) -> RootedDecomposition:
        if not args.td:
            raise UsageError("needs --td")
        return decomposition_from_obj(g, self.load("td", args.td))

    def order(self, args):
        return quasi_order_from_obj(self.load("order", args.order)) if args.order else None

    def assemblages(self, args, need: int):
        paths = args.assemblage or []
        if len(paths) < need:
            raise UsageError(f"needs {need} --assemblage file(s)")
        return [assemblage_from_obj(self.load(f"assemblage{i}" if i else "assemblage", p))
                for i, p in enumerate(paths)]

    def anchored(self, args, S):
        if not args.td:
            raise UsageError("needs --td with an anchored decomposition")
        ad = anchored_from_obj(S, self.load("td", args.td))
        err = anchored_violation(S, ad)
        if err:
            raise Negative({"valid": False, "violation": err})
        return ad


def _require(value, flag: str):
    if value is None:
        raise UsageError(f"needs {flag}")
    return value


# DOT rendering ------------------------------------------------------------------

def graph_dot(g: Multigraph) -> str:
    lines = ["graph G {"]
    for v in g.vertices:
        lab = f"{v}:{g.labels[v]}" if g.labels else v
        lines.append(f'  "{v}" [label="{lab}"];')
    for a, b in g.edges:
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def decomposition_dot(d: RootedDecomposition) -> str:
    lines = ["digraph T {"]
    for t in d.preorder:
        lines.append(f'  "{t}" [shape=box,label="{t}: {{{",".join(sorted(d.bags[t]))}}}"];')
    for c in sorted(d.parent):
        lines.append(f'  "{d.parent[c]}" -> "{c}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _write(path: str | None, text: str):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# subcommands --------------------------------------------------------------------

def cmd_validate_td(args, io: Inputs):
    g, = io.graphs(args, 1)
    d = io.decomposition(args, g)
    v = validate(d)
    _write(args.dot, decomposition_dot(d))
    res = {"valid": v is None, "violation": None if v is None else _viol(v)}
    if v is not None:
        raise Negative(res)
    return res


def cmd_metrics(args, io: Inputs):
    g, = io.graphs(args, 1)
    d = io.decomposition(args, g)
    v = validate(d)
    if v is not None:
        raise Negative({"valid": False, "violation": _viol(v)})
    _write(args.dot, decomposition_dot(d))
    return metrics(d)


def cmd_rc(args, io: Inputs):
    g = robertson_chain(_require(args.k, "--k"))
    _write(args.out, dumps(graph_to_obj(g)) + "\n")
    _write(args.dot, graph_dot(g))
    return {"graph": graph_to_obj(g)}


def cmd_tm(args, io: Inputs):
    h, g = io.graphs(args, 2)[:2]
    q = io.order(args)
    emb = find_embedding(h, g, q)
    res = {"contained": emb is not None, "embedding": None if emb is None else emb.to_obj(h)}
    if emb is None:
        raise Negative(res)
    return res


def cmd_antichain(args, io: Inputs):
    q = io.order(args)
    if args.graph:
        family = io.graphs(args, 1)
    else:
        k = _require(args.k, "--k or --graph")
        family = [labelled_antichain_member(i) if q else antichain_member(i) for i in range(1, k + 1)]
    matrix = [[find_embedding(family[i], family[j], q) is not None for j in range(len(family))]
              for i in range(len(family))]
    anti = all(not matrix[i][j] for i in range(len(family)) for j in range(len(family)) if i != j)
    res = {"matrix": matrix, "antichain": anti}
    if not anti:
        raise Negative(res)
    return res


def cmd_strips(args, io: Inputs):
    g, = io.graphs(args, 1)
    d = io.decomposition(args, g)
    Z = frozenset(v for v in (args.z or "").split(",") if v)
    s = _require(args.k, "--k (strip size)")
    strips = find_strips(d, Z, s)
    res = {"Z": sorted(Z), "s": s, "strips": [st.to_obj() for st in strips]}
    if args.alpha is not None:
        broken = []
        for st in strips:
            out = break_strip(d, st, args.alpha)
            broken.append(None if out is None else _jsonable(out))
        res["broken"] = broken
    return res


def _viol(v) -> dict:
    rule = getattr(v, "axiom", None) or getattr(v, "rule", None)
    return {"rule": rule, "witness": str(v.witness)}


def _jsonable(x):
    if hasattr(x, "to_obj"):
        return x.to_obj()
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    return x


def cmd_elevation(args, io: Inputs):
    g, = io.graphs(args, 1)
    d = io.decomposition(args, g)
    de = depth_and_elevation(d)
    depths = sorted([sorted(Z), s, v] for (Z, s), v in de["depth"].items())
    return {"elevation": de["elevation"], "depths": depths}


def cmd_signature(args, io: Inputs):
    g, = io.graphs(args, 1)
    d = io.decomposition(args, g)
    return {"signature": signature(d, args.max_order).as_list()}


def cmd_refine(args, io: Inputs):
    g, = io.graphs(args, 1)
    d = io.decomposition(args, g)
    out = refine_driver(g, d, _require(args.N, "--N"), args.max_order)
    obj = decomposition_to_obj(out.decomposition)
    _write(args.out, dumps(obj) + "\n")
    _write(args.dot, decomposition_dot(out.decomposition))
    res = {"status": out.status, "decomposition": obj, "trace": out.trace}
    if out.status != "done":
        raise Negative(res)
    return res


def cmd_simulate(args, io: Inputs):
    S, S2 = io.assemblages(args, 2)[:2]
    w = simulates(S, S2)
    res = {"simulates": w is not None, "witness": None if w is None else w.to_obj()}
    if w is None:
        raise Negative(res)
    res["verified"] = simulation_violation(S, S2, w) is None
    return res


def cmd_encode(args, io: Inputs):
    S, = io.assemblages(args, 1)
    ad = io.anchored(args, S)
    t = args.node or ad.decomp.root
    if t not in ad.decomp.bags:
        raise UsageError(f"unknown node {t}")
    enc = encoding_at(S, ad, t)
    obj = assemblage_to_obj(enc)
    _write(args.out, dumps(obj) + "\n")
    return {"node": t, "encoding": obj}


def cmd_realizer(args, io: Inputs):
    S, = io.assemblages(args, 1)
    ad = io.anchored(args, S)
    real = node_realizer(S, ad)
    obj = decomposition_to_obj(real.decomp)
    _write(args.dot, decomposition_dot(real.decomp))
    return {"realizer": obj, "alpha": list(real.alpha),
            "gamma_elevation": gamma_elevation(S, ad)}


def cmd_decorate(args, io: Inputs):
    S, = io.assemblages(args, 1)
    ad = io.anchored(args, S)
    rep = decoration_from_decomposition(S, ad, _require(args.N, "--N"))
    ok, viol = is_decorated(rep.tree)
    obj = decorated_to_obj(rep.tree)
    _write(args.out, dumps(obj) + "\n")
    res = {"decorated": obj, "levels": {k: rep.levels[k] for k in sorted(rep.levels)},
           "choppers": sorted(rep.choppers), "N_prime": rep.N_prime, "h": rep.h, "d": rep.d,
           "is_decorated": ok, "violation": None if viol is None else _viol(viol)}
    if not ok:
        raise Negative(res)
    return res


def cmd_suite(args, io: Inputs):
    if args.name not in SUITES:
        raise UsageError(f"unknown suite {args.name}; known: {', '.join(sorted(SUITES))}")
    params = {}
    fn = SUITES[args.name]
    names = fn.__code__.co_varnames[:fn.__code__.co_argcount]
    if args.count is not None:
        if "count" in names:
            params["count"] = args.count
        elif "max_len" in names:
            params["max_len"] = args.count
    if "seed" in names:
        params["seed"] = args.seed
    rep = run_suite(args.name, **params)
    _write(args.out, dumps(rep) + "\n")
    if not rep["ok"]:
        raise Negative(rep)
    return rep


COMMANDS = {
    "validate-td": cmd_validate_td,
    "metrics": cmd_metrics,
    "rc": cmd_rc,
    "tm": cmd_tm,
    "antichain": cmd_antichain,
    "strips": cmd_strips,
    "elevation": cmd_elevation,
    "signature": cmd_signature,
    "refine": cmd_refine,
    "simulate": cmd_simulate,
    "encode": cmd_encode,
    "realizer": cmd_realizer,
    "decorate": cmd_decorate,
    "suite": cmd_suite,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--graph", action="append", help="graph JSON file (repeat for pairs and families)")
    common.add_argument("--td", help="decomposition JSON file")
    common.add_argument("--assemblage", action="append", help="assemblage JSON file (repeatable)")
    common.add_argument("--order", help="quasi-order JSON file for labels")
    common.add_argument("--k", type=int)
    common.add_argument("--N", type=int)
    common.add_argument("--alpha", type=int, help="breaking threshold for strips")
    common.add_argument("--max-order", type=int, dest="max_order")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--timeout-ms", type=int, dest="timeout_ms", default=None)
    common.add_argument("--out", help="write the main result object here")
    common.add_argument("--dot", help="write a DOT rendering here")
    common.add_argument("--z", help="comma-separated vertex set Z for strips")
    common.add_argument("--node", help="decomposition node for encode")
    common.add_argument("--count", type=int, help="instance count for suite")
    p = _Parser(prog="tmwqo", description="Topological-minor and tree-decomposition toolkit.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "suite":
            sp.add_argument("name")
    return p


def dispatch(argv: list[str]) -> tuple[int, dict | None, str | None]:
    """Run one command; returns (exit code, report, stderr message)."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return USAGE, None, str(exc)
    if not args.command:
        return USAGE, None, "missing subcommand"
    if args.seed is None:
        args.seed = int(os.environ.get("TMWQO_SEED", "0"))
    if args.timeout_ms is None and os.environ.get("TMWQO_TIMEOUT_MS"):
        args.timeout_ms = int(os.environ["TMWQO_TIMEOUT_MS"])
    io = Inputs()
    report = {"command": args.command, "inputs": io.digests, "seed": args.seed}
    start = time.perf_counter()
    code, message = OK, None
    try:
        with deadline(args.timeout_ms):
            report["verdict"] = "ok"
            report["results"] = COMMANDS[args.command](args, io)
    except Negative as neg:
        code, report["verdict"], report["results"] = NEGATIVE, "negative", neg.results
    except (Deadline, SearchLimit, SearchCapExceeded) as exc:
        code, report["verdict"], report["results"] = GUARD, "undecided", {"reason": type(exc).__name__}
    except UsageError as exc:
        return USAGE, None, str(exc)
    except (StripError, RefineError) as exc:
        code, report["verdict"], report["results"] = NEGATIVE, "negative", {"error": str(exc)}
    except INPUT_ERRORS as exc:
        return USAGE, None, f"bad input: {exc}"
    report["timing_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return code, report, message


def main(argv: list[str] | None = None) -> int:
    code, report, message = dispatch(sys.argv[1:] if argv is None else argv)
    if message:
        print(f"tmwqo: {message}", file=sys.stderr)
    if report is not None:
        print(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
