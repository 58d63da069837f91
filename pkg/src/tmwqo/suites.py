"""Seeded property suites. Each returns a JSON-ready report whose content
depends only on its parameters."""
from __future__ import annotations

from . import oracles
from .assemblage import (AssemblageError, claim_checks, clear_simulation_memo, gamma_elevation,
                         graph_as_assemblage, simulates, simulation_violation)
from .flows import max_disjoint_paths
from .generators import (driver_graph, progress_instance, random_multigraph, random_vertex_sets,
                         rng_for, shift_instance, simulation_pair, unimpeded_instance,
                         unintegrated_instance, unlinked_instance)
from .graph import dumps, graph_to_obj, make_graph
from .qorder import FiniteQuasiOrder
from .refine import (compare_signatures, improve_unintegrated, improve_unlinked, is_incorporated,
                     refine_driver, shift_conclusion_violation, shift_separation, signature,
                     witness_violation)
from .separations import is_pseudo_edge_cut
from .strips import depth_and_elevation, progress_shift
from .topominor import antichain_member, contains_rc, find_embedding, labelled_antichain_member, verify_embedding
from .treedecomp import decomposition_to_obj, metrics, path_decomposition, validate


def _report(name: str, params: dict, results: list, extra: dict | None = None) -> dict:
    fails = [r for r in results if not r.get("ok")]
    out = {"suite": name, "params": params, "passed": len(results) - len(fails), "total": len(results),
           "ok": not fails, "failures": fails[:20]}
    if extra:
        out.update(extra)
    return out


def antichain_unlabelled(max_len: int = 5) -> dict:
    res = []
    for i in range(1, max_len + 1):
        for j in range(1, max_len + 1):
            if i != j:
                e = find_embedding(antichain_member(i), antichain_member(j))
                res.append({"pair": [i, j], "contained": e is not None, "ok": e is None})
    return _report("antichain", {"max_len": max_len}, res)


def antichain_labelled(max_len: int = 4) -> dict:
    q = FiniteQuasiOrder(("x", "y"), frozenset({("x", "x"), ("y", "y"), ("y", "x")}))
    res = []
    for i in range(1, max_len + 1):
        for j in range(1, max_len + 1):
            if i != j:
                e = find_embedding(labelled_antichain_member(i), labelled_antichain_member(j), q)
                res.append({"pair": [i, j], "contained": e is not None, "ok": e is None})
    return _report("labelled-antichain", {"max_len": max_len}, res)


def menger(count: int = 500, seed: int = 0, max_vertices: int = 8) -> dict:
    res = []
    for s in range(seed, seed + count):
        rng = rng_for(s, "menger")
        g = random_multigraph(rng, rng.randint(1, max_vertices), rng.randint(0, 6),
                              connected=rng.random() < 0.7)
        X, Y = random_vertex_sets(rng, g)
        flow = len(max_disjoint_paths(g, X, Y))
        cut = oracles.min_separator_size(g, X, Y)
        res.append({"seed": s, "paths": flow, "cut": cut, "ok": flow == cut})
    return _report("menger", {"count": count, "seed": seed}, res)


def embedding(count: int = 300, seed: int = 0) -> dict:
    res = []
    for s in range(seed, seed + count):
        rng = rng_for(s, "embed")
        g = random_multigraph(rng, rng.randint(2, 6), rng.randint(0, 4), loops=True)
        while g.m > 9:
            g = random_multigraph(rng, rng.randint(2, 6), rng.randint(0, 3), loops=True)
        h = random_multigraph(rng, rng.randint(1, 4), rng.randint(0, 3), loops=True,
                              connected=rng.random() < 0.7)
        e = find_embedding(h, g)
        want = oracles.embeds(h, g)
        ok = (e is not None) == want and (e is None or verify_embedding(e, h, g) is None)
        res.append({"seed": s, "found": e is not None, "exhaustive": want, "ok": ok})
    return _report("embed-oracle", {"count": count, "seed": seed}, res)


def lemma41(count: int = 500, seed: int = 0) -> dict:
    res = []
    for s in range(seed, seed + count):
        inst = shift_instance(rng_for(s, "shift"))
        d = inst.decomposition
        after = shift_separation(d, inst.t1, inst.t2, inst.separation)
        err = shift_conclusion_violation(d, inst.t1, inst.t2, inst.separation, after)
        res.append({"seed": s, "error": err, "ok": err is None})
    return _report("lemma41", {"count": count, "seed": seed}, res)


def lemma33(count: int = 200, seed: int = 0) -> dict:
    res = []
    for s in range(seed, seed + count):
        inst = progress_instance(rng_for(s, "progress"))
        d = inst.decomposition
        sep = progress_shift(d, inst.t1, inst.t2, inst.t3, inst.paths, inst.r)
        ok = (oracles.breadth(d.host, sep.A, sep.B)[0] == len(d.bags[inst.t1])
              and all(oracles._pointed(d.host, sep.A, sep.B, v) for v in sep.A & sep.B)
              and d.down(inst.t1) <= sep.A and d.up(inst.t3) <= sep.B
              and oracles.is_separation(d.host, sep.A, sep.B))
        res.append({"seed": s, "s": len(inst.paths), "r": inst.r, "ok": bool(ok)})
    return _report("lemma33", {"count": count, "seed": seed}, res)


def _improvement_result(d, nd, sep) -> dict:
    g = d.host
    valid = validate(nd) is None and oracles.decomposition_is_valid(g, nd.parent, nd.bags)
    width_ok = metrics(nd)["width"] <= metrics(d)["width"]
    old = oracles.signature_counts(g, d.parent, d.bags)
    new = oracles.signature_counts(g, nd.parent, nd.bags)
    cmp = oracles.compare_counts(old, new, g.n)
    inc = oracles.incorporated(g, nd.parent, nd.bags, sep.A, sep.B)
    wit = is_incorporated(nd, sep)
    wit_ok = wit is not None and witness_violation(nd, sep, wit.nodes) is None
    return {"valid": valid, "width_ok": width_ok, "signature": cmp, "incorporated": inc,
            "witness_ok": wit_ok,
            "ok": valid and width_ok and cmp == "greater" and inc and wit_ok}


def lemma43(count: int = 100, seed: int = 0) -> dict:
    res = []
    for s in range(seed, seed + count):
        inst = unlinked_instance(rng_for(s, "unlinked"))
        nd = improve_unlinked(inst.decomposition, inst.t1, inst.t2, inst.separation)
        r = _improvement_result(inst.decomposition, nd, inst.separation)
        r["seed"] = s
        res.append(r)
    return _report("lemma43", {"count": count, "seed": seed}, res)


def lemma44(count: int = 100, seed: int = 0) -> dict:
    res = []
    for s in range(seed, seed + count):
        inst = unintegrated_instance(rng_for(s, "unintegrated"))
        nd = improve_unintegrated(inst.decomposition, inst.chain, inst.sep1, inst.sep2)
        r = _improvement_result(inst.decomposition, nd, inst.sep2)
        r["seed"] = s
        res.append(r)
    return _report("lemma44", {"count": count, "seed": seed}, res)


def _replay(g, d) -> dict:
    """Inputs that reproduce a failure through the command line."""
    return {"graph": graph_to_obj(g), "td": decomposition_to_obj(d)}


def _driver_corpus(count: int, seed: int):
    for s in range(seed, seed + count):
        g, d = driver_graph(rng_for(s, "driver"))
        for N in (1, 2, 3):
            yield s, N, g, d, refine_driver(g, d, N, max_steps=200)


def driver(count: int = 100, seed: int = 0) -> dict:
    res = []
    for s, N, g, d, out in _driver_corpus(count, seed):
        D = out.decomposition
        steps = [t["step"] for t in out.trace]
        old = oracles.signature_counts(g, d.parent, d.bags)
        increasing = True
        for t in out.trace:
            new = {(i, j): c for i, j, c in t["signature"] if c}
            if t["step"] != "normalize" and oracles.compare_counts(old, new, g.n) != "greater":
                increasing = False
            if t["step"] == "normalize" and oracles.compare_counts(old, new, g.n) == "less":
                increasing = False
            old = new
        linked = oracles.n_linked(g, D.parent, D.bags, N)
        integrated = oracles.n_integrated(g, D.parent, D.bags, N)
        nested = metrics(D)["nested_edges"]
        ok = out.status == "done" and linked and integrated and nested and increasing
        res.append({"seed": s, "N": N, "status": out.status, "steps": steps, "linked": linked,
                    "integrated": integrated, "nested": nested, "signature_increasing": increasing,
                    "ok": ok})
        if not ok:
            res[-1]["counterexample"] = _replay(g, d)
    return _report("driver", {"count": count, "seed": seed}, res)


def lemma42(count: int = 100, seed: int = 0) -> dict:
    res = []
    for s, N, g, d, out in _driver_corpus(count, seed):
        D = out.decomposition
        ok = oracles.weakly_linked(g, D.parent, D.bags, N)
        res.append({"seed": s, "N": N, "ok": ok})
        if not ok:
            res[-1]["counterexample"] = _replay(g, D)
    return _report("lemma42", {"count": count, "seed": seed}, res)


def lemma73(count: int = 100, seed: int = 0) -> dict:
    res = []
    for s, N, g, d, out in _driver_corpus(count, seed):
        D = out.decomposition
        try:
            _, _, rep = graph_as_assemblage(g, D, metrics(D)["width"], N)
        except AssemblageError as exc:
            res.append({"seed": s, "N": N, "error": str(exc), "ok": False})
            continue
        ok = rep["realizer_elevation"] == rep["elevation"] and rep["unimpeded_2N"]
        res.append({"seed": s, "N": N, **rep, "ok": ok})
        if not ok:
            res[-1]["counterexample"] = _replay(g, D)
    return _report("lemma73", {"count": count, "seed": seed}, res)


def lemma62(count: int = 200, seed: int = 0) -> dict:
    res = []
    clear_simulation_memo()
    for s in range(seed, seed + count):
        (S, ad), (S2, ad2) = simulation_pair(rng_for(s, "simulation"))
        w = simulates(S, S2)
        ok = w is not None and simulation_violation(S, S2, w) is None
        res.append({"seed": s, "vertices": [S.graph.n, S2.graph.n], "ok": ok})
    return _report("lemma62", {"count": count, "seed": seed}, res)


def _claim_results(count: int, seed: int) -> list[dict]:
    res = []
    clear_simulation_memo()
    for s in range(seed, seed + count):
        N = 1 + (s % 3)
        S, ad, rep = unimpeded_instance(rng_for(s, "unimpeded"), N=N)
        c = claim_checks(S, ad, rep)
        claim1 = not c["levels_over_bound"]
        claim3 = c["decoration_violation"] is None
        claim4 = not c["simulation_failures"]
        res.append({"seed": s, "N": N, "h": rep.h, "d": rep.d, "N_prime": rep.N_prime,
                    "max_level": max(rep.levels.values()), "precedes_pairs": c["precedes_pairs"],
                    "claim1": claim1, "claim3": claim3, "claim4": claim4,
                    "simulation_failures": [list(x) for x in c["simulation_failures"]],
                    "ok": claim1 and claim3 and claim4})
    return res


def claims(count: int = 100, seed: int = 0) -> dict:
    return _report("claims", {"count": count, "seed": seed}, _claim_results(count, seed))


def claim3(count: int = 100, seed: int = 0) -> dict:
    """Levels within the bound and a well-formed decoration."""
    res = [{**r, "ok": r["claim1"] and r["claim3"]} for r in _claim_results(count, seed)]
    return _report("claim3", {"count": count, "seed": seed}, res)


def claim4(count: int = 100, seed: int = 0) -> dict:
    """Every precedes pair has simulating branches."""
    res = [{**r, "ok": r["claim4"]} for r in _claim_results(count, seed)]
    return _report("claim4", {"count": count, "seed": seed}, res)


def lemma21_instances() -> list[dict]:
    """Hand-built corridors: bags of size one (plus Z) along a path, each
    consecutive pair joined by two edge-disjoint paths."""
    out = []

    def corridor(r, link, Z=()):
        vs = [f"v{i}" for i in range(r)] + list(Z)
        es = []
        bags = []
        for i in range(r - 1):
            a, b = f"v{i}", f"v{i + 1}"
            mids = []
            if link == "double":
                es += [(a, b), (a, b)]
            elif link == "square":
                x, y = f"p{i}", f"q{i}"
                vs += [x, y]
                mids = [x, y]
                es += [(a, x), (x, b), (a, y), (y, b)]
            elif link == "mixed":
                if i % 2:
                    es += [(a, b), (a, b)]
                else:
                    x = f"p{i}"
                    vs.append(x)
                    mids = [x]
                    es += [(a, b), (a, x), (x, b)]
            bags.append([a] + list(Z))
            bags.append([a, b] + mids + list(Z))
        bags.append([f"v{r - 1}"] + list(Z))
        for z in Z:
            es += [(z, f"v{i}") for i in range(0, r, 2)]
        g = make_graph(vs, es)
        d = path_decomposition(g, bags)
        nodes = [f"t{2 * i:02d}" for i in range(r)]
        return g, d, nodes

    for k, r, link, Z in [(1, 6, "double", ()), (1, 36, "square", ("z",)), (1, 7, "mixed", ()),
                          (2, 11, "double", ()), (2, 11, "mixed", ())]:
        g, d, nodes = corridor(r, link, Z)
        out.append({"k": k, "graph": g, "decomposition": d, "nodes": nodes, "Z": frozenset(Z)})
    return out


def lemma21_hypotheses(inst: dict) -> str | None:
    """Checks the corridor hypotheses for the two-edge-disjoint-path case."""
    from .flows import two_edge_disjoint_paths
    g, d, nodes, Z, k = inst["graph"], inst["decomposition"], inst["nodes"], inst["Z"], inst["k"]
    bags = [d.bags[t] for t in nodes]
    if any(not Z <= b for b in bags):
        return "Z not in every bag"
    rest = [b - Z for b in bags]
    if len({len(x) for x in rest}) != 1:
        return "residues differ in size"
    for i in range(len(rest)):
        for j in range(i + 1, len(rest)):
            if rest[i] & rest[j]:
                return "residues overlap"
    s = len(bags[0])
    if len(max_disjoint_paths(g, bags[0], bags[-1])) < s:
        return "no full linkage"
    h = g.subgraph(g.vset - Z)
    for a, b in zip(nodes, nodes[1:]):
        (u,), (w,) = d.bags[a] - Z, d.bags[b] - Z
        avoid = (d.bags[a] | d.bags[b]) - Z - {u, w}
        if not two_edge_disjoint_paths(h, u, w, avoid):
            return f"no two edge-disjoint paths between {u} and {w}"
    r = len(nodes)
    if r < k * (k + 1) * s ** (2 * k + 2) + k + 3:
        return "corridor too short"
    return None


def lemma21() -> dict:
    res = []
    for i, inst in enumerate(lemma21_instances()):
        hyp = lemma21_hypotheses(inst)
        g = inst["graph"].subgraph(inst["graph"].vset - inst["Z"])
        found = contains_rc(g, inst["k"])
        res.append({"instance": i, "k": inst["k"], "hypotheses": hyp, "contains": found,
                    "ok": hyp is None and found})
    return _report("lemma21", {}, res)


SUITES = {
    "antichain": antichain_unlabelled,
    "labelled-antichain": antichain_labelled,
    "menger": menger,
    "embed-oracle": embedding,
    "lemma41": lemma41,
    "lemma33": lemma33,
    "lemma43": lemma43,
    "lemma44": lemma44,
    "driver": driver,
    "lemma42": lemma42,
    "lemma62": lemma62,
    "claims": claims,
    "claim3": claim3,
    "claim4": claim4,
    "lemma73": lemma73,
    "lemma21": lemma21,
}


def run_suite(name: str, **params) -> dict:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](**params)


def report_text(rep: dict) -> str:
    return dumps(rep)
