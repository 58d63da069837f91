"""Every acceptance criterion at full size, one pass/fail line per criterion."""
import json
import os
import subprocess
import sys
import time

import pytest

from tmwqo.assemblage import (anchored_from_obj, assemblage_from_obj, assemblage_to_obj)
from tmwqo.decorated import decorated_from_obj, decorated_to_obj
from tmwqo.generators import (random_anchored, random_decomposition, random_multigraph, rng_for,
                              unimpeded_instance)
from tmwqo.graph import dumps, graph_from_obj, graph_to_obj
from tmwqo.qorder import quasi_order_from_obj
from tmwqo.suites import run_suite
from tmwqo.topominor import march_from_obj
from tmwqo.treedecomp import decomposition_from_obj, decomposition_to_obj

pytestmark = pytest.mark.slow

REPORTS: dict[str, str] = {}


def check(capsys, label, suite, limit_s=None, **params):
    start = time.perf_counter()
    rep = run_suite(suite, **params)
    elapsed = time.perf_counter() - start
    REPORTS[suite] = dumps(rep)
    in_time = limit_s is None or elapsed < limit_s
    ok = rep["passed"] == rep["total"] and rep["total"] > 0 and in_time
    limit = "" if limit_s is None else f" (limit {limit_s:.0f}s)"
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {rep['passed']}/{rep['total']} "
              f"in {elapsed:.1f}s{limit}")
    return rep, elapsed


def test_unlabelled_antichain(capsys):
    rep, t = check(capsys, "unlabelled antichain, lengths 1-5", "antichain", 120, max_len=5)
    assert rep["total"] == 20 and rep["ok"] and t < 120


def test_labelled_antichain(capsys):
    rep, t = check(capsys, "labelled antichain, lengths 1-4", "labelled-antichain", 60, max_len=4)
    assert rep["total"] == 12 and rep["ok"] and t < 60


def test_menger_duality(capsys):
    rep, t = check(capsys, "Menger duality", "menger", 60, count=500)
    assert rep["total"] == 500 and rep["ok"] and t < 60


def test_embedding_oracle(capsys):
    rep, _ = check(capsys, "embedding soundness and completeness", "embed-oracle", count=300)
    assert rep["total"] == 300 and rep["ok"]


def test_shift_separation(capsys):
    rep, _ = check(capsys, "shifted separation conclusions", "lemma41", count=500)
    assert rep["total"] == 500 and rep["ok"]


def test_progress_shift(capsys):
    rep, _ = check(capsys, "progress shift pseudo-edge-cut", "lemma33", count=200)
    assert rep["total"] == 200 and rep["ok"]


def test_unlinked_improvement(capsys):
    rep, t = check(capsys, "unlinked improvement", "lemma43", 600, count=100)
    assert rep["total"] == 100 and rep["ok"] and t < 600


def test_unintegrated_improvement(capsys):
    rep, t = check(capsys, "unintegrated improvement", "lemma44", 600, count=100)
    assert rep["total"] == 100 and rep["ok"] and t < 600


def test_refinement_driver(capsys):
    rep, _ = check(capsys, "refinement driver, N in {1,2,3}", "driver", count=100)
    assert rep["total"] == 300 and rep["ok"]


def test_weak_linkage_of_driver_output(capsys):
    rep, _ = check(capsys, "equal-size precursor chains are linked", "lemma42", count=100)
    assert rep["total"] == 300 and rep["ok"]


def test_simulation_from_encodings(capsys):
    rep, _ = check(capsys, "simulation lifts from root encodings", "lemma62", count=200)
    assert rep["total"] == 200 and rep["ok"]


def test_levels_and_decoration(capsys):
    rep, _ = check(capsys, "level bound and decoration validity", "claim3", count=100)
    assert rep["total"] == 100 and rep["ok"]


def test_precedes_pairs_simulate(capsys):
    rep, _ = check(capsys, "precedes pairs give simulating branches", "claim4", count=100)
    assert rep["total"] == 100 and rep["ok"]


def test_realizer_elevation_equality(capsys):
    rep, _ = check(capsys, "realizer elevation equals elevation", "lemma73", count=100)
    assert rep["total"] == 300
    assert rep["passed"] == rep["total"], json.dumps(rep["failures"][:3])


def test_corridor_contains_chain(capsys):
    rep, _ = check(capsys, "corridor instances contain the chain", "lemma21")
    assert rep["total"] == 5 and rep["ok"]


def _round_trips() -> list[str]:
    bad = []
    for s in range(100):
        rng = rng_for(s, "round-trip")
        g = random_multigraph(rng, rng.randint(0, 8), rng.randint(0, 8), loops=True)
        text = dumps(graph_to_obj(g))
        if dumps(graph_to_obj(graph_from_obj(json.loads(text)))) != text:
            bad.append(f"graph {s}")
        if g.n:
            d = random_decomposition(rng, g)
            text = dumps(decomposition_to_obj(d))
            if dumps(decomposition_to_obj(decomposition_from_obj(g, json.loads(text)))) != text:
                bad.append(f"decomposition {s}")
        S, ad = random_anchored(rng)
        text = dumps(assemblage_to_obj(S))
        if dumps(assemblage_to_obj(assemblage_from_obj(json.loads(text)))) != text:
            bad.append(f"assemblage {s}")
        text = dumps(ad.to_obj())
        if dumps(anchored_from_obj(S, json.loads(text)).to_obj()) != text:
            bad.append(f"anchored decomposition {s}")
        for m in S.Gamma:
            if dumps(march_from_obj(json.loads(dumps(m.to_obj()))).to_obj()) != dumps(m.to_obj()):
                bad.append(f"march {s}")
        text = dumps(S.order.to_obj())
        if dumps(quasi_order_from_obj(json.loads(text)).to_obj()) != text:
            bad.append(f"order {s}")
    for s in range(30):
        _, _, rep = unimpeded_instance(rng_for(s, "round-trip-decorated"), N=1 + s % 3)
        text = dumps(decorated_to_obj(rep.tree))
        if dumps(decorated_to_obj(decorated_from_obj(json.loads(text)))) != text:
            bad.append(f"decorated tree {s}")
    return bad


SECOND_RUN = """
import sys
from tmwqo.graph import dumps
from tmwqo.suites import run_suite
for name in sys.argv[1:]:
    print(name + "\\t" + dumps(run_suite(name)))
"""


def test_determinism_and_round_trip(capsys):
    bad = _round_trips()
    names = ["antichain", "labelled-antichain", "menger", "embed-oracle", "lemma41", "lemma33",
             "lemma43", "lemma44", "driver", "lemma42", "lemma62", "claim3", "claim4", "lemma73",
             "lemma21"]
    for name in names:
        if name not in REPORTS:
            REPORTS[name] = dumps(run_suite(name))
    # a fresh interpreter with a different hash seed
    env = dict(os.environ, PYTHONHASHSEED="12345")
    out = subprocess.run([sys.executable, "-c", SECOND_RUN, *names], capture_output=True,
                         text=True, env=env, check=True).stdout
    second = dict(line.split("\t", 1) for line in out.splitlines())
    differ = [n for n in names if second.get(n) != REPORTS[n]]
    ok = not bad and not differ
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] determinism and round-trip: "
              f"{len(names) - len(differ)}/{len(names)} suite reports identical, "
              f"{len(bad)} round-trip mismatches")
    assert not bad, bad
    assert not differ, differ
