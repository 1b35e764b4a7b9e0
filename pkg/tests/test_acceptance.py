"""Acceptance criteria 1-9.

Each test records a one-line PASS/FAIL verdict that is printed in the
"acceptance criteria" section at the end of the pytest run.
"""

import itertools
import math
import random
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from margmap.anonymize import anonymize, nominal_mappings
from margmap.cli import run
from margmap.dataset import Attribute, Kind, MicrodataTable, Schema, invert_mapping, load_schema, load_table, read_table
from margmap.distance import build_context, sse_distance
from margmap.labeling import compare_samples, hierarchical_variance_exact
from margmap.marginality import (
    WeightMode,
    WeightTable,
    marginality_naive_oracle,
    marginality_vector,
    node_distance,
    pairwise_distances,
)
from margmap.stats import mean_nominal, variance_nominal

from helpers import DATA, ex1, full_tree, random_record, random_sample, random_table, random_taxonomy

REPORTS = Path(__file__).parent.parent / "reports"
TRIANGLE_RTOL = 1e-9
COLLINEAR_RTOL = 1e-12


@pytest.fixture(scope="module")
def corpus():
    """50 random taxonomies, at most 100 nodes and depth 8, fixed seeds."""
    return [random_taxonomy(random.Random(1000 + i), max_nodes=100, max_depth=8, min_nodes=5)
            for i in range(50)]


def test_c1_metric_axioms(corpus, criterion):
    start = time.perf_counter()
    bad = 0
    triples = 0
    for t in corpus:
        nodes = list(t)
        d = pairwise_distances(t, WeightTable(t.height), nodes)
        off = ~np.eye(len(nodes), dtype=bool)
        bad += int((np.diag(d) != 0).sum())
        bad += int((d[off] <= 0).sum())
        bad += int((d != d.T).sum())
        for y in range(len(nodes)):
            # d[x, z] <= d[x, y] + d[y, z] for all x, z
            bad += int((d > d[:, y][:, None] + d[y, :][None, :]).sum())
        triples += len(nodes) ** 3
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 30
    criterion(1, "tree distance metric axioms", ok, f"{triples} triples, {bad} violations, {elapsed:.2f}s")
    assert bad == 0
    assert elapsed < 30


def _diameters(t, d, index):
    out = {}
    for v in t:
        sub = [index[u] for u in [v] + t.descendants(v)]
        out[v] = int(d[np.ix_(sub, sub)].max())
    return out


def test_c2_hierarchy_separation(corpus, criterion):
    bad = 0
    for t in corpus:
        nodes = list(t)
        index = {v: i for i, v in enumerate(nodes)}
        d = pairwise_distances(t, WeightTable(t.height), nodes)
        for v in nodes:
            if v == t.root:
                continue
            up = d[index[v], index[t.parent(v)]]
            for u in t.descendants(v):
                bad += int(up <= d[index[v], index[u]])
        diam = _diameters(t, d, index)
        for x, y in itertools.combinations(nodes, 2):
            if t.depth(x) == t.depth(y):
                bad += int(d[index[x], index[y]] <= max(diam[x], diam[y]))

    # boundary gaps on a full binary tree of height 3
    ft = full_tree(2, 3)
    L = ft.height
    nodes = list(ft)
    index = {v: i for i, v in enumerate(nodes)}
    d = pairwise_distances(ft, WeightTable(L), nodes)
    diam = _diameters(ft, d, index)
    gaps_ok = True
    for v in nodes:
        dj = ft.depth(v)
        if v != ft.root:
            up = int(d[index[v], index[ft.parent(v)]])
            gaps_ok &= up == 2 ** (L - dj)
            if dj < L:
                down = max(int(d[index[v], index[u]]) for u in ft.descendants(v))
                gaps_ok &= down == 2 ** (L - dj) - 1 and up - down == 1
        for w in ft.children(ft.parent(v)) if v != ft.root else ():
            if w != v:
                sib = int(d[index[v], index[w]])
                gaps_ok &= sib == 2 ** (L - dj + 1)
                gaps_ok &= diam[v] == 2 ** (L - dj + 1) - 2 and sib - diam[v] == 2
    ok = bad == 0 and gaps_ok
    criterion(2, "parent/descendant and equal-depth separation", ok,
              f"{bad} violations, full-tree gaps {'exact' if gaps_ok else 'WRONG'}")
    assert bad == 0
    assert gaps_ok


def test_c3_ex1_fixture(criterion):
    t = ex1()
    s = ["a1", "a2", "B"]
    checks = {
        "m-vector": marginality_vector(t, s).values == [7, 7, 10],
        "oracle m-vector": marginality_naive_oracle(t, s).values == [7, 7, 10],
        "Var_M": variance_nominal(t, s) == 8,
        "mean": (lambda m: (m.category, m.marginality, m.tied_categories) == ("a1", 7, ("a1", "a2")))(
            mean_nominal(t, s)),
        "Var_H": abs(float(hierarchical_variance_exact(t, s)) - 10 / 9) <= 1e-12,
        "Var_H exact": hierarchical_variance_exact(t, s) == Fraction(10, 9),
        "pair Var_M": variance_nominal(t, ["a1", "a2"]) == 2 == node_distance(t, WeightTable(2), "a1", "a2"),
    }
    failed = [k for k, v in checks.items() if not v]
    criterion(3, "EX1 hand-derived values", not failed, "all match" if not failed else f"failed: {failed}")
    assert not failed


def test_c4_oracle_equivalence(criterion):
    start = time.perf_counter()
    mismatches = 0
    for i in range(1000):
        rng = random.Random(5000 + i)
        t = random_taxonomy(rng, max_nodes=100, max_depth=8)
        s = random_sample(rng, t, 50)
        mode = WeightMode.FIXED if i % 2 == 0 else WeightMode.PRUNED
        fast = marginality_vector(t, s, mode)
        slow = marginality_naive_oracle(t, s, mode)
        mismatches += fast.per_element != slow.per_element
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 10
    criterion(4, "fast marginality equals naive double loop", ok,
              f"1000 instances, {mismatches} mismatches, {elapsed:.2f}s")
    assert mismatches == 0
    assert elapsed < 10


def test_c5_sse_metric_suite(criterion):
    rng = random.Random(77)
    stats = Counter()
    triples = 0
    while triples < 10_000:
        table = random_table(rng, n_rows=30, max_attrs=5)
        ctx = build_context(table)
        for _ in range(250):
            a, b, c = (random_record(rng, table.schema) for _ in range(3))
            dab, dba = sse_distance(a, b, ctx), sse_distance(b, a, ctx)
            dbc, dac = sse_distance(b, c, ctx), sse_distance(a, c, ctx)
            stats["symmetry"] += dab != dba
            stats["non-negativity"] += min(dab, dbc, dac) < 0
            stats["identity"] += (dab == 0) != (a == b)
            stats["triangle"] += dac - (dab + dbc) > TRIANGLE_RTOL * max(dac, dab + dbc)
            triples += 1

    schema = Schema((Attribute("v", Kind.NUMERICAL),))
    for _ in range(1000):
        x1, x2, x3 = sorted(rng.uniform(-1e3, 1e3) for _ in range(3))
        ctx = build_context(MicrodataTable(schema, ((x1,), (x2,), (x3,))))
        lhs = sse_distance((x1,), (x3,), ctx)
        rhs = sse_distance((x1,), (x2,), ctx) + sse_distance((x2,), (x3,), ctx)
        stats["collinear equality"] += abs(lhs - rhs) > COLLINEAR_RTOL * max(lhs, rhs)
    ok = sum(stats.values()) == 0
    criterion(5, "SSE-distance metric suite", ok,
              f"{triples} mixed triples, violations {dict(stats) or 0}")
    assert ok, dict(stats)


def test_c6_equivalence_harness(capsys, criterion):
    code = run(["equivalence-check", str(DATA / "ex1.csv"), "--n", "2"])
    out, _ = capsys.readouterr()
    lines = out.splitlines()
    pairs, agreements, ties, violations = map(int, lines[1].split(","))
    archived = (REPORTS / "equivalence_ex1_n2.csv").read_text()
    sibling_vs_cousin = compare_samples(ex1(), ["a1", "a2"], ["a1", "B"])
    checks = {
        "exit code": code == 0,
        "105 pairs": pairs == 105,
        "counts add up": agreements + ties + violations == 105,
        "violations listed verbatim": len(lines) == 3 + violations,
        "sibling vs cousin agrees": sibling_vs_cousin == "agreement",
        "matches archived report": out == archived,
    }
    failed = [k for k, v in checks.items() if not v]
    criterion(6, "order-agreement harness report integrity", not failed,
              f"{agreements} agree, {ties} ties, {violations} violations logged" if not failed else f"failed: {failed}")
    assert not failed


def test_c7_siblings_vs_non_siblings(corpus, criterion):
    bad = 0
    comparisons = 0
    for t in corpus:
        leaves = [v for v in t if not t.children(v)]
        by_depth = {}
        for v in leaves:
            by_depth.setdefault(t.depth(v), []).append(v)
        for level in by_depth.values():
            pairs = list(itertools.combinations(sorted(level), 2))
            sib = [p for p in pairs if t.parent(p[0]) == t.parent(p[1])]
            non = [p for p in pairs if t.parent(p[0]) != t.parent(p[1])]
            if not sib or not non:
                continue
            for measure in (
                lambda p: variance_nominal(t, list(p), WeightMode.FIXED),
                lambda p: variance_nominal(t, list(p), WeightMode.PRUNED),
                lambda p: hierarchical_variance_exact(t, p),
            ):
                sv = [measure(p) for p in sib]
                nv = [measure(p) for p in non]
                bad += sum(1 for a in sv for b in nv if not a < b)
                comparisons += len(sv) * len(nv)
    criterion(7, "sibling pairs spread less than equal-depth non-siblings", bad == 0,
              f"{comparisons} comparisons, {bad} violations")
    assert comparisons > 0
    assert bad == 0


def _fixtures():
    tax = ex1()
    ex1_table = MicrodataTable(Schema((Attribute("X", Kind.NOMINAL, taxonomy=tax),)),
                               (("a1",), ("a2",), ("B",), ("a1",), ("B",)))
    mixed = read_table(DATA / "mixed.csv", load_schema(DATA / "mixed.ini"))
    return [("ex1", ex1_table, 2), ("mixed", mixed, 2), ("mixed", mixed, 3), ("mixed", mixed, 5)]


def test_c8_reversibility(criterion):
    problems = []
    for name, table, k in _fixtures():
        before = {a: m.to_csv() for a, m in nominal_mappings(table).items()}
        result = anonymize(table, k)
        after = {a: m.to_csv() for a, m in nominal_mappings(table).items()}
        if before != after or {a: m.to_csv() for a, m in result.mappings.items()} != before:
            problems.append(f"{name} k={k}: mapping changed")
        for attr, mapping in result.mappings.items():
            tax = table.schema[attr].taxonomy
            lookup = {c: m for c, m, _ in mapping.entries}
            for x in set(table.column(attr)):
                if x not in invert_mapping(mapping, lookup[x], tax):
                    problems.append(f"{name} k={k}: {attr}={x} does not invert")
            for x in set(result.table.column(attr)):
                if x not in lookup:
                    problems.append(f"{name} k={k}: released {attr}={x} not in mapping")
    criterion(8, "marginality mapping untouched by anonymization", not problems,
              f"{len(_fixtures())} fixture runs" if not problems else "; ".join(problems))
    assert not problems


def test_c9_end_to_end(tmp_path, capsys, criterion):
    out = tmp_path / "released.csv"
    start = time.perf_counter()
    code = run(["anonymize", str(DATA / "mixed.ini"), str(DATA / "mixed.csv"), "--k", "2", "--out", str(out)])
    elapsed = time.perf_counter() - start
    capsys.readouterr()
    schema = load_schema(DATA / "mixed.ini")
    released = load_table(out.read_text(encoding="utf-8"), schema)
    groups = Counter(int(line.split(",")[1])
                     for line in (tmp_path / "released.groups.csv").read_text().splitlines()[1:])
    sizes = sorted(groups.values())
    ok = code == 0 and elapsed < 5 and released.n == 20 and all(2 <= s <= 3 for s in sizes)
    criterion(9, "end-to-end anonymize k=2 on 20-row mixed fixture", ok,
              f"{elapsed:.2f}s, group sizes {sizes}")
    assert code == 0
    assert elapsed < 5
    assert released.n == 20
    assert all(2 <= s <= 3 for s in sizes)
