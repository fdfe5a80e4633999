"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Criteria with a runtime budget time themselves and assert the bound.
"""

from __future__ import annotations

import random
import sys
import time

import numpy as np
import pytest

from clgrouper import (
    SpanningTree,
    VertexRanking,
    additive_distances,
    clgrouping,
    count_leaves,
    enumerate_msts,
    gen_balanced,
    gen_caterpillar,
    gen_random,
    kruskal_vertex_ranked,
    min_leaf_vrmst,
    min_leaf_vrmst_bruteforce,
    mst_max_degrees_bruteforce,
    surrogate_map,
    trees_equal,
    weight_class_sweep,
)
from conftest import BAD_MST_EDGES, connected_in, quantize_lengths


def _report(name: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}  [{detail}]"
    print(f"\n{line}")
    if sys.stdout is not sys.__stdout__:
        # Also reach the real terminal when pytest captures output.
        print(line, file=sys.__stdout__)
    assert ok, f"{name}: {detail}"


def _general_labeled(base_n: int, seed: int, max_taxa: int):
    """Tree with at least one labeled internal vertex, within the size bound."""
    for salt in range(100):
        tree = gen_random(base_n, general_labels=True, seed=seed + 7919 * salt)
        promoted = any(t.startswith("x") for t in tree.taxa)
        if promoted and len(tree.taxa) <= max_taxa:
            return tree
    raise AssertionError("could not draw a bounded generally-labeled tree")


@pytest.fixture(scope="module")
def consistency_corpus():
    """200 trees with rankings, 4..20 taxa, at least 50 generally labeled."""
    corpus = []
    for seed in range(200):
        rng = random.Random(seed)
        kind = seed % 4
        if kind == 0:
            tree = gen_caterpillar(rng.randint(4, 20), clock=bool(seed % 8), seed=seed)
        elif kind == 1:
            tree = gen_balanced(rng.randint(2, 4), clock=bool(seed % 8), seed=seed)
        elif kind == 2:
            tree = gen_random(rng.randint(4, 20), seed=seed)
        else:
            tree = _general_labeled(rng.randint(4, 13), seed, max_taxa=20)
        corpus.append((tree, VertexRanking.shuffled(tree.taxa, rng)))
    general = sum(1 for t, _ in corpus if any(x.startswith("x") for x in t.taxa))
    assert general >= 50
    assert all(4 <= len(t.taxa) <= 20 for t, _ in corpus)
    return corpus


@pytest.fixture(scope="module")
def small_corpus():
    """50 tree-additive matrices with at most 8 taxa, tie-rich shapes included."""
    matrices = []
    for seed in range(50):
        rng = random.Random(1000 + seed)
        n = rng.randint(4, 8)
        kind = seed % 5
        if kind == 0:
            tree = gen_caterpillar(n, clock=True, seed=seed)
        elif kind == 1:
            tree = gen_balanced(rng.choice([2, 3]), clock=True, seed=seed)
        elif kind == 2:
            tree = quantize_lengths(gen_random(n, seed=seed), seed)
        elif kind == 3:
            tree = quantize_lengths(_general_labeled(rng.randint(4, 6), seed, 8), seed)
        else:
            tree = gen_random(n, seed=seed)
        matrices.append(additive_distances(tree))
    return matrices


@pytest.fixture(scope="module")
def small_corpus_msts(small_corpus):
    return [enumerate_msts(m) for m in small_corpus]


def test_criterion_1_consistency(consistency_corpus):
    """Tree -> distances -> ranked MST (random ranking) -> grouping is identity."""
    start = time.perf_counter()
    good = 0
    for tree, ranking in consistency_corpus:
        matrix = additive_distances(tree)
        mst = kruskal_vertex_ranked(matrix, ranking)
        good += trees_equal(clgrouping(matrix, mst, 1e-9), tree, 1e-6)
    elapsed = time.perf_counter() - start
    _report(
        "1 consistency",
        good == 200 and elapsed < 60.0,
        f"{good}/200 reconstructed, {elapsed:.1f}s (< 60s)",
    )


def test_criterion_2_ambiguity_witness(caterpillar5, caterpillar5_matrix):
    """One plain MST misleads the grouping; every ranked MST reconstructs."""
    matrix = caterpillar5_matrix
    bad = SpanningTree(matrix.taxa, {e: matrix.d(*e) for e in BAD_MST_EDGES})
    got = additive_distances(clgrouping(matrix, bad, 1e-9))
    deviation = float(np.max(np.abs(got.values - matrix.values)))
    exact = all(
        trees_equal(
            clgrouping(matrix, kruskal_vertex_ranked(matrix, r), 1e-9),
            caterpillar5,
            1e-9,
        )
        for r in _all_rankings(matrix.taxa)
    )
    _report(
        "2 ambiguity witness",
        deviation > 0.1 and exact,
        f"plain-MST deviation {deviation:.2f} (> 0.1), 120/120 ranked MSTs exact",
    )


def _all_rankings(taxa):
    import itertools

    return [VertexRanking.from_order(p) for p in itertools.permutations(taxa)]


def test_criterion_3_min_leaf_optimality(small_corpus):
    start = time.perf_counter()
    good = 0
    for matrix in small_corpus:
        fast = count_leaves(min_leaf_vrmst(matrix, check_additive=False).tree)
        brute, _ = min_leaf_vrmst_bruteforce(matrix)
        good += fast == brute
    elapsed = time.perf_counter() - start
    _report(
        "3 min-leaf optimality",
        good == 50 and elapsed < 300.0,
        f"{good}/50 optimal, {elapsed:.1f}s (< 300s)",
    )


def test_criterion_4_max_degree(small_corpus):
    good = sum(
        dict(weight_class_sweep(matrix).max_degree)
        == mst_max_degrees_bruteforce(matrix)
        for matrix in small_corpus
    )
    _report("4 max degree", good == 50, f"{good}/50 sweeps match enumeration")


def test_criterion_5_laminar_family(small_corpus, small_corpus_msts):
    good = 0
    for matrix, msts in zip(small_corpus, small_corpus_msts):
        family = weight_class_sweep(matrix).family
        ok = family.is_laminar() and all(
            connected_in(tree, s.members) for tree in msts for s in family.sets
        )
        good += ok
    _report(
        "5 laminar family",
        good == 50,
        f"{good}/50 nested-or-disjoint and connected in every MST",
    )


def test_criterion_6_closed_form_leaf_counts():
    ok = True
    details = []
    for n in (5, 8, 12, 16):
        matrix = additive_distances(gen_caterpillar(n, clock=True, seed=n))
        tree = min_leaf_vrmst(matrix, check_additive=False).tree
        internal = sum(1 for t in matrix.taxa if tree.degree(t) >= 2)
        ok &= count_leaves(tree) == 2 and internal == n - 2
        details.append(f"cat{n}:{count_leaves(tree)}l/{internal}i")
    rng = random.Random(42)
    for depth, want in ((2, 2), (3, 4), (4, 8)):
        matrix = additive_distances(gen_balanced(depth, clock=True, seed=depth))
        counts = {
            count_leaves(
                kruskal_vertex_ranked(
                    matrix, VertexRanking.shuffled(matrix.taxa, rng)
                )
            )
            for _ in range(20)
        }
        ok &= counts == {want}
        details.append(f"bal{2 ** depth}:{sorted(counts)}")
    _report("6 closed-form leaf counts", ok, ", ".join(details))


def test_criterion_7_complexity_smoke():
    times = {}
    for n in (128, 256, 512):
        matrix = additive_distances(gen_random(n, seed=n))
        best = min(_timed(lambda: min_leaf_vrmst(matrix)) for _ in range(3))
        times[n] = best
    r1 = times[256] / times[128]
    r2 = times[512] / times[256]
    _report(
        "7 complexity smoke",
        r1 <= 5.0 and r2 <= 5.0 and times[512] < 30.0,
        f"doubling ratios {r1:.2f}, {r2:.2f} (<= 5), n=512 in {times[512]:.2f}s (< 30s)",
    )


def _timed(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def test_criterion_8_parallel_determinism(consistency_corpus):
    good = 0
    for tree, ranking in consistency_corpus:
        matrix = additive_distances(tree)
        mst = kruskal_vertex_ranked(matrix, ranking)
        good += trees_equal(
            clgrouping(matrix, mst, 1e-9),
            clgrouping(matrix, mst, 1e-9, parallel=True),
            1e-12,
        )
    _report(
        "8 parallel determinism",
        good == 200,
        f"{good}/200 parallel runs identical at 1e-12",
    )


def test_criterion_9_surrogate_properties():
    good = 0
    for seed in range(100):
        rng = random.Random(5000 + seed)
        n = rng.randint(4, 12)
        if seed % 3 == 0:
            tree = _general_labeled(rng.randint(4, 9), 5000 + seed, max_taxa=12)
        else:
            tree = gen_random(n, seed=5000 + seed)
        if seed % 2 == 0:
            tree = quantize_lengths(tree, seed)
        matrix = additive_distances(tree)
        ranking = VertexRanking.shuffled(matrix.taxa, rng)
        sg = surrogate_map(tree, ranking)
        mst = kruskal_vertex_ranked(matrix, ranking)
        ok = all(
            sg.of(u) == j
            for j, hs in sg.inverse.items()
            for h in hs
            for u in tree.path(j, h)
        ) and all(
            tuple(sorted((sg.of(u), sg.of(v)))) in mst.edge_set
            for u, v, _ in tree.edges()
            if sg.of(u) != sg.of(v)
        )
        good += ok
    _report(
        "9 surrogate properties",
        good == 100,
        f"{good}/100 path-membership and adjacency checks hold",
    )
