"""Disjoint-set forest semantics, determinism, and the height bound."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clgrouper import ContractViolationError, DisjointSetForest


class TestBasics:
    def test_fresh_sets_are_distinct(self):
        dsu = DisjointSetForest()
        dsu.make_set("a")
        dsu.make_set("b")
        assert dsu.find("a") != dsu.find("b")

    def test_union_merges(self):
        dsu = DisjointSetForest("ab")
        dsu.union(dsu.find("a"), dsu.find("b"))
        assert dsu.find("a") == dsu.find("b")

    def test_chain_unions_single_root(self):
        n = 16
        dsu = DisjointSetForest(range(n))
        for k in range(n - 1):
            a, b = dsu.find(k), dsu.find(k + 1)
            if a != b:
                dsu.union(a, b)
        assert len({dsu.find(k) for k in range(n)}) == 1

    def test_union_of_non_root_rejected(self):
        dsu = DisjointSetForest("abc")
        root = dsu.union(dsu.find("a"), dsu.find("b"))
        non_root = "a" if root != "a" else "b"
        with pytest.raises(ContractViolationError):
            dsu.union(non_root, dsu.find("c"))

    def test_union_same_root_rejected(self):
        dsu = DisjointSetForest("ab")
        dsu.union(dsu.find("a"), dsu.find("b"))
        with pytest.raises(ContractViolationError):
            dsu.union(dsu.find("a"), dsu.find("b"))

    def test_make_set_twice_rejected(self):
        dsu = DisjointSetForest("a")
        with pytest.raises(ContractViolationError):
            dsu.make_set("a")

    def test_equal_size_tie_breaks_to_smaller_element(self):
        dsu = DisjointSetForest("ab")
        assert dsu.union("b", "a") == "a"
        dsu2 = DisjointSetForest("ab")
        assert dsu2.union("a", "b") == "a"

    def test_larger_component_wins(self):
        dsu = DisjointSetForest("abc")
        r = dsu.union("b", "c")
        assert dsu.union(r, "a") == r


def _naive_partition(n: int, unions: list[tuple[int, int]]):
    groups = [{k} for k in range(n)]
    for a, b in unions:
        ga = next(g for g in groups if a in g)
        gb = next(g for g in groups if b in g)
        if ga is not gb:
            groups.remove(gb)
            ga |= gb
    return {frozenset(g) for g in groups}


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 24),
    pairs=st.lists(st.tuples(st.integers(0, 23), st.integers(0, 23)), max_size=60),
)
def test_partition_matches_naive_reference(n, pairs):
    dsu = DisjointSetForest(range(n))
    unions = []
    for a, b in pairs:
        a, b = a % n, b % n
        ra, rb = dsu.find(a), dsu.find(b)
        if ra != rb:
            dsu.union(ra, rb)
            unions.append((a, b))
    assert set(dsu.components().values()) == _naive_partition(n, unions)


def test_height_bound_without_compression():
    """With balanced union, no parent chain exceeds ceil(log2 n) links."""
    rng = random.Random(5)
    n = 512
    dsu = DisjointSetForest(range(n))
    roots = list(range(n))
    while len(roots) > 1:
        a, b = rng.sample(roots, 2)
        winner = dsu.union(a, b)
        roots.remove(a if winner == b else b)
    bound = math.ceil(math.log2(n))
    for e in range(n):
        depth = 0
        while dsu.parent[e] != e:
            e = dsu.parent[e]
            depth += 1
        assert depth <= bound
