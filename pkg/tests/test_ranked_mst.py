"""Rank-refined edge order, ranked and plain Kruskal, surrogate maps."""

from __future__ import annotations

import random

import pytest

from clgrouper import (
    DistanceMatrix,
    TaxonMismatchError,
    VertexRanking,
    additive_distances,
    edge_order_key,
    enumerate_msts,
    gen_random,
    kruskal_plain,
    kruskal_vertex_ranked,
    surrogate_map,
)
from conftest import BAD_MST_EDGES, quantize_lengths

R_ABCD = VertexRanking.from_order(["a", "b", "c", "d"])


class TestEdgeOrderKey:
    def test_rank_min_breaks_weight_tie(self, quartet_matrix):
        k_ab = edge_order_key("a", "b", quartet_matrix, R_ABCD)
        k_cd = edge_order_key("c", "d", quartet_matrix, R_ABCD)
        assert k_ab == (2.0, 1, 2)
        assert k_cd == (2.0, 3, 4)
        assert k_ab < k_cd

    def test_rank_max_breaks_remaining_tie(self, quartet_matrix):
        k_bc = edge_order_key("b", "c", quartet_matrix, R_ABCD)
        k_bd = edge_order_key("b", "d", quartet_matrix, R_ABCD)
        assert k_bc == (3.0, 2, 3)
        assert k_bd == (3.0, 2, 4)
        assert k_bc < k_bd

    def test_weight_dominates_ranks(self, quartet_matrix):
        assert edge_order_key("a", "b", quartet_matrix, R_ABCD) < edge_order_key(
            "a", "c", quartet_matrix, R_ABCD
        )

    def test_same_endpoint_rejected(self, quartet_matrix):
        with pytest.raises(ValueError):
            edge_order_key("a", "a", quartet_matrix, R_ABCD)


class TestKruskalVertexRanked:
    def test_quartet_identity_ranking(self, quartet_matrix):
        t = kruskal_vertex_ranked(quartet_matrix, R_ABCD)
        assert t.edge_set == {("a", "b"), ("c", "d"), ("a", "c")}
        assert t.leaves() == ("b", "d")

    def test_quartet_alternative_ranking(self, quartet_matrix):
        r = VertexRanking.from_order(["b", "d", "a", "c"])
        t = kruskal_vertex_ranked(quartet_matrix, r)
        assert t.edge_set == {("a", "b"), ("c", "d"), ("b", "d")}

    def test_two_taxa(self):
        m = DistanceMatrix.from_dict({("a", "b"): 5.0})
        t = kruskal_vertex_ranked(m, VertexRanking.identity(["a", "b"]))
        assert t.edge_set == {("a", "b")}

    def test_single_taxon(self):
        m = DistanceMatrix(["a"], [[0.0]])
        t = kruskal_vertex_ranked(m, VertexRanking.identity(["a"]))
        assert t.edge_set == frozenset()

    def test_deterministic(self, caterpillar5_matrix):
        r = VertexRanking.identity(caterpillar5_matrix.taxa)
        t1 = kruskal_vertex_ranked(caterpillar5_matrix, r)
        t2 = kruskal_vertex_ranked(caterpillar5_matrix, r)
        assert t1.edge_set == t2.edge_set

    def test_taxon_mismatch(self, quartet_matrix):
        with pytest.raises(TaxonMismatchError):
            kruskal_vertex_ranked(quartet_matrix, VertexRanking.identity(["a", "b"]))

    @pytest.mark.parametrize("seed", range(8))
    def test_weight_is_minimal_for_any_ranking(self, seed):
        rng = random.Random(seed)
        tree = quantize_lengths(gen_random(rng.randint(4, 9), seed=seed), seed)
        matrix = additive_distances(tree)
        plain = kruskal_plain(
            matrix, [(u, v) for u, v, _ in sorted(matrix.edges(), key=lambda e: e[2])]
        )
        ranked = kruskal_vertex_ranked(
            matrix, VertexRanking.shuffled(matrix.taxa, rng)
        )
        assert ranked.total_weight == pytest.approx(plain.total_weight)

    @pytest.mark.parametrize("seed", range(4))
    def test_ranked_mst_is_one_of_the_msts(self, seed):
        rng = random.Random(seed)
        tree = quantize_lengths(gen_random(6, seed=seed), seed)
        matrix = additive_distances(tree)
        mst_sets = {t.edge_set for t in enumerate_msts(matrix)}
        ranked = kruskal_vertex_ranked(
            matrix, VertexRanking.shuffled(matrix.taxa, rng)
        )
        assert ranked.edge_set in mst_sets


class TestKruskalPlain:
    def test_ambiguity_witness_order(self, caterpillar5_matrix):
        tie = [
            ("l1", "l2"),
            ("l4", "l5"),
            ("l2", "l3"),
            ("l1", "l4"),
            ("l1", "l3"),
            ("l1", "l5"),
            ("l2", "l4"),
            ("l2", "l5"),
            ("l3", "l4"),
            ("l3", "l5"),
        ]
        t = kruskal_plain(caterpillar5_matrix, tie)
        assert t.edge_set == {tuple(sorted(e)) for e in BAD_MST_EDGES}

    def test_quartet_weight_independent_of_ties(self, quartet_matrix):
        base = [("a", "b"), ("c", "d")]
        for cross_first in (("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")):
            rest = [
                p
                for p in (("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"))
                if p != cross_first
            ]
            t = kruskal_plain(quartet_matrix, base + [cross_first] + rest)
            assert t.total_weight == pytest.approx(7.0)
            assert cross_first in t.edge_set

    def test_unique_weights_ignore_tie_order(self):
        m = DistanceMatrix.from_dict(
            {("a", "b"): 1.0, ("a", "c"): 2.0, ("b", "c"): 3.0}
        )
        t1 = kruskal_plain(m, [("a", "b"), ("a", "c"), ("b", "c")])
        t2 = kruskal_plain(m, [("b", "a"), ("c", "a"), ("c", "b")])
        assert t1.edge_set == t2.edge_set == {("a", "b"), ("a", "c")}

    def test_unsorted_order_rejected(self, quartet_matrix):
        bad = [
            ("a", "c"),
            ("a", "b"),
            ("c", "d"),
            ("a", "d"),
            ("b", "c"),
            ("b", "d"),
        ]
        with pytest.raises(ValueError, match="not sorted"):
            kruskal_plain(quartet_matrix, bad)

    def test_incomplete_edge_set_rejected(self, quartet_matrix):
        with pytest.raises(ValueError, match="every edge"):
            kruskal_plain(quartet_matrix, [("a", "b"), ("c", "d")])


class TestSurrogateMap:
    def test_caterpillar5_identity_ranking(self, caterpillar5):
        r = VertexRanking.identity(caterpillar5.taxa)
        sg = surrogate_map(caterpillar5, r)
        assert sg.of("h1") == "l1"
        assert sg.of("h2") == "l4"
        # h3 is equidistant from all five taxa; the tie goes to the top rank.
        assert sg.of("h3") == "l1"
        assert sg.inverse["l1"] == {"h1", "h3"}
        assert sg.inverse["l4"] == {"h2"}
        assert sg.inverse["l3"] == frozenset()

    def test_labeled_vertices_are_their_own_surrogate(self, caterpillar5):
        r = VertexRanking.identity(caterpillar5.taxa)
        sg = surrogate_map(caterpillar5, r)
        for t in caterpillar5.taxa:
            assert sg.of(t) == t

    def test_quartet(self, quartet):
        sg = surrogate_map(quartet, R_ABCD)
        assert sg.of("h1") == "a"
        assert sg.of("h2") == "c"

    @pytest.mark.parametrize("seed", range(10))
    def test_path_membership_and_adjacency(self, seed):
        rng = random.Random(seed)
        tree = gen_random(rng.randint(4, 10), general_labels=(seed % 3 == 0), seed=seed)
        if seed % 2 == 0:
            tree = quantize_lengths(tree, seed)
        matrix = additive_distances(tree)
        ranking = VertexRanking.shuffled(matrix.taxa, rng)
        sg = surrogate_map(tree, ranking)
        mst = kruskal_vertex_ranked(matrix, ranking)
        # Every vertex on the path from a hidden vertex to its surrogate
        # shares that surrogate.
        for j, hs in sg.inverse.items():
            for h in hs:
                assert all(sg.of(u) == j for u in tree.path(j, h))
        # Adjacent tree vertices with distinct surrogates stay adjacent.
        for u, v, _ in tree.edges():
            su, sv = sg.of(u), sg.of(v)
            if su != sv:
                assert tuple(sorted((su, sv))) in mst.edge_set

    @pytest.mark.parametrize("seed", range(6))
    def test_contracting_surrogate_paths_gives_the_mst(self, seed):
        rng = random.Random(100 + seed)
        tree = quantize_lengths(gen_random(rng.randint(4, 9), seed=seed), seed)
        matrix = additive_distances(tree)
        ranking = VertexRanking.shuffled(matrix.taxa, rng)
        sg = surrogate_map(tree, ranking)
        mst = kruskal_vertex_ranked(matrix, ranking)
        contracted = {
            tuple(sorted((sg.of(u), sg.of(v))))
            for u, v, _ in tree.edges()
            if sg.of(u) != sg.of(v)
        }
        assert contracted == set(mst.edge_set)
