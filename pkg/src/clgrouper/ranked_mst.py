"""Rank-refined edge ordering and the spanning trees it induces.

Edges of the complete distance graph are compared by weight class first,
then by the smaller of the two endpoint ranks, then by the larger.  Under a
bijective ranking this is a strict total order, so Kruskal's scan never has
to break a tie arbitrarily and the resulting minimum spanning tree is a pure
function of (matrix, ranking).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .dsu import DisjointSetForest
from .errors import TaxonMismatchError
from .model import (
    DEFAULT_TOL,
    DistanceMatrix,
    PhyloTree,
    SpanningTree,
    VertexRanking,
    sorted_pair,
    weight_classes,
)


class EdgeOrderKey(NamedTuple):
    """Sort key realizing the rank-refined total order on edges.

    ``weight`` is the representative weight of the edge's weight class, so
    two edges whose raw weights agree within the tolerance compare equal on
    the first component and fall through to the rank comparison.
    """

    weight: float
    rank_min: int
    rank_max: int


def edge_order_key(
    u: str,
    v: str,
    matrix: DistanceMatrix,
    ranking: VertexRanking,
    tol: float = DEFAULT_TOL,
) -> EdgeOrderKey:
    """Total-order key of the edge {u, v} under the given ranking."""
    if u == v:
        raise ValueError(f"an edge needs two distinct endpoints, got {u!r} twice")
    wc = weight_classes(matrix, tol)
    i, j = matrix.index(u), matrix.index(v)
    rep = wc.reps[wc.class_of[(min(i, j), max(i, j))]]
    ru, rv = ranking.rank(u), ranking.rank(v)
    return EdgeOrderKey(rep, min(ru, rv), max(ru, rv))


def _check_taxa(matrix: DistanceMatrix, ranking: VertexRanking) -> None:
    if set(ranking.taxa) != set(matrix.taxa):
        raise TaxonMismatchError("ranking and matrix cover different taxa")


def kruskal_vertex_ranked(
    matrix: DistanceMatrix,
    ranking: VertexRanking,
    tol: float = DEFAULT_TOL,
) -> SpanningTree:
    """Kruskal's algorithm over edges sorted by the rank-refined order.

    The result is the unique minimum spanning tree in which every tie between
    equal-weight edges is resolved in favor of higher-ranked endpoints.
    """
    _check_taxa(matrix, ranking)
    taxa = matrix.taxa
    n = len(taxa)
    rank_of = [ranking.rank(t) for t in taxa]
    wc = weight_classes(matrix, tol)
    order = []
    for ci, pairs in enumerate(wc.pairs_by_class):
        for i, j in pairs:
            ri, rj = rank_of[i], rank_of[j]
            if ri > rj:
                ri, rj = rj, ri
            order.append((ci, ri, rj, i, j))
    order.sort()
    dsu = DisjointSetForest(range(n))
    chosen: dict[tuple[str, str], float] = {}
    for ci, ri, rj, i, j in order:
        a, b = dsu.find(i), dsu.find(j)
        if a != b:
            dsu.union(a, b)
            chosen[(taxa[i], taxa[j])] = float(matrix.values[i, j])
            if len(chosen) == n - 1:
                break
    return SpanningTree(taxa, chosen)


def kruskal_plain(
    matrix: DistanceMatrix,
    tie_order: Sequence[tuple[str, str]],
    tol: float = DEFAULT_TOL,
) -> SpanningTree:
    """Kruskal's algorithm under an explicit scan order.

    *tie_order* must list every edge of the complete graph exactly once, in
    nondecreasing weight order; within a weight class the caller chooses the
    order freely.  This makes any minimum spanning tree constructible, which
    is what exposes the reconstruction ambiguity when several MSTs exist.
    """
    taxa = matrix.taxa
    n = len(taxa)
    wc = weight_classes(matrix, tol)
    normalized = [sorted_pair(u, v) for u, v in tie_order]
    expected = {
        (taxa[i], taxa[j]) for pairs in wc.pairs_by_class for i, j in pairs
    }
    if len(normalized) != len(expected) or set(normalized) != expected:
        raise ValueError("tie_order must list every edge exactly once")
    prev_class = -1
    for u, v in normalized:
        i, j = matrix.index(u), matrix.index(v)
        ci = wc.class_of[(i, j) if i < j else (j, i)]
        if ci < prev_class:
            raise ValueError(
                f"tie_order is not sorted nondecreasing by weight at edge {u}-{v}"
            )
        prev_class = ci
    dsu = DisjointSetForest(taxa)
    chosen: dict[tuple[str, str], float] = {}
    for u, v in normalized:
        a, b = dsu.find(u), dsu.find(v)
        if a != b:
            dsu.union(a, b)
            chosen[sorted_pair(u, v)] = matrix.d(u, v)
            if len(chosen) == n - 1:
                break
    return SpanningTree(taxa, chosen)


@dataclass(frozen=True)
class SurrogateMap:
    """For every tree vertex, its nearest labeled stand-in under a ranking.

    ``surrogate[v]`` is the labeled vertex closest to ``v`` in the tree,
    ties resolved toward the highest-ranked candidate; a labeled vertex is
    its own surrogate.  ``inverse[l]`` collects the hidden vertices whose
    surrogate is ``l``.
    """

    surrogate: Mapping[str, str]
    inverse: Mapping[str, frozenset[str]]

    def of(self, v: str) -> str:
        return self.surrogate[v]


def surrogate_map(
    tree: PhyloTree,
    ranking: VertexRanking,
    tol: float = DEFAULT_TOL,
) -> SurrogateMap:
    """Map every vertex of *tree* to its surrogate under *ranking*."""
    if set(ranking.taxa) != set(tree.taxa):
        raise TaxonMismatchError("ranking and tree cover different taxa")
    taxa = tree.taxa
    surrogate: dict[str, str] = {}
    for v in tree.vertices:
        dist = tree.distances_from(v)
        dmin = min(dist[t] for t in taxa)
        candidates = [t for t in taxa if dist[t] <= dmin + tol]
        surrogate[v] = min(candidates, key=ranking.rank)
    inverse: dict[str, set[str]] = {t: set() for t in taxa}
    for v, s in surrogate.items():
        if not tree.is_labeled(v):
            inverse[s].add(v)
    return SurrogateMap(
        surrogate=surrogate,
        inverse={t: frozenset(hs) for t, hs in inverse.items()},
    )
