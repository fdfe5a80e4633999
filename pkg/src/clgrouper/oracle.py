"""Brute-force references: MST enumeration, max degrees, min-leaf search.

These exist to check the fast implementations on small inputs, so they favor
directness over speed and refuse to run past hard size limits.  The MST
enumerator works by include/exclude branching on the weight-sorted edge
list, pruning any branch that can no longer complete to minimum weight; it
shares no code with the sweep it is used to verify.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import SizeGuardError
from .model import (
    DEFAULT_TOL,
    DistanceMatrix,
    SpanningTree,
    VertexRanking,
    count_leaves,
    weight_classes,
)
from .ranked_mst import kruskal_vertex_ranked

MST_ENUMERATION_LIMIT = 10
RANKING_SWEEP_LIMIT = 8


def _prim_weight(matrix: DistanceMatrix) -> float:
    """Minimum spanning tree weight via Prim's algorithm (O(n^2))."""
    n = len(matrix)
    values = matrix.values
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    best[0] = 0.0
    total = 0.0
    for _ in range(n):
        u = int(np.argmin(np.where(in_tree, np.inf, best)))
        total += best[u]
        in_tree[u] = True
        closer = values[u] < best
        best = np.where(closer & ~in_tree, values[u], best)
    return float(total)


class _RollbackDsu:
    """Union by size without compression, so unions can be undone in order."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.trail: list[tuple[int, int]] = []

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        self.trail.append((a, b))

    def rollback(self) -> None:
        a, b = self.trail.pop()
        self.size[a] -= self.size[b]
        self.parent[b] = b


def enumerate_msts(
    matrix: DistanceMatrix, tol: float = DEFAULT_TOL
) -> list[SpanningTree]:
    """Every spanning tree of minimum total weight, for small matrices."""
    n = len(matrix)
    if n > MST_ENUMERATION_LIMIT:
        raise SizeGuardError(
            f"MST enumeration is limited to {MST_ENUMERATION_LIMIT} taxa, got {n}"
        )
    taxa = matrix.taxa
    if n == 1:
        return [SpanningTree(taxa, {})]
    values = matrix.values
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    pairs.sort(key=lambda p: (values[p], p))
    weights = [float(values[p]) for p in pairs]
    target = _prim_weight(matrix)
    dsu = _RollbackDsu(n)
    chosen: list[int] = []
    results: list[SpanningTree] = []

    def completion(idx: int) -> float | None:
        """Cheapest way to finish spanning from edge *idx* on, or None."""
        parent = {}

        def find(x):
            while x in parent:
                x = parent[x]
            return x

        total = 0.0
        joined = 0
        needed = n - 1 - len(chosen)
        for k in range(idx, len(pairs)):
            if joined == needed:
                break
            i, j = pairs[k]
            a, b = find(dsu.find(i)), find(dsu.find(j))
            if a != b:
                parent[b] = a
                total += weights[k]
                joined += 1
        return total if joined == needed else None

    def recurse(idx: int, weight: float) -> None:
        finish = completion(idx)
        if finish is None or weight + finish > target + tol:
            return
        if len(chosen) == n - 1:
            results.append(
                SpanningTree(
                    taxa,
                    {
                        (taxa[pairs[k][0]], taxa[pairs[k][1]]): weights[k]
                        for k in chosen
                    },
                )
            )
            return
        i, j = pairs[idx]
        a, b = dsu.find(i), dsu.find(j)
        if a != b:
            dsu.union(a, b)
            chosen.append(idx)
            recurse(idx + 1, weight + weights[idx])
            chosen.pop()
            dsu.rollback()
        recurse(idx + 1, weight)

    recurse(0, 0.0)
    return results


def mst_max_degrees_bruteforce(
    matrix: DistanceMatrix, tol: float = DEFAULT_TOL
) -> dict[str, int]:
    """Per taxon, the maximum degree over all enumerated MSTs."""
    degrees = {t: 0 for t in matrix.taxa}
    for tree in enumerate_msts(matrix, tol):
        for t in matrix.taxa:
            degrees[t] = max(degrees[t], tree.degree(t))
    return degrees


def min_leaf_vrmst_bruteforce(
    matrix: DistanceMatrix, tol: float = DEFAULT_TOL
) -> tuple[int, VertexRanking]:
    """Fewest leaves any ranking's rank-refined MST can have, with a witness.

    Sweeps all n! rankings.  The inner scan replays the rank-refined Kruskal
    with flat arrays for speed; the winning ranking is then re-run through
    the public construction to confirm the count.
    """
    n = len(matrix)
    if n > RANKING_SWEEP_LIMIT:
        raise SizeGuardError(
            f"ranking sweep is limited to {RANKING_SWEEP_LIMIT} taxa, got {n}"
        )
    taxa = matrix.taxa
    if n == 1:
        return 0, VertexRanking.from_order(taxa)
    classes = [list(pairs) for pairs in weight_classes(matrix, tol).pairs_by_class]
    best = n + 1
    best_perm: tuple[int, ...] | None = None
    for perm in itertools.permutations(range(n)):
        rank_of = [0] * n
        for pos, t in enumerate(perm):
            rank_of[t] = pos
        parent = list(range(n))
        deg = [0] * n
        accepted = 0
        for pairs in classes:
            if accepted == n - 1:
                break
            if len(pairs) > 1:
                pairs = sorted(
                    pairs,
                    key=lambda p: (
                        (rank_of[p[0]], rank_of[p[1]])
                        if rank_of[p[0]] < rank_of[p[1]]
                        else (rank_of[p[1]], rank_of[p[0]])
                    ),
                )
            for i, j in pairs:
                a = i
                while parent[a] != a:
                    a = parent[a]
                b = j
                while parent[b] != b:
                    b = parent[b]
                if a != b:
                    parent[b] = a
                    deg[i] += 1
                    deg[j] += 1
                    accepted += 1
        leaves = sum(1 for d in deg if d == 1)
        if leaves < best:
            best = leaves
            best_perm = perm
            if best == 2:
                break
    assert best_perm is not None
    witness = VertexRanking.from_order([taxa[t] for t in best_perm])
    confirmed = count_leaves(kruskal_vertex_ranked(matrix, witness, tol))
    assert confirmed == best, "fast ranking sweep disagrees with the public scan"
    return best, witness
