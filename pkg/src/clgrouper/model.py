"""Core types: trees, distance matrices, vertex rankings, spanning trees.

Conventions used throughout the package:

* Taxa are opaque string identifiers.  Wherever a deterministic order is
  needed and no ranking is supplied, the lexicographic order of the
  identifiers is used.
* Rankings map taxa onto the integers 1..n.  A *smaller* value means a
  *higher* rank, so the top-ranked taxon is the one whose rank value is 1.
* All floating-point equality takes an explicit tolerance (default 1e-9),
  and edge weights that agree within the tolerance are treated as one
  weight class.

All types here are immutable after construction, so they can be shared
freely between threads; the operations on them are pure functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    InvalidMatrixError,
    InvalidRankingError,
    InvalidTreeError,
    TaxonMismatchError,
)

DEFAULT_TOL = 1e-9


def sorted_pair(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


class PhyloTree:
    """Unrooted edge-weighted tree over labeled (observed) and hidden vertices.

    Edge lengths are strictly positive and every hidden vertex has degree at
    least three (a hidden vertex of lower degree carries no information and
    is not allowed in a finished tree).  Labeled vertices may be internal:
    a tree with labeled internal vertices arises when the sampled taxa
    contain ancestor-descendant pairs.
    """

    __slots__ = ("_adj", "_labels")

    def __init__(
        self,
        edges: Iterable[tuple[str, str, float]],
        labels: Iterable[str],
        vertices: Iterable[str] = (),
    ):
        self._labels = frozenset(labels)
        adj: dict[str, dict[str, float]] = {}
        for v in vertices:
            adj.setdefault(v, {})
        for v in self._labels:
            adj.setdefault(v, {})
        n_edges = 0
        for u, v, length in edges:
            if u == v:
                raise InvalidTreeError(f"self-loop at {u!r}")
            if not length > 0:
                raise InvalidTreeError(
                    f"edge {u!r}-{v!r} has non-positive length {length!r}"
                )
            if v in adj.get(u, {}):
                raise InvalidTreeError(f"duplicate edge {u!r}-{v!r}")
            adj.setdefault(u, {})[v] = float(length)
            adj.setdefault(v, {})[u] = float(length)
            n_edges += 1
        if not self._labels:
            raise InvalidTreeError("a tree needs at least one labeled vertex")
        if not self._labels <= adj.keys():
            missing = sorted(self._labels - adj.keys())
            raise InvalidTreeError(f"labels {missing} are not vertices of the tree")
        if n_edges != len(adj) - 1:
            raise InvalidTreeError(
                f"{len(adj)} vertices with {n_edges} edges cannot form a tree"
            )
        if len(adj) > 1:
            start = next(iter(adj))
            seen = {start}
            stack = [start]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if len(seen) != len(adj):
                raise InvalidTreeError("tree is disconnected")
        for v, nbrs in adj.items():
            if v not in self._labels and len(nbrs) < 3:
                raise InvalidTreeError(
                    f"hidden vertex {v!r} has degree {len(nbrs)} (must be >= 3)"
                )
        self._adj = adj

    @property
    def taxa(self) -> tuple[str, ...]:
        return tuple(sorted(self._labels))

    @property
    def hidden(self) -> tuple[str, ...]:
        return tuple(sorted(v for v in self._adj if v not in self._labels))

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(sorted(self._adj))

    def is_labeled(self, v: str) -> bool:
        return v in self._labels

    def neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(self._adj[v]))

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def edge_length(self, u: str, v: str) -> float:
        return self._adj[u][v]

    def edges(self) -> Iterator[tuple[str, str, float]]:
        for u in sorted(self._adj):
            for v, length in sorted(self._adj[u].items()):
                if u < v:
                    yield u, v, length

    @property
    def n_edges(self) -> int:
        return len(self._adj) - 1

    def distances_from(self, start: str) -> dict[str, float]:
        """Path-length distance from *start* to every vertex."""
        dist = {start: 0.0}
        stack = [start]
        while stack:
            u = stack.pop()
            base = dist[u]
            for v, length in self._adj[u].items():
                if v not in dist:
                    dist[v] = base + length
                    stack.append(v)
        return dist

    def path(self, u: str, v: str) -> list[str]:
        """Vertex sequence of the unique path from *u* to *v* (inclusive)."""
        parent: dict[str, str | None] = {u: None}
        stack = [u]
        while stack and v not in parent:
            x = stack.pop()
            for y in self._adj[x]:
                if y not in parent:
                    parent[y] = x
                    stack.append(y)
        out = [v]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])  # type: ignore[arg-type]
        out.reverse()
        return out

    def __repr__(self) -> str:
        return (
            f"PhyloTree(taxa={len(self._labels)}, "
            f"hidden={len(self._adj) - len(self._labels)})"
        )


class DistanceMatrix:
    """Symmetric positive pairwise distances over an ordered sequence of taxa.

    The diagonal must be zero and every off-diagonal entry strictly positive;
    asymmetry beyond the tolerance is rejected, smaller asymmetry is resolved
    by mirroring the upper triangle.
    """

    __slots__ = ("_taxa", "_index", "_values", "_wclasses")

    def __init__(self, taxa: Sequence[str], values, *, tol: float = DEFAULT_TOL):
        self._taxa = tuple(taxa)
        if not self._taxa:
            raise InvalidMatrixError("a distance matrix needs at least one taxon")
        if len(set(self._taxa)) != len(self._taxa):
            raise InvalidMatrixError("duplicate taxa in distance matrix")
        n = len(self._taxa)
        arr = np.array(values, dtype=float)
        if arr.shape != (n, n):
            raise InvalidMatrixError(
                f"matrix shape {arr.shape} does not match {n} taxa"
            )
        diag = np.abs(np.diagonal(arr))
        if diag.max(initial=0.0) > tol:
            t = self._taxa[int(np.argmax(diag))]
            raise InvalidMatrixError(f"nonzero diagonal at taxon {t!r}")
        asym = np.abs(arr - arr.T)
        if asym.max(initial=0.0) > tol:
            i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
            lo, hi = min(i, j), max(i, j)
            raise InvalidMatrixError(
                f"row {self._taxa[hi]} col {self._taxa[lo]} mismatch: "
                f"{float(arr[hi, lo])!r} vs {float(arr[lo, hi])!r}"
            )
        upper = np.triu(arr, 1)
        arr = upper + upper.T
        if n > 1:
            masked = arr.copy()
            np.fill_diagonal(masked, np.inf)
            if masked.min() <= 0:
                i, j = divmod(int(np.argmin(masked)), n)
                raise InvalidMatrixError(
                    f"non-positive distance between {self._taxa[i]!r} "
                    f"and {self._taxa[j]!r}"
                )
        arr.setflags(write=False)
        self._values = arr
        self._index = {t: k for k, t in enumerate(self._taxa)}
        self._wclasses: dict[float, WeightClasses] = {}

    @classmethod
    def from_dict(
        cls,
        entries: Mapping[tuple[str, str], float],
        taxa: Sequence[str] | None = None,
        *,
        tol: float = DEFAULT_TOL,
    ) -> "DistanceMatrix":
        """Build a matrix from a mapping of unordered taxon pairs to distances."""
        if taxa is None:
            seen: set[str] = set()
            for u, v in entries:
                seen.update((u, v))
            taxa = sorted(seen)
        arr = np.zeros((len(taxa), len(taxa)))
        index = {t: k for k, t in enumerate(taxa)}
        for (u, v), d in entries.items():
            arr[index[u], index[v]] = d
            arr[index[v], index[u]] = d
        return cls(taxa, arr, tol=tol)

    @property
    def taxa(self) -> tuple[str, ...]:
        return self._taxa

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __len__(self) -> int:
        return len(self._taxa)

    def index(self, taxon: str) -> int:
        return self._index[taxon]

    def d(self, u: str, v: str) -> float:
        return float(self._values[self._index[u], self._index[v]])

    def edges(self) -> Iterator[tuple[str, str, float]]:
        """All unordered taxon pairs with their distances, lexicographic order."""
        for i, u in enumerate(self._taxa):
            for j in range(i + 1, len(self._taxa)):
                yield u, self._taxa[j], float(self._values[i, j])

    def __repr__(self) -> str:
        return f"DistanceMatrix(n={len(self._taxa)})"


@dataclass(frozen=True)
class WeightClasses:
    """Edge weights of a matrix grouped into classes equal within a tolerance.

    ``reps[k]`` is the representative (lightest) weight of class ``k`` and
    ``pairs_by_class[k]`` lists the index pairs of the class in lexicographic
    order.  Classes are ordered by increasing weight.
    """

    reps: tuple[float, ...]
    pairs_by_class: tuple[tuple[tuple[int, int], ...], ...]
    class_of: Mapping[tuple[int, int], int]


def weight_classes(matrix: DistanceMatrix, tol: float = DEFAULT_TOL) -> WeightClasses:
    """Group the matrix's edges by weight, merging weights equal within *tol*.

    A new class starts wherever consecutive sorted weights differ by more
    than the tolerance.  The result is cached on the matrix per tolerance.
    """
    cached = matrix._wclasses.get(tol)
    if cached is not None:
        return cached
    n = len(matrix)
    iu, jv = np.triu_indices(n, 1)
    weights = matrix.values[iu, jv]
    order = np.argsort(weights, kind="stable")
    classes: list[list[tuple[int, int]]] = []
    reps: list[float] = []
    prev = None
    for k in order:
        w = float(weights[k])
        if prev is None or w - prev > tol:
            classes.append([])
            reps.append(w)
        classes[-1].append((int(iu[k]), int(jv[k])))
        prev = w
    class_of: dict[tuple[int, int], int] = {}
    for ci, pairs in enumerate(classes):
        pairs.sort()
        for pair in pairs:
            class_of[pair] = ci
    result = WeightClasses(
        reps=tuple(reps),
        pairs_by_class=tuple(tuple(pairs) for pairs in classes),
        class_of=class_of,
    )
    matrix._wclasses[tol] = result
    return result


class VertexRanking:
    """Bijection from taxa onto ranks 1..n; smaller value = higher rank."""

    __slots__ = ("_rank",)

    def __init__(self, ranks: Mapping[str, int]):
        self._rank = dict(ranks)
        if sorted(self._rank.values()) != list(range(1, len(self._rank) + 1)):
            raise InvalidRankingError(
                "ranking must assign each taxon a distinct rank in 1..n"
            )

    @classmethod
    def from_order(cls, taxa_in_rank_order: Sequence[str]) -> "VertexRanking":
        """First element gets rank 1 (the highest rank), and so on."""
        return cls({t: k + 1 for k, t in enumerate(taxa_in_rank_order)})

    @classmethod
    def identity(cls, taxa: Iterable[str]) -> "VertexRanking":
        """Lexicographic ranking: alphabetically first taxon ranks highest."""
        return cls.from_order(sorted(taxa))

    @classmethod
    def shuffled(cls, taxa: Iterable[str], rng) -> "VertexRanking":
        order = sorted(taxa)
        rng.shuffle(order)
        return cls.from_order(order)

    def rank(self, taxon: str) -> int:
        return self._rank[taxon]

    def __getitem__(self, taxon: str) -> int:
        return self._rank[taxon]

    @property
    def taxa(self) -> tuple[str, ...]:
        return tuple(sorted(self._rank))

    @property
    def mapping(self) -> dict[str, int]:
        return dict(self._rank)

    def by_rank(self) -> tuple[str, ...]:
        """Taxa from highest rank (value 1) to lowest."""
        return tuple(sorted(self._rank, key=self._rank.__getitem__))

    def __eq__(self, other) -> bool:
        return isinstance(other, VertexRanking) and self._rank == other._rank

    def __repr__(self) -> str:
        inner = ", ".join(f"{t}:{r}" for t, r in sorted(self._rank.items()))
        return f"VertexRanking({inner})"


class SpanningTree:
    """A spanning tree over a taxon set, with matrix-derived edge weights."""

    __slots__ = ("_taxa", "_adj", "_weights")

    def __init__(
        self,
        taxa: Iterable[str],
        edges: Mapping[tuple[str, str], float] | Iterable[tuple[str, str, float]],
    ):
        self._taxa = tuple(sorted(set(taxa)))
        taxa_set = set(self._taxa)
        if isinstance(edges, Mapping):
            items = [(u, v, w) for (u, v), w in edges.items()]
        else:
            items = list(edges)
        adj: dict[str, dict[str, float]] = {t: {} for t in self._taxa}
        weights: dict[tuple[str, str], float] = {}
        for u, v, w in items:
            if u == v:
                raise InvalidTreeError(f"self-loop at {u!r}")
            if u not in taxa_set or v not in taxa_set:
                raise InvalidTreeError(f"edge {u!r}-{v!r} leaves the taxon set")
            pair = sorted_pair(u, v)
            if pair in weights:
                raise InvalidTreeError(f"duplicate edge {u!r}-{v!r}")
            weights[pair] = float(w)
            adj[u][v] = float(w)
            adj[v][u] = float(w)
        n = len(self._taxa)
        if len(weights) != n - 1:
            raise InvalidTreeError(
                f"{n} taxa need {n - 1} edges to span, got {len(weights)}"
            )
        if n > 1:
            seen = {self._taxa[0]}
            stack = [self._taxa[0]]
            while stack:
                for w_ in adj[stack.pop()]:
                    if w_ not in seen:
                        seen.add(w_)
                        stack.append(w_)
            if len(seen) != n:
                raise InvalidTreeError("edge set does not span the taxa")
        self._adj = adj
        self._weights = weights

    @property
    def taxa(self) -> tuple[str, ...]:
        return self._taxa

    @property
    def edge_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self._weights)

    def edges(self) -> Iterator[tuple[str, str, float]]:
        for (u, v), w in sorted(self._weights.items()):
            yield u, v, w

    def weight(self, u: str, v: str) -> float:
        return self._weights[sorted_pair(u, v)]

    @property
    def total_weight(self) -> float:
        return float(sum(self._weights.values()))

    def neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(self._adj[v]))

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def leaves(self) -> tuple[str, ...]:
        return tuple(v for v in self._taxa if len(self._adj[v]) == 1)

    def __repr__(self) -> str:
        return f"SpanningTree(taxa={len(self._taxa)}, weight={self.total_weight:g})"


def additive_distances(tree: PhyloTree) -> DistanceMatrix:
    """Pairwise path-length distances between all labeled vertices of *tree*."""
    taxa = tree.taxa
    n = len(taxa)
    arr = np.zeros((n, n))
    for i, t in enumerate(taxa):
        dist = tree.distances_from(t)
        for j, s in enumerate(taxa):
            arr[i, j] = dist[s]
    return DistanceMatrix(taxa, arr)


def check_additivity(matrix: DistanceMatrix, tol: float = DEFAULT_TOL) -> bool:
    """Whether the distances can be realized as path lengths in some tree.

    For every four taxa the three pairwise sums d(i,j)+d(k,l), d(i,k)+d(j,l),
    d(i,l)+d(j,k) are formed; tree-realizable distances make the two largest
    sums equal.  Matrices with fewer than four taxa pass trivially.
    """
    arr = matrix.values
    for i, j, k, l in itertools.combinations(range(len(matrix)), 4):
        sums = sorted(
            (
                arr[i, j] + arr[k, l],
                arr[i, k] + arr[j, l],
                arr[i, l] + arr[j, k],
            )
        )
        if sums[2] - sums[1] > tol:
            return False
    return True


def trees_equal(t1: PhyloTree, t2: PhyloTree, tol: float = DEFAULT_TOL) -> bool:
    """Whether two trees over the same taxa realize the same distances.

    Distances determine the tree uniquely (hidden vertex names and layout are
    immaterial), so comparing the two distance matrices entrywise is an exact
    equality test up to the tolerance.
    """
    if set(t1.taxa) != set(t2.taxa):
        raise TaxonMismatchError(
            f"trees label different taxa: {sorted(set(t1.taxa) ^ set(t2.taxa))}"
        )
    m1 = additive_distances(t1)
    m2 = additive_distances(t2)
    return bool(np.max(np.abs(m1.values - m2.values), initial=0.0) <= tol)


def count_leaves(tree: SpanningTree) -> int:
    """Number of degree-1 vertices of a spanning tree."""
    return len(tree.leaves())
