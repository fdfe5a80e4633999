"""Weight-class sweep of the distance graph and the minimum-leaf ranked MST.

Scanning edge classes in increasing weight order splits the spanning
structure of the graph into *fixed* edges, present in every minimum spanning
tree, and per-class *component graphs* whose cycles leave room for choice.
Counting, per vertex and class, the distinct components the vertex reaches
through that class's edges gives the largest degree the vertex can have in
any MST.  Ranking vertices so that small counts rank highest and rerunning
the rank-refined Kruskal inside each component graph produces a spanning
tree with the minimum number of leaves whenever the input distances are
tree-additive; for other inputs the tree is still a valid rank-refined MST,
just without the minimality guarantee.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

from .dsu import DisjointSetForest
from .errors import NonAdditivityWarning
from .model import (
    DEFAULT_TOL,
    DistanceMatrix,
    SpanningTree,
    VertexRanking,
    check_additivity,
    weight_classes,
)

# Auto mode runs the quartic four-point scan only below this size.
ADDITIVITY_CHECK_LIMIT = 32


@dataclass(frozen=True)
class ComponentEdge:
    """One cross edge of a weight class, with its pre-merge component labels."""

    u: str
    v: str
    comp_u: str
    comp_v: str
    weight: float


@dataclass(frozen=True)
class ComponentGraph:
    """Multigraph a weight class induces on the components it connects.

    Recorded only when it is not a simple acyclic graph; a component graph
    that is a tree forces all of its edges into every MST instead.
    """

    weight: float
    vertices: tuple[str, ...]
    edges: tuple[ComponentEdge, ...]


@dataclass(frozen=True)
class LaminarSet:
    """A vertex set connected by edges no heavier than its threshold."""

    threshold: float
    members: frozenset[str]


@dataclass(frozen=True)
class LaminarFamily:
    """Nested-or-disjoint vertex sets shared by every MST of the graph."""

    sets: tuple[LaminarSet, ...]

    def member_sets(self) -> tuple[frozenset[str], ...]:
        return tuple(s.members for s in self.sets)

    def is_laminar(self) -> bool:
        """Every two sets are disjoint or one contains the other."""
        members = self.member_sets()
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                if a & b and not (a <= b or b <= a):
                    return False
        return True


@dataclass(frozen=True)
class SweepResult:
    fixed_edges: tuple[tuple[str, str], ...]
    component_graphs: tuple[ComponentGraph, ...]
    max_degree: Mapping[str, int]
    family: LaminarFamily


@dataclass(frozen=True)
class MinLeafResult:
    tree: SpanningTree
    ranking: VertexRanking
    max_degree: Mapping[str, int]
    #: True/False when the four-point scan ran, None when it was skipped.
    additive: bool | None


def weight_class_sweep(
    matrix: DistanceMatrix, tol: float = DEFAULT_TOL
) -> SweepResult:
    """One pass over the edge classes of *matrix*, lightest first.

    Returns the edges every MST must contain, the component multigraphs where
    MSTs may differ, the per-vertex maximum MST degree, and the laminar
    family of component vertex sets.
    """
    taxa = matrix.taxa
    n = len(taxa)
    values = matrix.values
    wc = weight_classes(matrix, tol)
    dsu = DisjointSetForest(range(n))
    members: dict[int, set[int]] = {i: {i} for i in range(n)}
    family_sets: list[LaminarSet] = [
        LaminarSet(0.0, frozenset({t})) for t in taxa
    ]
    max_degree = {t: 0 for t in taxa}
    fixed: list[tuple[str, str]] = []
    graphs: list[ComponentGraph] = []

    for ci, pairs in enumerate(wc.pairs_by_class):
        rep = wc.reps[ci]
        # Cross edges of this class, with component labels captured before
        # any merge the class performs.
        cross: list[tuple[int, int, int, int]] = []
        comp_nbrs: dict[int, set[int]] = {}
        for i, j in pairs:
            ri, rj = dsu.find(i), dsu.find(j)
            if ri != rj:
                cross.append((i, j, ri, rj))
                comp_nbrs.setdefault(i, set()).add(rj)
                comp_nbrs.setdefault(j, set()).add(ri)
        for i, nbrs in comp_nbrs.items():
            max_degree[taxa[i]] += len(nbrs)
        # Merge, remembering which vertices closed a cycle within the class.
        cycle_markers: list[int] = []
        changed_sets: set[int] = set()
        for i, j, ri, rj in cross:
            a, b = dsu.find(i), dsu.find(j)
            if a != b:
                root = dsu.union(a, b)
                loser = a if root == b else b
                members[root] |= members.pop(loser)
                changed_sets.add(root)
            else:
                cycle_markers.append(i)
        flexible_roots = {dsu.find(x) for x in cycle_markers}
        by_root: dict[int, list[tuple[int, int, int, int]]] = {}
        for edge in cross:
            by_root.setdefault(dsu.find(edge[0]), []).append(edge)
        for root, edges in by_root.items():
            if root in flexible_roots:
                labels = sorted(
                    {taxa[e[2]] for e in edges} | {taxa[e[3]] for e in edges}
                )
                graphs.append(
                    ComponentGraph(
                        weight=rep,
                        vertices=tuple(labels),
                        edges=tuple(
                            ComponentEdge(
                                u=taxa[i],
                                v=taxa[j],
                                comp_u=taxa[ri],
                                comp_v=taxa[rj],
                                weight=float(values[i, j]),
                            )
                            for i, j, ri, rj in edges
                        ),
                    )
                )
            else:
                fixed.extend((taxa[i], taxa[j]) for i, j, _, _ in edges)
        for root in changed_sets:
            if dsu.find(root) == root:
                family_sets.append(
                    LaminarSet(rep, frozenset(taxa[k] for k in members[root]))
                )

    return SweepResult(
        fixed_edges=tuple(fixed),
        component_graphs=tuple(graphs),
        max_degree=max_degree,
        family=LaminarFamily(tuple(family_sets)),
    )


def ranking_from_degrees(max_degree: Mapping[str, int]) -> VertexRanking:
    """Rank vertices so that smaller maximum degrees come first (rank highest).

    Ties break toward the lexicographically smaller taxon, which keeps the
    whole pipeline deterministic without affecting the leaf count.
    """
    order = sorted(max_degree, key=lambda t: (max_degree[t], t))
    return VertexRanking.from_order(order)


def _component_selection(
    graph: ComponentGraph, rank: Mapping[str, int]
) -> list[tuple[str, str]]:
    """Kruskal inside one component graph under the rank-refined edge order.

    Edges all share one weight class, so the order is determined by the ranks
    of the original endpoints; connectivity is tracked on component labels.
    This scan accepts exactly the edges the global rank-refined Kruskal would
    accept from this graph.
    """

    def key(e: ComponentEdge) -> tuple[int, int]:
        ru, rv = rank[e.u], rank[e.v]
        return (ru, rv) if ru < rv else (rv, ru)

    dsu = DisjointSetForest(graph.vertices)
    picked: list[tuple[str, str]] = []
    for e in sorted(graph.edges, key=key):
        a, b = dsu.find(e.comp_u), dsu.find(e.comp_v)
        if a != b:
            dsu.union(a, b)
            picked.append((e.u, e.v))
    return picked


def min_leaf_vrmst(
    matrix: DistanceMatrix,
    tol: float = DEFAULT_TOL,
    *,
    check_additive: bool | None = None,
    additivity_tol: float | None = None,
    parallel: bool = False,
) -> MinLeafResult:
    """Rank-refined MST with the minimum number of leaves over all rankings.

    The minimality guarantee holds for tree-additive distances.  For other
    inputs a valid rank-refined MST is still returned and a
    :class:`NonAdditivityWarning` is emitted when the four-point scan runs
    and fails.  *check_additive* forces the scan on or off; by default it
    runs only for matrices of at most ``ADDITIVITY_CHECK_LIMIT`` taxa, since
    it is quartic in the number of taxa.  The scan compares sums of matrix
    entries, so callers whose input went through a rounded file format
    should pass a correspondingly looser *additivity_tol* (defaults to
    *tol*).

    With ``parallel=True`` the independent per-component selections run on a
    thread pool; results are merged in a fixed order, so the output is
    identical to the sequential one.
    """
    sweep = weight_class_sweep(matrix, tol)
    ranking = ranking_from_degrees(sweep.max_degree)
    rank = ranking.mapping
    if parallel and len(sweep.component_graphs) > 1:
        with ThreadPoolExecutor() as pool:
            selections = list(
                pool.map(
                    lambda g: _component_selection(g, rank),
                    sweep.component_graphs,
                )
            )
    else:
        selections = [
            _component_selection(g, rank) for g in sweep.component_graphs
        ]
    edges: dict[tuple[str, str], float] = {}
    for u, v in sweep.fixed_edges:
        pair = (u, v) if u < v else (v, u)
        edges[pair] = matrix.d(u, v)
    for picked in selections:
        for u, v in picked:
            pair = (u, v) if u < v else (v, u)
            edges[pair] = matrix.d(u, v)
    tree = SpanningTree(matrix.taxa, edges)

    if check_additive is None:
        check_additive = len(matrix) <= ADDITIVITY_CHECK_LIMIT
    additive: bool | None = None
    if check_additive:
        additive = check_additivity(
            matrix, tol if additivity_tol is None else additivity_tol
        )
        if not additive:
            warnings.warn(
                "distances are not tree-additive; the spanning tree is a valid "
                "vertex-ranked MST but its leaf count may not be minimal",
                NonAdditivityWarning,
                stacklevel=2,
            )
    return MinLeafResult(
        tree=tree, ranking=ranking, max_degree=sweep.max_degree, additive=additive
    )


def laminar_family(matrix: DistanceMatrix, tol: float = DEFAULT_TOL) -> LaminarFamily:
    """Laminar family of weight-threshold component sets of *matrix*."""
    return weight_class_sweep(matrix, tol).family
