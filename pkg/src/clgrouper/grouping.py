"""Neighborhood-by-neighborhood tree reconstruction over a spanning tree.

Each internal vertex of the spanning tree, together with its current
neighbors, forms a group.  Neighbor joining resolves the group into a small
subtree which then replaces the star around the center.  Distances to the
hidden vertices a group introduces are carried forward by the anchor rule
``d(h, k) = d(v, k) - d(v, h)``, where ``v`` is the center whose group
created ``h``; nothing else about a hidden vertex needs to be remembered.

The visiting order of the centers does not matter for the result; the
optional parallel mode exploits that by running the per-group neighbor
joining concurrently and applying the splices in a fixed order.
"""

from __future__ import annotations

import itertools
import warnings
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import NonAdditivityWarning, TaxonMismatchError
from .model import (
    DEFAULT_TOL,
    DistanceMatrix,
    PhyloTree,
    SpanningTree,
)


def vertex_groups(mst: SpanningTree) -> tuple[str, ...]:
    """Internal vertices of the spanning tree, in ascending id order.

    These are the group centers; a two-taxon tree has none.
    """
    return tuple(v for v in mst.taxa if mst.degree(v) >= 2)


@dataclass
class _HiddenInfo:
    anchor: str
    anchor_dist: float
    seq: int


class ReconstructionState:
    """Working tree plus the extended distance store used while grouping.

    The working tree starts as the spanning tree and ends as the
    reconstructed phylogeny.  Every hidden vertex the reconstruction
    introduces is tagged with its anchor (the center whose group created it)
    and the anchor distance; all other distances involving hidden vertices
    derive from those two numbers and the original matrix via the anchor
    rule.  Distances between original taxa always come straight from the
    matrix.
    """

    def __init__(self, matrix: DistanceMatrix, mst: SpanningTree, epsilon: float):
        self.matrix = matrix
        self.epsilon = epsilon
        self.adjacency: dict[str, dict[str, float]] = {
            t: {v: mst.weight(t, v) for v in mst.neighbors(t)} for t in mst.taxa
        }
        self.hidden: dict[str, _HiddenInfo] = {}
        self._memo: dict[tuple[str, str], float] = {}
        self._flagged = False
        prefix = "h#"
        while any(prefix in t for t in matrix.taxa):
            prefix = "#" + prefix
        self._prefix = prefix

    def hidden_name(self, center: str, k: int) -> str:
        return f"{self._prefix}{center}.{k}"

    def register_hidden(self, name: str, anchor: str, anchor_dist: float) -> None:
        self.hidden[name] = _HiddenInfo(anchor, anchor_dist, len(self.hidden))

    def flag_non_additive(self) -> None:
        if not self._flagged:
            self._flagged = True
            warnings.warn(
                "distance estimates conflict with a tree beyond tolerance; "
                "the reconstruction may not reproduce the source distances",
                NonAdditivityWarning,
                stacklevel=3,
            )

    def _clamped(self, d: float) -> float:
        if d < 0.0:
            if d < -self.epsilon:
                self.flag_non_additive()
            return 0.0
        return d

    def distance(self, x: str, y: str) -> float:
        """Distance between any two vertices of the working tree."""
        if x == y:
            return 0.0
        key = (x, y) if x <= y else (y, x)
        memo = self._memo.get(key)
        if memo is not None:
            return memo
        hx = self.hidden.get(x)
        hy = self.hidden.get(y)
        if hx is None and hy is None:
            d = self.matrix.d(x, y)
        elif hx is None:
            d = self._taxon_to_hidden(x, y)
        elif hy is None:
            d = self._taxon_to_hidden(y, x)
        elif hx.seq < hy.seq:
            # Between two hidden vertices, the older one's anchor rules.
            d = self._clamped(self.distance(hx.anchor, y) - hx.anchor_dist)
        else:
            d = self._clamped(self.distance(hy.anchor, x) - hy.anchor_dist)
        self._memo[key] = d
        return d

    def _taxon_to_hidden(self, taxon: str, h: str) -> float:
        info = self.hidden[h]
        if taxon == info.anchor:
            return info.anchor_dist
        return self._clamped(self.matrix.d(info.anchor, taxon) - info.anchor_dist)


def extend_hidden_distance(state: ReconstructionState, h: str, k: str) -> float:
    """Distance from an introduced hidden vertex *h* to any other vertex *k*.

    Applies the anchor rule through *h*'s anchor; the result is clamped at
    zero, and a clamp beyond the tolerance flags the input as non-additive.
    """
    if h not in state.hidden:
        raise KeyError(f"{h!r} is not an introduced hidden vertex")
    if k == h:
        raise ValueError("the two vertices must be distinct")
    return state.distance(h, k)


def _default_namer(ids: Iterable[str]) -> Callable[[], str]:
    taken = set(ids)
    counter = itertools.count(1)

    def fresh() -> str:
        while True:
            name = f"h{next(counter)}"
            if name not in taken:
                return name

    return fresh


def _nj_edges(
    ids: tuple[str, ...],
    dist: Callable[[str, str], float],
    epsilon: float,
    fresh_hidden: Callable[[], str],
    on_negative: Callable[[], None],
) -> list[tuple[str, str, float]]:
    """Neighbor joining over *ids*, contracting sub-epsilon hidden edges.

    Returns the edge list of the joined tree.  Branch estimates below
    ``-epsilon`` invoke *on_negative*; all sub-epsilon edges incident to a
    hidden vertex are contracted, which is what lets an input id end up as
    an internal vertex.
    """
    if len(ids) == 1:
        return []
    if len(ids) == 2:
        a, b = ids
        return [(a, b, dist(a, b))]

    active = list(ids)
    d = {i: {} for i in active}
    for i, j in itertools.combinations(active, 2):
        d[i][j] = d[j][i] = dist(i, j)
    edges: list[tuple[str, str, float]] = []
    created: dict[str, int] = {}

    while len(active) > 3:
        m = len(active)
        r = {i: sum(d[i][k] for k in active if k != i) for i in active}
        best = None
        best_q = None
        for i, j in itertools.combinations(active, 2):
            q = (m - 2) * d[i][j] - r[i] - r[j]
            if best_q is None or q < best_q:
                best_q = q
                best = (i, j)
        i, j = best  # type: ignore[misc]
        u = fresh_hidden()
        created[u] = len(created)
        dij = d[i][j]
        li = 0.5 * dij + (r[i] - r[j]) / (2 * (m - 2))
        lj = dij - li
        edges.append((i, u, li))
        edges.append((j, u, lj))
        d[u] = {}
        for k in active:
            if k == i or k == j:
                continue
            duk = 0.5 * (d[i][k] + d[j][k] - dij)
            d[u][k] = d[k][u] = duk
        active.remove(i)
        active.remove(j)
        active.append(u)

    a, b, c = active
    u = fresh_hidden()
    created[u] = len(created)
    edges.append((a, u, 0.5 * (d[a][b] + d[a][c] - d[b][c])))
    edges.append((b, u, 0.5 * (d[a][b] + d[b][c] - d[a][c])))
    edges.append((c, u, 0.5 * (d[a][c] + d[b][c] - d[a][b])))

    # Contract sub-epsilon edges that touch a hidden vertex.  A hidden-labeled
    # contraction absorbs the hidden vertex into the label (the label becomes
    # internal); hidden-hidden keeps the earlier-created one.
    merged: dict[str, str] = {}

    def resolve(x: str) -> str:
        while x in merged:
            x = merged[x]
        return x

    kept: list[tuple[str, str, float]] = []
    for x, y, length in edges:
        if length < -epsilon:
            on_negative()
        x, y = resolve(x), resolve(y)
        if length < epsilon and (x in created or y in created):
            if x in created and y in created:
                keep, drop = (x, y) if created[x] < created[y] else (y, x)
            elif x in created:
                keep, drop = y, x
            else:
                keep, drop = x, y
            merged[drop] = keep
        else:
            kept.append((x, y, length))
    return [(resolve(x), resolve(y), length) for x, y, length in kept]


def nj_generally_labeled(
    matrix: DistanceMatrix, epsilon: float = DEFAULT_TOL
) -> PhyloTree:
    """Neighbor joining that permits labeled internal vertices.

    Standard joins first; afterwards every edge shorter than *epsilon* and
    incident to a hidden vertex is contracted, so a taxon lying on the path
    between others comes out as a labeled internal vertex.  On additive
    input the result realizes the input distances exactly.
    """
    ids = matrix.taxa
    flagged = [False]

    def on_negative() -> None:
        flagged[0] = True

    edges = _nj_edges(ids, matrix.d, epsilon, _default_namer(ids), on_negative)
    if flagged[0]:
        warnings.warn(
            "negative branch estimates beyond tolerance; input distances "
            "are not additive in any tree",
            NonAdditivityWarning,
            stacklevel=2,
        )
    return PhyloTree(edges, labels=ids, vertices=ids)


def _build_group(
    state: ReconstructionState, center: str, members: tuple[str, ...]
) -> tuple[list[tuple[str, str, float]], list[tuple[str, float]]]:
    """Neighbor-join one group; returns its edges and new hiddens with anchor distances."""
    counter = itertools.count(1)

    def fresh() -> str:
        return state.hidden_name(center, next(counter))

    edges = _nj_edges(
        members, state.distance, state.epsilon, fresh, state.flag_non_additive
    )
    adj: dict[str, dict[str, float]] = {}
    for u, v, length in edges:
        adj.setdefault(u, {})[v] = length
        adj.setdefault(v, {})[u] = length
    # Anchor distances are path lengths from the center inside the group tree.
    dist = {center: 0.0}
    stack = [center]
    while stack:
        x = stack.pop()
        for y, length in adj.get(x, {}).items():
            if y not in dist:
                dist[y] = dist[x] + length
                stack.append(y)
    member_set = set(members)
    # Creation order (the name counter) keys hidden seniority deterministically.
    new_hidden = sorted(
        (v for v in adj if v not in member_set),
        key=lambda v: int(v.rsplit(".", 1)[1]),
    )
    return edges, [(h, dist[h]) for h in new_hidden]


def _splice(
    state: ReconstructionState,
    center: str,
    members: tuple[str, ...],
    edges: list[tuple[str, str, float]],
    new_hidden: list[tuple[str, float]],
) -> None:
    """Replace the star around *center* with the group's tree."""
    adj = state.adjacency
    removed = 0
    for m in members:
        if m == center:
            continue
        del adj[center][m]
        del adj[m][center]
        removed += 1
    for h, anchor_dist in new_hidden:
        state.register_hidden(h, center, anchor_dist)
    added = 0
    for u, v, length in edges:
        row = adj.setdefault(u, {})
        assert v not in row, f"splice would duplicate edge {u!r}-{v!r}"
        row[v] = length
        adj.setdefault(v, {})[u] = length
        added += 1
    # |E| grew by exactly the number of new vertices, so the working graph
    # stays a tree (the group tree reconnects everything the star held).
    assert added - removed == len(new_hidden), "splice broke the tree invariant"


def _normalize(state: ReconstructionState) -> list[tuple[str, str, float]]:
    """Clean the finished working tree of artifacts a wrong MST can leave.

    Contracts residual sub-epsilon edges that touch a hidden vertex, then
    drops hidden leaves and smooths degree-2 hidden vertices.  None of these
    occur when the reconstruction is exact, and none of the removals changes
    any distance between labeled vertices beyond epsilon.
    """
    adj = state.adjacency
    hidden = set(state.hidden)
    seq = {h: info.seq for h, info in state.hidden.items()}

    def merge(drop: str, keep: str) -> None:
        for nbr, length in adj.pop(drop).items():
            if nbr == keep:
                del adj[keep][drop]
            else:
                del adj[nbr][drop]
                adj[keep][nbr] = adj[nbr][keep] = length

    changed = True
    while changed:
        changed = False
        for v in sorted(hidden & adj.keys()):
            short = [
                u
                for u, length in adj[v].items()
                if length < state.epsilon
            ]
            if short:
                u = min(short)
                if u in hidden and seq[u] > seq[v]:
                    merge(u, v)
                else:
                    merge(v, u)
                changed = True
                break
        for v in sorted(hidden & adj.keys()):
            nbrs = adj[v]
            if len(nbrs) > 2:
                continue
            if len(nbrs) == 2:
                (a, la), (b, lb) = sorted(nbrs.items())
                del adj[a][v]
                del adj[b][v]
                adj[a][b] = adj[b][a] = la + lb
            else:
                for a in list(nbrs):
                    del adj[a][v]
            del adj[v]
            changed = True
    return [
        (u, v, length)
        for u, row in adj.items()
        for v, length in row.items()
        if u < v
    ]


def _current_members(state: ReconstructionState, center: str) -> tuple[str, ...]:
    return (center,) + tuple(sorted(state.adjacency[center]))


def clgrouping(
    matrix: DistanceMatrix,
    mst: SpanningTree,
    epsilon: float = DEFAULT_TOL,
    *,
    parallel: bool = False,
) -> PhyloTree:
    """Reconstruct a phylogeny from pairwise distances and a spanning tree.

    Visits the spanning tree's internal vertices in ascending id order and
    replaces each one's star with the neighbor-joined tree of its group.  If
    the distances are additive in a tree T and *mst* is a rank-refined MST of
    them, the output realizes T exactly; an arbitrary MST carries no such
    guarantee.
    """
    if set(mst.taxa) != set(matrix.taxa):
        raise TaxonMismatchError("spanning tree and matrix cover different taxa")
    state = ReconstructionState(matrix, mst, epsilon)
    centers = vertex_groups(mst)
    if parallel:
        _run_parallel(state, centers)
    else:
        for center in centers:
            if len(state.adjacency[center]) < 2:
                continue
            members = _current_members(state, center)
            edges, new_hidden = _build_group(state, center, members)
            _splice(state, center, members, edges, new_hidden)
    edges = _normalize(state)
    return PhyloTree(edges, labels=matrix.taxa, vertices=matrix.taxa)


def _run_parallel(state: ReconstructionState, centers: tuple[str, ...]) -> None:
    """Run group reconstructions concurrently, splicing in center order.

    A center's membership depends only on the group trees of earlier centers
    whose groups contain it, so those splices are applied (waiting on their
    futures if needed) just before the membership is read; everything else
    overlaps freely.  Memberships, distances and hidden names are all
    independent of scheduling, so the result is identical to the sequential
    run.
    """
    center_set = set(centers)
    touchers: dict[str, list[str]] = {c: [] for c in centers}
    members_of: dict[str, tuple[str, ...]] = {}
    futures: dict[str, Future] = {}
    spliced: set[str] = set()

    def ensure_spliced(z: str) -> None:
        if z in spliced:
            return
        spliced.add(z)
        edges, new_hidden = futures[z].result()
        _splice(state, z, members_of[z], edges, new_hidden)

    with ThreadPoolExecutor() as pool:
        for c in centers:
            for z in touchers[c]:
                ensure_spliced(z)
            if len(state.adjacency[c]) < 2:
                continue
            members = _current_members(state, c)
            members_of[c] = members
            for m in members:
                if m in center_set and m > c:
                    touchers[m].append(c)
            futures[c] = pool.submit(_build_group, state, c, members)
        for c in centers:
            if c in futures:
                ensure_spliced(c)
