"""Disjoint-set forest with union by size and path compression."""

from __future__ import annotations

from typing import Hashable, Iterable

from .errors import ContractViolationError


class DisjointSetForest:
    """Union-find over hashable elements.

    Union is by size with a deterministic winner: on equal sizes the smaller
    element (by ``<``) becomes the root, so component roots are reproducible
    for any operation order.  Single-writer: hand the forest between tasks
    whole, never mutate it concurrently.
    """

    def __init__(self, elements: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self._size: dict = {}
        for e in elements:
            self.make_set(e)

    def make_set(self, e) -> None:
        if e in self.parent:
            raise ContractViolationError(f"{e!r} is already in the forest")
        self.parent[e] = e
        self._size[e] = 1

    def find(self, e):
        root = e
        while (p := self.parent[root]) != root:
            root = p
        while (p := self.parent[e]) != root:
            self.parent[e] = root
            e = p
        return root

    def union(self, a, b):
        """Merge the components rooted at *a* and *b*; returns the new root.

        Both arguments must be distinct roots (pass the results of ``find``).
        """
        if self.parent.get(a) != a or self.parent.get(b) != b:
            raise ContractViolationError("union arguments must both be roots")
        if a == b:
            raise ContractViolationError("cannot union a component with itself")
        sa, sb = self._size[a], self._size[b]
        if sa > sb or (sa == sb and a < b):
            winner, loser = a, b
        else:
            winner, loser = b, a
        self.parent[loser] = winner
        self._size[winner] = sa + sb
        del self._size[loser]
        return winner

    def size(self, root) -> int:
        if self.parent.get(root) != root:
            raise ContractViolationError(f"{root!r} is not a root")
        return self._size[root]

    def connected(self, a, b) -> bool:
        return self.find(a) == self.find(b)

    def components(self) -> dict:
        """Mapping from each root to the frozenset of its members."""
        groups: dict = {}
        for e in self.parent:
            groups.setdefault(self.find(e), []).append(e)
        return {root: frozenset(members) for root, members in groups.items()}

    def __contains__(self, e) -> bool:
        return e in self.parent

    def __len__(self) -> int:
        return len(self.parent)
