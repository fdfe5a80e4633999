"""Shared fixtures: two small reference trees used across the suite.

quartet
    a - h1 - h2 - c        unit lengths everywhere; distances
    b /         \\ d        d(a,b)=d(c,d)=2, all cross pairs 3.

caterpillar5
    l1,l2 on h1; h1-h3 (1); l3 on h3 (2); h3-h2 (1); l4,l5 on h2.
    Cherry distances 2, every other pair 4, so the weight-4 class admits
    many minimum spanning trees -- the ambiguity the rank refinement fixes.
"""

from __future__ import annotations

import random

import pytest

from clgrouper import PhyloTree, additive_distances


@pytest.fixture(scope="session")
def quartet() -> PhyloTree:
    return PhyloTree(
        [
            ("a", "h1", 1.0),
            ("b", "h1", 1.0),
            ("h1", "h2", 1.0),
            ("c", "h2", 1.0),
            ("d", "h2", 1.0),
        ],
        labels=["a", "b", "c", "d"],
    )


@pytest.fixture(scope="session")
def quartet_matrix(quartet):
    return additive_distances(quartet)


@pytest.fixture(scope="session")
def caterpillar5() -> PhyloTree:
    return PhyloTree(
        [
            ("l1", "h1", 1.0),
            ("l2", "h1", 1.0),
            ("h1", "h3", 1.0),
            ("l3", "h3", 2.0),
            ("h3", "h2", 1.0),
            ("l4", "h2", 1.0),
            ("l5", "h2", 1.0),
        ],
        labels=["l1", "l2", "l3", "l4", "l5"],
    )


@pytest.fixture(scope="session")
def caterpillar5_matrix(caterpillar5):
    return additive_distances(caterpillar5)


# The plain MST of caterpillar5 on which grouping reconstructs the wrong tree.
BAD_MST_EDGES = (("l1", "l2"), ("l2", "l3"), ("l1", "l4"), ("l4", "l5"))


def quantize_lengths(tree: PhyloTree, seed: int) -> PhyloTree:
    """Snap edge lengths onto a coarse grid so distances collide heavily."""
    rng = random.Random(seed)
    edges = [
        (u, v, rng.choice([0.5, 1.0, 1.5, 2.0])) for u, v, _ in tree.edges()
    ]
    return PhyloTree(edges, labels=tree.taxa)


def connected_in(tree, members) -> bool:
    """Whether *members* induces a connected subgraph of a spanning tree."""
    start = next(iter(members))
    seen = {start}
    stack = [start]
    while stack:
        for u in tree.neighbors(stack.pop()):
            if u in members and u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(members)
