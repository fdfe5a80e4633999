"""Seeded tree generators: caterpillar, balanced, and random topologies.

Every generator draws from ``random.Random(seed)`` -- Python's Mersenne
Twister -- so a given seed reproduces the identical tree on any platform.
Random edge lengths stay in [0.1, 2.0]; the lower bound keeps lengths safely
away from zero under floating point.
"""

from __future__ import annotations

import random

from .model import PhyloTree

LENGTH_RANGE = (0.1, 2.0)


def _taxon_names(n: int, width: int | None = None) -> list[str]:
    width = width or len(str(n))
    return [f"t{k:0{width}d}" for k in range(1, n + 1)]


def gen_caterpillar(n_taxa: int, *, clock: bool = False, seed: int = 0) -> PhyloTree:
    """Caterpillar tree: a hidden backbone with pendant taxa.

    Two taxa hang off each end of the backbone and one off each inner
    vertex.  With ``clock=True`` the pendant lengths grow along unit
    backbone edges so that rooting at the deepest backbone vertex places
    every taxon at the same depth; otherwise lengths are random.
    """
    if n_taxa < 3:
        raise ValueError(f"a caterpillar needs at least 3 taxa, got {n_taxa}")
    rng = random.Random(seed)
    k = n_taxa - 2
    backbone = [f"h{i}" for i in range(1, k + 1)]
    taxa = _taxon_names(n_taxa)
    attach: list[tuple[str, str]] = [(taxa[0], backbone[0]), (taxa[1], backbone[0])]
    for i in range(1, k - 1):
        attach.append((taxa[i + 1], backbone[i]))
    if k >= 2:
        attach.append((taxa[-2], backbone[-1]))
        attach.append((taxa[-1], backbone[-1]))
    else:
        attach.append((taxa[2], backbone[0]))
    edges: list[tuple[str, str, float]] = []
    for i in range(k - 1):
        length = 1.0 if clock else rng.uniform(*LENGTH_RANGE)
        edges.append((backbone[i], backbone[i + 1], length))
    depth = {h: i + 1 for i, h in enumerate(backbone)}
    for taxon, h in attach:
        length = float(depth[h]) if clock else rng.uniform(*LENGTH_RANGE)
        edges.append((taxon, h, length))
    return PhyloTree(edges, labels=taxa)


def gen_balanced(depth: int, *, clock: bool = False, seed: int = 0) -> PhyloTree:
    """Maximally balanced tree over 2**depth taxa.

    Built as a complete binary topology whose degree-2 top vertex is then
    smoothed away, so every hidden vertex has degree three.  ``depth=1``
    degenerates to a single edge between two taxa.
    """
    if depth < 1:
        raise ValueError(f"depth must be at least 1, got {depth}")
    rng = random.Random(seed)
    n = 2**depth
    taxa = _taxon_names(n)
    level = list(taxa)
    edges: list[tuple[str, str, float]] = []
    counter = 0
    while len(level) > 2:
        parents = []
        for a, b in zip(level[::2], level[1::2]):
            counter += 1
            p = f"h{counter}"
            la = 1.0 if clock else rng.uniform(*LENGTH_RANGE)
            lb = 1.0 if clock else rng.uniform(*LENGTH_RANGE)
            edges.append((a, p, la))
            edges.append((b, p, lb))
            parents.append(p)
        level = parents
    a, b = level
    la = 1.0 if clock else rng.uniform(*LENGTH_RANGE)
    lb = 1.0 if clock else rng.uniform(*LENGTH_RANGE)
    edges.append((a, b, la + lb))
    return PhyloTree(edges, labels=taxa)


def gen_random(
    n_taxa: int,
    *,
    general_labels: bool = False,
    seed: int = 0,
    label_prob: float = 0.3,
) -> PhyloTree:
    """Random topology by sequential leaf attachment, random lengths.

    Each new taxon subdivides a uniformly chosen edge with a fresh hidden
    vertex.  With ``general_labels=True`` each hidden vertex is then
    promoted to a labeled internal taxon with probability *label_prob*, so
    the tree can contain ancestor-descendant pairs.
    """
    if n_taxa < 2:
        raise ValueError(f"need at least 2 taxa, got {n_taxa}")
    rng = random.Random(seed)
    taxa = _taxon_names(n_taxa)
    pairs: list[tuple[str, str]] = [(taxa[0], taxa[1])]
    hidden: list[str] = []
    for k in range(2, n_taxa):
        u, v = pairs.pop(rng.randrange(len(pairs)))
        h = f"h{len(hidden) + 1}"
        hidden.append(h)
        pairs.extend([(u, h), (v, h), (taxa[k], h)])
    labels = set(taxa)
    rename: dict[str, str] = {}
    if general_labels:
        extra = 0
        for h in hidden:
            if rng.random() < label_prob:
                extra += 1
                name = f"x{extra:02d}"
                rename[h] = name
                labels.add(name)
    edges = [
        (rename.get(u, u), rename.get(v, v), rng.uniform(*LENGTH_RANGE))
        for u, v in pairs
    ]
    return PhyloTree(edges, labels=labels)
