"""Diagnostic report for the min-leaf pipeline: text blocks and figures.

The text report is line oriented -- ``#%``-headed sections holding either
``key<TAB>value`` pairs or plain TSV rows -- so golden files diff cleanly.
Figures (a drawing of the spanning tree and a bar chart of the per-vertex
maximum MST degrees) are rendered to PNG files next to the delimited output
when a figure directory is given.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .min_leaf import MinLeafResult, SweepResult
from .model import DistanceMatrix, SpanningTree, count_leaves


def format_report(
    matrix: DistanceMatrix, sweep: SweepResult, result: MinLeafResult
) -> str:
    """Structured text: summary, degree table, ranking, edge partition, family."""
    lines: list[str] = []
    lines.append("#% summary")
    lines.append(f"taxa\t{len(matrix)}")
    lines.append(f"leaves\t{count_leaves(result.tree)}")
    lines.append(f"fixed_edges\t{len(sweep.fixed_edges)}")
    lines.append(f"flexible_component_graphs\t{len(sweep.component_graphs)}")
    additive = {True: "true", False: "false", None: "unchecked"}[result.additive]
    lines.append(f"additive\t{additive}")

    lines.append("#% max_mst_degree")
    lines.append("taxon\tmax_degree")
    for t in matrix.taxa:
        lines.append(f"{t}\t{result.max_degree[t]}")

    lines.append("#% ranking")
    lines.append("taxon\trank")
    for t in result.ranking.by_rank():
        lines.append(f"{t}\t{result.ranking.rank(t)}")

    lines.append("#% fixed_edges")
    lines.append("u\tv\tweight")
    for u, v in sorted(sweep.fixed_edges):
        lines.append(f"{u}\t{v}\t{matrix.d(u, v):.10g}")

    lines.append("#% flexible_component_graphs")
    lines.append("graph\tclass_weight\tu\tv\tcomp_u\tcomp_v")
    for k, graph in enumerate(sweep.component_graphs):
        for e in graph.edges:
            lines.append(
                f"{k}\t{graph.weight:.10g}\t{e.u}\t{e.v}\t{e.comp_u}\t{e.comp_v}"
            )

    lines.append("#% laminar_family")
    lines.append("threshold\tsize\tmembers")
    for s in sorted(
        sweep.family.sets, key=lambda s: (s.threshold, len(s.members), sorted(s.members))
    ):
        lines.append(
            f"{s.threshold:.10g}\t{len(s.members)}\t{','.join(sorted(s.members))}"
        )
    return "\n".join(lines) + "\n"


def _tree_layout(tree: SpanningTree) -> dict[str, tuple[float, float]]:
    """Equal-angle layout: wedges proportional to subtree leaf counts."""
    root = max(tree.taxa, key=lambda v: (tree.degree(v), v))
    leaf_count: dict[str, int] = {}

    def count(v: str, parent: str | None) -> int:
        children = [u for u in tree.neighbors(v) if u != parent]
        if not children:
            leaf_count[v] = 1
        else:
            leaf_count[v] = sum(count(u, v) for u in children)
        return leaf_count[v]

    count(root, None)
    pos: dict[str, tuple[float, float]] = {root: (0.0, 0.0)}

    def place(v: str, parent: str | None, lo: float, hi: float) -> None:
        x, y = pos[v]
        angle = lo
        for u in tree.neighbors(v):
            if u == parent:
                continue
            span = (hi - lo) * leaf_count[u] / leaf_count[v]
            mid = angle + span / 2
            pos[u] = (x + math.cos(mid), y + math.sin(mid))
            place(u, v, angle, angle + span)
            angle += span

    place(root, None, 0.0, 2 * math.pi)
    return pos


def render_figures(
    matrix: DistanceMatrix,
    sweep: SweepResult,
    result: MinLeafResult,
    outdir: str | Path,
    stem: str,
) -> list[Path]:
    """Write the spanning-tree drawing and the degree bar chart as PNGs."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    tree = result.tree
    pos = _tree_layout(tree)
    leaves = set(tree.leaves())
    fig, ax = plt.subplots(figsize=(7, 7))
    for u, v, _ in tree.edges():
        (x1, y1), (x2, y2) = pos[u], pos[v]
        ax.plot([x1, x2], [y1, y2], color="0.55", lw=1.2, zorder=1)
    for v, (x, y) in pos.items():
        color = "#d62728" if v in leaves else "#1f77b4"
        ax.scatter([x], [y], s=48, color=color, zorder=2)
        ax.annotate(
            v, (x, y), textcoords="offset points", xytext=(4, 4), fontsize=8
        )
    ax.set_title(
        f"spanning tree: {len(tree.taxa)} taxa, {len(leaves)} leaves (red)"
    )
    ax.set_aspect("equal")
    ax.axis("off")
    tree_path = outdir / f"{stem}_tree.png"
    fig.savefig(tree_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(tree_path)

    taxa = result.ranking.by_rank()
    degrees = [result.max_degree[t] for t in taxa]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.35 * len(taxa)), 4))
    ax.bar(range(len(taxa)), degrees, color="#1f77b4")
    ax.set_xticks(range(len(taxa)))
    ax.set_xticklabels(taxa, rotation=90, fontsize=8)
    ax.set_ylabel("max degree over all MSTs")
    ax.set_xlabel("taxon (rank order)")
    ax.set_title("per-vertex maximum MST degree")
    degree_path = outdir / f"{stem}_max_degree.png"
    fig.savefig(degree_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(degree_path)
    return written
