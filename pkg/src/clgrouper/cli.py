"""Batch command-line interface.

Subcommands: ``simulate``, ``distances``, ``mst``, ``mlvrmst``, ``clgroup``,
``verify``, ``compare``.  Results go to stdout (machine parseable),
diagnostics to stderr.  Exit codes: 0 success, 1 validation error,
2 verification failure, 3 size-guard refusal.

The environment variable ``CLGROUPER_TOL`` overrides the default tolerance
(1e-9) used where a subcommand takes no explicit ``--tol``/``--epsilon``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from pathlib import Path

from .errors import ClgrouperError, NonAdditivityWarning, SizeGuardError
from .grouping import clgrouping
from .min_leaf import min_leaf_vrmst, weight_class_sweep
from .model import (
    DEFAULT_TOL,
    VertexRanking,
    additive_distances,
    check_additivity,
    count_leaves,
    trees_equal,
)
from .oracle import (
    RANKING_SWEEP_LIMIT,
    enumerate_msts,
    min_leaf_vrmst_bruteforce,
    mst_max_degrees_bruteforce,
)
from .ranked_mst import kruskal_vertex_ranked
from .simulate import gen_balanced, gen_caterpillar, gen_random
from .treeio import (
    format_edge_list,
    parse_edge_list,
    parse_newick,
    read_distance_matrix,
    spanning_tree_from_edges,
    write_distance_matrix,
    write_newick,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VERIFY_FAILED = 2
EXIT_SIZE_GUARD = 3


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); keep 2 for verify only
        raise _CliError(message)


def _default_tol() -> float:
    raw = os.environ.get("CLGROUPER_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise _CliError(f"CLGROUPER_TOL is not a number: {raw!r}") from None
    if not value >= 0:
        raise _CliError(f"CLGROUPER_TOL must be non-negative, got {value!r}")
    return value


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc}") from None


def _additivity_tol(matrix, tol: float) -> float:
    # Matrix files carry 10 significant digits; the four-point scan sums
    # entries, so scale its slack to the data's magnitude.
    return max(tol, 1e-8 * float(matrix.values.max(initial=0.0)))


def _load_ranking(path: str, taxa) -> VertexRanking:
    ranks = {}
    for lineno, line in enumerate(_read(path).splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 2:
            raise _CliError(f"{path}:{lineno}: expected 'taxon rank'")
        try:
            ranks[fields[0]] = int(fields[1])
        except ValueError:
            raise _CliError(f"{path}:{lineno}: rank must be an integer") from None
    if set(ranks) != set(taxa):
        raise _CliError(f"{path}: ranking does not cover exactly the matrix taxa")
    return VertexRanking(ranks)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clgrouper", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a tree, Newick on stdout")
    p.add_argument(
        "--shape", required=True, choices=("caterpillar", "balanced", "random")
    )
    p.add_argument("--n", required=True, type=int, help="number of taxa")
    p.add_argument("--clock", action="store_true")
    p.add_argument(
        "--general-labels",
        action="store_true",
        help="randomly promote hidden vertices to labeled taxa (random shape)",
    )
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("distances", help="tree to distance matrix")
    p.add_argument("tree", help="Newick file")

    p = sub.add_parser("mst", help="vertex-ranked MST, TSV edge list on stdout")
    p.add_argument("matrix", help="distance-matrix file")
    g = p.add_mutually_exclusive_group()
    g.add_argument(
        "--auto", action="store_true", help="rank taxa in id order (default)"
    )
    g.add_argument("--ranking", help="file of 'taxon rank' lines")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser(
        "mlvrmst", help="minimum-leaf vertex-ranked MST, TSV edge list on stdout"
    )
    p.add_argument("matrix", help="distance-matrix file")
    p.add_argument(
        "--report",
        action="store_true",
        help="append degree table, ranking, edge partition, laminar family",
    )
    p.add_argument(
        "--figures",
        metavar="DIR",
        help="render tree and degree figures as PNGs into DIR",
    )
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("clgroup", help="reconstruct a tree, Newick on stdout")
    p.add_argument("matrix", help="distance-matrix file")
    p.add_argument(
        "--mst",
        default="mlvrmst",
        help="'vrmst' (id-order ranking), 'mlvrmst' (default), or an edge-list file",
    )
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--epsilon", type=float, default=None)

    p = sub.add_parser("verify", help="run the brute-force checks (small matrices)")
    p.add_argument("matrix", help="distance-matrix file")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("compare", help="exit 0 iff two trees realize equal distances")
    p.add_argument("tree_a")
    p.add_argument("tree_b")
    p.add_argument(
        "--tol",
        type=float,
        default=None,
        help="comparison tolerance (default 1e-6, loose enough to absorb "
        "matrix-file rounding in a full pipeline)",
    )
    return parser


def _cmd_simulate(args) -> int:
    if args.shape == "caterpillar":
        tree = gen_caterpillar(args.n, clock=args.clock, seed=args.seed)
    elif args.shape == "balanced":
        depth = int(math.log2(args.n)) if args.n >= 2 else 0
        if 2**depth != args.n:
            raise _CliError("balanced shape needs a power-of-two taxon count")
        tree = gen_balanced(depth, clock=args.clock, seed=args.seed)
    else:
        tree = gen_random(args.n, general_labels=args.general_labels, seed=args.seed)
    print(write_newick(tree))
    return EXIT_OK


def _cmd_distances(args) -> int:
    tree = parse_newick(_read(args.tree))
    sys.stdout.write(write_distance_matrix(additive_distances(tree)))
    return EXIT_OK


def _cmd_mst(args) -> int:
    tol = args.tol if args.tol is not None else _default_tol()
    matrix = read_distance_matrix(_read(args.matrix), tol=tol)
    if args.ranking:
        ranking = _load_ranking(args.ranking, matrix.taxa)
    else:
        ranking = VertexRanking.identity(matrix.taxa)
    tree = kruskal_vertex_ranked(matrix, ranking, tol)
    sys.stdout.write(format_edge_list(tree))
    return EXIT_OK


def _cmd_mlvrmst(args) -> int:
    tol = args.tol if args.tol is not None else _default_tol()
    matrix = read_distance_matrix(_read(args.matrix), tol=tol)
    result = min_leaf_vrmst(
        matrix,
        tol,
        additivity_tol=_additivity_tol(matrix, tol),
        parallel=args.parallel,
    )
    sys.stdout.write(format_edge_list(result.tree))
    if args.report or args.figures:
        sweep = weight_class_sweep(matrix, tol)
        if args.report:
            from .report import format_report

            sys.stdout.write(format_report(matrix, sweep, result))
        if args.figures:
            from .report import render_figures

            stem = Path(args.matrix).stem or "matrix"
            for path in render_figures(matrix, sweep, result, args.figures, stem):
                print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def _cmd_clgroup(args) -> int:
    epsilon = args.epsilon if args.epsilon is not None else _default_tol()
    matrix = read_distance_matrix(_read(args.matrix), tol=epsilon)
    if args.mst == "vrmst":
        mst = kruskal_vertex_ranked(
            matrix, VertexRanking.identity(matrix.taxa), epsilon
        )
    elif args.mst == "mlvrmst":
        mst = min_leaf_vrmst(matrix, epsilon, parallel=args.parallel).tree
    else:
        edges = parse_edge_list(_read(args.mst))
        mst = spanning_tree_from_edges(matrix, edges, tol=epsilon)
    tree = clgrouping(matrix, mst, epsilon, parallel=args.parallel)
    print(write_newick(tree))
    return EXIT_OK


def _cmd_verify(args) -> int:
    tol = args.tol if args.tol is not None else _default_tol()
    matrix = read_distance_matrix(_read(args.matrix), tol=tol)
    if len(matrix) > RANKING_SWEEP_LIMIT:
        raise SizeGuardError(
            f"verify is limited to {RANKING_SWEEP_LIMIT} taxa, got {len(matrix)}"
        )
    failures = 0

    def report(name: str, ok: bool | None, note: str = "") -> None:
        nonlocal failures
        verdict = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        if ok is False:
            failures += 1
        suffix = f"  ({note})" if note else ""
        print(f"{name:<24} {verdict}{suffix}")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonAdditivityWarning)
        additive = check_additivity(matrix, _additivity_tol(matrix, tol))
        msts = enumerate_msts(matrix, tol)
        sweep = weight_class_sweep(matrix, tol)
        result = min_leaf_vrmst(matrix, tol, check_additive=False)

        report("laminar-family", sweep.family.is_laminar())

        connected = all(
            _induces_connected(tree, s.members)
            for tree in msts
            for s in sweep.family.sets
        )
        report("laminar-connectivity", connected, f"{len(msts)} MSTs")

        brute_deg = mst_max_degrees_bruteforce(matrix, tol)
        report("max-degree-by-sweep", dict(sweep.max_degree) == brute_deg)

        mst_edge_sets = {tree.edge_set for tree in msts}
        sample = [VertexRanking.identity(matrix.taxa), result.ranking]
        vr_member = all(
            kruskal_vertex_ranked(matrix, r, tol).edge_set in mst_edge_sets
            for r in sample
        )
        report("ranked-mst-is-mst", vr_member)

        if additive:
            best, _ = min_leaf_vrmst_bruteforce(matrix, tol)
            report(
                "min-leaf-optimality",
                count_leaves(result.tree) == best,
                f"{count_leaves(result.tree)} leaves",
            )
        else:
            report("min-leaf-optimality", None, "distances are not tree-additive")

    return EXIT_VERIFY_FAILED if failures else EXIT_OK


def _induces_connected(tree, members: frozenset) -> bool:
    start = next(iter(members))
    seen = {start}
    stack = [start]
    while stack:
        for u in tree.neighbors(stack.pop()):
            if u in members and u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(members)


def _cmd_compare(args) -> int:
    if args.tol is not None:
        tol = args.tol
    elif os.environ.get("CLGROUPER_TOL") is not None:
        tol = _default_tol()
    else:
        tol = 1e-6
    a = parse_newick(_read(args.tree_a))
    b = parse_newick(_read(args.tree_b))
    if trees_equal(a, b, tol):
        print("equal")
        return EXIT_OK
    print("different")
    return EXIT_INVALID


_COMMANDS = {
    "simulate": _cmd_simulate,
    "distances": _cmd_distances,
    "mst": _cmd_mst,
    "mlvrmst": _cmd_mlvrmst,
    "clgroup": _cmd_clgroup,
    "verify": _cmd_verify,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NonAdditivityWarning)
            code = _COMMANDS[args.command](args)
            for w in caught:
                print(f"warning: {w.message}", file=sys.stderr)
        return code
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE_GUARD
    except ClgrouperError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
