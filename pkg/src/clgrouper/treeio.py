"""Readers and writers: Newick trees, square distance matrices, edge lists.

Newick conventions
------------------
* Branch lengths are required on every vertex except the outermost group.
* A label on an internal group marks a labeled internal vertex (a sampled
  ancestor); unlabeled groups become hidden vertices.
* Trees are unrooted.  A hidden top vertex of degree two is smoothed away on
  parse (its two incident lengths are summed) and ``(a:1.5);`` collapses to
  the single-taxon tree ``a``.  Writing roots the tree at a convenient
  internal vertex, so ``parse(write(t))`` realizes the same distances as
  ``t``.

Distance matrices use the square layout: a count line, then one row per
taxon holding the name and n values (10 significant digits on write).
Edge lists are tab-separated ``u<TAB>v<TAB>weight`` lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    EdgeListFormatError,
    InvalidMatrixError,
    MatrixFormatError,
    NewickParseError,
)
from .model import DEFAULT_TOL, DistanceMatrix, PhyloTree, SpanningTree, sorted_pair

_RESERVED = set("():,;")


@dataclass
class _Node:
    label: str | None
    length: float | None
    children: list["_Node"] = field(default_factory=list)
    pos: int = 0


class _NewickParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None) -> NewickParseError:
        return NewickParseError(message, self.pos if pos is None else pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        if self.pos >= len(self.text):
            raise self.error("unexpected end of input")
        return self.text[self.pos]

    def take(self, expected: str) -> None:
        if self.peek() != expected:
            raise self.error(f"expected {expected!r}, found {self.text[self.pos]!r}")
        self.pos += 1

    def parse(self) -> _Node:
        root = self.parse_node()
        self.take(";")
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error("trailing characters after ';'")
        return root

    def parse_node(self) -> _Node:
        start = self.pos
        node = _Node(label=None, length=None, pos=start)
        if self.peek() == "(":
            self.take("(")
            node.children.append(self.parse_node())
            while self.peek() == ",":
                self.take(",")
                node.children.append(self.parse_node())
            if self.peek() != ")":
                raise self.error("expected ',' or ')'")
            self.take(")")
            node.pos = start
            node.label = self.parse_label(optional=True)
        else:
            node.label = self.parse_label(optional=False)
        if self.pos < len(self.text) and self.peek() == ":":
            self.take(":")
            node.length = self.parse_number()
        return node

    def parse_label(self, optional: bool) -> str | None:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in _RESERVED or c.isspace():
                break
            self.pos += 1
        label = self.text[start : self.pos]
        if not label:
            if optional:
                return None
            raise self.error("expected a vertex label", start)
        return label

    def parse_number(self) -> float:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos] not in _RESERVED and not self.text[self.pos].isspace()
        ):
            self.pos += 1
        token = self.text[start : self.pos]
        try:
            return float(token)
        except ValueError:
            raise self.error(f"invalid branch length {token!r}", start) from None


def parse_newick(text: str) -> PhyloTree:
    """Parse one Newick tree; see the module docstring for the conventions."""
    parser = _NewickParser(text)
    parser.skip_ws()
    if parser.pos >= len(text):
        raise parser.error("empty input")
    root = parser.parse()
    if root.length is not None:
        raise NewickParseError("the outermost group cannot carry a length", root.pos)

    labels: dict[str, int] = {}

    def collect(node: _Node) -> None:
        if node.label is not None:
            if node.label in labels:
                raise NewickParseError(f"duplicate label {node.label!r}", node.pos)
            labels[node.label] = node.pos
        for child in node.children:
            collect(child)

    collect(root)
    if not labels:
        raise NewickParseError("tree has no labeled vertices", root.pos)

    hidden_counter = 0
    edges: list[tuple[str, str, float]] = []

    def fresh_hidden() -> str:
        nonlocal hidden_counter
        while True:
            hidden_counter += 1
            name = f"h{hidden_counter}"
            if name not in labels:
                return name

    def walk(node: _Node, parent_name: str | None) -> str:
        name = node.label if node.label is not None else fresh_hidden()
        if parent_name is not None:
            if node.length is None:
                raise NewickParseError("missing branch length", node.pos)
            if node.length <= 0:
                raise NewickParseError(
                    f"branch length must be positive, got {node.length!r}", node.pos
                )
            edges.append((parent_name, name, node.length))
        for child in node.children:
            walk(child, name)
        return name

    root_name = walk(root, None)
    adjacency: dict[str, dict[str, float]] = {}
    for u, v, w in edges:
        adjacency.setdefault(u, {})[v] = w
        adjacency.setdefault(v, {})[u] = w
    adjacency.setdefault(root_name, {})

    # Unroot: smooth away hidden vertices of degree two (summing the two
    # incident lengths) and drop hidden vertices of degree one, repeatedly.
    while True:
        candidates = [
            v for v, nbrs in adjacency.items() if v not in labels and len(nbrs) <= 2
        ]
        if not candidates:
            break
        v = candidates[0]
        nbrs = adjacency.pop(v)
        if len(nbrs) == 2:
            (a, la), (b, lb) = sorted(nbrs.items())
            del adjacency[a][v]
            del adjacency[b][v]
            adjacency[a][b] = adjacency[b][a] = la + lb
        else:
            for a in nbrs:
                del adjacency[a][v]

    final_edges = [
        (u, v, w) for u, row in adjacency.items() for v, w in row.items() if u < v
    ]
    return PhyloTree(final_edges, labels=labels, vertices=labels)


def write_newick(tree: PhyloTree) -> str:
    """Serialize a tree to Newick, rooting it at an internal vertex."""
    vertices = tree.vertices
    if len(vertices) == 1:
        return f"{vertices[0]};"
    root = None
    for v in tree.hidden:
        root = v
        break
    if root is None:
        internal = [v for v in vertices if tree.degree(v) >= 2]
        root = internal[0] if internal else min(tree.taxa)

    def emit(v: str, parent: str | None) -> str:
        children = [u for u in tree.neighbors(v) if u != parent]
        label = v if tree.is_labeled(v) else ""
        if not children:
            body = label
        else:
            inner = ",".join(
                f"{emit(u, v)}:{tree.edge_length(v, u)!r}" for u in children
            )
            body = f"({inner}){label}"
        return body

    return f"{emit(root, None)};"


def read_distance_matrix(text: str, *, tol: float = DEFAULT_TOL) -> DistanceMatrix:
    """Parse a square distance-matrix file (count line, then name + n values)."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    head = lines[0].split()
    if len(head) != 1 or not head[0].isdigit():
        raise MatrixFormatError(
            f"first line must be the taxon count, got {lines[0]!r}"
        )
    n = int(head[0])
    rows = lines[1:]
    if len(rows) != n:
        raise MatrixFormatError(f"expected {n} rows, found {len(rows)}")
    taxa: list[str] = []
    values: list[list[float]] = []
    for row in rows:
        fields = row.split()
        name = fields[0] if fields else "?"
        if len(fields) != n + 1:
            raise MatrixFormatError(
                f"row {name} has {len(fields) - 1} values, expected {n}"
            )
        taxa.append(name)
        try:
            values.append([float(x) for x in fields[1:]])
        except ValueError as exc:
            raise MatrixFormatError(f"row {name}: {exc}") from None
    try:
        return DistanceMatrix(taxa, values, tol=tol)
    except InvalidMatrixError as exc:
        raise MatrixFormatError(str(exc)) from None


def write_distance_matrix(matrix: DistanceMatrix) -> str:
    """Serialize to the square layout with 10 significant digits."""
    lines = [str(len(matrix))]
    width = max(len(t) for t in matrix.taxa)
    for i, t in enumerate(matrix.taxa):
        row = " ".join(f"{matrix.values[i, j]:.10g}" for j in range(len(matrix)))
        lines.append(f"{t:<{width}} {row}")
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> list[tuple[str, str, float]]:
    """Parse tab-separated ``u v weight`` lines.

    Parsing stops at the first ``#%`` section header, so the output of the
    report mode can be fed back in whole as an edge list.
    """
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith("#%"):
            break
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise EdgeListFormatError(
                f"line {lineno}: expected 'u<TAB>v<TAB>weight', got {line!r}"
            )
        u, v, w = fields
        try:
            weight = float(w)
        except ValueError:
            raise EdgeListFormatError(
                f"line {lineno}: invalid weight {w!r}"
            ) from None
        edges.append((u.strip(), v.strip(), weight))
    if not edges:
        raise EdgeListFormatError("empty edge list")
    return edges


def format_edge_list(tree: SpanningTree) -> str:
    """Serialize a spanning tree as tab-separated ``u v weight`` lines."""
    return "".join(f"{u}\t{v}\t{w:.10g}\n" for u, v, w in tree.edges())


def spanning_tree_from_edges(
    matrix: DistanceMatrix,
    edges: list[tuple[str, str, float]],
    *,
    tol: float = DEFAULT_TOL,
) -> SpanningTree:
    """Build a spanning tree over the matrix's taxa from a parsed edge list.

    Edge weights are taken from the matrix (they are required to agree with
    the file's weights within *tol*).
    """
    weights: dict[tuple[str, str], float] = {}
    for u, v, w in edges:
        if u not in matrix.taxa or v not in matrix.taxa:
            raise EdgeListFormatError(f"edge {u}-{v} names unknown taxa")
        actual = matrix.d(u, v)
        # Files carry 10 significant digits, so allow a relative slack.
        if abs(actual - w) > max(tol, 1e-9 + 1e-6 * abs(actual)):
            raise EdgeListFormatError(
                f"edge {u}-{v} weight {w!r} disagrees with the matrix ({actual!r})"
            )
        weights[sorted_pair(u, v)] = actual
    return SpanningTree(matrix.taxa, weights)
