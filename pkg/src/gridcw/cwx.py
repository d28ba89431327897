"""Clique-width expressions: representation, evaluation, audit hooks.

Expressions are trees over four node kinds: vertex creation, cross-label
edge insertion, relabelling, and disjoint union.  Edge insertion and
relabelling are unary nodes here rather than edge annotations; that is
an equivalent representation, noted so node paths stay meaningful to
auditors.  A linear expression is an operation list without union and
converts to a caterpillar-shaped tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable, Iterator, Union as TUnion

from .errors import InputError, SpecParseError
from .grid import GridGraph, GridVertex


@dataclass(frozen=True)
class Leaf:
    vertex: Hashable
    label: int


@dataclass(frozen=True)
class Join:
    i: int
    j: int
    child: "Node"

    def __post_init__(self):
        if self.i == self.j:
            raise InputError(f"join needs two distinct labels, got {self.i}")


@dataclass(frozen=True)
class Relabel:
    i: int
    j: int
    child: "Node"


@dataclass(frozen=True)
class UnionNode:
    left: "Node"
    right: "Node"


Node = TUnion[Leaf, Join, Relabel, UnionNode]
Path = tuple[int, ...]


@dataclass(frozen=True)
class LabelledGraph:
    labels: dict  # vertex -> current label
    edges: frozenset  # frozenset({u, v}) entries

    @property
    def vertices(self):
        return set(self.labels)

    def edge_pairs(self) -> set[tuple]:
        out = set()
        for e in self.edges:
            a, b = sorted(e, key=repr)
            out.add((a, b))
        return out


def iter_nodes(expr: Node, path: Path = ()) -> Iterator[tuple[Path, Node]]:
    """Preorder traversal yielding (path, node); children indexed 0/1."""
    yield path, expr
    if isinstance(expr, (Join, Relabel)):
        yield from iter_nodes(expr.child, path + (0,))
    elif isinstance(expr, UnionNode):
        yield from iter_nodes(expr.left, path + (0,))
        yield from iter_nodes(expr.right, path + (1,))


def node_at(expr: Node, path: Path) -> Node:
    node = expr
    for step in path:
        if isinstance(node, (Join, Relabel)):
            node = node.child
        elif isinstance(node, UnionNode):
            node = node.left if step == 0 else node.right
        else:
            raise InputError(f"path {path} leaves the tree at a leaf")
    return node


def subtree_vertices(expr: Node) -> set:
    return {n.vertex for _, n in iter_nodes(expr) if isinstance(n, Leaf)}


def evaluate(expr: Node) -> LabelledGraph:
    """Bottom-up evaluation to a labelled graph.

    Join adds every missing cross edge between its two label classes in
    the present state; joining an empty class is a no-op, as is a
    relabel whose source has no vertices.
    """
    labels: dict = {}
    edges: set = set()

    def walk(node: Node) -> dict:
        if isinstance(node, Leaf):
            if node.vertex in labels:
                raise InputError(f"duplicate vertex id {node.vertex!r}")
            labels[node.vertex] = node.label
            return {node.vertex}
        if isinstance(node, Join):
            live = walk(node.child)
            left = [v for v in live if labels[v] == node.i]
            right = [v for v in live if labels[v] == node.j]
            for u in left:
                for v in right:
                    edges.add(frozenset((u, v)))
            return live
        if isinstance(node, Relabel):
            live = walk(node.child)
            for v in live:
                if labels[v] == node.i:
                    labels[v] = node.j
            return live
        if isinstance(node, UnionNode):
            lv = walk(node.left)
            rv = walk(node.right)
            return lv | rv
        raise InputError(f"unknown expression node {node!r}")

    live = walk(expr)
    return LabelledGraph(labels={v: labels[v] for v in live}, edges=frozenset(edges))


def label_count(expr: Node) -> int:
    """Distinct labels appearing anywhere in the expression."""
    seen = set()
    for _, n in iter_nodes(expr):
        if isinstance(n, Leaf):
            seen.add(n.label)
        elif isinstance(n, (Join, Relabel)):
            seen.add(n.i)
            seen.add(n.j)
    return len(seen)


# --- linear expressions ----------------------------------------------------


@dataclass(frozen=True)
class AddVertex:
    vertex: Hashable
    label: int


@dataclass(frozen=True)
class JoinOp:
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise InputError(f"join needs two distinct labels, got {self.i}")


@dataclass(frozen=True)
class RelabelOp:
    i: int
    j: int


LinearOp = TUnion[AddVertex, JoinOp, RelabelOp]


@dataclass(frozen=True)
class LinearExpression:
    """Operation list building a graph without disjoint union."""

    ops: tuple[LinearOp, ...]
    budget: "LabelBudget | None" = None

    def __post_init__(self):
        seen = set()
        for op in self.ops:
            if isinstance(op, AddVertex):
                if op.vertex in seen:
                    raise InputError(f"duplicate vertex id {op.vertex!r}")
                seen.add(op.vertex)

    def to_tree(self) -> Node:
        """Caterpillar tree: each later vertex creation joins via union."""
        tree: Node | None = None
        for op in self.ops:
            if isinstance(op, AddVertex):
                leaf = Leaf(op.vertex, op.label)
                tree = leaf if tree is None else UnionNode(tree, leaf)
            elif isinstance(op, JoinOp):
                if tree is None:
                    raise InputError("join before any vertex")
                tree = Join(op.i, op.j, tree)
            elif isinstance(op, RelabelOp):
                if tree is None:
                    raise InputError("relabel before any vertex")
                tree = Relabel(op.i, op.j, tree)
            else:
                raise InputError(f"unknown linear op {op!r}")
        if tree is None:
            raise InputError("empty linear expression has no tree form")
        return tree

    def label_count(self) -> int:
        seen = set()
        for op in self.ops:
            if isinstance(op, AddVertex):
                seen.add(op.label)
            else:
                seen.add(op.i)
                seen.add(op.j)
        return len(seen)


@dataclass(frozen=True)
class LabelBudget:
    """A label-count ceiling together with the formula it comes from."""

    formula: str  # "2L" | "2J+N+2" | "4k2+MN+M+2J+2"
    params: tuple[tuple[str, int], ...]
    value: int

    def header(self, used: int) -> str:
        ps = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"# budget {self.formula} ({ps}) = {self.value}, used = {used}"


def evaluate_linear(e: LinearExpression) -> LabelledGraph:
    labels: dict = {}
    edges: set = set()
    for op in e.ops:
        if isinstance(op, AddVertex):
            labels[op.vertex] = op.label
        elif isinstance(op, JoinOp):
            left = [v for v, l in labels.items() if l == op.i]
            right = [v for v, l in labels.items() if l == op.j]
            for u in left:
                for v in right:
                    edges.add(frozenset((u, v)))
        elif isinstance(op, RelabelOp):
            for v, l in labels.items():
                if l == op.i:
                    labels[v] = op.j
    return LabelledGraph(labels=labels, edges=frozenset(edges))


def is_caterpillar(expr: Node) -> bool:
    """True iff the union skeleton forms a path (linear shape)."""

    def skeleton_children(node: Node) -> list[Node]:
        while isinstance(node, (Join, Relabel)):
            node = node.child
        if isinstance(node, UnionNode):
            return [node.left, node.right]
        return []

    def walk(node: Node) -> bool:
        kids = skeleton_children(node)
        if not kids:
            return True
        union_kids = [k for k in kids if _has_union(k)]
        if len(union_kids) > 1:
            return False
        return all(walk(k) for k in kids)

    def _has_union(node: Node) -> bool:
        return any(isinstance(n, UnionNode) for _, n in iter_nodes(node))

    return walk(expr)


# --- validation against a grid target --------------------------------------


def _expr_vertex_ids(expr) -> set:
    if isinstance(expr, LinearExpression):
        return {op.vertex for op in expr.ops if isinstance(op, AddVertex)}
    return subtree_vertices(expr)


def validate_against(e, target: GridGraph):
    """Exact edge-set comparison under the grid-coordinate id map.

    Returns (ok, diff) where diff lists missing and extra edges.  Vertex
    ids must be the target's own coordinates; anything else is an input
    error naming the offending id.
    """
    ids = _expr_vertex_ids(e)
    target_ids = set(target.vertices)
    for vid in ids:
        if not (isinstance(vid, tuple) and len(vid) == 2):
            raise InputError(f"expression vertex id {vid!r} is not a grid coordinate")
        if GridVertex(*vid) not in target_ids:
            raise InputError(f"expression vertex {vid!r} is not a vertex of the target")
    missing_vertices = target_ids - {GridVertex(*v) for v in ids}
    if missing_vertices:
        raise InputError(f"target vertices absent from expression: {sorted(missing_vertices)[:3]}")

    built = evaluate_linear(e) if isinstance(e, LinearExpression) else evaluate(e)
    built_edges = {frozenset((GridVertex(*u), GridVertex(*v))) for u, v in built.edge_pairs()}
    want_edges = {frozenset((u, v)) for u, v in target.edges()}
    missing = sorted(tuple(sorted(e)) for e in want_edges - built_edges)
    extra = sorted(tuple(sorted(e)) for e in built_edges - want_edges)
    return (not missing and not extra), {"missing": missing, "extra": extra}


# --- audit colouring -------------------------------------------------------


@dataclass(frozen=True)
class AuditColouring:
    """Blue/red/white split of the full vertex set at a union node."""

    node_path: Path
    colour: dict  # vertex -> "blue" | "red" | "white"
    label: dict  # vertex -> label or None

    def of_colour(self, c: str) -> set:
        return {v for v, col in self.colour.items() if col == c}


def colour_at_node(expr: Node, node_path: Path, full_vertex_set) -> AuditColouring:
    node = node_at(expr, node_path)
    if not isinstance(node, UnionNode):
        raise InputError(f"node at {node_path} is not a union node")
    left_eval = evaluate(node.left)
    right_eval = evaluate(node.right)
    colour = {}
    label = {}
    for v in full_vertex_set:
        if v in left_eval.labels:
            colour[v] = "blue"
            label[v] = left_eval.labels[v]
        elif v in right_eval.labels:
            colour[v] = "red"
            label[v] = right_eval.labels[v]
        else:
            colour[v] = "white"
            label[v] = None
    return AuditColouring(node_path=node_path, colour=colour, label=label)


def lowest_full_column_node(expr: Node, H: GridGraph):
    """Deepest union node whose side covers some column's interior rows.

    Interior means every row of H except its bottom and top.  Ties are
    broken by leftmost-deepest traversal order.  Returns None when H has
    no interior rows to cover.
    """
    rows = H.rows()
    if len(rows) <= 2:
        return None
    interior = set(range(rows[0] + 1, rows[-1]))
    columns = {}
    for c in H.columns():
        mids = frozenset(v for v in H.column_vertices(c) if v.row in interior)
        if mids:
            columns[c] = mids

    best = None  # (depth, -order) maximized
    order = 0
    cache: dict[int, set] = {}

    def verts(node):
        key = id(node)
        if key not in cache:
            cache[key] = subtree_vertices(node)
        return cache[key]

    for path, node in iter_nodes(expr):
        if not isinstance(node, UnionNode):
            continue
        vs = verts(node)
        if any(mids <= vs for mids in columns.values()):
            key = (len(path), -order)
            if best is None or key > best[0]:
                best = (key, path)
        order += 1
    return None if best is None else best[1]


# --- text formats -----------------------------------------------------------
#
# Tree form, one parenthesized node per form:
#   (vert <col>_<row> <label>) | (eta <i> <j> <child>)
#   | (rho <i> <j> <child>) | (oplus <left> <right>)
# Linear form, one op per line:
#   add <col>_<row> <label> | join <i> <j> | relabel <i> <j>

_ID_RE = re.compile(r"^(\d+)_(\d+)$")


def _id_to_token(vid) -> str:
    if isinstance(vid, tuple) and len(vid) == 2:
        return f"{vid[0]}_{vid[1]}"
    return str(vid)


def _token_to_id(tok: str):
    m = _ID_RE.match(tok)
    if m:
        return GridVertex(int(m.group(1)), int(m.group(2)))
    if tok.isdigit():
        return int(tok)
    return tok


def serialize(expr: Node) -> str:
    if isinstance(expr, Leaf):
        return f"(vert {_id_to_token(expr.vertex)} {expr.label})"
    if isinstance(expr, Join):
        return f"(eta {expr.i} {expr.j} {serialize(expr.child)})"
    if isinstance(expr, Relabel):
        return f"(rho {expr.i} {expr.j} {serialize(expr.child)})"
    if isinstance(expr, UnionNode):
        return f"(oplus {serialize(expr.left)} {serialize(expr.right)})"
    raise InputError(f"cannot serialize {expr!r}")


def parse(text: str) -> Node:
    toks = re.findall(r"\(|\)|[^\s()]+", text)
    pos = 0

    def fail(msg):
        raise SpecParseError(f"{msg} at token {pos}", pos=pos)

    def expect(tok):
        nonlocal pos
        if pos >= len(toks) or toks[pos] != tok:
            fail(f"expected {tok!r}")
        pos += 1

    def next_tok():
        nonlocal pos
        if pos >= len(toks):
            fail("unexpected end of input")
        tok = toks[pos]
        pos += 1
        return tok

    def parse_int():
        tok = next_tok()
        if not re.fullmatch(r"-?\d+", tok):
            fail(f"expected integer, got {tok!r}")
        return int(tok)

    def parse_node() -> Node:
        expect("(")
        head = next_tok()
        if head == "vert":
            vid = _token_to_id(next_tok())
            lab = parse_int()
            node = Leaf(vid, lab)
        elif head in ("eta", "rho"):
            i = parse_int()
            j = parse_int()
            child = parse_node()
            try:
                node = Join(i, j, child) if head == "eta" else Relabel(i, j, child)
            except InputError as exc:
                raise SpecParseError(str(exc), pos=pos) from exc
        elif head == "oplus":
            left = parse_node()
            right = parse_node()
            node = UnionNode(left, right)
        else:
            fail(f"unknown node kind {head!r}")
        expect(")")
        return node

    node = parse_node()
    if pos != len(toks):
        fail("trailing tokens")
    return node


def serialize_linear(e: LinearExpression, header: str | None = None) -> str:
    lines = [] if header is None else [header]
    for op in e.ops:
        if isinstance(op, AddVertex):
            lines.append(f"add {_id_to_token(op.vertex)} {op.label}")
        elif isinstance(op, JoinOp):
            lines.append(f"join {op.i} {op.j}")
        else:
            lines.append(f"relabel {op.i} {op.j}")
    return "\n".join(lines) + "\n"


def parse_linear(text: str) -> LinearExpression:
    ops: list[LinearOp] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            if toks[0] == "add" and len(toks) == 3:
                ops.append(AddVertex(_token_to_id(toks[1]), int(toks[2])))
            elif toks[0] == "join" and len(toks) == 3:
                ops.append(JoinOp(int(toks[1]), int(toks[2])))
            elif toks[0] == "relabel" and len(toks) == 3:
                ops.append(RelabelOp(int(toks[1]), int(toks[2])))
            else:
                raise SpecParseError(f"bad linear op {line!r}", line=lineno)
        except (ValueError, InputError) as exc:
            raise SpecParseError(str(exc), line=lineno) from exc
    return LinearExpression(ops=tuple(ops))
