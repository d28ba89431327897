"""Finite induced subgraphs of the infinite grid graph.

Vertices live at positive (column, row) coordinates; edges come from the
triple's three rules.  Graphs are immutable after construction and store
adjacency as bitmask rows, which keeps edge tests O(1) at the desk
scales everything here runs at.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .deltaspec import BondSource, DeltaSpec
from .errors import BudgetError, InputError

MAX_DENSE_VERTICES = 4096


class GridVertex(NamedTuple):
    col: int
    row: int


def _check_vertex(v: GridVertex):
    if v.col < 1 or v.row < 1:
        raise InputError(f"grid coordinates must be positive, got {v}")


def adjacent(spec: DeltaSpec, u: GridVertex, v: GridVertex) -> bool:
    """Adjacency oracle for two distinct grid vertices.

    Same column: gamma letter decides.  Adjacent columns i, i+1: the
    alpha letter at i decides from the row pair (0: equal rows, 1:
    unequal rows, 2: left row >= right row, 3: left row < right row).
    Farther apart: bond membership.
    """
    u = GridVertex(*u)
    v = GridVertex(*v)
    _check_vertex(u)
    _check_vertex(v)
    if u == v:
        raise InputError(f"adjacency of a vertex with itself is undefined: {u}")
    if u.col == v.col:
        return spec.gamma.letter(u.col) == 1
    left, right = (u, v) if u.col < v.col else (v, u)
    if right.col - left.col == 1:
        a = spec.alpha.letter(left.col)
        if a == 0:
            return left.row == right.row
        if a == 1:
            return left.row != right.row
        if a == 2:
            return left.row >= right.row
        return left.row < right.row
    return spec.beta.contains(u.col, v.col)


def _vertex_order(vertices: Iterable[GridVertex]) -> tuple[GridVertex, ...]:
    # Column-major bottom-up: fixes deterministic iteration everywhere.
    return tuple(sorted(set(GridVertex(*v) for v in vertices)))


class GridGraph:
    """An induced subgraph of the infinite grid, with its spec attached."""

    __slots__ = ("spec", "vertices", "index", "_adj")

    def __init__(self, spec: DeltaSpec, vertices: Iterable[GridVertex], _adj=None):
        vs = _vertex_order(vertices)
        for v in vs:
            _check_vertex(v)
        if len(vs) > MAX_DENSE_VERTICES:
            raise BudgetError(f"graph with {len(vs)} vertices exceeds dense cap {MAX_DENSE_VERTICES}")
        self.spec = spec
        self.vertices = vs
        self.index = {v: i for i, v in enumerate(vs)}
        if _adj is not None:
            self._adj = _adj
        else:
            self._adj = self._build_adjacency()

    def _build_adjacency(self):
        n = len(self.vertices)
        rows = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if adjacent(self.spec, self.vertices[i], self.vertices[j]):
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
        return rows

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return GridVertex(*v) in self.index

    def has_edge(self, u: GridVertex, v: GridVertex) -> bool:
        iu = self.index[GridVertex(*u)]
        iv = self.index[GridVertex(*v)]
        return bool(self._adj[iu] >> iv & 1)

    def adjacent_idx(self, i: int, j: int) -> bool:
        return bool(self._adj[i] >> j & 1)

    def neighbour_mask(self, i: int) -> int:
        return self._adj[i]

    def neighbours(self, v: GridVertex) -> list[GridVertex]:
        m = self._adj[self.index[GridVertex(*v)]]
        return [self.vertices[j] for j in _bits(m)]

    def degree_idx(self, i: int) -> int:
        return self._adj[i].bit_count()

    def edges(self) -> list[tuple[GridVertex, GridVertex]]:
        out = []
        for i, v in enumerate(self.vertices):
            m = self._adj[i] >> (i + 1)
            j = i + 1
            while m:
                if m & 1:
                    out.append((v, self.vertices[j]))
                m >>= 1
                j += 1
        return out

    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self._adj) // 2

    def columns(self) -> list[int]:
        return sorted({v.col for v in self.vertices})

    def rows(self) -> list[int]:
        return sorted({v.row for v in self.vertices})

    def column_vertices(self, col: int) -> list[GridVertex]:
        return [v for v in self.vertices if v.col == col]

    def restrict(self, keep: Iterable[GridVertex]) -> "GridGraph":
        """Induced subgraph on a subset, reusing the stored adjacency."""
        keep_set = {GridVertex(*v) for v in keep}
        missing = keep_set - set(self.vertices)
        if missing:
            raise InputError(f"restriction vertices not in graph: {sorted(missing)[:3]}")
        vs = _vertex_order(keep_set)
        old = [self.index[v] for v in vs]
        rows = []
        for i in old:
            m = 0
            src = self._adj[i]
            for new_j, j in enumerate(old):
                if src >> j & 1:
                    m |= 1 << new_j
            rows.append(m)
        g = GridGraph.__new__(GridGraph)
        g.spec = self.spec
        g.vertices = vs
        g.index = {v: i for i, v in enumerate(vs)}
        g._adj = rows
        return g

    def recheck(self) -> bool:
        """Re-query the oracle for every pair; true iff storage agrees."""
        return self._adj == self._build_adjacency()

    def export_edge_list(self) -> str:
        cols = self.columns()
        rws = self.rows()
        ncols = (cols[-1] - cols[0] + 1) if cols else 0
        nrows = (rws[-1] - rws[0] + 1) if rws else 0
        lines = [f"grid {ncols} {nrows}"]
        lines += [f"{u.col} {u.row} {v.col} {v.row}" for u, v in self.edges()]
        return "\n".join(lines) + "\n"

    def export_dot(self, colour_of=None) -> str:
        """DOT text; includes every edge, also the bond and clique ones
        that grid drawings conventionally leave out."""
        lines = ["graph grid {"]
        for v in self.vertices:
            attrs = f' [pos="{v.col},{v.row}!"'
            if colour_of is not None and colour_of(v):
                attrs += f', style=filled, fillcolor="{colour_of(v)}"'
            attrs += "]"
            lines.append(f"  v_{v.col}_{v.row}{attrs};")
        for u, v in self.edges():
            lines.append(f"  v_{u.col}_{u.row} -- v_{v.col}_{v.row};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def build_rectangle(spec: DeltaSpec, i: int, j: int, m: int, n: int) -> GridGraph:
    """The m-columns-by-n-rows block with bottom-left corner (i, j)."""
    if m < 0 or n < 0:
        raise InputError(f"rectangle sides must be >= 0, got {m}x{n}")
    vs = [GridVertex(c, r) for c in range(i, i + m) for r in range(j, j + n)]
    return GridGraph(spec, vs)


def build_induced(spec: DeltaSpec, vertices: Iterable[GridVertex]) -> GridGraph:
    return GridGraph(spec, vertices)


@dataclass(frozen=True)
class TwoRowGraph:
    """Rows 1 and 2 of the grid restricted to a column set Q."""

    Q: tuple[int, ...]
    graph: GridGraph

    @property
    def row1(self) -> tuple[GridVertex, ...]:
        return tuple(GridVertex(q, 1) for q in self.Q)

    @property
    def row2(self) -> tuple[GridVertex, ...]:
        return tuple(GridVertex(q, 2) for q in self.Q)


def build_two_row(spec: DeltaSpec, Q: Iterable[int]) -> TwoRowGraph:
    cols = tuple(sorted(set(Q)))
    if not cols:
        raise InputError("two-row graph needs a non-empty column set")
    if cols[0] < 1:
        raise InputError("two-row columns must be >= 1")
    vs = [GridVertex(q, r) for q in cols for r in (1, 2)]
    return TwoRowGraph(Q=cols, graph=GridGraph(spec, vs))


@dataclass(frozen=True)
class BondGraph:
    """The graph on a column set whose edges are exactly the bonds."""

    Q: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    def has_edge(self, x: int, y: int) -> bool:
        return (min(x, y), max(x, y)) in self.edges

    def neighbours_in(self, x: int, context: Iterable[int]) -> tuple[int, ...]:
        return tuple(y for y in context if self.has_edge(x, y))


def build_bond_graph(beta: BondSource, Q: Iterable[int]) -> BondGraph:
    cols = tuple(sorted(set(Q)))
    if cols and cols[0] < 1:
        raise InputError("bond graph columns must be >= 1")
    es = set()
    for a in range(len(cols)):
        for b in range(a + 1, len(cols)):
            if beta.contains(cols[a], cols[b]):
                es.add((cols[a], cols[b]))
    return BondGraph(Q=cols, edges=frozenset(es))


DEFAULT_NEEDLE_CAP = 10
DEFAULT_HAYSTACK_CAP = 40
DEFAULT_NODE_BUDGET = 2_000_000


def contains_induced(haystack: GridGraph, needle: GridGraph,
                     needle_cap: int = DEFAULT_NEEDLE_CAP,
                     haystack_cap: int = DEFAULT_HAYSTACK_CAP,
                     node_budget: int = DEFAULT_NODE_BUDGET):
    """Search for an induced embedding of needle into haystack.

    Returns a dict mapping needle vertices to haystack vertices, or None
    when no embedding exists.  Sizes beyond the caps, or a search tree
    larger than node_budget, raise BudgetError: callers must treat that
    as "not certified", not as "absent".
    """
    nn, nh = len(needle), len(haystack)
    if nn > needle_cap or nh > haystack_cap:
        raise BudgetError(
            f"induced-subgraph search budget: needle {nn} > {needle_cap} or "
            f"haystack {nh} > {haystack_cap}"
        )
    if nn == 0:
        return {}
    if nn > nh:
        return None

    # Most-constrained-first ordering: grow a connected-ish frontier.
    order = []
    chosen = set()
    degs = [needle.degree_idx(i) for i in range(nn)]
    while len(order) < nn:
        best = None
        for i in range(nn):
            if i in chosen:
                continue
            anchored = sum(1 for j in order if needle.adjacent_idx(i, j))
            key = (anchored, degs[i], -i)
            if best is None or key > best[0]:
                best = (key, i)
        order.append(best[1])
        chosen.add(best[1])

    hdeg = [haystack.degree_idx(i) for i in range(nh)]
    assignment = [-1] * nn
    used = [False] * nh
    nodes = [0]

    def fits(ni, hi):
        if hdeg[hi] < degs[ni]:
            return False
        for nj in order:
            hj = assignment[nj]
            if hj < 0:
                continue
            if needle.adjacent_idx(ni, nj) != haystack.adjacent_idx(hi, hj):
                return False
        return True

    def backtrack(pos):
        if pos == nn:
            return True
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise BudgetError(f"induced-subgraph search exceeded {node_budget} nodes")
        ni = order[pos]
        for hi in range(nh):
            if used[hi] or not fits(ni, hi):
                continue
            assignment[ni] = hi
            used[hi] = True
            if backtrack(pos + 1):
                return True
            assignment[ni] = -1
            used[hi] = False
        return False

    if backtrack(0):
        return {needle.vertices[i]: haystack.vertices[assignment[i]] for i in range(nn)}
    return None
