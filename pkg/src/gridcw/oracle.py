"""Exact clique-width and linear clique-width for tiny graphs.

Breadth-first search over partially built labelled graphs, deduplicated
by a canonical form that forgets label names but keeps the label
partition and the built edge set.  Vertices of the input stay fixed, so
a witness expression evaluates to the input graph itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cwx import (Join, Leaf, LinearExpression, Node, Relabel, UnionNode,
                  AddVertex, JoinOp, RelabelOp, evaluate, evaluate_linear)
from .errors import BudgetError, InputError, InvariantError

HARD_VERTEX_CAP = 8
HARD_LABEL_CAP = 4
STATE_BUDGET = 4_000_000


@dataclass(frozen=True)
class SmallGraph:
    """A graph on vertices 0..n-1 with bitmask adjacency rows."""

    n: int
    adj: tuple[int, ...]

    @classmethod
    def from_edges(cls, n: int, edges) -> "SmallGraph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise InputError(f"bad edge ({u},{v}) for {n} vertices")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n=n, adj=tuple(rows))

    def edge_mask(self) -> int:
        mask = 0
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if self.adj[u] >> v & 1:
                    mask |= 1 << _pair_idx(u, v, self.n)
        return mask

    def edges(self):
        return [(u, v) for u in range(self.n) for v in range(u + 1, self.n)
                if self.adj[u] >> v & 1]


def _pair_idx(u: int, v: int, n: int) -> int:
    if u > v:
        u, v = v, u
    return u * n + v


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _canon(groups, edges):
    return (tuple(sorted(groups)), edges)


class _Search:
    """Reachability over (label partition, built edges) states for one k."""

    def __init__(self, g: SmallGraph, k: int, linear: bool):
        self.g = g
        self.k = k
        self.linear = linear
        self.full_edges = g.edge_mask()
        self.parent: dict = {}
        self.states = 0

    def _record(self, key, parent_info) -> bool:
        if key in self.parent:
            return False
        self.states += 1
        if self.states > STATE_BUDGET:
            raise BudgetError(f"width search exceeded {STATE_BUDGET} states")
        self.parent[key] = parent_info
        return True

    def _cross_pairs(self, ga: int, gb: int) -> int:
        mask = 0
        for u in _bits(ga):
            for v in _bits(gb):
                mask |= 1 << _pair_idx(u, v, self.g.n)
        return mask

    def _cross_ok(self, ga: int, gb: int) -> bool:
        for u in _bits(ga):
            if (self.g.adj[u] & gb) != gb:
                return False
        return True

    def _closure(self, seeds: list) -> list:
        """All states reachable from seeds by joins and label merges."""
        out = list(seeds)
        queue = list(seeds)
        while queue:
            key = queue.pop()
            groups, edges = key
            for a, b in itertools.combinations(range(len(groups)), 2):
                ga, gb = groups[a], groups[b]
                if self._cross_ok(ga, gb):
                    cross = self._cross_pairs(ga, gb)
                    if cross and cross | edges != edges:
                        nk = _canon(groups, edges | cross)
                        if self._record(nk, (key, ("join", ga, gb))):
                            out.append(nk)
                            queue.append(nk)
                merged = tuple(g for i, g in enumerate(groups) if i not in (a, b)) + (ga | gb,)
                nk = _canon(merged, edges)
                if self._record(nk, (key, ("merge", ga, gb))):
                    out.append(nk)
                    queue.append(nk)
        return out

    def run(self):
        g, k = self.g, self.k
        verts = range(g.n)
        if self.linear:
            frontier = []
            for v in verts:
                key = _canon((1 << v,), 0)
                if self._record(key, (None, ("start", v))):
                    frontier.append(key)
            frontier = self._closure(frontier)
            placed = 1
            while placed < g.n:
                nxt = []
                for key in frontier:
                    groups, edges = key
                    have = 0
                    for gm in groups:
                        have |= gm
                    if bin(have).count("1") != placed:
                        continue
                    for v in verts:
                        if have >> v & 1:
                            continue
                        options = [groups + ((1 << v),)] if len(groups) < k else []
                        options += [tuple(gm | (1 << v) if i == idx else gm
                                          for i, gm in enumerate(groups))
                                    for idx in range(len(groups))]
                        for raw in options:
                            nk = _canon(raw, edges)
                            if self._record(nk, (key, ("add", v, key))):
                                nxt.append(nk)
                placed += 1
                frontier = self._closure(nxt)
            return self._goal()

        by_subset: dict[int, list] = {}
        order = sorted(range(1, 1 << g.n), key=lambda s: bin(s).count("1"))
        for v in verts:
            key = _canon((1 << v,), 0)
            self._record(key, (None, ("start", v)))
            by_subset[1 << v] = self._closure([key])
        for S in order:
            if bin(S).count("1") < 2:
                continue
            seeds = []
            low = S & -S
            A = (S - 1) & S
            while A:
                if A & low and A != S:
                    B = S ^ A
                    for ka in by_subset.get(A, ()):
                        for kb in by_subset.get(B, ()):
                            seeds.extend(self._combine(ka, kb))
                A = (A - 1) & S
            by_subset[S] = self._closure(seeds)
        return self._goal()

    def _combine(self, ka, kb) -> list:
        """Disjoint union with every way to share labels across sides."""
        out = []
        ga, ea = ka
        gb, eb = kb
        la, lb = len(ga), len(gb)
        for m in range(0, min(la, lb) + 1):
            if la + lb - m > self.k:
                continue
            for bsel in itertools.combinations(range(lb), m):
                rest = [gb[i] for i in range(lb) if i not in bsel]
                for asel in itertools.permutations(range(la), m):
                    merged = list(ga)
                    for bi, ai in zip(bsel, asel):
                        merged[ai] = merged[ai] | gb[bi]
                    raw = tuple(merged) + tuple(rest)
                    nk = _canon(raw, ea | eb)
                    if self._record(nk, ((ka, kb), ("union", tuple(bsel), tuple(asel)))):
                        out.append(nk)
        return out

    def _goal(self):
        want = self.full_edges
        all_verts = (1 << self.g.n) - 1
        for key in self.parent:
            groups, edges = key
            have = 0
            for gm in groups:
                have |= gm
            if have == all_verts and edges == want:
                return key
        return None

    # --- witness reconstruction --------------------------------------------

    def witness(self, key):
        def build(key):
            parent, op = self.parent[key]
            kind = op[0]
            if kind == "start":
                return Leaf(op[1], 1), {1 << op[1]: 1}, [AddVertex(op[1], 1)]
            if kind == "add":
                expr, labels, lin = build(parent)
                v = op[1]
                groups, _ = key
                have = 0
                for gm in labels:
                    have |= gm
                target = None
                for gm in groups:
                    if gm >> v & 1:
                        target = gm
                        break
                old = target ^ (1 << v)
                if old:
                    label = labels.pop(old)
                else:
                    label = next(l for l in range(1, self.k + 1) if l not in labels.values())
                labels[target] = label
                return UnionNode(expr, Leaf(v, label)), labels, lin + [AddVertex(v, label)]
            if kind == "join":
                expr, labels, lin = build(parent)
                i, j = labels[op[1]], labels[op[2]]
                _, edges = key
                labels2 = dict(labels)
                return Join(i, j, expr), labels2, lin + [JoinOp(i, j)]
            if kind == "merge":
                expr, labels, lin = build(parent)
                i, j = labels.pop(op[1]), labels.pop(op[2])
                labels[op[1] | op[2]] = j
                return Relabel(i, j, expr), labels, lin + [RelabelOp(i, j)]
            if kind == "union":
                ka, kb = parent
                ea, la, _ = build(ka)
                eb, lbm, _ = build(kb)
                bsel, asel = op[1], op[2]
                gb = kb[0]
                ga = ka[0]
                perm = {}
                for bi, ai in zip(bsel, asel):
                    perm[lbm[gb[bi]]] = la[ga[ai]]
                used = set(la.values()) | set(perm.values())
                for gm, lab in lbm.items():
                    if lab not in perm:
                        tgt = next(l for l in range(1, self.k + 1)
                                   if l not in used)
                        perm[lab] = tgt
                        used.add(tgt)
                # extend to a full permutation so dead labels inside the
                # right subtree cannot collide after renaming
                taken = set(perm.values())
                for lab in range(1, self.k + 1):
                    if lab not in perm:
                        tgt = next(l for l in range(1, self.k + 1) if l not in taken)
                        perm[lab] = tgt
                        taken.add(tgt)
                eb = rename_labels(eb, perm)
                labels = dict(la)
                for bi, ai in zip(bsel, asel):
                    labels[ga[ai] | gb[bi]] = la[ga[ai]]
                    labels.pop(ga[ai], None)
                    # gb group merged away
                for gm, lab in lbm.items():
                    if gm not in [gb[bi] for bi in bsel]:
                        labels[gm] = perm[lab]
                return UnionNode(ea, eb), labels, []
            raise InvariantError(f"unknown parent op {kind}")

        expr, _, lin = build(key)
        return expr, lin


def rename_labels(expr: Node, perm: dict) -> Node:
    """Apply a label permutation through a whole expression tree."""

    def f(lab):
        return perm.get(lab, lab)

    if isinstance(expr, Leaf):
        return Leaf(expr.vertex, f(expr.label))
    if isinstance(expr, Join):
        return Join(f(expr.i), f(expr.j), rename_labels(expr.child, perm))
    if isinstance(expr, Relabel):
        return Relabel(f(expr.i), f(expr.j), rename_labels(expr.child, perm))
    return UnionNode(rename_labels(expr.left, perm), rename_labels(expr.right, perm))


def exact_cwd(n: int, edges, max_k: int, linear: bool = False):
    """Smallest label count at most max_k building the graph, or None.

    Returns (width, expression); the expression is linear when asked
    for, otherwise a tree, and always re-evaluated against the input
    before being returned.
    """
    if n > HARD_VERTEX_CAP:
        raise BudgetError(f"{n} vertices exceed the exact-search cap {HARD_VERTEX_CAP}")
    if max_k > HARD_LABEL_CAP:
        raise BudgetError(f"max_k {max_k} exceeds the exact-search cap {HARD_LABEL_CAP}")
    if n == 0:
        raise InputError("empty graph has no width")
    g = SmallGraph.from_edges(n, edges)
    for k in range(1, max_k + 1):
        search = _Search(g, k, linear)
        goal = search.run()
        if goal is None:
            continue
        expr_tree, lin_ops = search.witness(goal)
        if linear:
            expr = LinearExpression(ops=tuple(lin_ops))
            built = evaluate_linear(expr)
        else:
            expr = expr_tree
            built = evaluate(expr)
        got = {frozenset(e) for e in built.edge_pairs()}
        want = {frozenset(e) for e in g.edges()}
        if got != want or set(built.labels) != set(range(n)):
            raise InvariantError("width witness failed re-evaluation")
        return k, expr
    return None


def graphs_isomorphic(n1: int, edges1, n2: int, edges2) -> bool:
    """Brute-force isomorphism for tiny graphs."""
    if n1 != n2:
        return False
    g1 = SmallGraph.from_edges(n1, edges1)
    g2 = SmallGraph.from_edges(n2, edges2)
    e1 = {frozenset(e) for e in g1.edges()}
    e2 = {frozenset(e) for e in g2.edges()}
    if len(e1) != len(e2):
        return False
    for perm in itertools.permutations(range(n1)):
        if {frozenset((perm[u], perm[v])) for u, v in e1} == e2:
            return True
    return False


def verify_width_claim(e, n: int, edges, claimed_k: int) -> bool:
    """Does the expression build (an isomorph of) the graph within k labels?"""
    if isinstance(e, LinearExpression):
        built = evaluate_linear(e)
        used = e.label_count()
    else:
        built = evaluate(e)
        from .cwx import label_count as _lc

        used = _lc(e)
    if used > claimed_k:
        return False
    ids = sorted(built.labels, key=repr)
    remap = {vid: i for i, vid in enumerate(ids)}
    built_edges = [(remap[u], remap[v]) for u, v in built.edge_pairs()]
    if len(ids) != n:
        return n == 0 and not built_edges
    return graphs_isomorphic(n, edges, len(ids), built_edges)
