import pytest

from gridcw.cwx import (AddVertex, Join, JoinOp, Leaf, LinearExpression,
                        Relabel, RelabelOp, UnionNode, colour_at_node,
                        evaluate, evaluate_linear, is_caterpillar, iter_nodes,
                        label_count, lowest_full_column_node, parse,
                        parse_linear, serialize, serialize_linear,
                        validate_against)
from gridcw.deltaspec import BondSource, DeltaSpec
from gridcw.errors import InputError, SpecParseError
from gridcw.grid import GridVertex, build_induced, build_rectangle

def p4_linear():
    # the classic three-label chain for a path on four vertices
    return LinearExpression(ops=(
        AddVertex("a", 1), AddVertex("b", 2), JoinOp(1, 2),
        RelabelOp(1, 3), RelabelOp(2, 1),
        AddVertex("c", 2), JoinOp(1, 2),
        RelabelOp(1, 3), RelabelOp(2, 1),
        AddVertex("d", 2), JoinOp(1, 2),
    ))


class TestEvaluate:
    def test_single_leaf(self):
        g = evaluate(Leaf("v", 4))
        assert g.labels == {"v": 4} and not g.edges

    def test_union_then_join(self):
        e = Join(1, 2, UnionNode(Leaf("a", 1), Leaf("b", 2)))
        g = evaluate(e)
        assert g.edge_pairs() == {("a", "b")}

    def test_path_fixture(self):
        g = evaluate_linear(p4_linear())
        assert g.edge_pairs() == {("a", "b"), ("b", "c"), ("c", "d")}
        assert p4_linear().label_count() == 3

    def test_duplicate_vertex_rejected(self):
        with pytest.raises(InputError):
            evaluate(UnionNode(Leaf("a", 1), Leaf("a", 2)))

    def test_join_equal_labels_rejected(self):
        with pytest.raises(InputError):
            Join(2, 2, Leaf("a", 2))

    def test_relabel_noop_and_empty_join(self):
        e = Join(5, 6, Relabel(9, 9, UnionNode(Leaf("a", 1), Leaf("b", 5))))
        g = evaluate(e)
        assert not g.edges  # label 6 empty: joining it does nothing

    def test_union_commutes(self):
        left = Join(1, 2, UnionNode(Leaf("a", 1), Leaf("b", 2)))
        right = Leaf("c", 1)
        g1 = evaluate(UnionNode(left, right))
        g2 = evaluate(UnionNode(right, left))
        assert g1.labels == g2.labels and g1.edges == g2.edges


class TestLabelCount:
    def test_single_leaf(self):
        assert label_count(Leaf("a", 3)) == 1

    def test_path_fixture_three(self):
        assert label_count(p4_linear().to_tree()) == 3

    def test_counts_relabel_targets(self):
        assert label_count(Relabel(1, 9, Leaf("a", 1))) == 2


class TestLinear:
    def test_tree_is_caterpillar(self):
        assert is_caterpillar(p4_linear().to_tree())

    def test_balanced_tree_is_not(self):
        pair1 = UnionNode(Leaf("a", 1), Leaf("b", 1))
        pair2 = UnionNode(Leaf("c", 1), Leaf("d", 1))
        assert not is_caterpillar(UnionNode(pair1, pair2))

    def test_linear_matches_tree_evaluation(self):
        lin = p4_linear()
        g1 = evaluate_linear(lin)
        g2 = evaluate(lin.to_tree())
        assert g1.labels == g2.labels and g1.edges == g2.edges

    def test_duplicate_add_rejected(self):
        with pytest.raises(InputError):
            LinearExpression(ops=(AddVertex("a", 1), AddVertex("a", 1)))


class TestValidate:
    def test_round_trip_rectangle(self):
        s = DeltaSpec.make(alpha_period="2")
        g = build_rectangle(s, 1, 1, 2, 2)
        ops = [AddVertex(v, i + 1) for i, v in enumerate(g.vertices)]
        for a in range(len(g.vertices)):
            for b in range(a + 1, len(g.vertices)):
                if g.has_edge(g.vertices[a], g.vertices[b]):
                    ops.append(JoinOp(a + 1, b + 1))
        e = LinearExpression(ops=tuple(ops))
        ok, diff = validate_against(e, g)
        assert ok and not diff["missing"] and not diff["extra"]

    def test_dropped_join_reports_missing(self):
        s = DeltaSpec.make(alpha_period="2")
        g = build_rectangle(s, 1, 1, 2, 2)
        ops = [AddVertex(v, i + 1) for i, v in enumerate(g.vertices)]
        joins = []
        for a in range(len(g.vertices)):
            for b in range(a + 1, len(g.vertices)):
                if g.has_edge(g.vertices[a], g.vertices[b]):
                    joins.append(JoinOp(a + 1, b + 1))
        e = LinearExpression(ops=tuple(ops + joins[:-1]))
        ok, diff = validate_against(e, g)
        assert not ok and len(diff["missing"]) >= 1 and not diff["extra"]

    def test_empty_vs_empty(self):
        s = DeltaSpec.make()
        ok, _ = validate_against(LinearExpression(ops=()), build_induced(s, []))
        assert ok

    def test_foreign_vertex_is_error(self):
        s = DeltaSpec.make()
        g = build_rectangle(s, 1, 1, 1, 1)
        e = LinearExpression(ops=(AddVertex(GridVertex(9, 9), 1),))
        with pytest.raises(InputError):
            validate_against(e, g)


class TestColouring:
    def test_one_union_over_leaves(self):
        e = UnionNode(Leaf("a", 1), Leaf("b", 2))
        col = colour_at_node(e, (), {"a", "b", "c"})
        assert col.colour == {"a": "blue", "b": "red", "c": "white"}
        assert col.label == {"a": 1, "b": 2, "c": None}

    def test_root_of_everything_has_no_white(self):
        e = UnionNode(UnionNode(Leaf("a", 1), Leaf("b", 1)), Leaf("c", 2))
        col = colour_at_node(e, (), {"a", "b", "c"})
        assert "white" not in col.colour.values()

    def test_labels_after_child_evaluation(self):
        left = Relabel(1, 7, Leaf("a", 1))
        e = UnionNode(left, Leaf("b", 2))
        col = colour_at_node(e, (), {"a", "b"})
        assert col.label["a"] == 7

    def test_non_union_node_rejected(self):
        e = Join(1, 2, UnionNode(Leaf("a", 1), Leaf("b", 2)))
        with pytest.raises(InputError):
            colour_at_node(e, (), {"a", "b"})


class TestLowestFullColumn:
    def _assemble(self, groups, labels):
        tree = None
        for group in groups:
            part = None
            for v in group:
                leaf = Leaf(v, labels[v])
                part = leaf if part is None else UnionNode(part, leaf)
            tree = part if tree is None else UnionNode(tree, part)
        return tree

    @staticmethod
    def _brute_scan(e, h):
        """Independent search: deepest covering union, leftmost on ties."""
        from gridcw.cwx import subtree_vertices
        rows = h.rows()
        interior = set(range(rows[0] + 1, rows[-1]))
        columns = [frozenset(v for v in h.column_vertices(c) if v.row in interior)
                   for c in h.columns()]
        columns = [c for c in columns if c]
        best, order = None, 0
        for path, node in iter_nodes(e):
            if isinstance(node, UnionNode):
                sub = subtree_vertices(node)
                if any(mids <= sub for mids in columns):
                    key = (len(path), -order)
                    if best is None or key > best[0]:
                        best = (key, path)
                order += 1
        return None if best is None else best[1]

    def test_middle_vertex_node(self):
        s = DeltaSpec.make(alpha_period="0")
        h = build_rectangle(s, 1, 1, 3, 3)
        labels = {v: i + 1 for i, v in enumerate(h.vertices)}
        col1 = [GridVertex(1, r) for r in (1, 2, 3)]
        rest = [v for v in h.vertices if v not in col1]
        e = self._assemble([col1, rest], labels)
        path = lowest_full_column_node(e, h)
        from gridcw.cwx import node_at, subtree_vertices
        sub = subtree_vertices(node_at(e, path))
        # some column's single interior vertex is covered at that node
        assert any(GridVertex(c, 2) in sub for c in (1, 2, 3))
        assert path == self._brute_scan(e, h)

    def test_column_built_first_matches_brute_scan(self):
        s = DeltaSpec.make(alpha_period="0")
        h = build_rectangle(s, 1, 1, 3, 4)
        labels = {v: i + 1 for i, v in enumerate(h.vertices)}
        col2 = [GridVertex(2, r) for r in (1, 2, 3, 4)]
        rest = [v for v in h.vertices if v not in col2]
        for groups in ([col2, rest], [rest, col2], [list(h.vertices)]):
            e = self._assemble(groups, labels)
            path = lowest_full_column_node(e, h)
            assert path == self._brute_scan(e, h)
            from gridcw.cwx import node_at, subtree_vertices
            sub = subtree_vertices(node_at(e, path))
            interior_cols = [
                {GridVertex(c, 2), GridVertex(c, 3)} for c in (1, 2, 3)]
            assert any(mid <= sub for mid in interior_cols)

    def test_two_rows_not_applicable(self):
        s = DeltaSpec.make(alpha_period="0")
        h = build_rectangle(s, 1, 1, 3, 2)
        labels = {v: i + 1 for i, v in enumerate(h.vertices)}
        e = self._assemble([list(h.vertices)], labels)
        assert lowest_full_column_node(e, h) is None


class TestTextFormats:
    def test_tree_round_trip(self):
        exprs = [
            Leaf(GridVertex(3, 2), 1),
            Join(1, 2, UnionNode(Leaf(GridVertex(1, 1), 1), Leaf(GridVertex(2, 1), 2))),
            Relabel(2, 3, UnionNode(
                Join(1, 2, UnionNode(Leaf(GridVertex(1, 1), 1), Leaf(GridVertex(1, 2), 2))),
                Leaf(GridVertex(2, 1), 1))),
        ]
        for e in exprs:
            assert parse(serialize(e)) == e
            assert serialize(parse(serialize(e))) == serialize(e)

    def test_linear_round_trip(self):
        e = LinearExpression(ops=(
            AddVertex(GridVertex(1, 1), 1), AddVertex(GridVertex(2, 1), 2),
            JoinOp(1, 2), RelabelOp(2, 1),
        ))
        text = serialize_linear(e)
        assert parse_linear(text).ops == e.ops

    def test_corpus_round_trips(self, rng):
        import random as _r
        for seed in range(20):
            r = _r.Random(seed)
            ops = []
            used = set()
            for step in range(r.randint(1, 12)):
                kind = r.choice(["add", "add", "join", "relabel"]) if used else "add"
                if kind == "add":
                    v = GridVertex(r.randint(1, 6), r.randint(1, 6))
                    if v in used:
                        continue
                    used.add(v)
                    ops.append(AddVertex(v, r.randint(1, 4)))
                elif kind == "join":
                    i, j = r.sample(range(1, 5), 2)
                    ops.append(JoinOp(i, j))
                else:
                    ops.append(RelabelOp(r.randint(1, 4), r.randint(1, 4)))
            e = LinearExpression(ops=tuple(ops))
            assert parse_linear(serialize_linear(e)).ops == e.ops
            tree = e.to_tree() if used else None
            if tree is not None:
                assert parse(serialize(tree)) == tree

    def test_parse_rejects_equal_join_labels(self):
        with pytest.raises(SpecParseError):
            parse("(eta 2 2 (vert 1_1 1))")

    def test_parse_error_position(self):
        with pytest.raises(SpecParseError):
            parse("(vert 1_1 1) trailing")
