import random

import pytest

from conftest import random_spec
from gridcw.builders import (build_bounded_two_row, build_panel_expression,
                             build_rectangular_block, panel_parameters,
                             two_row_column_partition)
from gridcw.cwx import is_caterpillar, validate_against
from gridcw.deltaspec import BondSource, DeltaSpec, classify, extract_k_factor
from gridcw.errors import InputError
from gridcw.grid import (GridGraph, GridVertex, build_rectangle,
                         contains_induced)
from gridcw.params import similarity_partition


class TestBlockBuilder:
    def test_clique_column(self):
        spec = DeltaSpec.make(alpha_period="0", gamma_period="1")
        e = build_rectangular_block(spec, 1, 1, 1, 5)
        ok, diff = validate_against(e, build_rectangle(spec, 1, 1, 1, 5))
        assert ok and e.label_count() <= 2

    def test_four_letter_block(self):
        spec = DeltaSpec.make(alpha_period="0123")
        e = build_rectangular_block(spec, 1, 1, 3, 4)
        ok, _ = validate_against(e, build_rectangle(spec, 1, 1, 3, 4))
        assert ok and e.label_count() <= 6

    def test_empty_rectangle(self):
        spec = DeltaSpec.make()
        e = build_rectangular_block(spec, 1, 1, 0, 0)
        assert e.ops == () and e.label_count() == 0

    def test_random_round_trips(self, rng):
        for _ in range(40):
            spec = random_spec(rng)
            i, j = rng.randint(1, 4), rng.randint(1, 3)
            m, n = rng.randint(1, 6), rng.randint(1, 8)
            e = build_rectangular_block(spec, i, j, m, n)
            ok, diff = validate_against(e, build_rectangle(spec, i, j, m, n))
            assert ok, diff
            assert e.label_count() <= 2 * m
            assert is_caterpillar(e.to_tree())


class TestTwoRowBuilder:
    def test_offset_bonds_rectangle(self):
        spec = DeltaSpec.make(alpha_period="0", beta=BondSource.offset(2))
        g = build_rectangle(spec, 1, 1, 6, 6)
        e = build_bounded_two_row(spec, g, J=0)
        ok, diff = validate_against(e, g)
        assert ok, diff
        assert e.budget.formula == "2J+N+2"
        assert e.label_count() <= e.budget.value

    def test_prefix_chain_letters(self):
        spec = DeltaSpec.make(alpha_prefix="23", alpha_period="0")
        g = build_rectangle(spec, 1, 1, 8, 5)
        e = build_bounded_two_row(spec, g, J=2)
        ok, diff = validate_against(e, g)
        assert ok, diff
        N = dict(e.budget.params)["N"]
        assert e.label_count() <= 2 * 2 + N + 2

    def test_single_row(self):
        spec = DeltaSpec.make(alpha_period="1")
        g = GridGraph(spec, [GridVertex(c, 1) for c in range(1, 7)])
        e = build_bounded_two_row(spec, g)
        ok, _ = validate_against(e, g)
        assert ok

    def test_rejects_persistent_chain_letters(self):
        spec = DeltaSpec.make(alpha_period="2")
        g = build_rectangle(spec, 1, 1, 4, 4)
        with pytest.raises(InputError):
            build_bounded_two_row(spec, g)

    def test_auto_J_from_classification(self):
        spec = DeltaSpec.make(alpha_prefix="32", alpha_period="10")
        g = build_rectangle(spec, 1, 1, 6, 4)
        e = build_bounded_two_row(spec, g)
        ok, _ = validate_against(e, g)
        assert ok and dict(e.budget.params)["J"] == 2

    def test_random_instances(self, rng):
        built = 0
        while built < 30:
            spec = random_spec(rng)
            rep = classify(spec)
            if not rep.eventually01:
                continue
            m, n = rng.randint(2, 7), rng.randint(1, 6)
            verts = [GridVertex(c, r) for c in range(1, m + 1) for r in range(1, n + 1)
                     if rng.random() < 0.75]
            if not verts:
                continue
            g = GridGraph(spec, verts)
            e = build_bounded_two_row(spec, g)
            ok, diff = validate_against(e, g)
            assert ok, (spec, diff)
            assert e.label_count() <= e.budget.value
            assert is_caterpillar(e.to_tree())
            built += 1

    def test_partition_refines_bonds_into_first_columns(self):
        # columns 5 and 6 agree on the two-row view but differ on their
        # bond towards column 1, which sits inside the first-J region
        spec = DeltaSpec.make(alpha_prefix="2", alpha_period="0",
                              beta=BondSource.explicit([(1, 5)]))
        part = two_row_column_partition(spec, J=1, lo=2, hi=7)
        cls_of = {}
        for idx, grp in enumerate(part):
            for c in grp:
                cls_of[c] = idx
        assert cls_of[5] != cls_of[6]
        g = build_rectangle(spec, 1, 1, 7, 4)
        e = build_bounded_two_row(spec, g, J=1)
        ok, diff = validate_against(e, g)
        assert ok, diff


def free_instance(spec, rng, k=3, cols=15, rows=6, density=(0.15, 0.45)):
    needle = build_rectangle(spec, 1, 1, k, k)
    for _ in range(200):
        d = rng.uniform(*density)
        verts = [GridVertex(c, r) for c in range(1, cols + 1) for r in range(1, rows + 1)
                 if rng.random() < d]
        if not (4 <= len(verts) <= 38):
            continue
        g = GridGraph(spec, verts)
        try:
            if contains_induced(g, needle) is None:
                return g
        except Exception:
            continue
    raise RuntimeError("no square-free instance found")


class TestPanelBuilder:
    SPECS = [
        DeltaSpec.make(alpha_period="2"),
        DeltaSpec.make(alpha_period="2", gamma_period="1"),
        DeltaSpec.make(alpha_period="23", beta=BondSource.offset(2)),
        DeltaSpec.make(alpha_period="0123", gamma_period="01"),
    ]

    def test_round_trips_and_budget(self, rng):
        for spec in self.SPECS:
            for _ in range(3):
                g = free_instance(spec, rng)
                e, info = build_panel_expression(spec, g, factor_start=1, k=3)
                ok, diff = validate_against(e, g)
                assert ok, diff
                assert e.label_count() <= e.budget.value
                assert is_caterpillar(e.to_tree())

    def test_single_panel_degenerates(self, rng):
        # no window fits inside a narrow strip: one white panel
        spec = DeltaSpec.make(alpha_period="2")
        g = build_rectangle(spec, 1, 1, 3, 3)
        e, info = build_panel_expression(spec, g, factor_start=1, k=3)
        ok, _ = validate_against(e, g)
        assert ok and info.panels.count == 1

    def test_retirement_matches_similarity_classes(self, rng):
        # at each end-of-panel relabelling the live classes coincide
        # with the similarity classes against the unbuilt remainder
        spec = DeltaSpec.make(alpha_period="2")
        g = free_instance(spec, rng)
        e, info = build_panel_expression(spec, g, factor_start=1, k=3)
        panels = info.panels
        for i in range(1, panels.count + 1):
            prefix = panels.prefix_union(i)
            window = panels.windows[i - 1] if i - 1 < len(panels.windows) else None
            retiring = set(prefix)
            if window:
                retiring -= set(window.colour_set("blue") | window.colour_set("green"))
            if not retiring:
                assert info.retire_class_counts[i - 1] == 0
                continue
            future = [v for v in g.vertices if v not in prefix]
            groups = {}
            for v in retiring:
                groups.setdefault(tuple(u for u in future if g.has_edge(u, v)), []).append(v)
            assert info.retire_class_counts[i - 1] == len(groups)

    def test_given_bounds_are_respected(self, rng):
        spec = DeltaSpec.make(alpha_period="2")
        g = free_instance(spec, rng)
        autoM, autoN, autoJ = panel_parameters(spec, g, extract_k_factor(spec, 1, 3))
        e, info = build_panel_expression(spec, g, 1, 3, M=autoM + 2, N=autoN + 1, J=autoJ)
        ok, _ = validate_against(e, g)
        assert ok
        assert e.budget.value == 4 * 9 + (autoM + 2) * (autoN + 1) + (autoM + 2) + 2 * autoJ + 2
