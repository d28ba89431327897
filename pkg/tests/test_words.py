import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridcw.deltaspec import (BondSource, DeltaSpec, WordSource, alpha_plus,
                              classify, extract_k_factor, factors_equal,
                              find_next_occurrence, letter_at, parse_spec,
                              serialize_spec)
from gridcw.errors import InputError, SpecParseError


def word(prefix, period, alphabet=(0, 1, 2, 3)):
    return WordSource.from_text(prefix, period, frozenset(alphabet))


class TestLetterAt:
    def test_prefix_read(self):
        assert letter_at(word("0", "123"), 1) == 0

    def test_unrolled_tail(self):
        w = word("0", "123")
        assert [w.letter(i) for i in range(1, 8)] == [0, 1, 2, 3, 1, 2, 3]
        assert w.letter(5) == 1

    def test_constant_word_far_out(self):
        assert word("", "2").letter(10 ** 6) == 2

    def test_rejects_zero_index(self):
        with pytest.raises(InputError):
            word("", "1").letter(0)

    def test_alphabet_enforced(self):
        with pytest.raises(InputError):
            WordSource.from_text("", "2", frozenset({0, 1}))


words_strategy = st.builds(
    lambda p, q: WordSource(tuple(p), tuple(q)),
    st.lists(st.integers(0, 3), max_size=5),
    st.lists(st.integers(0, 3), min_size=1, max_size=5),
)


@given(words_strategy, st.integers(1, 200))
def test_letter_pure_and_shift_consistent(w, i):
    assert w.letter(i) == w.letter(i)
    if i > len(w.prefix):
        assert w.letter(i) == w.letter(i + len(w.period))


class TestFactors:
    def test_extract_simple(self):
        s = DeltaSpec.make(alpha_period="01", gamma_period="0")
        f = extract_k_factor(s, 1, 3)
        assert f.alpha == (0, 1) and f.bonds == frozenset() and f.gamma == (0, 0, 0)

    def test_offset_bond_outside_window(self):
        s = DeltaSpec.make(alpha_period="2", beta=BondSource.offset(2), gamma_period="0")
        f = extract_k_factor(s, 2, 2)
        assert f.alpha == (2,) and f.bonds == frozenset() and f.gamma == (0, 0)

    def test_bond_inside_window_rebased(self):
        s = DeltaSpec.make(alpha_period="0", beta=BondSource.offset(2))
        f = extract_k_factor(s, 4, 3)
        assert f.bonds == frozenset({(0, 2)})

    def test_width_two_shape(self):
        f = extract_k_factor(DeltaSpec.make(alpha_period="3"), 7, 2)
        assert len(f.alpha) == 1 and f.width == 2

    def test_equality_reflexive(self):
        f = extract_k_factor(DeltaSpec.make(alpha_period="01"), 2, 4)
        assert factors_equal(f, f)

    def test_equality_period_shift(self):
        s = DeltaSpec.make(alpha_period="01", gamma_period="0")
        assert factors_equal(extract_k_factor(s, 1, 2), extract_k_factor(s, 3, 2))
        assert not factors_equal(extract_k_factor(s, 1, 2), extract_k_factor(s, 2, 2))

    def test_width_mismatch_is_error(self):
        s = DeltaSpec.make(alpha_period="01")
        with pytest.raises(InputError):
            factors_equal(extract_k_factor(s, 1, 2), extract_k_factor(s, 1, 3))


@given(st.data())
@settings(max_examples=60)
def test_factor_equality_is_equivalence(data):
    s = DeltaSpec.make(
        alpha_period="".join(str(d) for d in data.draw(
            st.lists(st.integers(0, 3), min_size=1, max_size=3))),
        beta=BondSource.offset(2),
    )
    k = data.draw(st.integers(2, 4))
    fs = [extract_k_factor(s, data.draw(st.integers(1, 12)), k) for _ in range(3)]
    f1, f2, f3 = fs
    assert factors_equal(f1, f1)
    assert factors_equal(f1, f2) == factors_equal(f2, f1)
    if factors_equal(f1, f2) and factors_equal(f2, f3):
        assert factors_equal(f1, f3)


class TestOccurrences:
    def test_constant_word_everywhere(self):
        s = DeltaSpec.make(alpha_period="2", gamma_period="0")
        f = extract_k_factor(s, 1, 3)
        assert find_next_occurrence(s, f, after=1, horizon=100) == 2

    def test_prefix_letter_never_recurs(self):
        s = DeltaSpec.make(alpha_prefix="3", alpha_period="0", gamma_period="0")
        f = extract_k_factor(s, 1, 2)
        assert find_next_occurrence(s, f, after=1, horizon=100) is None

    def test_empty_window(self):
        s = DeltaSpec.make(alpha_period="2")
        f = extract_k_factor(s, 1, 3)
        assert find_next_occurrence(s, f, after=100, horizon=100) is None


@given(st.data())
@settings(max_examples=40)
def test_periodic_factor_recurs_within_one_period(data):
    period = "".join(str(d) for d in data.draw(st.lists(st.integers(0, 3), min_size=1, max_size=8)))
    gper = "".join(str(d) for d in data.draw(st.lists(st.integers(0, 1), min_size=1, max_size=2)))
    beta = data.draw(st.sampled_from([
        BondSource.empty(), BondSource.offset(2), BondSource.distance_range(3),
        BondSource("parity-odd-diff"), BondSource("parity-even-diff"),
    ]))
    s = DeltaSpec.make(alpha_period=period, beta=beta, gamma_period=gper)
    j = data.draw(st.integers(1, 20))
    k = data.draw(st.integers(2, 5))
    f = extract_k_factor(s, j, k)
    p = len(s.alpha.period) * len(s.gamma.period)
    nxt = find_next_occurrence(s, f, after=j, horizon=j + 8 * p + k + 8)
    assert nxt is not None and nxt <= j + 8 * p


class TestClassify:
    def test_chain_period_unbounded(self):
        r = classify(DeltaSpec.make(alpha_period="2"), 12)
        assert r.in_delta == "yes" and r.recurrent == "yes"
        assert not r.eventually01

    def test_all_zero_no_evidence(self):
        r = classify(DeltaSpec.make(alpha_period="0"), 12)
        assert r.in_delta == "no-evidence"
        assert [v for _, v in r.n_delta_curve] == [1] * len(r.n_delta_curve)

    def test_clique_columns_probe(self):
        r = classify(DeltaSpec.make(alpha_period="0", gamma_period="1"), 12)
        assert r.in_delta == "yes"

    def test_eventually01_witness(self):
        r = classify(DeltaSpec.make(alpha_prefix="0231", alpha_period="01"), 8)
        assert r.eventually01 and r.witness_j == 3
        s = DeltaSpec.make(alpha_prefix="0231", alpha_period="01")
        for i in range(4, 4 + len(s.alpha.period) + len(s.alpha.prefix) + 1):
            assert s.alpha.letter(i) in (0, 1)

    def test_prefix_breaks_recurrence(self):
        r = classify(DeltaSpec.make(alpha_prefix="3", alpha_period="0"), 8)
        assert r.recurrent == "no"

    def test_pinned_bonds_break_recurrence(self):
        r = classify(DeltaSpec.make(alpha_period="1", beta=BondSource.hub(1)), 8)
        assert r.recurrent == "no"
        r2 = classify(DeltaSpec.make(alpha_period="1",
                                     beta=BondSource.explicit([(1, 4)])), 8)
        assert r2.recurrent == "no"

    def test_shiftable_bonds_keep_recurrence(self):
        for beta in (BondSource("table1-bichain"), BondSource("table1-split"),
                     BondSource.offset(3), BondSource("parity-even-diff")):
            r = classify(DeltaSpec.make(alpha_period="23", beta=beta, gamma_period="01"), 8)
            assert r.recurrent == "yes", beta.kind

    def test_m23_counts(self):
        r = classify(DeltaSpec.make(alpha_period="0123"), 9)
        # counts of 2s and 3s among the first n-1 letters of 0123 0123 ...
        assert r.m23 == (0, 0, 0, 1, 2, 2, 2, 3, 4)


class TestAlphaPlus:
    def test_four_letter_period(self):
        assert alpha_plus(DeltaSpec.make(alpha_period="0123")).alpha.period == (0, 0, 2, 2)

    def test_fixed_point(self):
        s = DeltaSpec.make(alpha_period="02")
        assert alpha_plus(s).alpha == s.alpha

    def test_prefix_mapped(self):
        s = alpha_plus(DeltaSpec.make(alpha_prefix="31", alpha_period="1"))
        assert s.alpha.prefix == (2, 0) and s.alpha.period == (0,)

    @given(words_strategy)
    def test_idempotent(self, w):
        s = DeltaSpec(alpha=w, beta=BondSource.empty(),
                      gamma=WordSource((), (0,), frozenset({0, 1})))
        once = alpha_plus(s)
        assert alpha_plus(once).alpha == once.alpha


class TestSpecText:
    def test_round_trip(self):
        s = DeltaSpec.make(alpha_prefix="30", alpha_period="12",
                           beta=BondSource.explicit([(2, 5), (1, 7)]),
                           gamma_prefix="1", gamma_period="01", name="sample")
        text = serialize_spec(s)
        assert parse_spec(text) == s
        assert serialize_spec(parse_spec(text)) == text

    def test_all_kinds_round_trip(self):
        kinds = ["empty", "offset d=3", "range n=4", "parity-odd-diff",
                 "parity-even-diff", "table1-bichain", "table1-split",
                 "hub c=1", "explicit (1,3);(2,6)"]
        for kind in kinds:
            text = f"alpha period=01\ngamma period=0\nbeta {kind}\n"
            s = parse_spec(text)
            assert parse_spec(serialize_spec(s)) == s

    def test_comments_and_blanks(self):
        s = parse_spec("# top\nalpha prefix= period=2 # tail\n\ngamma period=0\nbeta empty\n")
        assert s.alpha.period == (2,)

    def test_rejects_unknown_kind(self):
        with pytest.raises(SpecParseError):
            parse_spec("alpha period=0\ngamma period=0\nbeta sometimes\n")

    def test_rejects_missing_parts(self):
        with pytest.raises(SpecParseError):
            parse_spec("alpha period=0\nbeta empty\n")

    def test_rejects_close_explicit_pair(self):
        with pytest.raises(SpecParseError):
            parse_spec("alpha period=0\ngamma period=0\nbeta explicit (3,4)\n")


class TestBondSources:
    def test_symmetry_and_near_diagonal(self):
        for b in (BondSource.offset(2), BondSource("table1-split"), BondSource.hub(1),
                  BondSource("parity-odd-diff"), BondSource.explicit([(2, 9)])):
            for x in range(1, 12):
                for y in range(1, 12):
                    if x == y:
                        continue
                    assert b.contains(x, y) == b.contains(y, x)
                    if abs(x - y) <= 1:
                        assert not b.contains(x, y)

    def test_bichain_membership(self):
        b = BondSource("table1-bichain")
        assert b.contains(2, 5) and b.contains(2, 7) and b.contains(4, 7)
        assert not b.contains(2, 4) and not b.contains(3, 6) and not b.contains(1, 4)

    def test_split_membership(self):
        b = BondSource("table1-split")
        assert b.contains(2, 4) and b.contains(2, 5) and b.contains(4, 9)
        assert not b.contains(3, 5) and not b.contains(1, 3)
