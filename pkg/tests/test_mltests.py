from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cantor_measures.core import prefix_free_reduce, strings_up_to
from cantor_measures.errors import FormatError, Indecisive, MissingConstraint
from cantor_measures.measures import bernoulli, lebesgue
from cantor_measures.mltests import (
    MLTest,
    basis_combine,
    covers,
    covers_strict,
    parse_basis,
    parse_mltest,
    pullback,
    verify_bound,
)
from cantor_measures.transforms import (
    build_constraints,
    constraint_measure,
    drop_odd_bits,
    double_bits,
)

from conftest import brute_contains
from fixtures import TEST_FIXTURES, basis_fixtures, constraint_systems

L = lebesgue()


@pytest.mark.parametrize("level, raw, ok", [
    ({""}, F(1), True),
    ({"000", "111"}, F(1, 4), True),
    ({"0", "1"}, F(1), False),
])
def test_verify_bound(level, raw, ok):
    n = {True: 0, False: 1}[ok] if level != {"000", "111"} else 2
    sets = [set()] * n + [level]
    rep = verify_bound(MLTest.from_sets(sets), L)[n]
    assert rep.raw_sum == raw and rep.passed is ok


def test_raw_sum_versus_open_measure():
    rep = verify_bound(MLTest.from_sets([set(), {"0", "01", "001"}]), L)[1]
    assert rep.raw_sum == F(7, 8)
    assert rep.open_measure == F(1, 2)
    assert not rep.passed


@pytest.mark.parametrize("x, level, expect", [
    ("0000", {"000", "111"}, True),
    ("01", {"000"}, False),
    ("0", {"000"}, None),
])
def test_covers(x, level, expect):
    assert covers(MLTest.from_sets([set(), set(), level]), x)[2] is expect


def test_covers_strict():
    with pytest.raises(Indecisive):
        covers_strict(MLTest.from_sets([{"000"}]), "0")


@given(st.lists(st.sets(st.text("01", max_size=5), max_size=5), min_size=1, max_size=4),
       st.text("01", max_size=7))
def test_covers_invariant_under_reduction(sets, x):
    t = MLTest.from_sets(sets)
    reduced = MLTest.from_sets(prefix_free_reduce(s) for s in sets)
    for a, b in zip(covers(t, x), covers(reduced, x)):
        # reduction drops only strings extending a kept one, so decided answers agree
        if a is not None and b is not None:
            assert a == b
        if a is True:
            assert b is True


def test_file_roundtrip():
    t = MLTest.from_sets([{""}, set(), {"000", "111", "01"}])
    assert parse_mltest(t.to_text()) == t


@pytest.mark.parametrize("text, line", [
    ("mltest v2\n", 1),
    ("mltest v1\nlevel 0: @\nlevel 0: 1\n", 3),
    ("mltest v1\nlevel 0: 2\n", 2),
    ("mltest v1\nlevel 1: 0\n", 2),
    ("mltest v1\nlevels 0: 0\n", 2),
])
def test_parse_errors(text, line):
    with pytest.raises(FormatError) as err:
        parse_mltest(text)
    assert err.value.line == line


class TestPullback:
    def test_identity_is_reduction(self):
        cs = constraint_systems()["identity-4"]
        t = MLTest.from_sets([{"0", "01"}, {"110", "1101", "0"}])
        assert pullback(t, cs) == MLTest.from_sets([{"0"}, {"0", "110"}])

    def test_drop_odd(self):
        cs = build_constraints(drop_odd_bits(2), double_bits(2), 2)
        pb = pullback(MLTest.from_sets([{"01"}]), cs)
        assert pb[0].strings == {"0010", "0011"}

    def test_empty_level(self):
        cs = constraint_systems()["identity-4"]
        assert pullback(MLTest.from_sets([set()]), cs) == MLTest.from_sets([set()])

    def test_missing(self):
        cs = constraint_systems()["identity-4"]
        with pytest.raises(MissingConstraint):
            pullback(MLTest.from_sets([{"00000"}]), cs)

    @pytest.mark.parametrize("name", sorted(constraint_systems()))
    @pytest.mark.parametrize("t", TEST_FIXTURES)
    def test_domination(self, name, t):
        cs = constraint_systems()[name]
        mu = constraint_measure(cs)
        pb = pullback(t, cs)
        for src, lv in zip(t.levels, pb.levels):
            assert lv.raw_sum(L) <= src.raw_sum(mu)


def brute_basis(tree, family, depth, levels):
    out = []
    for n in range(levels):
        chosen = set()
        for s in strings_up_to(depth):
            peers = [t for t in tree if len(t) == len(s)]
            if peers and all(brute_contains(family.get((n, t), ()), s) for t in peers):
                chosen.add(s)
        out.append(chosen)
    return MLTest.from_sets(out)


@pytest.mark.parametrize("tree, family, depth, levels", basis_fixtures())
def test_basis_matches_brute_force(tree, family, depth, levels):
    assert basis_combine(tree, family, depth, levels).test == brute_basis(tree, family, depth, levels)


def test_basis_examples():
    chain = {"0" * m for m in range(5)}
    everything = basis_combine(chain, {(0, t): {""} for t in chain}, 4).test
    assert everything[0].strings == set(strings_up_to(4))
    assert basis_combine(chain, {}, 4, 1).test[0].strings == set()
    single = basis_combine(chain, {(0, "0" * m): {"0" * m} for m in range(5)}, 4).test
    assert single[0].strings == {"0" * m for m in range(5)}


def test_basis_survivors():
    tree = {"", "0", "1", "00", "01", "10"}
    family = {(0, "1"): {"01"}, (0, "00"): {"0"}}
    res = basis_combine(tree, family, 2, 1, query="0110")
    assert res.survivors[0] == {"", "0", "01"}
    assert res.deepest[0] == "01"


def test_basis_file():
    text = """basis v1
depth: 2
levels: 1
tree: @, 0, 1, 00, 01, 10
query: 0110
U 0 1: 01
U 0 00: 0
"""
    fx = parse_basis(text)
    assert fx.depth == 2 and fx.query == "0110"
    assert fx.family[(0, "00")] == {"0"}
    with pytest.raises(FormatError) as err:
        parse_basis(text.replace("tree: @, 0,", "tree: 0,"))
    assert err.value.line == 4


def test_verify_bound_bernoulli():
    rep = verify_bound(MLTest.from_sets([{"1"}, {"11", "10"}]), bernoulli(F(1, 4)))
    assert [r.raw_sum for r in rep] == [F(1, 4), F(1, 4)]
    assert [r.passed for r in rep] == [True, True]
