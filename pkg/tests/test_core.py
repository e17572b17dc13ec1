from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cantor_measures.core import (
    DyadicRational,
    PeriodicReal,
    cantor_distance,
    compatible,
    format_rational,
    longest_common_prefix,
    open_set_contains,
    parse_bits,
    parse_rational,
    prefix_free_reduce,
    simplest_dyadic_between,
)
from cantor_measures.errors import AmbiguousPrefix, FormatError

from conftest import brute_contains, words

bits = st.text(alphabet="01", max_size=10)


@pytest.mark.parametrize("x, y, lcp", [
    ("0110", "0101", "01"),
    ("111", "111", "111"),
    ("1011", "0011", ""),
    ("", "01", ""),
])
def test_longest_common_prefix(x, y, lcp):
    assert longest_common_prefix(x, y) == lcp


@pytest.mark.parametrize("x, y, d", [
    ("0110", "0101", F(1, 4)),
    ("1", "0", F(1)),
    ("0000001", "0000000", F(1, 64)),
])
def test_cantor_distance(x, y, d):
    assert cantor_distance(x, y) == d
    assert cantor_distance(y, x) == d


def test_distance_needs_declaration_for_prefixes():
    assert cantor_distance("0101", "0101", equal=True) == 0
    assert cantor_distance("01", "0101", equal=True) == 0
    with pytest.raises(AmbiguousPrefix):
        cantor_distance("01", "0101")
    with pytest.raises(ValueError):
        cantor_distance("00", "01", equal=True)


def test_ultrametric_exhaustive_8_bits():
    strs = words(8)
    # exponent e with d = 2^-e; ultrametric means e(x,z) >= min(e(x,y), e(y,z))
    e = np.array([[0 if x == y else len(longest_common_prefix(x, y)) for y in strs] for x in strs], dtype=np.int8)
    assert all(2 ** -int(e[0, j]) == cantor_distance(strs[0], strs[j]) for j in range(1, 256))
    assert (e == e.T).all()
    off = ~np.eye(256, dtype=bool)
    big = 99
    ee = np.where(off, e, big)
    lhs = ee[:, None, :]           # e(x, z)
    rhs = np.minimum(ee[:, :, None], ee[None, :, :])  # min(e(x,y), e(y,z)) indexed [x, y, z]
    assert (lhs >= rhs).all()


@pytest.mark.parametrize("given_, expect", [
    ({"0", "01"}, {"0"}),
    (set(), set()),
    ({"00", "01", "1"}, {"00", "01", "1"}),
    ({"", "0", "111"}, {""}),
])
def test_prefix_free_reduce_examples(given_, expect):
    assert prefix_free_reduce(given_) == expect


@given(st.sets(bits, max_size=8))
def test_prefix_free_reduce_is_antichain_and_covers(strings):
    red = prefix_free_reduce(strings)
    assert red <= strings
    assert not any(a != b and b.startswith(a) for a in red for b in red)
    assert all(any(s.startswith(r) for r in red) for s in strings)


@given(st.sets(st.text(alphabet="01", max_size=5), max_size=6), st.text(alphabet="01", max_size=5))
def test_open_set_contains_matches_brute_force(strings, sigma):
    assert open_set_contains(strings, sigma) == brute_contains(strings, sigma)


def test_open_set_contains_needs_both_halves():
    assert open_set_contains({"00", "01"}, "0")
    assert not open_set_contains({"00", "011"}, "0")
    assert open_set_contains({"1", "00", "01"}, "")


@pytest.mark.parametrize("text, q", [("3/8", F(3, 8)), ("5/2^3", F(5, 8)), ("2", F(2)), (" -1/3 ", F(-1, 3))])
def test_parse_rational(text, q):
    assert parse_rational(text) == q


@pytest.mark.parametrize("bad", ["1/0", "x", "1/2/3", ""])
def test_parse_rational_rejects(bad):
    with pytest.raises(FormatError):
        parse_rational(bad)


def test_bits_tokens():
    assert parse_bits("@") == ""
    assert parse_bits("0101") == "0101"
    with pytest.raises(FormatError):
        parse_bits("012")
    assert format_rational(F(4, 2)) == "2/1"


@given(st.integers(-1000, 1000), st.integers(0, 12))
def test_dyadic_canonical_and_lossless(m, k):
    d = DyadicRational(m, k)
    assert d.to_fraction() == F(m, 2 ** k)
    assert d.mantissa % 2 == 1 or d.exponent == 0
    assert DyadicRational.parse(str(d)) == d
    assert DyadicRational.from_fraction(d.to_fraction()) == d


def test_dyadic_rejects_non_dyadic():
    with pytest.raises(ValueError):
        DyadicRational.from_fraction(F(1, 3))
    with pytest.raises(FormatError):
        DyadicRational.parse("1/3")


@given(st.fractions(min_value=-4, max_value=4), st.fractions(min_value=F(1, 1000), max_value=3))
def test_simplest_dyadic_between(lo, width):
    hi = lo + width
    q = simplest_dyadic_between(lo, hi)
    assert lo < q < hi
    k = q.denominator.bit_length() - 1
    assert q.denominator == 2 ** k
    # nothing with a smaller exponent fits, and nothing smaller with the same one
    for j in range(k):
        assert not any(lo < F(m, 2 ** j) < hi for m in range(int(lo * 2 ** j) - 1, int(hi * 2 ** j) + 2))
    assert not lo < q - F(1, 2 ** k) < hi


@pytest.mark.parametrize("text, prefix", [("0*", "00000"), ("1(01)*", "10101"), ("(01)*", "01010"), ("110*", "11000")])
def test_periodic_real(text, prefix):
    x = PeriodicReal.parse(text)
    assert x.prefix(5) == prefix
    assert "".join(x.bit(i) for i in range(5)) == prefix
    assert PeriodicReal.parse(str(x)) == x


def test_compatible():
    assert compatible("01", "0110")
    assert not compatible("01", "00")
