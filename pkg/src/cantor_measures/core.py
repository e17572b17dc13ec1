"""Bit strings, exact rationals, dyadics and the Cantor metric.

Bit strings are plain ``str`` objects over the alphabet ``{"0", "1"}``; the
empty string is the root cylinder.  Rationals are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import AmbiguousPrefix, FormatError

EMPTY_TOKEN = "@"

_BITS = re.compile(r"[01]*\Z")


def check_bits(s: str) -> str:
    if not isinstance(s, str) or not _BITS.match(s):
        raise ValueError(f"not a bit string: {s!r}")
    return s


def is_prefix(a: str, b: str) -> bool:
    """True when ``a`` is a (not necessarily proper) prefix of ``b``."""
    return len(a) <= len(b) and b.startswith(a)


def compatible(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


def strings_of_length(n: int) -> Iterator[str]:
    """All bit strings of length ``n`` in lexicographic order."""
    for bits in itertools.product("01", repeat=n):
        yield "".join(bits)


def strings_up_to(depth: int) -> Iterator[str]:
    """All bit strings of length <= ``depth``, shortest first."""
    for n in range(depth + 1):
        yield from strings_of_length(n)


def extensions(sigma: str, length: int) -> Iterator[str]:
    """All extensions of ``sigma`` to ``length`` bits, in lexicographic order."""
    for tail in strings_of_length(length - len(sigma)):
        yield sigma + tail


def string_order(s: str) -> tuple[int, str]:
    """Sort key: shorter strings first, then lexicographic."""
    return (len(s), s)


def longest_common_prefix(x: str, y: str) -> str:
    n = 0
    for a, b in zip(x, y):
        if a != b:
            break
        n += 1
    return x[:n]


def cantor_distance(x: str, y: str, *, equal: bool = False) -> Fraction:
    """Distance ``2^-|x ∩ y|`` between reals known through prefixes ``x`` and ``y``.

    If the prefixes disagree somewhere in their common length the distance is
    determined.  Otherwise one is a prefix of the other and the reals may or
    may not coincide; the caller must pass ``equal=True`` to assert that they
    do, else :class:`AmbiguousPrefix` is raised.
    """
    lcp = longest_common_prefix(x, y)
    if len(lcp) < min(len(x), len(y)):
        if equal:
            raise ValueError(f"{x!r} and {y!r} differ; they cannot be declared equal")
        return Fraction(1, 2 ** len(lcp))
    if equal:
        return Fraction(0)
    raise AmbiguousPrefix(f"{x or EMPTY_TOKEN!s} and {y or EMPTY_TOKEN!s} do not separate the reals")


def prefix_free_reduce(strings: Iterable[str]) -> frozenset[str]:
    """Minimal elements of ``strings`` under the prefix order."""
    kept: list[str] = []
    seen: set[str] = set()
    for s in sorted(set(strings), key=string_order):
        if any(s[:k] in seen for k in range(len(s) + 1)):
            continue
        seen.add(s)
        kept.append(s)
    return frozenset(kept)


def open_set_contains(strings: Iterable[str], sigma: str) -> bool:
    """Decide ``[[sigma]] ⊆ [[strings]]`` exactly.

    Either some listed string is a prefix of ``sigma`` or, recursively, both
    one-bit extensions of ``sigma`` are covered; recursion stops at the
    longest listed length.
    """
    strings = frozenset(strings)
    if not strings:
        return False
    limit = max(len(u) for u in strings)

    def covered(s: str) -> bool:
        if any(s[:k] in strings for k in range(len(s) + 1)):
            return True
        if len(s) >= limit:
            return False
        return covered(s + "0") and covered(s + "1")

    return covered(sigma)


# -- serialisation ---------------------------------------------------------

def format_bits(s: str) -> str:
    return s if s else EMPTY_TOKEN


def parse_bits(token: str) -> str:
    token = token.strip()
    if token == EMPTY_TOKEN:
        return ""
    if not token or not _BITS.match(token):
        raise FormatError(f"bad bit string {token!r}")
    return token


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


_RATIONAL = re.compile(r"\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?\Z")
_DYADIC = re.compile(r"\s*(-?\d+)\s*/\s*2\s*\^\s*(\d+)\s*\Z")


def parse_rational(text: str) -> Fraction:
    """Parse ``m/n``, ``m`` or ``m/2^k``."""
    m = _DYADIC.match(text)
    if m:
        return Fraction(int(m.group(1)), 2 ** int(m.group(2)))
    m = _RATIONAL.match(text)
    if not m:
        raise FormatError(f"bad rational {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise FormatError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


@dataclass(frozen=True)
class DyadicRational:
    """``mantissa / 2**exponent`` in canonical form (odd mantissa or exponent 0)."""

    mantissa: int
    exponent: int = 0

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be non-negative")
        m, k = self.mantissa, self.exponent
        if m == 0:
            k = 0
        while k > 0 and m % 2 == 0:
            m //= 2
            k -= 1
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", k)

    @classmethod
    def from_fraction(cls, q: Fraction) -> "DyadicRational":
        q = Fraction(q)
        if not is_dyadic(q):
            raise ValueError(f"{q} is not dyadic")
        return cls(q.numerator, q.denominator.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> "DyadicRational":
        try:
            return cls.from_fraction(parse_rational(text))
        except ValueError as exc:
            raise FormatError(str(exc)) from None

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 2 ** self.exponent)

    def __str__(self) -> str:
        return f"{self.mantissa}/2^{self.exponent}"


def simplest_dyadic_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The dyadic in the open interval ``(lo, hi)`` with least exponent, then least mantissa."""
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    k = 0
    while True:
        scale = 2 ** k
        m = math.floor(lo * scale) + 1
        if Fraction(m, scale) < hi:
            return Fraction(m, scale)
        k += 1


@dataclass(frozen=True)
class PeriodicReal:
    """The eventually periodic real ``head`` followed by ``period`` repeated forever."""

    head: str
    period: str

    def __post_init__(self):
        check_bits(self.head)
        check_bits(self.period)
        if not self.period:
            raise ValueError("period must be non-empty")

    def bit(self, i: int) -> str:
        if i < len(self.head):
            return self.head[i]
        return self.period[(i - len(self.head)) % len(self.period)]

    def prefix(self, n: int) -> str:
        if n <= len(self.head):
            return self.head[:n]
        reps = (n - len(self.head)) // len(self.period) + 1
        return (self.head + self.period * reps)[:n]

    def __str__(self) -> str:
        if len(self.period) == 1:
            return f"{self.head}{self.period}*"
        return f"{self.head}({self.period})*"

    @classmethod
    def parse(cls, text: str) -> "PeriodicReal":
        """Accept ``<head>(<period>)*`` or ``<head><bit>*``, e.g. ``1(01)*`` or ``0*``."""
        m = re.fullmatch(r"([01]*)\(([01]+)\)\*", text) or re.fullmatch(r"([01]*)([01])\*", text)
        if not m:
            raise FormatError(f"bad periodic real {text!r}")
        return cls(m.group(1), m.group(2))
