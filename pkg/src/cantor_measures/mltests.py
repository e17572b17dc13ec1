"""Martin-Löf tests given as finitely many finite levels."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .core import (
    format_bits,
    format_rational,
    open_set_contains,
    parse_bits,
    prefix_free_reduce,
    string_order,
    strings_up_to,
)
from .errors import FormatError, Indecisive, MissingConstraint
from .measures import ZERO, MeasureOracle, require_exact
from .transforms import ConstraintSystem


@dataclass(frozen=True)
class TestLevel:
    index: int
    strings: frozenset[str]

    __test__ = False  # keep pytest from collecting this class

    def __init__(self, index: int, strings: Iterable[str] = ()):
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "strings", frozenset(strings))

    @property
    def budget(self) -> Fraction:
        return Fraction(1, 2 ** self.index)

    def sorted(self) -> list[str]:
        return sorted(self.strings, key=string_order)

    def raw_sum(self, mu: MeasureOracle) -> Fraction:
        return sum((mu.value(s) for s in self.strings), ZERO)

    def open_measure(self, mu: MeasureOracle) -> Fraction:
        return sum((mu.value(s) for s in prefix_free_reduce(self.strings)), ZERO)


@dataclass(frozen=True)
class MLTest:
    levels: tuple[TestLevel, ...]

    __test__ = False

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        for n, lv in enumerate(self.levels):
            if lv.index != n:
                raise ValueError(f"level indices must run 0, 1, ...; found {lv.index} at position {n}")

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[str]]) -> "MLTest":
        return cls(tuple(TestLevel(n, s) for n, s in enumerate(sets)))

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, n: int) -> TestLevel:
        return self.levels[n]

    def to_text(self) -> str:
        lines = ["mltest v1"]
        for lv in self.levels:
            lines.append(f"level {lv.index}: " + ", ".join(format_bits(s) for s in lv.sorted()))
        return "\n".join(lines) + "\n"


_LEVEL = re.compile(r"level\s+(\d+)\s*:(.*)\Z")


def _content_lines(text: str) -> list[tuple[int, str]]:
    rows = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
    return [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]


def _parse_string_list(body: str, line: int) -> list[str]:
    try:
        return [parse_bits(t) for t in body.split(",") if t.strip()]
    except FormatError as exc:
        raise FormatError(str(exc), line) from None


def parse_mltest(text: str) -> MLTest:
    rows = _content_lines(text)
    if not rows or rows[0][1] != "mltest v1":
        raise FormatError("expected header 'mltest v1'", rows[0][0] if rows else 1)
    levels: dict[int, set[str]] = {}
    for i, ln in rows[1:]:
        m = _LEVEL.match(ln)
        if not m:
            raise FormatError(f"expected 'level <n>: <strings>', got {ln!r}", i)
        n = int(m.group(1))
        if n in levels:
            raise FormatError(f"duplicate level {n}", i)
        levels[n] = set(_parse_string_list(m.group(2), i))
    if sorted(levels) != list(range(len(levels))):
        raise FormatError("level indices must be contiguous from 0", rows[-1][0])
    return MLTest.from_sets(levels[n] for n in range(len(levels)))


@dataclass(frozen=True)
class LevelReport:
    index: int
    raw_sum: Fraction
    open_measure: Fraction
    budget: Fraction
    passed: bool


def verify_bound(t: MLTest, mu: MeasureOracle) -> list[LevelReport]:
    """Check the raw sum over each listed level against ``2^-n``."""
    require_exact(mu)
    out = []
    for lv in t.levels:
        raw = lv.raw_sum(mu)
        out.append(LevelReport(lv.index, raw, lv.open_measure(mu), lv.budget, raw <= lv.budget))
    return out


def level_covers(strings: Iterable[str], x: str) -> bool | None:
    """Whether some listed string is a prefix of ``x``; ``None`` if ``x`` is too short to tell."""
    undecided = False
    for s in strings:
        if x.startswith(s):
            return True
        if s.startswith(x):
            undecided = True
    return None if undecided else False


def covers(t: MLTest, x: str) -> list[bool | None]:
    """Per level: ``True``/``False``, or ``None`` when ``x`` is too short to tell."""
    return [level_covers(lv.strings, x) for lv in t.levels]


def covers_strict(t: MLTest, x: str) -> list[bool]:
    """Like :func:`covers` but raising :class:`Indecisive` on undecided levels."""
    out = []
    for lv, c in zip(t.levels, covers(t, x)):
        if c is None:
            raise Indecisive(x, lv.index)
        out.append(c)
    return out


def pullback(t: MLTest, cs: ConstraintSystem) -> MLTest:
    """Replace every string by its recorded ``Pre`` set, level by level."""
    levels = []
    for lv in t.levels:
        acc: set[str] = set()
        for s in lv.sorted():
            rec = cs.records.get(s)
            if rec is None:
                raise MissingConstraint(s)
            acc |= rec.pre
        levels.append(prefix_free_reduce(acc))
    return MLTest.from_sets(levels)


Family = Mapping[tuple[int, str], Iterable[str]] | Callable[[int, str], Iterable[str]]


def _family_level(family: Family, n: int, tau: str) -> frozenset[str]:
    if callable(family):
        return frozenset(family(n, tau))
    return frozenset(family.get((n, tau), ()))


@dataclass
class BasisResult:
    test: MLTest
    # per n: nodes of T none of whose prefixes enumerate the query into U^tau_n
    survivors: list[frozenset[str]] = field(default_factory=list)
    deepest: list[str | None] = field(default_factory=list)


def basis_combine(tree: Iterable[str], family: Family, depth: int, levels: int | None = None,
                  query: str | None = None) -> BasisResult:
    """Combine a tree-indexed family of tests into one test ``V``.

    ``sigma`` (``|sigma| <= depth``) enters ``V_n`` when every node of the
    tree with the same length has ``[[sigma]]`` inside ``[[U^tau_n]]``.  With a
    ``query`` prefix, also report per ``n`` the nodes that never enumerate a
    prefix of it (prefix-closed) and the deepest such node, lexicographically
    least among ties.
    """
    nodes = frozenset(tree)
    if levels is None:
        if callable(family):
            raise ValueError("levels is required when the family is a function")
        levels = max((n for n, _ in family), default=-1) + 1
    by_len: dict[int, list[str]] = {}
    for tau in nodes:
        by_len.setdefault(len(tau), []).append(tau)
    sets = []
    for n in range(levels):
        chosen = set()
        for s in strings_up_to(depth):
            peers = by_len.get(len(s), [])
            if peers and all(open_set_contains(_family_level(family, n, tau), s) for tau in peers):
                chosen.add(s)
        sets.append(chosen)
    result = BasisResult(MLTest.from_sets(sets))
    if query is not None:
        for n in range(levels):
            alive = set()
            for tau in sorted(nodes, key=string_order):
                parent_ok = not tau or tau[:-1] in alive
                hit = any(query.startswith(u) for u in _family_level(family, n, tau))
                if parent_ok and not hit:
                    alive.add(tau)
            result.survivors.append(frozenset(alive))
            result.deepest.append(min(alive, key=lambda s: (-len(s), s)) if alive else None)
    return result


# -- basis fixture file ----------------------------------------------------------

@dataclass
class BasisFixture:
    depth: int
    levels: int
    tree: frozenset[str]
    family: dict[tuple[int, str], frozenset[str]]
    query: str | None = None


_FAMILY = re.compile(r"U\s+(\d+)\s+(\S+)\s*:(.*)\Z")


def parse_basis(text: str) -> BasisFixture:
    """``basis v1`` then ``depth:``, ``levels:``, ``tree:``, optional ``query:``
    and lines ``U <n> <tau>: s1, s2``."""
    rows = _content_lines(text)
    if not rows or rows[0][1] != "basis v1":
        raise FormatError("expected header 'basis v1'", rows[0][0] if rows else 1)
    head: dict[str, tuple[int, str]] = {}
    family: dict[tuple[int, str], frozenset[str]] = {}
    for i, ln in rows[1:]:
        m = _FAMILY.match(ln)
        if m:
            try:
                tau = parse_bits(m.group(2))
            except FormatError as exc:
                raise FormatError(str(exc), i) from None
            family[(int(m.group(1)), tau)] = frozenset(_parse_string_list(m.group(3), i))
            continue
        key, colon, val = ln.partition(":")
        if not colon or key.strip() not in ("depth", "levels", "tree", "query"):
            raise FormatError(f"unexpected line {ln!r}", i)
        head[key.strip()] = (i, val.strip())
    for key in ("depth", "levels", "tree"):
        if key not in head:
            raise FormatError(f"missing '{key}:' line", rows[-1][0])
    try:
        depth, levels = int(head["depth"][1]), int(head["levels"][1])
    except ValueError:
        raise FormatError("depth and levels must be integers", head["depth"][0]) from None
    tree = frozenset(_parse_string_list(head["tree"][1], head["tree"][0]))
    if any(t and t[:-1] not in tree for t in tree) or "" not in tree:
        raise FormatError("tree must be prefix-closed and contain @", head["tree"][0])
    query = None
    if "query" in head:
        i, val = head["query"]
        try:
            query = parse_bits(val)
        except FormatError as exc:
            raise FormatError(str(exc), i) from None
    return BasisFixture(depth, levels, tree, family, query)


def format_report(reports: list[LevelReport]) -> str:
    lines = []
    for r in reports:
        verdict = "pass" if r.passed else "FAIL"
        lines.append(f"level {r.index}: raw {format_rational(r.raw_sum)} open "
                     f"{format_rational(r.open_measure)} budget {format_rational(r.budget)} {verdict}")
    return "\n".join(lines) + "\n"
