"""Settling-time reals of a finite stage enumeration and their continuous cover."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import format_bits, format_rational
from .errors import FormatError
from .measures import ZERO, MeasureOracle, continuity_modulus, require_exact
from .mltests import TestLevel


@dataclass(frozen=True)
class StageEnumeration:
    """Elements with the (positive) stage at which each enters the set."""

    events: tuple[tuple[int, int], ...]

    def __init__(self, events: Iterable[tuple[int, int]] = ()):
        events = tuple((int(x), int(s)) for x, s in events)
        seen = set()
        for k, (x, s) in enumerate(events):
            if x < 0 or s < 1:
                raise ValueError(f"event {k}: need element >= 0 and stage >= 1, got ({x}, {s})")
            if x in seen:
                raise ValueError(f"element {x} enumerated twice")
            if k and s <= events[k - 1][1]:
                raise ValueError("stages must strictly increase along the list")
            seen.add(x)
        object.__setattr__(self, "events", events)

    def truncated(self, t: int) -> "StageEnumeration":
        return StageEnumeration(e for e in self.events if e[1] <= t)

    def at(self, s: int) -> frozenset[int]:
        return frozenset(x for x, st in self.events if st <= s)

    @property
    def max_stage(self) -> int:
        return self.events[-1][1] if self.events else 0

    def to_text(self) -> str:
        return "enum v1\n" + "".join(f"{x} {s}\n" for x, s in self.events)


def parse_enumeration(text: str) -> StageEnumeration:
    rows = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
    rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
    if not rows or rows[0][1] != "enum v1":
        raise FormatError("expected header 'enum v1'", rows[0][0] if rows else 1)
    events = []
    for i, ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise FormatError(f"expected '<element> <stage>', got {ln!r}", i)
        events.append((int(parts[0]), int(parts[1])))
        try:
            StageEnumeration(events)
        except ValueError as exc:
            raise FormatError(str(exc), i) from None
    return StageEnumeration(events)


@dataclass(frozen=True)
class SettlingResult:
    markers: tuple[int, ...]
    S: str


def settling_sequence(e: StageEnumeration, length: int) -> SettlingResult:
    """Markers below ``length`` and the characteristic string of the marker set.

    The first ``n + 1`` elements have settled once the last of them that
    ever enters has entered, so the least settling stage of ``K`` restricted
    to ``n + 1`` is the largest stage among elements ``<= n`` (0 if none).
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    stage = dict(e.events)
    markers = [0]
    n = 0
    while True:
        settled = max((stage[x] for x in stage if x <= n), default=0)
        nxt = max(settled, markers[-1] + 1)
        if nxt >= length:
            break
        markers.append(nxt)
        n += 1
    marked = set(markers)
    return SettlingResult(tuple(markers), "".join("1" if i in marked else "0" for i in range(length)))


def settling_at_stage(e: StageEnumeration, t: int, length: int) -> SettlingResult:
    """The markers as they look when only stages ``<= t`` have been seen."""
    return settling_sequence(e.truncated(t), length)


@dataclass(frozen=True)
class CoverLevel:
    n: int
    n0: int
    n1: int
    level: TestLevel
    head: str  # the first string, S[n1] restricted to n0
    zero_blocks: tuple[str, ...]


def continuous_cover(mu: MeasureOracle, e: StageEnumeration, n: int, max_depth: int) -> CoverLevel:
    """Level ``n`` of a ``mu``-test covering the settling-time real.

    With ``n0 = l(2^-(n+1))`` and ``n1 = l(2^-(n+1) / n0)`` the level holds
    the stage-``n1`` approximation cut at ``n0`` together with, for each
    marker ``s < n0`` of that approximation, the approximation cut at ``s``
    and padded with zeros to length ``n1``.
    """
    eps = Fraction(1, 2 ** (n + 1))
    n0 = continuity_modulus(mu, eps, max_depth)
    n1 = continuity_modulus(mu, eps / n0, max_depth)
    approx = settling_at_stage(e, n1, max(n1, 1))
    head = approx.S[:n0]
    blocks = tuple(approx.S[:s] + "0" * (n1 - s) for s in approx.markers if s < n0)
    return CoverLevel(n, n0, n1, TestLevel(n, (head,) + blocks), head, blocks)


@dataclass(frozen=True)
class NcrLevel:
    cover: CoverLevel
    raw_sum: Fraction
    budget: Fraction
    passed: bool
    covered: bool
    unsettled: bool  # stage-n1 approximation differs from the settled S below n1
    zero_block_used: bool  # the settled S is covered only through a padded string


def verify_ncr(mu: MeasureOracle, e: StageEnumeration, n_max: int, max_depth: int) -> list[NcrLevel]:
    require_exact(mu)
    out = []
    for n in range(n_max + 1):
        cv = continuous_cover(mu, e, n, max_depth)
        length = max(cv.n1, 1)
        truth = settling_sequence(e, length).S
        approx = settling_at_stage(e, cv.n1, length).S
        raw = sum((mu.value(s) for s in cv.level.strings), ZERO)
        head_hit = truth.startswith(cv.head)
        block_hit = any(truth.startswith(b) for b in cv.zero_blocks)
        budget = Fraction(1, 2 ** n)
        out.append(NcrLevel(cv, raw, budget, raw <= budget, head_hit or block_hit,
                            approx != truth, block_hit and not head_hit))
    return out


def format_ncr(report: list[NcrLevel]) -> str:
    lines = []
    for r in report:
        cv = r.cover
        strings = ", ".join(format_bits(s) for s in cv.level.sorted())
        flags = []
        if r.unsettled:
            flags.append("UnsettledApproximation")
        if r.zero_block_used:
            flags.append("zero-block")
        lines.append(
            f"n={cv.n} n0={cv.n0} n1={cv.n1} raw={format_rational(r.raw_sum)} "
            f"budget={format_rational(r.budget)} {'pass' if r.passed else 'FAIL'} "
            f"covered={'yes' if r.covered else 'no'}"
            + (f" [{' '.join(flags)}]" if flags else "")
            + f" level: {strings}")
    return "\n".join(lines) + "\n"
