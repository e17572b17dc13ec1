"""Transformations of measures along monotone functionals.

Functionals are total, use-bounded string maps: ``use[n]`` input bits decide
``n`` output bits.  Two representations share one interface
(``use``, ``depth``, ``output``):

* :class:`MonotoneFunctional` keeps an explicit table (the file format);
* :class:`LevelMap` keeps, for every output string, the lexicographic range
  of its preimage, which is how the order-preserving transport map is built
  without tabulating ``2^use`` inputs.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Sequence

from .core import (
    compatible,
    extensions,
    format_bits,
    format_rational,
    parse_bits,
    prefix_free_reduce,
    simplest_dyadic_between,
    string_order,
    strings_of_length,
    strings_up_to,
)
from .errors import FormatError, Infeasible, InvariantViolation, ModulusUnavailable, NotContinuousWithin
from .measures import (
    ONE,
    ZERO,
    CylinderAssignment,
    ExtensionPolicy,
    MeasureOracle,
    continuity_modulus,
    require_exact,
)


class Functional:
    use: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.use) - 1

    def level_of(self, length: int) -> int:
        """Largest ``n`` with ``use[n] <= length`` (``-1`` if none)."""
        return bisect.bisect_right(self.use, length) - 1

    def output(self, sigma: str) -> str:
        raise NotImplementedError

    def __call__(self, sigma: str) -> str:
        return self.output(sigma)


class MonotoneFunctional(Functional):
    """Table-backed functional; ``table`` maps every input of length ``use[n]``."""

    def __init__(self, use: Sequence[int], table: Mapping[str, str], *, allow_partial: bool = False):
        use = tuple(int(u) for u in use)
        if not use or use[0] < 0 or any(a > b for a, b in zip(use, use[1:])):
            raise InvariantViolation("use must be a non-empty non-decreasing sequence of naturals")
        self.use = use
        self.allow_partial = allow_partial
        self.table = dict(table)
        if use[0] == 0:
            self.table.setdefault("", "")
        self._check()

    def _check(self):
        need: dict[int, int] = {}
        for n, u in enumerate(self.use):
            need[u] = n
        for u, n in need.items():
            for s in strings_of_length(u):
                if s not in self.table:
                    raise InvariantViolation(f"no table entry for input {format_bits(s)}", s)
                if not self.allow_partial and len(self.table[s]) < n:
                    raise InvariantViolation(
                        f"output of {format_bits(s)} has {len(self.table[s])} < {n} bits", s)
        for n in range(1, len(self.use)):
            short = self.use[n - 1]
            for s in strings_of_length(self.use[n]):
                a, b = self.table[s[:short]], self.table[s]
                if not b.startswith(a):
                    raise InvariantViolation(
                        f"not monotone: {format_bits(s[:short])} -> {format_bits(a)} but "
                        f"{format_bits(s)} -> {format_bits(b)}", (s[:short], s))

    @classmethod
    def from_function(cls, f: Callable[[str], str], use: Sequence[int] | Callable[[int], int],
                      depth: int | None = None, **kw) -> "MonotoneFunctional":
        if callable(use):
            if depth is None:
                raise ValueError("depth is required when use is a function")
            use = [use(n) for n in range(depth + 1)]
        table = {}
        for u in set(use):
            for s in strings_of_length(u):
                table[s] = f(s)
        return cls(use, table, **kw)

    def output(self, sigma):
        n = self.level_of(len(sigma))
        if n < 0:
            return ""
        return self.table[sigma[: self.use[n]]]

    def __eq__(self, other):
        if not isinstance(other, MonotoneFunctional):
            return NotImplemented
        return self.use == other.use and self.table == other.table

    __hash__ = None

    def to_text(self) -> str:
        lines = ["functional v1", "use: " + ",".join(f"u({n})={u}" for n, u in enumerate(self.use) if n)]
        for s in sorted(self.table, key=string_order):
            lines.append(f"{format_bits(s)} -> {format_bits(self.table[s])}")
        return "\n".join(lines) + "\n"


_USE_ITEM = re.compile(r"u\((\d+)\)\s*=\s*(\d+)\Z")


def parse_functional(text: str) -> MonotoneFunctional:
    rows = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
    rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
    if not rows or rows[0][1] != "functional v1":
        raise FormatError("expected header 'functional v1'", rows[0][0] if rows else 1)
    if len(rows) < 2 or not rows[1][1].startswith("use:"):
        raise FormatError("expected 'use:' line", rows[0][0] + 1)
    i, ln = rows[1]
    use = {0: 0}
    for item in filter(None, (t.strip() for t in ln[4:].split(","))):
        m = _USE_ITEM.match(item)
        if not m:
            raise FormatError(f"bad use item {item!r}", i)
        use[int(m.group(1))] = int(m.group(2))
    if sorted(use) != list(range(len(use))):
        raise FormatError("use indices must be contiguous from 1", i)
    table, where = {}, {}
    for i, ln in rows[2:]:
        left, arrow, right = ln.partition("->")
        if not arrow:
            raise FormatError(f"expected '<input> -> <output>', got {ln!r}", i)
        try:
            s, t = parse_bits(left), parse_bits(right)
        except FormatError as exc:
            raise FormatError(str(exc), i) from None
        if s in table:
            raise FormatError(f"duplicate input {format_bits(s)}", i)
        table[s], where[s] = t, i
    try:
        return MonotoneFunctional([use[n] for n in range(len(use))], table)
    except InvariantViolation as exc:
        key = exc.where[1] if isinstance(exc.where, tuple) else exc.where
        raise FormatError(str(exc), where.get(key)) from None


def identity_functional(depth: int) -> MonotoneFunctional:
    return MonotoneFunctional.from_function(lambda s: s, list(range(depth + 1)))


# -- image measures ------------------------------------------------------------

def _spread(out: str, mass: Fraction, depth: int, policy: ExtensionPolicy) -> Iterator[tuple[str, Fraction]]:
    if len(out) >= depth:
        yield out[:depth], mass
    elif policy is ExtensionPolicy.LEFT_ATOM:
        yield out + "0" * (depth - len(out)), mass
    elif policy is ExtensionPolicy.UNIFORM:
        share = mass / 2 ** (depth - len(out))
        for t in extensions(out, depth):
            yield t, share
    else:
        raise InvariantViolation(f"output {format_bits(out)} is shorter than {depth} bits", out)


def _aggregate(bottom: Mapping[str, Fraction], depth: int) -> dict[str, Fraction]:
    values = {t: bottom.get(t, ZERO) for t in strings_of_length(depth)}
    for k in range(depth - 1, -1, -1):
        for t in strings_of_length(k):
            values[t] = values[t + "0"] + values[t + "1"]
    return values


def image_measure(mu: MeasureOracle, phi: Functional, depth: int,
                  partial: ExtensionPolicy | str = "uniform") -> CylinderAssignment:
    """The push-forward ``mu_phi(tau) = mu(phi^-1([[tau]]))`` down to ``depth``.

    Inputs whose output stops short of ``depth`` bits hand their mass to the
    ``partial`` policy (uniform split by default).  Level ``depth`` is
    computed from inputs of length ``use[depth]`` and shallower levels by
    summation, so the result is additive even with partial outputs.
    """
    require_exact(mu)
    if phi.depth < depth:
        raise ValueError(f"functional is only defined to output depth {phi.depth}")
    if isinstance(phi, LevelMap):
        return CylinderAssignment(depth, phi.image_values(mu, depth), ExtensionPolicy.STOP)
    policy = ExtensionPolicy(partial)
    bottom: dict[str, Fraction] = {}
    for s in strings_of_length(phi.use[depth]):
        mass = mu.value(s)
        if not mass:
            continue
        for t, share in _spread(phi.output(s), mass, depth, policy):
            bottom[t] = bottom.get(t, ZERO) + share
    return CylinderAssignment(depth, _aggregate(bottom, depth), ExtensionPolicy.STOP)


# -- rationalisation -----------------------------------------------------------

class Rationalized(MeasureOracle):
    """Dyadic measure ``nu`` with ``mu(sigma) < 2 nu(sigma)`` everywhere.

    Unnormalised mass starts at 2 on the root.  Each split picks
    ``nu(s0)`` as the dyadic of least exponent, then least mantissa, with
    ``mu(si) < nu(si) < mu(si) + 2^-|s|`` for both children; the final
    measure is half the unnormalised one.  Values are computed on demand
    along the path and memoised.
    """

    def __init__(self, mu: MeasureOracle):
        require_exact(mu)
        self.mu = mu
        self._raw = {"": Fraction(2)}

    def _split(self, s: str) -> None:
        v = self._raw[s]
        m0, m1 = self.mu.value(s + "0"), self.mu.value(s + "1")
        slack = Fraction(1, 2 ** len(s))
        lo = max(m0, v - m1 - slack)
        hi = min(m0 + slack, v - m1)
        x = simplest_dyadic_between(lo, hi)
        self._raw[s + "0"] = x
        self._raw[s + "1"] = v - x

    def unnormalized(self, sigma: str) -> Fraction:
        k = len(sigma)
        while sigma[:k] not in self._raw:
            k -= 1
        for j in range(k, len(sigma)):
            if sigma[: j + 1] not in self._raw:
                self._split(sigma[:j])
        return self._raw[sigma]

    def value(self, sigma, n=None):
        return self.unnormalized(sigma) / 2

    def __repr__(self):
        return f"Rationalized({self.mu!r})"


def rationalize(mu: MeasureOracle, depth: int) -> CylinderAssignment:
    return Rationalized(mu).truncate(depth, ExtensionPolicy.UNIFORM)


# -- transport to Lebesgue ----------------------------------------------------

def _cdf(nu: MeasureOracle, level: int, index: int) -> Fraction:
    """Mass of the level strings lexicographically below string number ``index``."""
    if index >= 2 ** level:
        return ONE
    s = format(index, f"0{level}b") if level else ""
    total = ZERO
    for k, bit in enumerate(s):
        if bit == "1":
            total += nu.value(s[:k] + "0")
    return total


def _pivot(nu: MeasureOracle, level: int, target: Fraction) -> int:
    """Least index ``j`` whose inclusive cumulative mass reaches ``target``."""
    s, acc = "", ZERO
    for _ in range(level):
        left = nu.value(s + "0")
        if acc + left >= target:
            s += "0"
        else:
            acc += left
            s += "1"
    return int(s, 2) if s else 0


class LevelMap(Functional):
    """Order-preserving functional given by preimage ranges.

    ``ranges[n][t]`` is the inclusive range ``(lo, hi)`` of input indices at
    level ``use[n]`` sent to the ``n``-bit string with index ``t``; an empty
    preimage has ``hi == lo - 1``.
    """

    def __init__(self, use: Sequence[int], ranges: Sequence[Sequence[tuple[int, int]]]):
        self.use = tuple(use)
        self.ranges = tuple(tuple(r) for r in ranges)
        self._starts = tuple(tuple(lo for lo, _ in r) for r in self.ranges)

    def preimage_range(self, tau: str) -> tuple[int, int]:
        return self.ranges[len(tau)][int(tau, 2) if tau else 0]

    def output(self, sigma):
        n = self.level_of(len(sigma))
        if n <= 0:
            return ""
        u = self.use[n]
        idx = int(sigma[:u], 2) if u else 0
        t = bisect.bisect_right(self._starts[n], idx) - 1
        return format(t, f"0{n}b")

    def image_values(self, mu: MeasureOracle, depth: int) -> dict[str, Fraction]:
        values = {}
        for n in range(depth + 1):
            level = self.use[n]
            for t, (lo, hi) in enumerate(self.ranges[n]):
                tau = format(t, f"0{n}b") if n else ""
                values[tau] = _cdf(mu, level, hi + 1) - _cdf(mu, level, lo) if hi >= lo else ZERO
        return values

    def is_surjective(self) -> bool:
        return all(hi >= lo for level in self.ranges for lo, hi in level)

    def is_order_preserving(self) -> bool:
        """Ranges tile each input level in order and refine level by level."""
        for n, level in enumerate(self.ranges):
            expect = 0
            for lo, hi in level:
                if lo != expect or hi < lo - 1:
                    return False
                expect = hi + 1
            if expect != 2 ** self.use[n]:
                return False
            if n:
                shift = self.use[n] - self.use[n - 1]
                for t, (lo, hi) in enumerate(self.ranges[n - 1]):
                    (a, _), (_, b) = level[2 * t], level[2 * t + 1]
                    if hi >= lo and (a != lo << shift or b != ((hi + 1) << shift) - 1):
                        return False
        return True

    def to_table(self) -> MonotoneFunctional:
        table = {}
        for u in set(self.use):
            for s in strings_of_length(u):
                table[s] = self.output(s)
        return MonotoneFunctional(self.use, table)


def transport_map(nu: MeasureOracle, m: int, max_depth: int | None = None) -> LevelMap:
    """Order-preserving map sending a continuous, positive measure towards Lebesgue.

    Level ``l_k`` is the least level where every cylinder has mass at most
    ``2^-k`` (kept strictly increasing).  The preimage of ``tau`` is refined
    to level ``l_{|tau|+1}`` and cut at the lexicographically least string
    where the cumulative mass reaches half of the preimage's mass; strings
    up to the cut go to ``tau0``, the rest to ``tau1``.
    """
    require_exact(nu)
    if max_depth is None:
        if not isinstance(nu, CylinderAssignment):
            raise ValueError("max_depth is required unless nu is a CylinderAssignment")
        max_depth = nu.depth
    use = [0]
    for k in range(1, m + 1):
        try:
            lk = continuity_modulus(nu, Fraction(1, 2 ** k), max_depth)
        except NotContinuousWithin:
            raise ModulusUnavailable(k, max_depth) from None
        lk = max(lk, use[-1] + 1)
        if lk > max_depth:
            raise ModulusUnavailable(k, max_depth)
        use.append(lk)
    ranges = [[(0, 0)]]
    for n in range(m):
        level, shift = use[n + 1], use[n + 1] - use[n]
        nxt = []
        for lo, hi in ranges[n]:
            a, b = lo << shift, ((hi + 1) << shift) - 1
            if hi < lo:
                nxt += [(a, a - 1), (a, a - 1)]
                continue
            start = _cdf(nu, level, a)
            total = _cdf(nu, level, b + 1) - start
            if total <= 0:
                raise InvariantViolation("transport needs strictly positive cylinder masses")
            p = _pivot(nu, level, start + total / 2)
            nxt += [(a, p), (p + 1, b)]
        ranges.append(nxt)
    return LevelMap(use, ranges)


# -- continuity repair ---------------------------------------------------------

def continuity_repair(mu: MeasureOracle, phi: Functional, psi: Functional, depth: int) -> CylinderAssignment:
    """Image of ``mu`` under ``phi`` with incompatible mass smeared out.

    Follow each input ``tau`` (length ``use_phi[depth]``) down its output
    path ``s_k``.  At the first level ``k`` where ``tau[:use_phi[k]]`` is
    incompatible with ``psi(s_k)`` its mass still counts for ``s_k`` but
    from level ``k + 1`` on it is split evenly between both children.
    """
    require_exact(mu)
    bottom: dict[str, Fraction] = {}
    for tau in strings_of_length(phi.use[depth]):
        mass = mu.value(tau)
        if not mass:
            continue
        out = phi.output(tau)
        if len(out) < depth:
            raise InvariantViolation(f"phi is not total on {format_bits(tau)}", tau)
        stop = depth
        for k in range(depth + 1):
            if not compatible(tau[: phi.use[k]], psi.output(out[:k])):
                stop = k
                break
        for t, share in _spread(out[:stop], mass, depth, ExtensionPolicy.UNIFORM):
            bottom[t] = bottom.get(t, ZERO) + share
    return CylinderAssignment(depth, _aggregate(bottom, depth), ExtensionPolicy.UNIFORM)


# -- the measure-constraint system ------------------------------------------------

@dataclass(frozen=True)
class ConstraintRecord:
    """Interval ``[lower, upper]`` for ``mu(sigma)`` with its witnesses ``w`` and ``Pre``."""

    sigma: str
    w: str
    pre: frozenset[str]
    lower: Fraction
    upper: Fraction


@dataclass
class ConstraintSystem:
    depth: int
    records: dict[str, ConstraintRecord]
    phi: Functional | None = field(default=None, repr=False)
    psi: Functional | None = field(default=None, repr=False)

    @classmethod
    def from_intervals(cls, depth: int, intervals: Mapping[str, tuple[Fraction, Fraction]]) -> "ConstraintSystem":
        """Hand-built system with bare interval constraints (no functionals)."""
        recs = {s: ConstraintRecord(s, s, frozenset({s}), Fraction(lo), Fraction(hi))
                for s, (lo, hi) in intervals.items()}
        return cls(depth, recs)

    def undefined(self) -> list[str]:
        return [s for s in strings_up_to(self.depth) if s not in self.records]

    def to_text(self) -> str:
        lines = [f"constraints depth {self.depth}"]
        for s in sorted(self.records, key=string_order):
            r = self.records[s]
            pre = ",".join(format_bits(t) for t in sorted(r.pre, key=string_order)) or "-"
            lines.append(f"{format_bits(s)} w={format_bits(r.w)} "
                         f"[{format_rational(r.lower)}, {format_rational(r.upper)}] pre={pre}")
        for s in self.undefined():
            lines.append(f"{format_bits(s)} w=undefined")
        return "\n".join(lines) + "\n"


def build_constraints(phi: Functional, psi: Functional, depth: int) -> ConstraintSystem:
    """Record ``w``, ``Pre`` and the admissible interval for each ``sigma``.

    ``w(sigma)`` extends ``w(sigma^-)`` by one bit read off ``psi(sigma)``
    when that output properly extends ``w(sigma^-)``; otherwise ``w`` and
    every constraint below ``sigma`` stay undefined.  ``Pre(sigma)`` holds
    the inputs of length ``max(use_phi(|sigma|), |w(sigma)|)`` that extend
    ``w(sigma)`` and whose output extends ``sigma``.
    """
    if phi.depth < depth:
        raise ValueError(f"phi is only defined to output depth {phi.depth}")
    w = {"": ""}
    records = {}
    for s in strings_up_to(depth):
        if s:
            prev = w.get(s[:-1])
            if prev is None:
                continue
            out = psi.output(s)
            if len(out) <= len(prev) or not out.startswith(prev):
                continue
            w[s] = out[: len(prev) + 1]
        ws = w[s]
        length = max(phi.use[len(s)], len(ws))
        pre = prefix_free_reduce(t for t in extensions(ws, length) if phi.output(t).startswith(s))
        lower = sum((Fraction(1, 2 ** len(t)) for t in pre), ZERO)
        records[s] = ConstraintRecord(s, ws, pre, lower, Fraction(1, 2 ** len(ws)))
    return ConstraintSystem(depth, records, phi, psi)


def _center_out(lo: int, hi: int, mid: int) -> Iterator[int]:
    """Integers of ``[lo, hi]`` by distance from ``mid``, the smaller first on ties."""
    mid = min(max(mid, lo), hi)
    yield mid
    for d in range(1, hi - lo + 1):
        for c in (mid - d, mid + d):
            if lo <= c <= hi:
                yield c


def constraint_measure(cs: ConstraintSystem, grid_exponent: int = 8) -> CylinderAssignment:
    """An additive assignment meeting every recorded interval, on a dyadic grid.

    Values on level ``k`` are multiples of ``2^-(k + grid_exponent)``.  Grid
    feasibility of each subtree is an integer interval, computed bottom-up;
    the top-down search then visits ``sigma0`` before ``sigma1`` and tries
    splits nearest the even one first, so the first completion is found
    without undoing a choice.
    """
    depth, g = cs.depth, grid_exponent

    def bounds(s):
        r = cs.records.get(s)
        return (r.lower, r.upper) if r else (ZERO, ONE)

    feasible: dict[str, tuple[int, int] | None] = {}
    for k in range(depth, -1, -1):
        unit = 2 ** (k + g)
        for s in strings_of_length(k):
            lo, hi = bounds(s)
            a, b = max(math.ceil(lo * unit), 0), min(math.floor(hi * unit), unit)
            if k < depth:
                c0, c1 = feasible[s + "0"], feasible[s + "1"]
                if c0 is None or c1 is None:
                    feasible[s] = None
                    continue
                a = max(a, -((-(c0[0] + c1[0])) // 2))
                b = min(b, (c0[1] + c1[1]) // 2)
            feasible[s] = (a, b) if a <= b else None

    root = feasible[""]
    if root is None or not root[0] <= 2 ** g <= root[1]:
        origins = [s for s in strings_up_to(depth) if feasible[s] is None
                   and (len(s) == depth or (feasible[s + "0"] is not None and feasible[s + "1"] is not None))]
        raise Infeasible(min(origins, key=string_order) if origins else "")

    units: dict[str, int] = {}

    def assign(s: str, v: int) -> bool:
        units[s] = v
        if len(s) == depth:
            return True
        (a0, b0), (a1, b1) = feasible[s + "0"], feasible[s + "1"]
        total = 2 * v
        for c0 in _center_out(max(a0, total - b1), min(b0, total - a1), v):
            if assign(s + "0", c0) and assign(s + "1", total - c0):
                return True
        return False

    if not assign("", 2 ** g):
        raise Infeasible("")
    values = {s: Fraction(v, 2 ** (len(s) + g)) for s, v in units.items()}
    return CylinderAssignment(depth, values, ExtensionPolicy.UNIFORM)


# -- stock functionals -----------------------------------------------------------

def xor_pairs(depth: int) -> MonotoneFunctional:
    """Output bit ``i`` is the XOR of input bits ``2i`` and ``2i + 1``."""
    def f(s):
        return "".join(str(int(s[2 * i]) ^ int(s[2 * i + 1])) for i in range(len(s) // 2))
    return MonotoneFunctional.from_function(f, [2 * n for n in range(depth + 1)])


def constant_zero(depth: int) -> MonotoneFunctional:
    return MonotoneFunctional.from_function(lambda s: "0" * len(s), list(range(depth + 1)))


def drop_odd_bits(depth: int) -> MonotoneFunctional:
    """Keep the bits at even positions (0, 2, 4, ...)."""
    return MonotoneFunctional.from_function(lambda s: s[::2], [2 * n for n in range(depth + 1)])


def double_bits(depth: int) -> MonotoneFunctional:
    """Write every input bit twice."""
    return MonotoneFunctional.from_function(lambda s: "".join(b + b for b in s), list(range(depth + 1)))


STOCK_FUNCTIONALS = {
    "identity": identity_functional,
    "xor-pairs": xor_pairs,
    "zero": constant_zero,
    "drop-odd": drop_odd_bits,
    "double": double_bits,
}
