"""Probability measures on Cantor space as cylinder oracles.

Every measure here is a :class:`MeasureOracle`: ``value(sigma, n)`` returns
the mass of the cylinder ``[[sigma]]`` to within ``2^-n``.  Exact oracles
ignore ``n`` and are additive on the nose.  :class:`CylinderAssignment` is
the finite-depth interchange format and is itself an exact oracle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Collection, Iterable, Mapping, Sequence, Union

from .core import (
    PeriodicReal,
    format_bits,
    format_rational,
    parse_bits,
    parse_rational,
    string_order,
    strings_of_length,
    strings_up_to,
)
from .errors import (
    DeadNode,
    DepthExceeded,
    FormatError,
    Indecisive,
    InvariantViolation,
    NotContinuousWithin,
    NotExact,
)

ONE = Fraction(1)
ZERO = Fraction(0)


class MeasureOracle:
    """Approximation contract ``|value(sigma, n) - mu([[sigma]])| <= 2^-n``."""

    exact = True

    def value(self, sigma: str, n: int | None = None) -> Fraction:
        raise NotImplementedError

    def uniform_below(self, sigma: str) -> bool:
        """True if the measure splits every cylinder inside ``[[sigma]]`` evenly.

        Only a hint used to prune exact computations; ``False`` is always safe.
        """
        return False

    def truncate(self, depth: int, extension: "ExtensionPolicy | str" = "uniform") -> "CylinderAssignment":
        require_exact(self)
        values = {s: self.value(s) for s in strings_up_to(depth)}
        return CylinderAssignment(depth, values, extension)


def require_exact(*oracles: MeasureOracle) -> None:
    for o in oracles:
        if not o.exact:
            raise NotExact(f"{o!r} is only approximately represented")


@dataclass(frozen=True)
class Lebesgue(MeasureOracle):
    def value(self, sigma, n=None):
        return Fraction(1, 2 ** len(sigma))

    def uniform_below(self, sigma):
        return True


@dataclass(frozen=True)
class Dirac(MeasureOracle):
    point: PeriodicReal

    def value(self, sigma, n=None):
        return ONE if self.point.prefix(len(sigma)) == sigma else ZERO


@dataclass(frozen=True)
class Bernoulli(MeasureOracle):
    """Product measure where each bit is 1 with probability ``p``."""

    p: Fraction

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("bernoulli parameter must lie strictly between 0 and 1")

    def value(self, sigma, n=None):
        ones = sigma.count("1")
        return self.p ** ones * (1 - self.p) ** (len(sigma) - ones)

    def uniform_below(self, sigma):
        return self.p == Fraction(1, 2)


@dataclass(frozen=True)
class FiniteRationalMeasure(MeasureOracle):
    """Finitely many atoms: weight ``Q(delta)`` sits on the real ``delta 0^omega``."""

    weights: tuple[tuple[str, Fraction], ...]

    def __init__(self, weights: Mapping[str, Fraction] | Iterable[tuple[str, Fraction]]):
        items = dict(weights.items() if isinstance(weights, Mapping) else weights)
        items = {s: Fraction(q) for s, q in items.items()}
        if not items:
            raise InvariantViolation("support must be non-empty")
        for s, q in items.items():
            if q <= 0:
                raise InvariantViolation(f"weight of {format_bits(s)} must be positive", s)
        if sum(items.values()) != 1:
            raise InvariantViolation("weights must sum to 1")
        object.__setattr__(self, "weights", tuple(sorted(items.items(), key=lambda kv: string_order(kv[0]))))

    def value(self, sigma, n=None):
        total = ZERO
        for delta, q in self.weights:
            # the atom delta 0^omega lies in [[sigma]]
            if sigma.startswith(delta):
                if "1" not in sigma[len(delta):]:
                    total += q
            elif delta.startswith(sigma):
                total += q
        return total


@dataclass(frozen=True)
class Mixture(MeasureOracle):
    """Convex combination of oracles with rational weights."""

    components: tuple[tuple[Fraction, MeasureOracle], ...]

    def __post_init__(self):
        if sum(w for w, _ in self.components) != 1 or any(w < 0 for w, _ in self.components):
            raise InvariantViolation("mixture weights must be non-negative and sum to 1")

    @property
    def exact(self):
        return all(m.exact for _, m in self.components)

    def value(self, sigma, n=None):
        if self.exact:
            return sum((w * m.value(sigma) for w, m in self.components), ZERO)
        # each component within 2^-(n+k) keeps the total error below 2^-n
        k = len(self.components).bit_length()
        p = None if n is None else n + k
        return sum((w * m.value(sigma, p) for w, m in self.components), ZERO)

    def uniform_below(self, sigma):
        return all(m.uniform_below(sigma) for _, m in self.components)


@dataclass(frozen=True)
class Approximation(MeasureOracle):
    """A measure known only through a function ``g(sigma, n)`` within ``2^-n``."""

    g: Callable[[str, int], Fraction]
    label: str = "approximation"
    exact = False

    def value(self, sigma, n=None):
        if n is None:
            raise NotExact(f"{self.label} needs a precision")
        return Fraction(self.g(sigma, n))


def rounded(mu: MeasureOracle) -> Approximation:
    """Dyadic truncation of an exact oracle: ``floor(mu * 2^(n+1)) / 2^(n+1)``."""

    def g(sigma, n):
        scale = 2 ** (n + 1)
        return Fraction(math.floor(mu.value(sigma) * scale), scale)

    return Approximation(g, label=f"rounded({mu!r})")


class ExtensionPolicy(enum.Enum):
    UNIFORM = "uniform"
    LEFT_ATOM = "left-atom"
    STOP = "stop"


class CylinderAssignment(MeasureOracle):
    """Exact values on every string of length <= ``depth`` plus a rule below it."""

    def __init__(self, depth: int, values: Mapping[str, Fraction], extension: ExtensionPolicy | str = "uniform"):
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.depth = depth
        self.extension = ExtensionPolicy(extension)
        self.values = {s: Fraction(values[s]) for s in strings_up_to(depth) if s in values}
        self._check()

    def _check(self):
        for s in strings_up_to(self.depth):
            if s not in self.values:
                raise InvariantViolation(f"missing value for {format_bits(s)}", s)
            if not 0 <= self.values[s] <= 1:
                raise InvariantViolation(f"value of {format_bits(s)} outside [0, 1]", s)
        if self.values[""] != 1:
            raise InvariantViolation("total mass is not 1", "")
        for s in strings_up_to(self.depth - 1):
            if self.values[s] != self.values[s + "0"] + self.values[s + "1"]:
                raise InvariantViolation(f"additivity fails at {format_bits(s)}", s)

    def value(self, sigma, n=None):
        if len(sigma) <= self.depth:
            return self.values[sigma]
        head, tail = sigma[: self.depth], sigma[self.depth:]
        if self.extension is ExtensionPolicy.UNIFORM:
            return self.values[head] / 2 ** len(tail)
        if self.extension is ExtensionPolicy.LEFT_ATOM:
            return ZERO if "1" in tail else self.values[head]
        raise DepthExceeded(f"{sigma} lies below depth {self.depth}")

    def uniform_below(self, sigma):
        return self.extension is ExtensionPolicy.UNIFORM and len(sigma) >= self.depth

    def level(self, n: int) -> list[Fraction]:
        return [self.value(s) for s in strings_of_length(n)]

    def __eq__(self, other):
        if not isinstance(other, CylinderAssignment):
            return NotImplemented
        return (self.depth, self.extension, self.values) == (other.depth, other.extension, other.values)

    __hash__ = None

    def __repr__(self):
        return f"CylinderAssignment(depth={self.depth}, extension={self.extension.value})"

    def to_text(self, comments: Sequence[str] = ()) -> str:
        lines = ["measure v1", f"depth: {self.depth}", f"extension: {self.extension.value}"]
        lines += [f"# {c}" for c in comments]
        for s in strings_up_to(self.depth):
            lines.append(f"{format_bits(s)} {format_rational(self.values[s])}")
        return "\n".join(lines) + "\n"


def parse_measure(text: str) -> CylinderAssignment:
    """Read the line-oriented ``measure v1`` format."""
    rows = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
    rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
    if not rows or rows[0][1] != "measure v1":
        raise FormatError("expected header 'measure v1'", rows[0][0] if rows else 1)
    header = {}
    for i, ln in rows[1:3]:
        key, _, val = ln.partition(":")
        header[key.strip()] = (i, val.strip())
    if "depth" not in header or "extension" not in header:
        raise FormatError("expected 'depth:' and 'extension:' lines", rows[0][0] + 1)
    i, raw = header["depth"]
    try:
        depth = int(raw)
    except ValueError:
        raise FormatError(f"bad depth {raw!r}", i) from None
    i, raw = header["extension"]
    try:
        extension = ExtensionPolicy(raw)
    except ValueError:
        raise FormatError(f"unknown extension {raw!r}", i) from None
    values: dict[str, Fraction] = {}
    where: dict[str, int] = {}
    for i, ln in rows[3:]:
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"expected '<bits> <rational>', got {ln!r}", i)
        try:
            s, q = parse_bits(parts[0]), parse_rational(parts[1])
        except FormatError as exc:
            raise FormatError(str(exc), i) from None
        if len(s) > depth:
            raise FormatError(f"{parts[0]} is deeper than depth {depth}", i)
        if s in values:
            raise FormatError(f"duplicate entry for {parts[0]}", i)
        values[s] = q
        where[s] = i
    try:
        return CylinderAssignment(depth, values, extension)
    except InvariantViolation as exc:
        raise FormatError(f"{exc} (sigma={format_bits(exc.where)})", where.get(exc.where)) from None


# -- constructors ------------------------------------------------------------

def lebesgue() -> Lebesgue:
    return Lebesgue()


def dirac(point: PeriodicReal | str) -> Dirac:
    if isinstance(point, str):
        point = PeriodicReal.parse(point)
    return Dirac(point)


def bernoulli(p) -> Bernoulli:
    if hasattr(p, "to_fraction"):
        p = p.to_fraction()
    return Bernoulli(Fraction(p))


def finite_rational(m: FiniteRationalMeasure | Mapping[str, Fraction]) -> FiniteRationalMeasure:
    return m if isinstance(m, FiniteRationalMeasure) else FiniteRationalMeasure(m)


def mixture(components: Iterable[tuple[Fraction, MeasureOracle]]) -> Mixture:
    return Mixture(tuple((Fraction(w), m) for w, m in components))


TreeSpec = Union[Callable[[str], bool], Collection[str]]


def tree_uniform(tree: TreeSpec, depth: int) -> CylinderAssignment:
    """Spread unit mass evenly over the paths of a finite tree.

    A child keeps all of its parent's mass when its sibling is off the tree
    and half of it otherwise; strings off the tree get 0.  Below ``depth``
    the mass is split uniformly.
    """
    member = tree if callable(tree) else frozenset(tree).__contains__
    if not member(""):
        raise InvariantViolation("the tree must contain the empty string", "")
    values = {"": ONE}
    for s in strings_up_to(depth - 1):
        mass = values[s]
        kids = [b for b in "01" if mass and member(s + b)]
        if mass and not kids:
            raise DeadNode(s)
        for b in "01":
            values[s + b] = ZERO if b not in kids else (mass if len(kids) == 1 else mass / 2)
    return CylinderAssignment(depth, values, ExtensionPolicy.UNIFORM)


# -- continuity modulus ------------------------------------------------------

def _start_precision(eps: Fraction) -> int:
    p = 0
    while Fraction(1, 2 ** p) > eps / 4:
        p += 1
    return p


def _exceeds(mu: MeasureOracle, sigma: str, eps: Fraction) -> bool:
    """Certified answer to ``mu([[sigma]]) > eps``."""
    if mu.exact:
        return mu.value(sigma) > eps
    p0 = _start_precision(eps)
    for p in range(p0, p0 + 9):
        g, err = mu.value(sigma, p), Fraction(1, 2 ** p)
        if g + err <= eps:
            return False
        if g - err > eps:
            return True
    raise Indecisive(sigma, p0 + 8)


def continuity_modulus(mu: MeasureOracle, eps: Fraction, max_depth: int) -> int:
    """Least level ``l <= max_depth`` at which every cylinder has mass ``<= eps``.

    Only cylinders heavier than ``eps`` are expanded: a light cylinder has
    light descendants, so the search touches at most ``1/eps`` nodes a level.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    frontier = [""]
    for level in range(max_depth + 1):
        heavy = [s for s in frontier if _exceeds(mu, s, eps)]
        if not heavy:
            return level
        frontier = [s + b for s in heavy for b in "01"]
    raise NotContinuousWithin(max_depth, eps)


# -- the measure metric ------------------------------------------------------

def dn_profile(mu: MeasureOracle, nu: MeasureOracle, n_max: int) -> list[Fraction]:
    """``[d_0, d_1, ..., d_n_max]`` where ``d_n = 1/2 sum_{|s|=n} |mu(s) - nu(s)|``.

    Subtrees where one side is zero, or where both sides split evenly, have
    a constant absolute difference on every deeper level and are not expanded.
    """
    require_exact(mu, nu)
    acc = [ZERO] * (n_max + 1)
    if mu == nu:
        return acc
    stack = [""]
    while stack:
        s = stack.pop()
        a, b = mu.value(s), nu.value(s)
        diff = abs(a - b)
        k = len(s)
        if a == 0 or b == 0 or (mu.uniform_below(s) and nu.uniform_below(s)):
            for j in range(k, n_max + 1):
                acc[j] += diff
            continue
        acc[k] += diff
        if k < n_max:
            stack.extend((s + "1", s + "0"))
    return [x / 2 for x in acc]


def metric_dn(mu: MeasureOracle, nu: MeasureOracle, n: int) -> Fraction:
    return dn_profile(mu, nu, n)[n]


def metric_dP(mu: MeasureOracle, nu: MeasureOracle, n: int) -> Fraction:
    """A rational within ``2^-n`` below ``d_P(mu, nu) = sum_k 2^-k d_k``.

    The series is cut at ``N = n + 1``; the tail is at most ``2^-N``.
    """
    profile = dn_profile(mu, nu, n + 1)
    return sum((profile[k] / 2 ** k for k in range(1, n + 2)), ZERO)


def dP_partial_sums(mu: MeasureOracle, nu: MeasureOracle, n: int) -> list[Fraction]:
    profile = dn_profile(mu, nu, n)
    sums, total = [], ZERO
    for k in range(1, n + 1):
        total += profile[k] / 2 ** k
        sums.append(total)
    return sums
