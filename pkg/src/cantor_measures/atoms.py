"""Locating atoms of a measure through the heavy-cylinder tree.

For a threshold ``c`` the tree keeps ``sigma`` when ``g(sigma, |sigma|) >=
c - 2^-|sigma|``.  Any atom heavier than ``c`` lies on a path of this tree,
and the tree has at most ``1/(c - 2^-m)`` nodes on level ``m`` once
``c > 2^-m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import format_bits, string_order
from .measures import MeasureOracle


@dataclass(frozen=True)
class AtomTree:
    threshold: Fraction
    depth: int
    nodes: frozenset[str]

    def level(self, m: int) -> list[str]:
        return sorted(s for s in self.nodes if len(s) == m)

    def width_bound(self, m: int) -> int | None:
        """``floor(1/(c - 2^-m))``, or ``None`` while the bound is vacuous."""
        gap = self.threshold - Fraction(1, 2 ** m)
        if gap <= 0:
            return None
        return math.floor(1 / gap)

    def children(self, s: str) -> list[str]:
        return [s + b for b in "01" if s + b in self.nodes]

    def render(self) -> str:
        """Indented text, one node per line, depth-first in lexicographic order."""
        out = []

        def walk(s):
            out.append("  " * len(s) + format_bits(s))
            for c in self.children(s):
                walk(c)

        if "" in self.nodes:
            walk("")
        return "\n".join(out)


def atom_tree(mu: MeasureOracle, c: Fraction, depth: int) -> AtomTree:
    """Heavy-cylinder tree of ``mu`` for threshold ``c`` down to ``depth``.

    Built top-down, so the result is prefix-closed; approximate oracles are
    queried at precision ``|sigma|`` exactly as the test is stated.
    """
    c = Fraction(c)
    if not 0 < c < 1:
        raise ValueError("threshold must lie strictly between 0 and 1")

    def keep(s):
        g = mu.value(s) if mu.exact else mu.value(s, len(s))
        return g >= c - Fraction(1, 2 ** len(s))

    nodes = set()
    level = [s for s in [""] if keep(s)]
    for m in range(depth + 1):
        nodes.update(level)
        if m == depth:
            break
        level = [s + b for s in level for b in "01" if keep(s + b)]
    return AtomTree(c, depth, frozenset(nodes))


@dataclass(frozen=True)
class Isolation:
    paths: list[str]
    inconclusive: bool
    # bottom node -> first level from which it is alone in its subtree
    certified_from: dict[str, int]


def isolated_paths(tree: AtomTree) -> Isolation:
    """Bottom-level nodes certified as isolated paths at this finite depth.

    A bottom node is certified when, below its deepest branching ancestor,
    the tree is a single chain that already passes a level ``m`` with
    ``c > 2^-m`` strictly above the bottom level, i.e. a level where the
    width bound is in force.  The result is inconclusive when the bound is
    vacuous at the bottom level or some bottom node is not certified.
    """
    c, depth = tree.threshold, tree.depth
    bottom = tree.level(depth)
    informative = [m for m in range(depth + 1) if c > Fraction(1, 2 ** m)]
    certified = {}
    for rho in bottom:
        branch = -1
        for k in range(depth):
            if len(tree.children(rho[:k])) == 2:
                branch = k
        levels = [m for m in informative if branch < m < depth]
        if levels:
            certified[rho] = levels[0]
    paths = sorted(certified, key=string_order)
    inconclusive = not informative or depth not in informative or len(paths) < len(bottom)
    return Isolation(paths, inconclusive, certified)
