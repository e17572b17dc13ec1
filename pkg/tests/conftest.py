import sys
from fractions import Fraction as F
from itertools import product

import pytest

from cantor_measures.measures import (
    bernoulli,
    dirac,
    finite_rational,
    lebesgue,
    mixture,
    tree_uniform,
)


def no_11(s):
    return "11" not in s


def constructors():
    """One instance of every measure constructor, keyed by a readable name."""
    return {
        "lebesgue": lebesgue(),
        "dirac-0": dirac("0*"),
        "dirac-1(01)": dirac("1(01)*"),
        "bernoulli-1/4": bernoulli(F(1, 4)),
        "bernoulli-5/8": bernoulli(F(5, 8)),
        "finite-rational": finite_rational({"0": F(1, 2), "1": F(1, 2)}),
        "finite-rational-3": finite_rational({"01": F(1, 3), "1": F(1, 6), "": F(1, 2)}),
        "mixture": mixture([(F(1, 2), dirac("0*")), (F(1, 2), lebesgue())]),
        "tree-full": tree_uniform(lambda s: True, 6),
        "tree-no-11": tree_uniform(no_11, 6),
    }


@pytest.fixture(scope="session")
def all_measures():
    return constructors()


def words(n):
    return ["".join(b) for b in product("01", repeat=n)]


def brute_dn(mu, nu, n):
    """Definition of d_n with no pruning."""
    return sum((abs(mu.value(s) - nu.value(s)) for s in words(n)), F(0)) / 2


def brute_modulus(mu, eps, max_depth):
    for level in range(max_depth + 1):
        if max(mu.value(s) for s in words(level)) <= eps:
            return level
    return None


def brute_image(mu, phi, depth):
    """Image measure straight from its definition, one level at a time."""
    out = {}
    for k in range(depth + 1):
        inputs = words(phi.use[k])
        for t in words(k):
            out[t] = sum((mu.value(s) for s in inputs if phi.output(s).startswith(t)), F(0))
    return out


def brute_contains(strings, sigma):
    """``[[sigma]]`` inside ``[[strings]]`` by checking every extension at the longest listed length."""
    strings = list(strings)
    if not strings:
        return False
    top = max(max(len(u) for u in strings), len(sigma))
    return all(any(x.startswith(u) for u in strings)
               for x in (sigma + w for w in words(top - len(sigma))))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
