"""Shared fixtures for the test-related suites."""

from fractions import Fraction as F


from cantor_measures.mltests import MLTest
from cantor_measures.transforms import (
    build_constraints,
    double_bits,
    drop_odd_bits,
    identity_functional,
)


def constraint_systems():
    return {
        "identity-4": build_constraints(identity_functional(4), identity_functional(4), 4),
        "drop-odd-double-4": build_constraints(drop_odd_bits(4), double_bits(4), 4),
    }


TEST_FIXTURES = [
    MLTest.from_sets([{""}, {"0"}, {"00", "11"}, {"010"}]),
    MLTest.from_sets([{"0", "1"}, {"01", "011"}, {"000", "111"}, set()]),
    MLTest.from_sets([{"1"}, {"10", "11"}, {"001", "101", "011"}, {"0000", "1111", "010"}]),
]


def basis_fixtures():
    """(tree, family, depth, levels) triples small enough for exhaustive checks."""
    chain = {"0" * m for m in range(5)}
    single = {(n, "0" * m): {"0" * m} for n in range(2) for m in range(5)}
    everything = {(n, t): {""} for n in range(2) for t in chain}
    branching = {"", "0", "1", "00", "10", "000", "101", "0001", "1010"}
    family = {}
    for t in branching:
        family[(0, t)] = {t, "11"}
        family[(1, t)] = {"0" + t[:2], "1"}
        family[(2, t)] = set() if t.startswith("1") else {""}
    return [
        (chain, single, 4, 2),
        (chain, everything, 4, 2),
        (chain, {}, 4, 2),
        (branching, family, 4, 3),
        ({"", "0", "1", "01", "10", "010", "101", "0101", "1010", "01010", "10101"},
         {(0, t): {t + "0", t + "1"} for t in ["", "0", "1", "01", "10", "010", "101", "0101", "1010", "01010", "10101"]},
         5, 1),
    ]




def write_cli_fixtures(root):
    """Write fixture files under ``root`` and return the CLI runs that use them."""
    from cantor_measures.measures import bernoulli
    from cantor_measures.settling import StageEnumeration
    from cantor_measures.transforms import xor_pairs

    files = {
        "enum.txt": StageEnumeration([(1, 3), (0, 5)]).to_text(),
        "good.txt": MLTest.from_sets([{""}, {"0"}, {"000", "111"}]).to_text(),
        "bad.txt": MLTest.from_sets([{""}, {"0", "1"}]).to_text(),
        "measure.txt": bernoulli(F(1, 4)).truncate(3).to_text(),
        "xor.txt": xor_pairs(2).to_text(),
        "basis.txt": "basis v1\ndepth: 2\nlevels: 1\ntree: @, 0, 1, 00, 01, 10\n"
                     "query: 0110\nU 0 1: 01\nU 0 00: 0\n",
        "broken.txt": "measure v1\ndepth: 1\nextension: uniform\n@ 1\n0 1/2\n1 1/3\n",
    }
    for name, text in files.items():
        (root / name).write_text(text)
    p = {name: str(root / name) for name in files}
    return [
        ["eval", "--measure", p["measure.txt"], "--sigma", "010"],
        ["eval", "--measure", "bernoulli:1/2^2", "--sigma", "10"],
        ["dist", "--a", "lebesgue", "--b", "dirac:0*", "--precision", "20"],
        ["dist", "--a", "lebesgue", "--b", "bernoulli:1/4", "--n", "5"],
        ["modulus", "--measure", "bernoulli:1/4", "--epsilon", "1/100"],
        ["atoms", "--measure", "dirac:1(01)*", "--threshold", "1/2", "--depth", "6"],
        ["rationalize", "--measure", p["measure.txt"], "--depth", "3"],
        ["transport", "--measure", "bernoulli:1/4", "--rationalize", "--n", "3", "--max-depth", "30"],
        ["image", "--measure", "lebesgue", "--functional", p["xor.txt"], "--depth", "2"],
        ["repair", "--measure", "lebesgue", "--phi", "zero:3", "--psi", "identity:3", "--depth", "3"],
        ["constraints", "--phi", "drop-odd:2", "--psi", "double:2", "--depth", "2"],
        ["solve-measure", "--phi", "drop-odd:3", "--psi", "double:3", "--depth", "3"],
        ["test-verify", "--test", p["good.txt"], "--measure", "lebesgue"],
        ["test-verify", "--test", p["bad.txt"], "--measure", "lebesgue"],
        ["test-covers", "--test", p["good.txt"], "--x", "0001"],
        ["test-pullback", "--test", p["good.txt"], "--phi", "identity:3", "--psi", "identity:3", "--depth", "3"],
        ["basis-combine", "--basis", p["basis.txt"]],
        ["settling", "--enum", p["enum.txt"], "--length", "10"],
        ["settling", "--enum", p["enum.txt"], "--length", "10", "--stage", "4"],
        ["cover", "--measure", "lebesgue", "--enum", p["enum.txt"], "--n", "2"],
        ["verify-ncr", "--measure", "bernoulli:1/4", "--enum", p["enum.txt"], "--n", "4"],
        ["eval", "--measure", p["broken.txt"], "--sigma", "0"],
    ]
