"""Command-line front end.

Exit status: 0 on success, 1 when a verified property fails, 2 on usage or
input errors.  All numbers are printed as exact rationals.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import atoms, measures, mltests, settling, transforms
from .core import DyadicRational, format_bits, format_rational, parse_bits, parse_rational, string_order
from .errors import FormatError, Infeasible, MeasureError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _with_file(path: str, parse):
    try:
        return parse(_read(path))
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def load_measure(source: str) -> measures.MeasureOracle:
    """``lebesgue``, ``dirac:<real>``, ``bernoulli:<dyadic>`` or a measure file."""
    if source == "lebesgue":
        return measures.lebesgue()
    kind, colon, arg = source.partition(":")
    try:
        if colon and kind == "dirac":
            return measures.dirac(arg)
        if colon and kind == "bernoulli":
            return measures.bernoulli(DyadicRational.parse(arg))
    except (FormatError, ValueError) as exc:
        raise UsageError(f"bad measure specifier {source!r}: {exc}") from None
    return _with_file(source, measures.parse_measure)


def load_functional(source: str) -> transforms.MonotoneFunctional:
    """A functional file, or ``<stock name>:<depth>`` such as ``identity:4``."""
    name, colon, arg = source.partition(":")
    if colon and name in transforms.STOCK_FUNCTIONALS:
        if not arg.isdigit():
            raise UsageError(f"bad depth in {source!r}")
        return transforms.STOCK_FUNCTIONALS[name](int(arg))
    return _with_file(source, transforms.parse_functional)


def _rational(text: str) -> Fraction:
    try:
        q = parse_rational(text)
    except FormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return q


def _bits(text: str) -> str:
    try:
        return parse_bits(text)
    except FormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _out(lines) -> None:
    sys.stdout.write("".join(ln + "\n" for ln in lines) if isinstance(lines, list) else lines)


# -- commands ------------------------------------------------------------------

def cmd_eval(a):
    mu = load_measure(a.measure)
    v = mu.value(a.sigma, a.precision)
    _out([f"{format_bits(a.sigma)} {format_rational(v)}"])
    return EXIT_OK


def cmd_dist(a):
    mu, nu = load_measure(a.a), load_measure(a.b)
    if a.n is not None:
        _out([f"d_{a.n} {format_rational(measures.metric_dn(mu, nu, a.n))}"])
    else:
        _out([f"d_P {format_rational(measures.metric_dP(mu, nu, a.precision))}"])
    return EXIT_OK


def cmd_modulus(a):
    mu = load_measure(a.measure)
    lvl = measures.continuity_modulus(mu, a.epsilon, a.max_depth)
    _out([f"l({format_rational(a.epsilon)}) = {lvl}"])
    return EXIT_OK


def cmd_atoms(a):
    tree = atoms.atom_tree(load_measure(a.measure), a.threshold, a.depth)
    iso = atoms.isolated_paths(tree)
    lines = [tree.render(), "widths:"]
    for m in range(a.depth + 1):
        bound = tree.width_bound(m)
        lines.append(f"  level {m}: {len(tree.level(m))} (bound {'-' if bound is None else bound})")
    lines.append("isolated: " + (", ".join(iso.paths) or "-") + (" [inconclusive]" if iso.inconclusive else ""))
    _out(lines)
    return EXIT_OK


def cmd_rationalize(a):
    nu = transforms.rationalize(load_measure(a.measure), a.depth)
    _out(nu.to_text())
    return EXIT_OK


def cmd_transport(a):
    nu = load_measure(a.measure)
    depth = a.max_depth if a.max_depth is not None else getattr(nu, "depth", None)
    if depth is None:
        raise UsageError("--max-depth is required for built-in measures")
    if a.rationalize:
        nu = transforms.Rationalized(nu)
    phi = transforms.transport_map(nu, a.n, depth)
    _out(phi.to_table().to_text())
    return EXIT_OK


def cmd_image(a):
    mu = load_measure(a.measure)
    img = transforms.image_measure(mu, load_functional(a.functional), a.depth, a.partial)
    _out(img.to_text([f"partial-output policy: {a.partial}"]))
    return EXIT_OK


def cmd_repair(a):
    out = transforms.continuity_repair(load_measure(a.measure), load_functional(a.phi),
                                       load_functional(a.psi), a.depth)
    _out(out.to_text())
    return EXIT_OK


def _constraints(a):
    return transforms.build_constraints(load_functional(a.phi), load_functional(a.psi), a.depth)


def cmd_constraints(a):
    _out(_constraints(a).to_text())
    return EXIT_OK


def cmd_solve_measure(a):
    try:
        mu = transforms.constraint_measure(_constraints(a), a.grid_exponent)
    except Infeasible as exc:
        _out([f"infeasible at {format_bits(exc.sigma)}"])
        return EXIT_FAIL
    _out(mu.to_text([f"grid exponent: {a.grid_exponent}"]))
    return EXIT_OK


def cmd_test_verify(a):
    t = _with_file(a.test, mltests.parse_mltest)
    reports = mltests.verify_bound(t, load_measure(a.measure))
    _out(mltests.format_report(reports))
    failed = [r.index for r in reports if not r.passed]
    if failed:
        _out([f"budget exceeded at n = {', '.join(map(str, failed))}"])
        return EXIT_FAIL
    return EXIT_OK


def cmd_test_covers(a):
    t = _with_file(a.test, mltests.parse_mltest)
    res = mltests.covers(t, a.x)
    word = {True: "covered", False: "not covered", None: "indecisive"}
    _out([f"level {n}: {word[c]}" for n, c in enumerate(res)])
    return EXIT_OK


def cmd_test_pullback(a):
    t = _with_file(a.test, mltests.parse_mltest)
    _out(mltests.pullback(t, _constraints(a)).to_text())
    return EXIT_OK


def cmd_basis_combine(a):
    fx = _with_file(a.basis, mltests.parse_basis)
    res = mltests.basis_combine(fx.tree, fx.family, fx.depth, fx.levels, fx.query)
    lines = res.test.to_text().splitlines()
    for n, (alive, deep) in enumerate(zip(res.survivors, res.deepest)):
        nodes = ", ".join(format_bits(s) for s in sorted(alive, key=string_order)) or "-"
        lines.append(f"survivors {n}: {nodes}; deepest {'-' if deep is None else format_bits(deep)}")
    _out(lines)
    return EXIT_OK


def cmd_settling(a):
    e = _with_file(a.enum, settling.parse_enumeration)
    res = (settling.settling_sequence(e, a.length) if a.stage is None
           else settling.settling_at_stage(e, a.stage, a.length))
    _out([f"markers: {', '.join(map(str, res.markers))}", f"S: {res.S}"])
    return EXIT_OK


def cmd_cover(a):
    e = _with_file(a.enum, settling.parse_enumeration)
    cv = settling.continuous_cover(load_measure(a.measure), e, a.n, a.max_depth)
    _out([f"n0 = {cv.n0}", f"n1 = {cv.n1}",
          "level: " + ", ".join(format_bits(s) for s in cv.level.sorted())])
    return EXIT_OK


def cmd_verify_ncr(a):
    e = _with_file(a.enum, settling.parse_enumeration)
    report = settling.verify_ncr(load_measure(a.measure), e, a.n, a.max_depth)
    _out(settling.format_ncr(report))
    return EXIT_OK if all(r.passed and r.covered for r in report) else EXIT_FAIL


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cantor-measures", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("eval", cmd_eval, "value of a measure on a cylinder")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--sigma", required=True, type=_bits)
    sp.add_argument("--precision", type=int)

    sp = add("dist", cmd_dist, "distance between two measures")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--precision", type=int, default=20)
    sp.add_argument("--n", type=int, help="report d_n instead of the full metric")

    sp = add("modulus", cmd_modulus, "least level where every cylinder is at most epsilon")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--epsilon", required=True, type=_rational)
    sp.add_argument("--max-depth", type=int, default=32)

    sp = add("atoms", cmd_atoms, "heavy-cylinder tree and isolated paths")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--threshold", required=True, type=_rational)
    sp.add_argument("--depth", required=True, type=int)

    sp = add("rationalize", cmd_rationalize, "dyadic measure dominating half the input")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--depth", required=True, type=int)

    sp = add("transport", cmd_transport, "order-preserving map towards Lebesgue")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--n", required=True, type=int, help="output depth")
    sp.add_argument("--max-depth", type=int)
    sp.add_argument("--rationalize", action="store_true", help="rationalize the measure first")

    sp = add("image", cmd_image, "image measure under a functional")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--functional", required=True)
    sp.add_argument("--depth", required=True, type=int)
    sp.add_argument("--partial", choices=["uniform", "left-atom", "stop"], default="uniform")

    sp = add("repair", cmd_repair, "image measure with incompatible mass spread evenly")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--phi", required=True)
    sp.add_argument("--psi", required=True)
    sp.add_argument("--depth", required=True, type=int)

    for name, func, help_ in (("constraints", cmd_constraints, "measure-constraint intervals"),
                              ("solve-measure", cmd_solve_measure, "a measure meeting all constraints")):
        sp = add(name, func, help_)
        sp.add_argument("--phi", required=True)
        sp.add_argument("--psi", required=True)
        sp.add_argument("--depth", required=True, type=int)
        if name == "solve-measure":
            sp.add_argument("--grid-exponent", type=int, default=8)

    sp = add("test-verify", cmd_test_verify, "check level budgets of a test")
    sp.add_argument("--test", required=True)
    sp.add_argument("--measure", required=True)

    sp = add("test-covers", cmd_test_covers, "which levels cover a prefix")
    sp.add_argument("--test", required=True)
    sp.add_argument("--x", required=True, type=_bits)

    sp = add("test-pullback", cmd_test_pullback, "pull a test back through the constraint system")
    sp.add_argument("--test", required=True)
    sp.add_argument("--phi", required=True)
    sp.add_argument("--psi", required=True)
    sp.add_argument("--depth", required=True, type=int)

    sp = add("basis-combine", cmd_basis_combine, "combine a tree-indexed family of tests")
    sp.add_argument("--basis", required=True)

    sp = add("settling", cmd_settling, "settling-time markers of an enumeration")
    sp.add_argument("--enum", required=True)
    sp.add_argument("--length", required=True, type=int)
    sp.add_argument("--stage", type=int)

    for name, func, help_ in (("cover", cmd_cover, "one level of the continuous cover"),
                              ("verify-ncr", cmd_verify_ncr, "budget and coverage for levels 0..n")):
        sp = add(name, func, help_)
        sp.add_argument("--measure", required=True)
        sp.add_argument("--enum", required=True)
        sp.add_argument("--n", required=True, type=int)
        sp.add_argument("--max-depth", type=int, default=48)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MeasureError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
