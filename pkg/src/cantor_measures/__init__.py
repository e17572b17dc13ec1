"""Exact computations with probability measures on Cantor space."""

from .atoms import AtomTree, atom_tree, isolated_paths
from .core import DyadicRational, PeriodicReal, cantor_distance, prefix_free_reduce
from .errors import (
    AmbiguousPrefix,
    DeadNode,
    DepthExceeded,
    FormatError,
    Indecisive,
    Infeasible,
    InvariantViolation,
    MeasureError,
    MissingConstraint,
    ModulusUnavailable,
    NotContinuousWithin,
    NotExact,
)
from .measures import (
    CylinderAssignment,
    ExtensionPolicy,
    MeasureOracle,
    bernoulli,
    continuity_modulus,
    dirac,
    finite_rational,
    lebesgue,
    metric_dn,
    metric_dP,
    mixture,
    parse_measure,
    tree_uniform,
)
from .mltests import MLTest, TestLevel, basis_combine, covers, pullback, verify_bound
from .settling import StageEnumeration, continuous_cover, settling_sequence, verify_ncr
from .transforms import (
    ConstraintSystem,
    MonotoneFunctional,
    build_constraints,
    constraint_measure,
    continuity_repair,
    image_measure,
    rationalize,
    transport_map,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousPrefix", "AtomTree", "ConstraintSystem", "CylinderAssignment", "DeadNode",
    "DepthExceeded", "DyadicRational", "ExtensionPolicy", "FormatError", "Indecisive",
    "Infeasible", "InvariantViolation", "MLTest", "MeasureError", "MeasureOracle",
    "MissingConstraint", "ModulusUnavailable", "MonotoneFunctional", "NotContinuousWithin",
    "NotExact", "PeriodicReal", "StageEnumeration", "TestLevel", "atom_tree", "basis_combine",
    "bernoulli", "build_constraints", "cantor_distance", "constraint_measure",
    "continuity_modulus", "continuity_repair", "continuous_cover", "covers", "dirac",
    "finite_rational", "image_measure", "isolated_paths", "lebesgue", "metric_dP", "metric_dn",
    "mixture", "parse_measure", "prefix_free_reduce", "pullback", "rationalize",
    "settling_sequence", "transport_map", "tree_uniform", "verify_bound", "verify_ncr",
]
