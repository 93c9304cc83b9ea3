"""Dyadic BMO seminorms, stopping-time decompositions, and inequality checks.

Functions are sampled piecewise-constant on dyadic grids, so every average,
oscillation, and level-set measure is an exact finite sum; the classical
inequalities of the theory can therefore be verified without quadrature
error.
"""

from .cubes import DyadicCube, RootCube, children, contains, parent, root_address, volume
from .decomposition import (
    Decomposition,
    FeatureCheck,
    FeatureReport,
    SelectedCube,
    check_features,
    decompose,
)
from .duality import (
    Atom,
    AtomicSum,
    DualityReport,
    atomic_sum_from_dict,
    atomic_sum_to_dict,
    duality_report,
    functional_apply,
    load_atomic_sum,
    make_haar_atom,
    pair,
    random_atomic_sum,
)
from .grids import GridFormatError, GridFunction, dumps, from_dict, generate, load, save, to_dict
from .integrability import (
    ExpIntegralReport,
    admissible_limit,
    exp_integrability_sweep,
    exp_mean,
    layer_cake_bound,
    layer_cake_bound_alt,
)
from .john_nirenberg import ContainmentCheck, JnReport, containment_check, jn_bound, verify_jn
from .oscillation import BmoNorm, bmo_seminorm, distribution_measure

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "AtomicSum",
    "BmoNorm",
    "ContainmentCheck",
    "Decomposition",
    "DualityReport",
    "DyadicCube",
    "ExpIntegralReport",
    "FeatureCheck",
    "FeatureReport",
    "GridFormatError",
    "GridFunction",
    "JnReport",
    "RootCube",
    "SelectedCube",
    "admissible_limit",
    "atomic_sum_from_dict",
    "atomic_sum_to_dict",
    "bmo_seminorm",
    "check_features",
    "children",
    "containment_check",
    "contains",
    "decompose",
    "distribution_measure",
    "duality_report",
    "dumps",
    "exp_integrability_sweep",
    "exp_mean",
    "from_dict",
    "functional_apply",
    "generate",
    "jn_bound",
    "layer_cake_bound",
    "layer_cake_bound_alt",
    "load",
    "load_atomic_sum",
    "make_haar_atom",
    "pair",
    "parent",
    "random_atomic_sum",
    "root_address",
    "save",
    "to_dict",
    "verify_jn",
    "volume",
]
