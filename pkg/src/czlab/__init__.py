"""Numerical laboratory for iterated commutators of multilinear Calderón-Zygmund operators.

Submodules: ``grid`` (boxes, dyadic cubes, sampled functions), ``orlicz_bmo``
(L log L averages and BMO), ``maximal`` (maximal functions), ``weights``
(A_p classes), ``varlex`` (variable-exponent norms), ``czo_core`` (moduli,
kernels, commutators and inequality checks), ``model_ops`` (paraproduct and
bilinear pseudodifferential operators) and ``harness`` (experiments, CLI).
"""

from . import czo_core, grid, harness, maximal, model_ops, orlicz_bmo, varlex, weights
from .czo_core import Modulus, MultilinearOperator, commutator_j, commutator_pi, commutator_sigma
from .grid import Box, Cube, CubeFamily, DyadicCube, GridFunction
from .harness import ExperimentConfig, default_config, run
from .orlicz_bmo import bmo_norm, orlicz_average, phi
from .varlex import VarExponent, varlex_norm
from .weights import Weight, WeightVector

__version__ = "0.1.0"

__all__ = [
    "czo_core",
    "grid",
    "harness",
    "maximal",
    "model_ops",
    "orlicz_bmo",
    "varlex",
    "weights",
    "Box",
    "Cube",
    "CubeFamily",
    "DyadicCube",
    "GridFunction",
    "Modulus",
    "MultilinearOperator",
    "commutator_j",
    "commutator_pi",
    "commutator_sigma",
    "bmo_norm",
    "orlicz_average",
    "phi",
    "VarExponent",
    "varlex_norm",
    "Weight",
    "WeightVector",
    "ExperimentConfig",
    "default_config",
    "run",
    "__version__",
]
