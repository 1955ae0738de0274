"""Model operators: molecule paraproducts and bilinear pseudo-differential operators."""

from typing import Sequence

from ..czo_core.operators import MultilinearOperator, commutator_pi
from ..grid import GridFunction
from .bpdo import (
    Symbol,
    SymbolReport,
    SymbolTerm,
    aliasing_estimate,
    bpdo_apply,
    bpdo_direct,
    bpdo_operator,
    condition_sup,
    cutoff_symbol,
    fourier_coefficients,
    frequencies,
    log_modulus_g,
    log_modulus_symbol,
    smooth_symbol,
    symbol_class_check,
    unit_symbol,
    x_multiplier_symbol,
)
from .fitting import FittedModulus, fit_kernel_modulus
from .paraproduct import (
    DEFAULT_DECAY,
    DEFAULT_V,
    PROFILES,
    Molecule,
    MoleculeError,
    MoleculeFamily,
    decay_constant,
    fitted_A0,
    make_molecules,
    paraproduct,
    paraproduct_kernel,
    paraproduct_operator,
    profile,
    regularity_ratio,
)


def para_pi_b(fam: MoleculeFamily, bs: Sequence[GridFunction]) -> MultilinearOperator:
    """Iterated commutator of the paraproduct with ``(b1, b2)``."""
    if len(bs) != 2:
        raise ValueError("the paraproduct is bilinear; pass (b1, b2)")
    return commutator_pi(paraproduct_operator(fam), bs)


def bpdo_pi_b(sigma: Symbol, bs: Sequence[GridFunction]) -> MultilinearOperator:
    """Iterated commutator of ``T_sigma`` with ``(b1, b2)``."""
    if len(bs) != 2:
        raise ValueError("the operator is bilinear; pass (b1, b2)")
    return commutator_pi(bpdo_operator(sigma), bs)


__all__ = [
    "DEFAULT_DECAY",
    "DEFAULT_V",
    "PROFILES",
    "FittedModulus",
    "Molecule",
    "MoleculeError",
    "MoleculeFamily",
    "Symbol",
    "SymbolReport",
    "SymbolTerm",
    "aliasing_estimate",
    "bpdo_apply",
    "bpdo_direct",
    "bpdo_operator",
    "bpdo_pi_b",
    "condition_sup",
    "cutoff_symbol",
    "decay_constant",
    "fit_kernel_modulus",
    "fitted_A0",
    "fourier_coefficients",
    "frequencies",
    "log_modulus_g",
    "log_modulus_symbol",
    "make_molecules",
    "para_pi_b",
    "paraproduct",
    "paraproduct_kernel",
    "paraproduct_operator",
    "profile",
    "regularity_ratio",
    "smooth_symbol",
    "symbol_class_check",
    "unit_symbol",
    "x_multiplier_symbol",
]
