"""Moduli, kernels, multilinear operators and commutator inequality checks."""

from .checks import (
    SharpEstimate,
    commutator_maximal_strong_check,
    commutator_maximal_weak_check,
    phi_weak_sup,
    sharp_estimate_check,
    thm_strong_check,
    thm_varlex_check,
    thm_weak_check,
)
from .kernels import (
    TAU,
    Kernel,
    KernelCheck,
    KernelSamples,
    admissible_samples,
    apply_kernel_operator,
    hilbert_kernel,
    kernel_reg_x_check,
    kernel_reg_y_check,
    kernel_size_check,
)
from .moduli import DiniResult, Modulus, condensed_series, dini_integral, dyadic_series, log_dini_integral
from .operators import (
    CommutatorSubset,
    MultilinearOperator,
    commutator_j,
    commutator_pi,
    commutator_sigma,
    proper_subsets,
)

__all__ = [
    "TAU",
    "CommutatorSubset",
    "DiniResult",
    "Kernel",
    "KernelCheck",
    "KernelSamples",
    "Modulus",
    "MultilinearOperator",
    "SharpEstimate",
    "admissible_samples",
    "apply_kernel_operator",
    "commutator_j",
    "commutator_maximal_strong_check",
    "commutator_maximal_weak_check",
    "commutator_pi",
    "commutator_sigma",
    "dini_integral",
    "dyadic_series",
    "condensed_series",
    "hilbert_kernel",
    "kernel_reg_x_check",
    "kernel_reg_y_check",
    "kernel_size_check",
    "log_dini_integral",
    "phi_weak_sup",
    "proper_subsets",
    "sharp_estimate_check",
    "thm_strong_check",
    "thm_varlex_check",
    "thm_weak_check",
]
