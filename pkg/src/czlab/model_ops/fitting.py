"""Fitting ``w(t) = c1 * theta(c2 t)`` to a sampled kernel."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..czo_core.kernels import Kernel, KernelSamples, kernel_reg_x_check, kernel_reg_y_check, kernel_size_check
from ..czo_core.moduli import Modulus, dini_integral

__all__ = ["FittedModulus", "fit_kernel_modulus", "DEFAULT_STRETCHES"]

DEFAULT_STRETCHES = tuple(2.0**k for k in range(-4, 9))


@dataclass(frozen=True)
class FittedModulus:
    """Size constant ``A`` and ``w = c1 theta(c2 .)`` with the ratios behind them."""

    A: float
    c1: float
    c2: float
    size_ratio: float
    reg_ratios: tuple[float, ...]  # x, y1, .., ym against theta(c2 .)
    dini: float

    def modulus(self, theta: Modulus) -> Modulus:
        return theta.fitted(self.c1, self.c2)

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "c1": self.c1,
            "c2": self.c2,
            "size_ratio": self.size_ratio,
            "reg_ratios": list(self.reg_ratios),
            "dini": self.dini,
        }


def _reg_all(K: Kernel, theta: Modulus, samples: Sequence[KernelSamples], min_sep: float) -> list[float]:
    out = []
    for s in samples:
        if s.slot == 0:
            out.append(kernel_reg_x_check(K, theta, s, min_sep).max_ratio)
        else:
            out.append(kernel_reg_y_check(K, theta, s.slot, s, min_sep).max_ratio)
    return out


def fit_kernel_modulus(
    K: Kernel,
    theta: Modulus,
    size_samples: KernelSamples,
    reg_samples: Sequence[KernelSamples],
    min_sep: float = 0.0,
    stretches: Sequence[float] = DEFAULT_STRETCHES,
) -> FittedModulus:
    """Fit ``A`` from the size check, then ``(c1, c2)`` minimising ``c1 * Dini(theta(c2 .))``.

    For each stretch ``c2`` the smallest admissible ``c1`` is the largest
    regularity ratio against ``theta(c2 .)`` with the fitted ``A``.
    """
    A = kernel_size_check(K, size_samples, min_sep).max_ratio
    if not A > 0:
        raise ValueError("kernel vanishes on every size sample")
    KA = Kernel(K.m, K.func, A, K.name)
    best = None
    for c2 in stretches:
        th = theta.fitted(1.0, c2)
        ratios = _reg_all(KA, th, reg_samples, min_sep)
        c1 = max(ratios)
        d = dini_integral(th).value
        score = c1 * d
        if best is None or score < best[0]:
            best = (score, c1, c2, tuple(ratios), c1 * d)
    _, c1, c2, ratios, dini = best
    return FittedModulus(A, c1, c2, 1.0, ratios, dini)
