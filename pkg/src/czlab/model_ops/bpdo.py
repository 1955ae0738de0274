"""Bilinear pseudo-differential operators on the periodized box (n = 1).

With ``N`` cells of width ``h = 2R/N`` at ``x_n = -R + (n + 1/2) h`` and
frequencies ``xi_k = k pi / R`` for ``k in [-N/2, N/2)``, the discrete
Fourier coefficients

    F_k = (1/N) sum_n f_n exp(-i xi_k x_n)

satisfy ``f_n = sum_k F_k exp(i xi_k x_n)`` exactly, and the operator is

    T(f1, f2)(x_n) = sum_{k,l} sigma(x_n, xi_k, xi_l) F1_k F2_l exp(i (xi_k + xi_l) x_n),

so ``sigma = 1`` reproduces ``f1 * f2``.  Symbols are sums of separable
terms ``g_r(x) s_r(xi, eta)``; each term is one ``O(N^2)`` pass that bins
the frequency pairs by ``k + l``, then one FFT.  Pair sums ``j`` outside
``[-N/2, N/2)`` are folded back by ``q N`` with the sign ``(-1)^q`` that the
cell-centre offset produces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..czo_core.moduli import Modulus
from ..czo_core.operators import MultilinearOperator
from ..grid import GridFunction, GridMismatchError

__all__ = [
    "Symbol",
    "SymbolTerm",
    "SymbolReport",
    "unit_symbol",
    "x_multiplier_symbol",
    "smooth_symbol",
    "log_modulus_symbol",
    "cutoff_symbol",
    "log_modulus_g",
    "frequencies",
    "fourier_coefficients",
    "bpdo_apply",
    "bpdo_direct",
    "bpdo_operator",
    "aliasing_estimate",
    "symbol_class_check",
    "condition_sup",
]


@dataclass(frozen=True)
class SymbolTerm:
    g: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    s: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)


def _one_x(x):
    return np.ones_like(np.asarray(x, dtype=np.float64))


def _one_xi(xi, eta):
    return np.ones(np.broadcast(np.asarray(xi), np.asarray(eta)).shape)


@dataclass(frozen=True)
class Symbol:
    """``sigma(x, xi, eta) = sum_r g_r(x) s_r(xi, eta)`` with its class data."""

    terms: tuple[SymbolTerm, ...]
    theta: Modulus = field(default_factory=Modulus.lipschitz)
    omega: Callable[[np.ndarray], np.ndarray] = field(default=lambda t: np.ones_like(np.asarray(t, dtype=float)), repr=False)
    name: str = "sigma"

    def __call__(self, x, xi, eta) -> np.ndarray:
        x, xi, eta = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in (x, xi, eta)))
        out = np.zeros(x.shape)
        for t in self.terms:
            out = out + t.g(x) * t.s(xi, eta)
        return out

    def bounded_on(self, x, xi, eta) -> bool:
        return bool(np.all(np.isfinite(self(x, xi, eta))))


def unit_symbol() -> Symbol:
    return Symbol((SymbolTerm(_one_x, _one_xi),), name="1")


def x_multiplier_symbol(g: Callable, theta: Modulus | None = None, name: str = "g(x)") -> Symbol:
    return Symbol((SymbolTerm(g, _one_xi),), theta or Modulus.lipschitz(), name=name)


def smooth_symbol() -> Symbol:
    """``x -> 1/(1 + x^2)`` times ``xi eta / (1 + xi^2 + eta^2)``."""
    return Symbol(
        (SymbolTerm(lambda x: 1.0 / (1.0 + x * x), lambda a, b: a * b / (1.0 + a * a + b * b)),),
        Modulus.lipschitz(),
        name="smooth",
    )


def log_modulus_g(x, beta: float = 4.0) -> np.ndarray:
    """``(1 + log(1/|x|))^{-beta}`` for ``|x| < 1``, ``1`` beyond, ``0`` at the origin."""
    a = np.abs(np.asarray(x, dtype=np.float64))
    with np.errstate(divide="ignore"):
        inner = 1.0 + np.log(1.0 / np.clip(a, 1e-300, 1.0))
    return np.where(a > 0, inner ** (-beta), 0.0)


def log_modulus_symbol(beta: float = 4.0, K: float = 8.0) -> Symbol:
    """``log_modulus_g(x)`` times the Gaussian cutoff ``exp(-(xi^2 + eta^2)/K^2)``.

    The x-factor has modulus of continuity exactly ``(log(e/t))^{-beta}`` at
    the origin, so it is not Hölder of any order.
    """
    return Symbol(
        (SymbolTerm(lambda x: log_modulus_g(x, beta), lambda a, b: np.exp(-(a * a + b * b) / K**2)),),
        Modulus.log_power(beta),
        name=f"log-modulus(beta={beta:g})",
    )


def cutoff_symbol(K: float = 8.0) -> Symbol:
    """x-independent smooth cutoff ``exp(-(xi^2 + eta^2)/K^2)``."""
    return Symbol((SymbolTerm(_one_x, lambda a, b: np.exp(-(a * a + b * b) / K**2)),), name=f"cutoff(K={K:g})")


# ---------------------------------------------------------------------------
# the discrete operator


def _check_input(f: GridFunction) -> int:
    if f.box.dim != 1:
        raise ValueError("the pseudo-differential path is implemented for n = 1")
    N = f.n
    if N & (N - 1):
        raise ValueError("grid size must be a power of two")
    return N


def frequencies(f: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """Integer indices ``k in [-N/2, N/2)`` and ``xi_k = k pi / R``."""
    N = f.n
    k = np.arange(-N // 2, N // 2)
    return k, k * np.pi / f.box.halfwidth


def fourier_coefficients(f: GridFunction) -> np.ndarray:
    """``F_k`` ordered by ``k = -N/2 .. N/2 - 1``."""
    N = _check_input(f)
    k = np.arange(-N // 2, N // 2)
    return np.exp(1j * np.pi * k * (1 - 1 / N)) * np.fft.fft(f.samples)[k % N] / N


def _synthesize(G: np.ndarray, N: int) -> np.ndarray:
    """``sum_j G_j exp(i xi_j x_n)`` for ``G`` indexed by ``j in [-N, N)`` (offset ``N``)."""
    j = np.arange(-N, N)
    q = np.floor_divide(j + N // 2, N)  # fold j -> j - qN into [-N/2, N/2)
    folded = np.zeros(N, dtype=np.complex128)
    np.add.at(folded, j - q * N + N // 2, G * np.where(q % 2, -1.0, 1.0))
    k = np.arange(-N // 2, N // 2)
    spec = np.zeros(N, dtype=np.complex128)
    spec[k % N] = folded * np.exp(-1j * np.pi * k * (1 - 1 / N))
    return np.fft.ifft(spec) * N


def bpdo_apply(sigma: Symbol, f1: GridFunction, f2: GridFunction) -> GridFunction:
    """``T_sigma(f1, f2)`` on the grid (real part)."""
    N = _check_input(f1)
    if f2.box != f1.box or f2.levels != f1.levels:
        raise GridMismatchError("inputs must share a grid")
    F1, F2 = fourier_coefficients(f1), fourier_coefficients(f2)
    _, xi = frequencies(f1)
    A, B = np.meshgrid(xi, xi, indexing="ij")
    pair = (np.arange(N)[:, None] + np.arange(N)[None, :]).reshape(-1)  # (k + l) + N
    prod = np.outer(F1, F2).reshape(-1)
    x = f1.coords()[0]
    out = np.zeros(N)
    for t in sigma.terms:
        w = (t.s(A, B) * np.ones_like(A)).reshape(-1) * prod
        G = np.bincount(pair, weights=w.real, minlength=2 * N) + 1j * np.bincount(pair, weights=w.imag, minlength=2 * N)
        out += (t.g(x) * np.ones(N)) * _synthesize(G, N).real
    return f1.with_samples(out)


def bpdo_direct(sigma: Symbol, f1: GridFunction, f2: GridFunction) -> GridFunction:
    """The ``O(N^3)`` double frequency sum with a general ``sigma``."""
    N = _check_input(f1)
    F1, F2 = fourier_coefficients(f1), fourier_coefficients(f2)
    _, xi = frequencies(f1)
    x = f1.coords()[0]
    A, B = np.meshgrid(xi, xi, indexing="ij")
    FF = np.outer(F1, F2)
    out = np.empty(N)
    for n in range(N):
        out[n] = np.sum(sigma(x[n], A, B) * FF * np.exp(1j * (A + B) * x[n])).real
    return f1.with_samples(out)


def bpdo_operator(sigma: Symbol) -> MultilinearOperator:
    return MultilinearOperator(2, lambda f, g: bpdo_apply(sigma, f, g), f"T[{sigma.name}]")


def aliasing_estimate(f: GridFunction) -> float:
    """Fraction of ``L^2`` energy in the outer quarter on each side of the box."""
    x = f.coords()[0]
    R = f.box.halfwidth
    e = f.samples**2
    total = float(e.sum())
    return float(e[np.abs(x) > 0.75 * R].sum() / total) if total > 0 else 0.0


# ---------------------------------------------------------------------------
# symbol class validation

ORDERS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


_STENCILS = {0: ((0, 1.0),), 1: ((1, 0.5), (-1, -0.5)), 2: ((1, 1.0), (0, -2.0), (-1, 1.0))}


def _freq_difference(s: Callable, xi, eta, alpha: int, beta: int) -> np.ndarray:
    """Central difference ``D^alpha_xi D^beta_eta s`` with steps relative to ``1 + |xi| + |eta|``."""
    d = 1e-3 * (1.0 + np.abs(xi) + np.abs(eta))
    out = np.zeros(np.broadcast(xi, eta).shape)
    for sa, wa in _STENCILS[alpha]:
        for sb, wb in _STENCILS[beta]:
            out = out + wa * wb * s(xi + sa * d, eta + sb * d)
    return out / d ** (alpha + beta)


@dataclass(frozen=True)
class SymbolReport:
    derivative_ratios: dict  # "alpha,beta" -> max ratio
    x_ratios: dict  # "alpha,beta" -> max ratio over the h ladder
    x_ratio_by_h: list  # per ladder rung, max over orders and samples
    condition_sup: float
    concave_theta: bool

    @property
    def finite(self) -> bool:
        vals = list(self.derivative_ratios.values()) + list(self.x_ratios.values()) + [self.condition_sup]
        return all(np.isfinite(v) for v in vals)

    def to_dict(self) -> dict:
        return {
            "derivative_ratios": self.derivative_ratios,
            "x_ratios": self.x_ratios,
            "x_ratio_by_h": self.x_ratio_by_h,
            "condition_sup": self.condition_sup,
            "concave_theta": self.concave_theta,
            "finite": self.finite,
        }


def condition_sup(theta: Modulus, omega: Callable, a: float, kmax: int = 60) -> float:
    """``sup theta(t)^{1-a} Omega(1/t)`` over ``t = 2^-k``, ``k = 1..kmax``."""
    t = 2.0 ** -np.arange(1, kmax + 1, dtype=np.float64)
    return float(np.max(theta(t) ** (1.0 - a) * np.asarray(omega(1.0 / t), dtype=np.float64)))


def symbol_class_check(
    sigma: Symbol,
    theta: Modulus | None = None,
    omega: Callable | None = None,
    max_order: int = 2,
    a: float = 0.5,
    xs: Sequence[float] | None = None,
    kmax: int = 30,
) -> SymbolReport:
    """Derivative and x-difference ratios on a frequency ladder.

    Frequency derivatives are central differences of each ``s_r``; the x
    difference of a term is ``(g_r(x + h) - g_r(x)) s_r``, which avoids the
    cancellation of differencing the full symbol at tiny ``h``.  Frequencies range over ``{0, +-2^k : k = -2..10}`` in each variable and
    ``h`` over ``2^-k``, ``k = 1..kmax``.
    """
    if not 0 <= max_order <= 2:
        raise ValueError("max_order must be 0, 1 or 2")
    theta = theta or sigma.theta
    omega = omega or sigma.omega
    ladder = 2.0 ** np.arange(-2, 11)
    f = np.concatenate([[0.0], ladder, -ladder])
    xs = np.asarray(xs if xs is not None else [-1.5, -0.5, 0.0, 0.3, 1.0], dtype=np.float64)
    X, XI, ETA = np.meshgrid(xs, f, f, indexing="ij")
    size = 1.0 + np.abs(XI) + np.abs(ETA)
    orders = [o for o in ORDERS if sum(o) <= max_order]
    deriv, xrat = {}, {}
    hs = 2.0 ** -np.arange(1, kmax + 1, dtype=np.float64)
    by_h = np.zeros(hs.size)
    den_w = np.asarray(omega(np.abs(XI) + np.abs(ETA)), dtype=np.float64) * np.ones_like(XI)
    for al, be in orders:
        key = f"{al},{be}"
        # x enters only through g_r, so differences in x act on g_r alone
        ds = [_freq_difference(t.s, XI, ETA, al, be) * np.ones_like(X) for t in sigma.terms]
        D0 = sum(t.g(X) * d for t, d in zip(sigma.terms, ds))
        deriv[key] = float(np.max(np.abs(D0) * size ** (al + be)))
        best = 0.0
        for i, h in enumerate(hs):
            Dh = sum((t.g(X + h) - t.g(X)) * d for t, d in zip(sigma.terms, ds))
            r = float(np.max(np.abs(Dh) * size ** (al + be) / (theta(h) * den_w)))
            best = max(best, r)
            by_h[i] = max(by_h[i], r)
        xrat[key] = best
    concave = theta.midpoint_concave_on_ladder()
    return SymbolReport(deriv, xrat, [float(v) for v in by_h], condition_sup(theta, omega, a), concave)
