"""Moduli of continuity and their Dini-type integrals.

Both integrals are computed after the substitution ``t = exp(-u)``:

    int_0^1 w(t)^a / t dt                = int_0^inf w(e^-u)^a du
    int_0^1 w(t)/t (1 + log 1/t)^m dt    = int_0^inf w(e^-u) (1 + u)^m du

Composite Simpson on ``[0, 40]`` is doubled until the relative change is
below ``1e-8``.  The tail is then added in chunks ``[U, 2U]``; chunks that
stop shrinking mark the integral as divergent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "Modulus",
    "DiniResult",
    "dini_integral",
    "log_dini_integral",
    "dyadic_series",
    "condensed_series",
    "integrate_u",
]

KINDS = ("power", "lipschitz", "log-power", "custom")


@dataclass(frozen=True)
class Modulus:
    """A nondecreasing modulus ``w: [0, inf) -> [0, inf)``.

    ``power``: ``t^param``; ``lipschitz``: ``min(t, 1)``; ``log-power``:
    ``(1 + log(1/t))^(-param)`` on ``(0, 1]`` and ``1`` beyond;
    ``custom``: an arbitrary vectorised ``func``.
    """

    kind: str
    param: float = 1.0
    func: Callable | None = None
    scale: float = 1.0
    stretch: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown modulus kind {self.kind!r}")
        if self.kind == "custom" and self.func is None:
            raise ValueError("custom moduli need func")
        if self.kind in ("power", "log-power") and not self.param > 0:
            raise ValueError("modulus parameter must be positive")

    @classmethod
    def power(cls, eps: float) -> "Modulus":
        return cls("power", eps)

    @classmethod
    def lipschitz(cls) -> "Modulus":
        return cls("lipschitz")

    @classmethod
    def log_power(cls, beta: float) -> "Modulus":
        return cls("log-power", beta)

    def fitted(self, c1: float, c2: float) -> "Modulus":
        """``c1 * w(c2 * t)``."""
        return Modulus(self.kind, self.param, self.func, self.scale * c1, self.stretch * c2)

    def power_of(self, a: float) -> "Modulus":
        """``w(t)^a`` as a custom modulus."""
        return Modulus("custom", func=lambda t, base=self: base(t) ** a)

    def _base(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "power":
            return t**self.param
        if self.kind == "lipschitz":
            return np.minimum(t, 1.0)
        if self.kind == "log-power":
            with np.errstate(divide="ignore"):
                inner = 1.0 + np.log(1.0 / np.minimum(np.maximum(t, 1e-300), 1.0))
            return np.where(t > 0, inner ** (-self.param), 0.0)
        return np.asarray(self.func(t), dtype=np.float64)

    def __call__(self, t):
        arr = np.asarray(t, dtype=np.float64)
        if np.any(arr < 0):
            raise ValueError("moduli are defined on [0, inf)")
        out = self.scale * self._base(self.stretch * arr)
        return float(out) if out.ndim == 0 else out

    def at_log(self, u) -> np.ndarray:
        """``w(exp(-u))`` evaluated without underflow for large ``u``."""
        u = np.asarray(u, dtype=np.float64)
        if self.kind == "custom":
            return self.scale * np.asarray(self.func(self.stretch * np.exp(-u)), dtype=np.float64)
        v = u - np.log(self.stretch)
        if self.kind == "power":
            return self.scale * np.exp(-self.param * v)
        if self.kind == "lipschitz":
            return self.scale * np.exp(-np.maximum(v, 0.0))
        return self.scale * (1.0 + np.maximum(v, 0.0)) ** (-self.param)

    def nondecreasing_on_ladder(self, kmax: int = 40) -> bool:
        vals = self(2.0 ** -np.arange(kmax, -1, -1.0))
        return bool(np.all(np.diff(vals) >= -1e-15 * np.abs(vals[1:])))

    def midpoint_concave_on_ladder(self, kmax: int = 40) -> bool:
        """``w((s + t)/2) >= (w(s) + w(t))/2`` on consecutive ladder points."""
        t = 2.0 ** -np.arange(kmax, -1, -1.0)
        s, u = t[:-1], t[1:]
        mid = self(0.5 * (s + u))
        avg = 0.5 * (self(s) + self(u))
        return bool(np.all(mid >= avg * (1 - 1e-12)))


@dataclass(frozen=True)
class DiniResult:
    value: float
    converged: bool
    divergent: bool

    def to_dict(self) -> dict:
        return {"value": self.value, "converged": self.converged, "divergent": self.divergent}


def _simpson(g: Callable, a: float, b: float, panels: int) -> float:
    u = np.linspace(a, b, panels + 1)
    y = g(u)
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((b - a) / (3.0 * panels) * np.dot(w, y))


def _adaptive(g: Callable, a: float, b: float, rtol: float = 1e-8, start: int = 64, cap: int = 2**20):
    panels = start
    prev = _simpson(g, a, b, panels)
    while panels < cap:
        panels *= 2
        cur = _simpson(g, a, b, panels)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur, True
        prev = cur
    return prev, False


def integrate_u(
    g: Callable[[np.ndarray], np.ndarray], head: float = 40.0, rtol: float = 1e-8, max_chunks: int = 200
) -> DiniResult:
    """``int_0^inf g(u) du`` for a nonnegative integrand, with divergence detection."""
    total, ok = _adaptive(g, 0.0, head, rtol)
    lo, prev_chunk = head, None
    for _ in range(max_chunks):
        chunk, chunk_ok = _adaptive(g, lo, 2.0 * lo, rtol)
        ok = ok and chunk_ok
        if prev_chunk is not None and prev_chunk > 0:
            ratio = chunk / prev_chunk
            if ratio >= 0.98:
                return DiniResult(total + chunk, False, True)
            tail = chunk * ratio / (1.0 - ratio)
            if tail <= 1e-10 * max(total, 1e-300):
                return DiniResult(total + chunk + tail, ok, False)
        total += chunk
        if chunk <= 1e-14 * max(total, 1e-300):
            return DiniResult(total, ok, False)
        prev_chunk = chunk
        lo *= 2.0
    return DiniResult(total, False, False)


def dini_integral(omega: Modulus, a: float = 1.0) -> DiniResult:
    """``int_0^1 w(t)^a / t dt``."""
    if not a > 0:
        raise ValueError("a must be positive")
    return integrate_u(lambda u: omega.at_log(u) ** a)


def log_dini_integral(omega: Modulus, m: int) -> DiniResult:
    """``int_0^1 w(t)/t (1 + log 1/t)^m dt``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return integrate_u(lambda u: omega.at_log(u) * (1.0 + u) ** m)


def dyadic_series(omega: Modulus, m: int, K: int = 200) -> float:
    """``sum_{k=1}^K k^m w(2^-k)``."""
    k = np.arange(1, K + 1, dtype=np.float64)
    return float(np.sum(k**m * omega(2.0**-k)))


def condensed_series(omega: Modulus, m: int, J: int = 200) -> DiniResult:
    """Convergence test for ``sum_k k^m w(2^-k)`` by Cauchy condensation.

    The terms are eventually nonincreasing, so the series converges iff
    ``sum_j 2^j (2^j)^m w(2^(-2^j))`` does.  Condensed terms whose ratio
    stays at or above 0.98 mark divergence.
    """
    j = np.arange(J, dtype=np.float64)
    k = 2.0**j
    c = k ** (m + 1) * omega.at_log(k * np.log(2.0))
    ratio = c[-1] / c[-2] if c[-2] > 0 else 0.0
    if ratio >= 0.98:
        return DiniResult(float("inf"), False, True)
    return DiniResult(float(np.sum(c)), True, False)
