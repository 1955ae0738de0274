"""Dyadic paraproducts built from theta-molecules on the box (n = 1).

The molecule of the dyadic cube ``P`` (side ``l``, lower corner ``x_P``) is

    phi_P(x) = l^{-1/2} psi((x - x_P) / l),

with ``psi`` supported in ``[0, 1]``.  Every molecule of a family is a
dilated translate of one profile, so the ``L^2`` norm is level independent.
Two profiles are provided:

* ``tent-difference``: ``tau(4(t - 1/4)) - tau(4(t - 3/4))`` with
  ``tau(s) = max(0, 1 - |s|)``; odd about ``t = 1/2``, hence mean zero,
  exactly so on any grid of cell centres.
* ``bump``: ``exp(4 - 1/(t(1 - t)))``, smooth with peak 1 at ``t = 1/2``.

On a grid the inner products with a whole level are one matrix-vector
product per level, because all cubes of a level see the same sampled
profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..czo_core.kernels import Kernel
from ..czo_core.moduli import Modulus
from ..czo_core.operators import MultilinearOperator
from ..grid import Box, DyadicCube, GridFunction, GridMismatchError

__all__ = [
    "PROFILES",
    "profile",
    "Molecule",
    "MoleculeFamily",
    "MoleculeError",
    "make_molecules",
    "paraproduct",
    "paraproduct_kernel",
    "paraproduct_operator",
    "regularity_ratio",
    "DEFAULT_DECAY",
    "DEFAULT_V",
]

DEFAULT_DECAY = 11  # decay order above 10 n for n = 1
DEFAULT_V = 8


class MoleculeError(ValueError):
    """A molecule violates its declared decay bound."""


def _tent(s):
    return np.maximum(0.0, 1.0 - np.abs(s))


def _tent_difference(t):
    t = np.asarray(t, dtype=np.float64)
    return _tent(4.0 * (t - 0.25)) - _tent(4.0 * (t - 0.75))


def _bump(t):
    t = np.asarray(t, dtype=np.float64)
    inside = (t > 0) & (t < 1)
    safe = np.where(inside, t, 0.5)
    return np.where(inside, np.exp(4.0 - 1.0 / (safe * (1.0 - safe))), 0.0)


PROFILES = {"tent-difference": _tent_difference, "bump": _bump}
MEAN_ZERO = {"tent-difference": True, "bump": False}


def profile(name: str, amplitude: float = 1.0):
    if name not in PROFILES:
        raise ValueError(f"unknown molecule profile {name!r}; expected one of {sorted(PROFILES)}")
    base = PROFILES[name]
    return lambda t: amplitude * base(t)


@dataclass(frozen=True)
class Molecule:
    cube: DyadicCube
    samples: GridFunction
    A0: float
    N: int
    theta: Modulus


@dataclass(frozen=True)
class MoleculeFamily:
    """Three molecule families over the dyadic cubes of levels ``0..V``."""

    box: Box
    V: int
    shapes: tuple[str, str, str] = ("tent-difference", "tent-difference", "bump")
    amplitudes: tuple[float, float, float] = (1.0, 1.0, 1.0)
    N: int = DEFAULT_DECAY
    theta: Modulus = field(default_factory=Modulus.lipschitz)

    def __post_init__(self):
        if self.box.dim != 1:
            raise ValueError("molecule families are implemented for n = 1")
        if self.V < 0:
            raise ValueError("V must be >= 0")
        for s in self.shapes:
            profile(s)

    @property
    def cancellation(self) -> tuple[bool, bool]:
        return MEAN_ZERO[self.shapes[0]], MEAN_ZERO[self.shapes[1]]

    def psi(self, j: int):
        return profile(self.shapes[j - 1], self.amplitudes[j - 1])

    def side(self, v: int) -> float:
        return self.box.side * 2.0**-v

    def evaluate(self, j: int, cube: DyadicCube, x) -> np.ndarray:
        """``phi^j_P(x)`` at arbitrary points."""
        l = cube.side
        return l**-0.5 * self.psi(j)((np.asarray(x, dtype=np.float64) - cube.corner[0]) / l)

    def level_profile(self, j: int, v: int, levels: int) -> np.ndarray:
        """Samples of ``phi^j`` on the cells of one level-``v`` cube."""
        n = 2 ** (levels - v)
        return self.side(v) ** -0.5 * self.psi(j)((np.arange(n) + 0.5) / n)

    def molecule(self, j: int, cube: DyadicCube, levels: int) -> Molecule:
        f = GridFunction.from_function(self.box, levels, lambda x: self.evaluate(j, cube, x))
        return Molecule(cube, f, decay_constant(self, j, cube, f), self.N, self.theta)

    def cancellation_integrals(self, j: int, levels: int) -> np.ndarray:
        """``int phi^j_Q`` for every level (all cubes of a level agree)."""
        h = self.box.cell_width(levels)
        return np.array([h * self.level_profile(j, v, levels).sum() for v in range(self.V + 1)])


def decay_constant(fam: MoleculeFamily, j: int, cube: DyadicCube, f: GridFunction) -> float:
    """Tightest ``A0`` with ``|phi| <= A0 l^{-1/2} (1 + |x - x_P|/l)^{-N}`` on the samples."""
    x = f.coords()[0]
    l = cube.side
    env = l**-0.5 * (1.0 + np.abs(x - cube.corner[0]) / l) ** (-fam.N)
    return float(np.max(np.abs(f.samples) / env))


def make_molecules(
    box: Box,
    V: int = DEFAULT_V,
    shapes: Sequence[str] = ("tent-difference", "tent-difference", "bump"),
    amplitudes: Sequence[float] = (1.0, 1.0, 1.0),
    N: int = DEFAULT_DECAY,
    theta: Modulus | None = None,
    A0: float | None = None,
    levels: int | None = None,
) -> MoleculeFamily:
    """Build and validate a molecule family.

    When ``A0`` is declared, every molecule sampled at ``levels`` must obey
    the decay bound with that constant, otherwise :class:`MoleculeError`
    names the first violating sample.
    """
    fam = MoleculeFamily(box, V, tuple(shapes), tuple(float(a) for a in amplitudes), N, theta or Modulus.lipschitz())
    if A0 is not None:
        L = levels if levels is not None else V + 2
        for j in (1, 2, 3):
            for v in range(V + 1):
                cube = DyadicCube(box, v, (0,))  # all cubes of a level are translates
                mol = fam.molecule(j, cube, L)
                if mol.A0 > A0 * (1 + 1e-12):
                    x = mol.samples.coords()[0]
                    env = cube.side**-0.5 * (1.0 + np.abs(x - cube.corner[0]) / cube.side) ** (-N)
                    k = int(np.argmax(np.abs(mol.samples.samples) / env))
                    raise MoleculeError(
                        f"family {j}, level {v}: |phi|({x[k]:.6g}) = {mol.samples.samples[k]:.6g} "
                        f"exceeds A0 = {A0} times the decay envelope"
                    )
    return fam


def fitted_A0(fam: MoleculeFamily, levels: int) -> float:
    """Largest tight decay constant over the three families and all levels."""
    return max(
        fam.molecule(j, DyadicCube(fam.box, v, (0,)), levels).A0 for j in (1, 2, 3) for v in range(fam.V + 1)
    )


def regularity_ratio(fam: MoleculeFamily, j: int, rng: np.random.Generator, count: int = 10_000) -> float:
    """Max of ``|phi(x) - phi(y)| / (l^{-1/2} theta(|x-y|/l) [env(x) + env(y)])`` over random pairs."""
    R = fam.box.halfwidth
    v = rng.integers(0, fam.V + 1, count)
    l = fam.box.side * 2.0**-v
    k = np.floor(rng.uniform(0, 1, count) * 2.0**v)
    corner = -R + k * l
    # points near the cube, at scales from tiny to a few sides
    x = corner + l * rng.uniform(-0.5, 1.5, count)
    y = x + l * np.exp(rng.uniform(np.log(1e-4), np.log(2.0), count)) * rng.choice([-1.0, 1.0], count)
    psi = fam.psi(j)
    diff = np.abs(psi((x - corner) / l) - psi((y - corner) / l)) * l**-0.5
    env = (1 + np.abs(x - corner) / l) ** (-fam.N) + (1 + np.abs(y - corner) / l) ** (-fam.N)
    bound = l**-0.5 * fam.theta(np.abs(x - y) / l) * env
    return float(np.max(diff / bound))


# ---------------------------------------------------------------------------
# the paraproduct and its kernel


def _blocks(f: GridFunction, v: int) -> np.ndarray:
    return f.samples.reshape(2**v, -1)


def paraproduct(fam: MoleculeFamily, f: GridFunction, g: GridFunction) -> GridFunction:
    """``sum_Q |Q|^{-1/2} <f, phi^1_Q> <g, phi^2_Q> phi^3_Q`` over levels ``0..V``."""
    if f.box != fam.box or g.box != fam.box or f.levels != g.levels:
        raise GridMismatchError("inputs must live on the molecule family's box and share a grid")
    L = f.levels
    if fam.V > L - 2:
        raise ValueError(f"truncation level V={fam.V} needs a grid of level >= {fam.V + 2}")
    h = f.h
    out = np.zeros(f.n)
    for v in range(fam.V + 1):
        u1, u2, u3 = (fam.level_profile(j, v, L) for j in (1, 2, 3))
        c1 = h * (_blocks(f, v) @ u1)
        c2 = h * (_blocks(g, v) @ u2)
        coef = fam.side(v) ** -0.5 * c1 * c2
        out += np.outer(coef, u3).reshape(-1)
    return f.with_samples(out)


def paraproduct_kernel(fam: MoleculeFamily, A: float = 1.0) -> Kernel:
    """``K(x, y1, y2) = sum_Q |Q|^{-1/2} phi^1_Q(y1) phi^2_Q(y2) phi^3_Q(x)``.

    Only the cube of each level that contains ``x`` contributes, so the sum
    has ``V + 1`` terms at every point.
    """
    R = fam.box.halfwidth
    psi1, psi2, psi3 = fam.psi(1), fam.psi(2), fam.psi(3)

    def func(x, y1, y2):
        x, y1, y2 = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in (x, y1, y2)))
        out = np.zeros(x.shape)
        for v in range(fam.V + 1):
            l = fam.side(v)
            k = np.clip(np.floor((x + R) / l), 0, 2**v - 1)
            corner = -R + k * l
            out += l**-2.0 * psi1((y1 - corner) / l) * psi2((y2 - corner) / l) * psi3((x - corner) / l)
        return out

    return Kernel(2, func, A, f"paraproduct(V={fam.V})")


def paraproduct_operator(fam: MoleculeFamily) -> MultilinearOperator:
    return MultilinearOperator(2, lambda f, g: paraproduct(fam, f, g), f"Pi(V={fam.V})", paraproduct_kernel(fam))
