"""Multilinear operators and their commutators with BMO symbols."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

from ..grid import GridFunction

__all__ = [
    "MultilinearOperator",
    "CommutatorSubset",
    "commutator_j",
    "commutator_sigma",
    "commutator_pi",
    "proper_subsets",
]


@dataclass(frozen=True)
class MultilinearOperator:
    """An ``m``-linear map on grid functions, optionally carrying its kernel."""

    arity: int
    func: Callable[..., GridFunction] = field(repr=False)
    name: str = "T"
    kernel: object | None = field(default=None, repr=False)

    def apply(self, fs: Sequence[GridFunction]) -> GridFunction:
        if len(fs) != self.arity:
            raise ValueError(f"{self.name} takes {self.arity} inputs, got {len(fs)}")
        return self.func(*fs)

    def __call__(self, *fs: GridFunction) -> GridFunction:
        return self.apply(fs)


@dataclass(frozen=True)
class CommutatorSubset:
    """A nonempty subset of slots ``{1..m}`` stored in ascending order."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise ValueError("commutator subsets must be nonempty")
        if list(idx) != sorted(set(idx)):
            raise ValueError("indices must be sorted ascending without repeats")
        if idx[0] < 1:
            raise ValueError("slots are numbered from 1")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def full(cls, m: int) -> "CommutatorSubset":
        return cls(tuple(range(1, m + 1)))

    def complement(self, m: int) -> tuple[int, ...]:
        return tuple(i for i in range(1, m + 1) if i not in self.indices)


def proper_subsets(m: int) -> list[CommutatorSubset]:
    """All ``sigma`` with ``1 <= |sigma| <= m - 1`` in size-then-lexicographic order."""
    return [CommutatorSubset(c) for j in range(1, m) for c in combinations(range(1, m + 1), j)]


def _check_slot(T: MultilinearOperator, j: int) -> None:
    if not 1 <= j <= T.arity:
        raise ValueError(f"slot {j} outside 1..{T.arity}")


def commutator_j(T: MultilinearOperator, b: GridFunction, j: int) -> MultilinearOperator:
    """``b T(f_1..f_m) - T(f_1, .., b f_j, .., f_m)``."""
    _check_slot(T, j)

    def func(*fs):
        moved = list(fs)
        moved[j - 1] = b * fs[j - 1]
        return b * T.apply(fs) - T.apply(moved)

    return MultilinearOperator(T.arity, func, f"[b,{T.name}]_{j}")


def commutator_sigma(T: MultilinearOperator, bs: Sequence[GridFunction]) -> MultilinearOperator:
    """``sum_j [b_j, T]_j``."""
    if len(bs) != T.arity:
        raise ValueError("need one symbol per slot")
    parts = [commutator_j(T, b, j) for j, b in enumerate(bs, start=1)]

    def func(*fs):
        out = parts[0].apply(fs)
        for op in parts[1:]:
            out = out + op.apply(fs)
        return out

    return MultilinearOperator(T.arity, func, f"{T.name}_Sigma")


def commutator_pi(
    T: MultilinearOperator, bs: Sequence[GridFunction], sigma: CommutatorSubset | None = None
) -> MultilinearOperator:
    """Iterated commutator over the slots in ``sigma`` (all slots by default).

    Expanded as ``sum_{S subset sigma} (-1)^{|S|} prod_{i in sigma \\ S} b_i
    * T(.., b_i f_i for i in S, ..)``, which costs ``2^{|sigma|}`` applications.
    """
    if len(bs) != T.arity:
        raise ValueError("need one symbol per slot")
    sigma = sigma or CommutatorSubset.full(T.arity)
    for i in sigma.indices:
        _check_slot(T, i)
    idx = sigma.indices

    def func(*fs):
        out = None
        for size in range(len(idx) + 1):
            for S in combinations(idx, size):
                args = list(fs)
                for i in S:
                    args[i - 1] = bs[i - 1] * fs[i - 1]
                term = T.apply(args)
                for i in idx:
                    if i not in S:
                        term = bs[i - 1] * term
                if size % 2:
                    term = -term
                out = term if out is None else out + term
        return out

    label = ",".join(str(i) for i in idx)
    return MultilinearOperator(T.arity, func, f"{T.name}_Pi[{label}]")
