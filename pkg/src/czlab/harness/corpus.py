"""Reproducible input families.

A corpus is a list of JSON-serialisable *specs*; ``realize`` turns one spec
into samples on a given grid.  Specs are resolution independent, so the same
family is reused at every level of a sweep.

Kinds:

* ``step-functions``: at most 16 pieces on the middle half of the box, zero
  outside; heights standard normal.
* ``smooth-bumps``: ``amp * exp(1 - 1/(1 - ((x - c)/r)^2))`` supported in the
  middle half.
* ``bmo-bumps``: ``log+(r / |x - c|)``, a compactly supported BMO function
  with a logarithmic singularity inside the middle half.
* ``log-bmo``: ``log |x - c|`` on the whole box.
* ``power-weights``: ``|x|^a`` with ``a`` uniform in ``[-0.5, 0.5]``.
* ``exponents``: rational bumps ``p0 + amp / (1 + ((x - c)/s)^2)`` with
  ``p0 in [1.9, 2.0]`` and ``amp in [0.1, 0.2]``; ``p_inf = p0``.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from ..grid import Box, GridFunction
from ..varlex import VarExponent
from ..weights import power_weight

__all__ = ["KINDS", "generate_corpus", "realize", "realize_exponent", "corpus_rng"]

KINDS = ("step-functions", "smooth-bumps", "bmo-bumps", "log-bmo", "power-weights", "exponents")
MAX_PIECES = 16

_STREAMS = {k: i for i, k in enumerate(KINDS)}


def corpus_rng(seed: int, kind: str, salt: int = 0) -> np.random.Generator:
    """Independent stream per (seed, kind, salt)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), _STREAMS.get(kind, 99), int(salt)]))


def _round(x) -> float:
    # specs are stored rounded so JSON dumps stay short and exact on reload
    return float(np.round(float(x), 12))


def _step(rng: np.random.Generator, R: float) -> dict:
    pieces = int(rng.integers(1, MAX_PIECES + 1))
    cuts = np.sort(rng.uniform(-R / 2, R / 2, pieces - 1))
    edges = [-R / 2, *cuts.tolist(), R / 2]
    heights = rng.normal(size=pieces)
    return {"type": "step", "edges": [_round(e) for e in edges], "heights": [_round(v) for v in heights]}


def _smooth(rng: np.random.Generator, R: float) -> dict:
    r = rng.uniform(R / 16, R / 4)
    c = rng.uniform(-R / 2 + r, R / 2 - r)
    return {"type": "smooth-bump", "center": _round(c), "radius": _round(r), "amp": _round(rng.normal())}


def _bmo_bump(rng: np.random.Generator, R: float) -> dict:
    r = rng.uniform(R / 8, R / 4)
    c = rng.uniform(-R / 2 + r, R / 2 - r)
    return {"type": "bmo-bump", "center": _round(c), "radius": _round(r)}


def _log_bmo(rng: np.random.Generator, R: float) -> dict:
    return {"type": "log", "center": _round(rng.uniform(-R / 2, R / 2))}


def _power(rng: np.random.Generator, R: float) -> dict:
    return {"type": "power", "a": _round(rng.uniform(-0.5, 0.5))}


def _exponent(rng: np.random.Generator, R: float) -> dict:
    return {
        "type": "rational-bump",
        "p0": _round(rng.uniform(1.9, 2.0)),
        "amp": _round(rng.uniform(0.1, 0.2)),
        "center": _round(rng.uniform(-R / 2, R / 2)),
        "width": _round(rng.uniform(R / 8, R / 2)),
    }


_GEN = {
    "step-functions": _step,
    "smooth-bumps": _smooth,
    "bmo-bumps": _bmo_bump,
    "log-bmo": _log_bmo,
    "power-weights": _power,
    "exponents": _exponent,
}


def generate_corpus(kind: str, seed: int, count: int, halfwidth: float = 2.0, salt: int = 0) -> list[dict]:
    """``count`` specs of ``kind``, reproducible from ``(seed, salt)``."""
    if kind not in _GEN:
        raise ValueError(f"unknown corpus kind {kind!r}; expected one of {list(KINDS)}")
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = corpus_rng(seed, kind, salt)
    return [_GEN[kind](rng, halfwidth) for _ in range(count)]


def _eval(spec: dict, x: np.ndarray, h: float) -> np.ndarray:
    t = spec["type"]
    if t == "step":
        edges = np.asarray(spec["edges"])
        heights = np.asarray(spec["heights"])
        k = np.searchsorted(edges, x, side="right") - 1
        inside = (x >= edges[0]) & (x < edges[-1])
        return np.where(inside, heights[np.clip(k, 0, heights.size - 1)], 0.0)
    if t == "smooth-bump":
        s = (x - spec["center"]) / spec["radius"]
        inside = np.abs(s) < 1
        safe = np.where(inside, s, 0.0)
        return np.where(inside, spec["amp"] * np.exp(1.0 - 1.0 / (1.0 - safe * safe)), 0.0)
    if t == "bmo-bump":
        d = np.maximum(np.abs(x - spec["center"]), 0.5 * h)
        return np.maximum(0.0, np.log(spec["radius"] / d))
    if t == "log":
        return np.log(np.maximum(np.abs(x - spec["center"]), 0.5 * h))
    if t == "constant":
        return np.full(x.shape, float(spec["value"]))
    raise ValueError(f"spec type {t!r} does not describe a function")


def realize(spec: dict[str, Any], box: Box, levels: int) -> GridFunction:
    """Samples of a function or weight spec on the grid of ``levels``."""
    if spec["type"] == "power":
        return power_weight(float(spec["a"]), box, levels).samples
    if spec["type"] == "unit":
        return GridFunction.constant(box, levels, 1.0)
    h = box.cell_width(levels)
    return GridFunction.from_function(box, levels, lambda x: _eval(spec, x, h))


def realize_exponent(spec: dict[str, Any], box: Box, levels: int) -> VarExponent:
    t = spec["type"]
    if t == "constant":
        return VarExponent.constant(box, levels, float(spec["value"]))
    if t == "rational-bump":
        p0, amp, c, w = (float(spec[k]) for k in ("p0", "amp", "center", "width"))
        return VarExponent.from_function(box, levels, lambda x: p0 + amp / (1.0 + ((x - c) / w) ** 2), p_inf=p0)
    if t == "jump":
        lo, hi = float(spec["low"]), float(spec["high"])
        return VarExponent.from_function(box, levels, lambda x: np.where(x < 0, lo, hi), p_inf=hi)
    raise ValueError(f"unknown exponent spec type {t!r}")
