"""Loss families and adversarial/stochastic generators.

Each loss evaluation returns a LossEvent (value, subgradient, replay
metadata). Portfolio losses live in reduced simplex coordinates: the point
is lifted to the full probability vector internally and the gradient is
chain-ruled back, keeping every Hessian downstream nonsingular.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .domain import lift_to_simplex


class NonPositiveReturn(ValueError):
    """Portfolio return vector has a non-positive entry."""


class PredictionOutOfRange(ValueError):
    """Linear log-loss prediction w'x fell outside (0, 1)."""


@dataclass
class LossEvent:
    loss: float
    g: np.ndarray
    meta: dict = field(default_factory=dict)


def portfolio_loss(w_reduced: np.ndarray, r: np.ndarray) -> LossEvent:
    """Log-wealth loss -ln(w'r) for the lifted portfolio w, gradient in reduced coords."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise NonPositiveReturn(f"returns must be positive, got min {float(np.min(r))}")
    w_full = lift_to_simplex(w_reduced)
    wealth = float(w_full @ r)
    g = -(r[:-1] - r[-1]) / wealth
    return LossEvent(loss=-float(np.log(wealth)), g=g, meta={"r": r})


def logloss_linear(w: np.ndarray, x: np.ndarray, y: int) -> LossEvent:
    """Two-branch log-loss for the linear predictor p = w'x, labels y in {-1, +1}."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    p = float(w @ x)
    if not 0.0 < p < 1.0:
        raise PredictionOutOfRange(f"w'x = {p} outside (0, 1)")
    if y == 1:
        loss, g = -np.log(p), -x / p
    elif y == -1:
        loss, g = -np.log(1.0 - p), x / (1.0 - p)
    else:
        raise ValueError(f"label must be -1 or +1, got {y}")
    return LossEvent(loss=float(loss), g=g, meta={"x": x, "y": y})


def linear_loss(w: np.ndarray, g: np.ndarray) -> LossEvent:
    g = np.asarray(g, dtype=float)
    return LossEvent(loss=float(g @ np.asarray(w, dtype=float)), g=g, meta={"g": g})


def returns_iid(seed: int, d: int, lo: float, hi: float) -> Iterator[np.ndarray]:
    """I.i.d. uniform return vectors in [lo, hi]^d (lo > 0)."""
    if lo <= 0:
        raise NonPositiveReturn(f"lo must be positive, got {lo}")
    if hi < lo:
        raise ValueError(f"need hi >= lo, got lo={lo}, hi={hi}")
    rng = np.random.default_rng(seed)
    while True:
        yield rng.uniform(lo, hi, size=d)


def returns_two_asset_adversarial(seed: int = 0) -> Iterator[np.ndarray]:
    """Classical hard stream for two assets: returns alternate (2, 1/2), (1/2, 2)."""
    del seed  # deterministic stream; argument kept for interface uniformity
    t = 0
    while True:
        yield np.array([2.0, 0.5]) if t % 2 == 0 else np.array([0.5, 2.0])
        t += 1


def linear_adversary_iid_sphere(seed: int, d: int, G: float = 1.0) -> Iterator[np.ndarray]:
    """I.i.d. linear-loss gradients drawn uniformly from the sphere of radius G."""
    rng = np.random.default_rng(seed)
    while True:
        z = rng.standard_normal(d)
        yield G * z / np.linalg.norm(z)


def features_simplex(seed: int, d: int, smoothing: float = 0.5) -> Iterator[np.ndarray]:
    """Feature vectors in the simplex interior, coordinates bounded away from 0."""
    rng = np.random.default_rng(seed)
    while True:
        u = rng.random(d) + smoothing
        yield u / float(np.sum(u))


def labels_logistic(seed: int, x_stream: Iterable[np.ndarray]) -> Iterator[tuple[np.ndarray, int]]:
    """Pairs (x, y) with y = +1 with probability w_true'x for a hidden w_true."""
    rng = np.random.default_rng(seed)
    w_true = None
    for x in x_stream:
        x = np.asarray(x, dtype=float)
        if w_true is None:
            w_true = rng.uniform(0.25, 0.75, size=x.shape[0])
        p = float(np.clip(w_true @ x, 0.0, 1.0))
        yield x, (1 if rng.random() < p else -1)
