"""Rock-Paper-Scissors game, best response and the discretized dynamics T.

Strategies are length-3 float arrays ordered (Rock, Paper, Scissors). The
map is

    T(x) = lam * x + (1 - lam) * e_{i+1},    x in R_i,

with indices taken mod 3, so R_1 (best response Paper) moves towards e_2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Optional

import numpy as np

from .exceptions import GammaCollision

DEFAULT_GAMMA_TOL = 1e-9

NASH = np.full(3, 1.0 / 3.0)


@dataclass(frozen=True)
class GameParams:
    """Payoffs ``a`` (win) and ``b`` (loss), contraction ``lam`` and the
    boundary tolerance used to decide when a point is on an indifference set.
    """

    a: float
    b: float
    lam: float
    gamma_tol: float = DEFAULT_GAMMA_TOL

    def __post_init__(self):
        for name in ("a", "b", "lam", "gamma_tol"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"payoffs must be positive, got a={self.a}, b={self.b}")
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lam must lie in (0, 1), got {self.lam}")
        if self.gamma_tol < 0:
            raise ValueError(f"gamma_tol must be nonnegative, got {self.gamma_tol}")

    @classmethod
    def from_alpha(cls, alpha, lam, gamma_tol=DEFAULT_GAMMA_TOL):
        return cls(a=float(alpha), b=1.0, lam=float(lam), gamma_tol=gamma_tol)

    @classmethod
    def from_epsilon(cls, a, b, epsilon, gamma_tol=DEFAULT_GAMMA_TOL):
        return cls(a=float(a), b=float(b), lam=1.0 - float(epsilon), gamma_tol=gamma_tol)

    @property
    def alpha(self) -> float:
        return self.a / self.b

    @property
    def epsilon(self) -> float:
        return 1.0 - self.lam


class Region(IntEnum):
    GAMMA = 0
    R1 = 1
    R2 = 2
    R3 = 3


@dataclass
class Trajectory:
    points: List[np.ndarray] = field(default_factory=list)
    labels: List[Region] = field(default_factory=list)
    hit_gamma: bool = False

    def __len__(self):
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points)


def as_strategy(x, atol=1e-9) -> np.ndarray:
    """Validate ``x`` as a point of the simplex and return it as a float array."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"a strategy has 3 coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("strategy coordinates must be finite")
    if np.any(arr < -atol):
        raise ValueError(f"strategy coordinates must be nonnegative, got {arr}")
    if abs(arr.sum() - 1.0) > atol:
        raise ValueError(f"strategy must sum to 1, got sum {arr.sum()!r}")
    return arr


def sample_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform points on the simplex (normalized exponentials), shape (n, 3)."""
    e = rng.exponential(size=(n, 3))
    return e / e.sum(axis=1, keepdims=True)


def payoff_matrix(g: GameParams) -> np.ndarray:
    a, b = g.a, g.b
    return np.array([[0.0, -b, a], [a, 0.0, -b], [-b, a, 0.0]])


def payoff_vector(g: GameParams, y) -> np.ndarray:
    """Return ``A @ y``, the payoff of each pure strategy against ``y``."""
    return payoff_matrix(g) @ np.asarray(y, dtype=float)


def best_response(g: GameParams, y) -> Optional[int]:
    """Index (0=Rock, 1=Paper, 2=Scissors) of the strict best response to ``y``.

    Returns ``None`` when the two largest payoffs are within ``g.gamma_tol``.
    """
    p = payoff_vector(g, y)
    order = np.argsort(p)
    if p[order[2]] - p[order[1]] <= g.gamma_tol:
        return None
    return int(order[2])


def u_alpha(g: GameParams) -> np.ndarray:
    alpha = g.alpha
    return np.array([alpha + 2.0, 1.0 - alpha, 0.0])


def region_margins(g: GameParams, x) -> np.ndarray:
    """Slack of the two strict inequalities defining R_1, R_2, R_3.

    Row ``i`` holds ``(u.S^i(x) - 1, 1 - S(u).S^i(x))``; the point lies in
    region ``i + 1`` iff both entries are positive.
    """
    alpha = g.alpha
    p, q = alpha + 2.0, 1.0 - alpha
    x1, x2, x3 = (float(c) for c in x)
    return np.array([
        [p * x1 + q * x2 - 1.0, 1.0 - (q * x1 + p * x3)],
        [p * x2 + q * x3 - 1.0, 1.0 - (q * x2 + p * x1)],
        [p * x3 + q * x1 - 1.0, 1.0 - (q * x3 + p * x2)],
    ])


def classify_region(g: GameParams, x) -> Region:
    alpha = g.alpha
    tol = g.gamma_tol
    p, q = alpha + 2.0, 1.0 - alpha
    x1, x2, x3 = (float(c) for c in x)
    if p * x1 + q * x2 - 1.0 > tol and 1.0 - (q * x1 + p * x3) > tol:
        return Region.R1
    if p * x2 + q * x3 - 1.0 > tol and 1.0 - (q * x2 + p * x1) > tol:
        return Region.R2
    if p * x3 + q * x1 - 1.0 > tol and 1.0 - (q * x3 + p * x2) > tol:
        return Region.R3
    return Region.GAMMA


def classify_region_batch(g: GameParams, X: np.ndarray) -> np.ndarray:
    """Vectorized :func:`classify_region` over rows of ``X``; int labels 0..3."""
    alpha = g.alpha
    tol = g.gamma_tol
    p, q = alpha + 2.0, 1.0 - alpha
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    labels = np.zeros(len(X), dtype=np.int64)
    r1 = (p * x1 + q * x2 - 1.0 > tol) & (1.0 - (q * x1 + p * x3) > tol)
    r2 = (p * x2 + q * x3 - 1.0 > tol) & (1.0 - (q * x2 + p * x1) > tol)
    r3 = (p * x3 + q * x1 - 1.0 > tol) & (1.0 - (q * x3 + p * x2) > tol)
    labels[r3] = 3
    labels[r2] = 2
    labels[r1] = 1
    return labels


def step_T(g: GameParams, x) -> np.ndarray:
    """One step of the discretized best-response map.

    Raises :class:`GammaCollision` if ``x`` is not in one of the open regions.
    """
    region = classify_region(g, x)
    if region is Region.GAMMA:
        raise GammaCollision(f"point {np.asarray(x).tolist()} lies on an indifference set", point=x)
    lam = g.lam
    y = lam * np.asarray(x, dtype=float)
    y[int(region) % 3] += 1.0 - lam
    return y / y.sum()


def step_T_batch(g: GameParams, X: np.ndarray):
    """Apply T to every row of ``X``.

    Returns ``(Y, labels)`` where ``labels`` are the regions of the inputs;
    rows labeled Gamma are copied unchanged.
    """
    labels = classify_region_batch(g, X)
    lam = g.lam
    Y = lam * X
    regular = labels > 0
    rows = np.nonzero(regular)[0]
    Y[rows, labels[rows] % 3] += 1.0 - lam
    Y /= Y.sum(axis=1, keepdims=True)
    Y[~regular] = X[~regular]
    return Y, labels


def iterate_T(g: GameParams, x, n: int) -> Trajectory:
    """Orbit ``x, T(x), ..., T^n(x)``; stops early at the first Gamma label."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    traj = Trajectory()
    current = as_strategy(x)
    for i in range(n + 1):
        label = classify_region(g, current)
        traj.points.append(current)
        traj.labels.append(label)
        if label is Region.GAMMA:
            traj.hit_gamma = True
            break
        if i < n:
            current = step_T(g, current)
    return traj


def indifferent_strategies(g: GameParams, y, tol=None) -> List[int]:
    """Pure strategies (0-based) whose payoffs tie for the maximum at ``y``."""
    tol = g.gamma_tol if tol is None else tol
    # region margins are payoff differences in units of b
    p = payoff_vector(g, y) / g.b
    top = p.max()
    return [i for i in range(3) if top - p[i] <= max(tol, 1e-12)]
