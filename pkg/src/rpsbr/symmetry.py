"""Reduction of T by the cyclic symmetry S to a map f on R_1.

``f = pi o T`` is affine on two pieces of R_1,

    A: u.x > alpha (1/lam - 1) + 1,   f(x) = lam x + (1 - lam) e_2,
    B: u.x < alpha (1/lam - 1) + 1,   f(x) = lam S(x) + (1 - lam) e_1,

and the skew product F(x, j) = (f(x), sigma(x) + j mod 3) is conjugate to T
via h(x) = (pi(x), i - 1) for x in R_i. A sheet ``j`` therefore stands for
the point S^{-j}(x) of the full simplex.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import GameParams, Region, classify_region
from .exceptions import GammaCollision


class Branch(Enum):
    A = "A"
    B = "B"
    GAMMA1 = "Gamma1"


@dataclass(frozen=True)
class ReducedPoint:
    x: np.ndarray
    sheet: int

    def __post_init__(self):
        if self.sheet not in (0, 1, 2):
            raise ValueError(f"sheet must be 0, 1 or 2, got {self.sheet}")


def cyclic_shift(x, times: int = 1) -> np.ndarray:
    """S(x1, x2, x3) = (x2, x3, x1), applied ``times`` times (mod 3)."""
    return np.roll(np.asarray(x, dtype=float), -(times % 3))


def project_pi(g: GameParams, x) -> Tuple[np.ndarray, int]:
    """Return ``(S^{i-1}(x), i)`` for ``x`` in R_i."""
    region = classify_region(g, x)
    if region is Region.GAMMA:
        raise GammaCollision(f"point {np.asarray(x).tolist()} lies on an indifference set", point=x)
    i = int(region)
    return cyclic_shift(x, i - 1), i


def branch_threshold(g: GameParams) -> float:
    return g.alpha * (1.0 / g.lam - 1.0) + 1.0


def classify_branch(g: GameParams, x) -> Branch:
    """Split R_1 into A and B.

    The A/B margin is measured at the image, ``lam * (u.x - threshold)``,
    which is exactly the margin T(x) has from the R_1/R_2 boundary; so a
    Gamma1 label here coincides with a Gamma label for T(x). Points not
    strictly inside R_1 are Gamma1 as well.
    """
    alpha = g.alpha
    tol = g.gamma_tol
    p, q = alpha + 2.0, 1.0 - alpha
    x1, x2, x3 = (float(c) for c in x)
    ux = p * x1 + q * x2
    if ux - 1.0 <= tol or 1.0 - (q * x1 + p * x3) <= tol:
        return Branch.GAMMA1
    margin = g.lam * (ux - branch_threshold(g))
    if margin > tol:
        return Branch.A
    if margin < -tol:
        return Branch.B
    return Branch.GAMMA1


def branch_mask_B(g: GameParams, X: np.ndarray) -> np.ndarray:
    """Vectorized test for membership of rows of ``X`` in B (with margins)."""
    alpha = g.alpha
    tol = g.gamma_tol
    p, q = alpha + 2.0, 1.0 - alpha
    ux = p * X[:, 0] + q * X[:, 1]
    in_r1 = (ux - 1.0 > tol) & (1.0 - (q * X[:, 0] + p * X[:, 2]) > tol)
    return in_r1 & (g.lam * (ux - branch_threshold(g)) < -tol)


def f_affine(g: GameParams, x, branch: Branch) -> np.ndarray:
    lam = g.lam
    x = np.asarray(x, dtype=float)
    if branch is Branch.A:
        y = lam * x
        y[1] += 1.0 - lam
    elif branch is Branch.B:
        y = lam * cyclic_shift(x)
        y[0] += 1.0 - lam
    else:
        raise GammaCollision("f is undefined on Gamma1", point=x)
    return y / y.sum()


def step_f(g: GameParams, x) -> Tuple[np.ndarray, int]:
    """Return ``(f(x), sigma(x))`` with sigma 0 on A and 1 on B."""
    branch = classify_branch(g, x)
    if branch is Branch.GAMMA1:
        raise GammaCollision(f"point {np.asarray(x).tolist()} lies on Gamma1", point=x)
    return f_affine(g, x, branch), (0 if branch is Branch.A else 1)


def step_F(g: GameParams, p: ReducedPoint) -> ReducedPoint:
    y, sigma = step_f(g, p.x)
    return ReducedPoint(y, (p.sheet + sigma) % 3)


def f_orbit(g: GameParams, x, n: int) -> List[Tuple[np.ndarray, Optional[int]]]:
    """``[(x_0, sigma_0), ..., (x_{n-1}, sigma_{n-1}), (x_n, None)]``."""
    out = []
    current = np.asarray(x, dtype=float)
    for _ in range(n):
        nxt, sigma = step_f(g, current)
        out.append((current, sigma))
        current = nxt
    out.append((current, None))
    return out


def lift_orbit(f_orbit_points: Sequence[Tuple[np.ndarray, Optional[int]]], start_sheet: int = 0) -> List[np.ndarray]:
    """Map an f-orbit with its sigma increments back to the simplex.

    Entry ``k`` has sheet ``start_sheet + sigma_0 + ... + sigma_{k-1}`` and
    lifts to ``S^{-sheet}(x_k)``; the sigma of the last entry is unused.
    """
    sheet = start_sheet % 3
    lifted = []
    for x, sigma in f_orbit_points:
        lifted.append(cyclic_shift(x, -sheet))
        if sigma is not None:
            sheet = (sheet + sigma) % 3
    return lifted


def to_reduced(g: GameParams, x) -> ReducedPoint:
    """The conjugacy h(x) = (pi(x), i - 1)."""
    y, i = project_pi(g, x)
    return ReducedPoint(y, i - 1)


def from_reduced(p: ReducedPoint) -> np.ndarray:
    return cyclic_shift(p.x, -p.sheet)
