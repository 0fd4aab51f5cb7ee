"""Closed-form description of the attractor of T.

For each k >= 1 the branch fixed point w_k is a genuine fixed point of the
return map exactly when r(alpha, lam) < lam**k < alpha, where r is the root
in (0, 1) of

    q(x) = (alpha - (alpha - 1)/lam) x^2 + (alpha - (2 alpha + 1)/lam) x + alpha.

The admissible k form an interval [head, tail] and each w_k lifts to a
periodic orbit of T with period 3k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .core import NASH, GameParams, step_T
from .exceptions import BifurcationBoundary, BracketFailure, GammaCollision, OrbitClosureFailure
from .poincare import branch_fixed_point, monotone_index
from .symmetry import cyclic_shift

BREAKPOINT_TOL = 1e-12
CLOSURE_TOL = 1e-10


@dataclass
class BranchFixedPoint:
    k: int
    w: np.ndarray
    is_attractor_member: bool


@dataclass
class PeriodicOrbit:
    k: int
    period: int
    points: np.ndarray  # shape (period, 3), starting at w_k


class HeadTail(NamedTuple):
    head: int
    tail: int
    count: int
    boundary: bool


@dataclass
class AttractorReport:
    params: GameParams
    head: int
    tail: int
    count: int
    orbits: List[PeriodicOrbit] = field(default_factory=list)
    nash: np.ndarray = field(default_factory=lambda: NASH.copy())
    shapley: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None
    boundary: bool = False

    @property
    def periods(self) -> List[int]:
        return [orb.period for orb in self.orbits]

    def all_points(self) -> np.ndarray:
        if not self.orbits:
            return np.empty((0, 3))
        return np.concatenate([orb.points for orb in self.orbits])


class LimitCount(NamedTuple):
    """Limits of the orbit count as lam -> 1 (``liminf``/``limsup``) and lam -> 0."""

    liminf: float
    limsup: float
    small_lambda: int = 1


def q_poly(g: GameParams, x: float) -> float:
    alpha, lam = g.alpha, g.lam
    return (alpha - (alpha - 1.0) / lam) * x * x + (alpha - (2.0 * alpha + 1.0) / lam) * x + alpha


def r_root(g: GameParams) -> float:
    """Root of q in (0, 1).

    Written in rationalized form 2c / (-b + sqrt(disc)) of lam * q, which is
    free of cancellation and stays finite when the leading coefficient
    vanishes (alpha = 1 / (1 - lam)), where it reduces to the linear root.
    """
    alpha, lam = g.alpha, g.lam
    disc = alpha * alpha * (4.0 - 3.0 * lam * lam) + alpha * (4.0 - 6.0 * lam) + 1.0
    return 2.0 * alpha * lam / (1.0 + 2.0 * alpha - alpha * lam + math.sqrt(disc))


def r_root_closed_form(g: GameParams) -> float:
    """The textbook quadratic-formula expression for the same root."""
    alpha, lam = g.alpha, g.lam
    disc = alpha * alpha * (4.0 - 3.0 * lam * lam) + alpha * (4.0 - 6.0 * lam) + 1.0
    return (1.0 + 2.0 * alpha - alpha * lam - math.sqrt(disc)) / (2.0 * (alpha * lam - alpha + 1.0))


def in_region_Rk(g: GameParams, k: int) -> bool:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    lk = math.exp(k * math.log(g.lam))
    return r_root(g) < lk < g.alpha


def w_fixed_point(g: GameParams, k: int) -> BranchFixedPoint:
    return BranchFixedPoint(k, branch_fixed_point(g.lam, k), in_region_Rk(g, k))


def _near_integer(z: float) -> bool:
    return abs(z - round(z)) <= BREAKPOINT_TOL * max(1.0, abs(z))


def head_tail_count(g: GameParams, strict: bool = False) -> HeadTail:
    """Head, tail and number of attracting periodic orbits.

    ``boundary`` is set when lam**k sits on alpha or on r for an integer k
    (up to rounding), i.e. at a bifurcation; with ``strict`` this raises
    :class:`BifurcationBoundary` instead.
    """
    alpha, lam = g.alpha, g.lam
    log_lam = math.log(lam)
    boundary = False
    if alpha >= 1.0:
        head = 1
    else:
        z = math.log(alpha) / log_lam
        boundary |= _near_integer(z)
        head = monotone_index(alpha, lam)
    z = math.log(r_root(g)) / log_lam
    boundary |= _near_integer(z)
    tail = math.ceil(z) - 1
    result = HeadTail(head, tail, tail - head + 1, boundary)
    if strict and boundary:
        raise BifurcationBoundary(
            f"alpha={alpha!r}, lam={lam!r} is on a bifurcation boundary", report=result
        )
    return result


def _build_orbit(g: GameParams, k: int) -> PeriodicOrbit:
    period = 3 * k
    w = branch_fixed_point(g.lam, k)
    points = np.empty((period, 3))
    x = w
    for j in range(period):
        points[j] = x
        x = step_T(g, x)
    gap = float(np.abs(x - w).max())
    if gap > CLOSURE_TOL:
        raise OrbitClosureFailure(f"orbit through w_{k} misses closure by {gap:.3e}")
    for d in range(1, period):
        if period % d == 0 and float(np.abs(points[d] - w).max()) <= CLOSURE_TOL:
            raise OrbitClosureFailure(f"orbit through w_{k} has period {d} < {period}")
    return PeriodicOrbit(k, period, points)


def enumerate_attractor(g: GameParams, allow_boundary: bool = False) -> AttractorReport:
    """Build every attracting periodic orbit of T.

    At a bifurcation boundary this raises :class:`BifurcationBoundary`
    unless ``allow_boundary``, in which case orbits that cannot be traced
    (their anchor sits on a discontinuity) are skipped and the report is
    flagged.
    """
    ht = head_tail_count(g)
    report = AttractorReport(
        params=g, head=ht.head, tail=ht.tail, count=ht.count, boundary=ht.boundary,
        shapley=shapley_triangle(g) if g.alpha < 1.0 else None,
    )
    if ht.boundary and not allow_boundary:
        raise BifurcationBoundary(
            f"alpha={g.alpha!r}, lam={g.lam!r} is on a bifurcation boundary", report=report
        )
    for k in range(ht.head, ht.tail + 1):
        try:
            report.orbits.append(_build_orbit(g, k))
        except (GammaCollision, OrbitClosureFailure):
            if not ht.boundary:
                raise
    return report


def nash_point() -> np.ndarray:
    return NASH.copy()


def shapley_triangle(g: GameParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    alpha = g.alpha
    v = np.array([alpha, 1.0, alpha * alpha]) / (1.0 + alpha + alpha * alpha)
    return v, cyclic_shift(v), cyclic_shift(v, 2)


def count_formula_N1(lam: float) -> int:
    """Number of periodic orbits in the zero-sum game, in closed form."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lam must lie in (0, 1), got {lam}")
    arg = (3.0 - lam - math.sqrt(3.0 * (1.0 - lam) * (3.0 + lam))) / (2.0 * lam)
    return math.ceil(math.log(arg) / math.log(lam)) - 1


def limit_count(g: GameParams) -> LimitCount:
    alpha = g.alpha
    if alpha == 1.0:
        return LimitCount(math.inf, math.inf)
    if alpha > 1.0:
        n = math.ceil(3.0 * alpha / (alpha - 1.0)) - 1
        return LimitCount(n, n)
    n = math.ceil((1.0 + alpha + alpha * alpha) / (1.0 - alpha))
    return LimitCount(n - 1, n)


def bisect(func, lo: float, hi: float, xtol: float = 1e-12, max_iter: int = 200) -> float:
    flo, fhi = func(lo), func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketFailure(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)


def bifurcation_points_sym(n: int) -> float:
    """The n-th discontinuity of the zero-sum orbit count.

    N_1 steps from n to n + 1 where r_1(lam) = lam**(n + 1).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    def gap(lam):
        return r_root(GameParams.from_alpha(1.0, lam)) - lam ** (n + 1)

    lo = 1e-6
    hi = None
    for j in range(1, 60):
        cand = 1.0 - 2.0 ** -j
        if gap(cand) < 0:
            hi = cand
            break
    if hi is None:
        raise BracketFailure(f"could not bracket the discontinuity for n={n}")
    return bisect(gap, lo, hi)


def lambda_star() -> float:
    """Real root of 1 - lam - lam**3, where the shape of the k=2 region changes."""
    return bisect(lambda lam: 1.0 - lam - lam ** 3, 0.0, 1.0)
