"""Randomized invariant suite over a grid of (alpha, lam) parameters.

Every check compares two independent computations (or a computation with a
closed-form identity) and records the worst discrepancy seen.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .attractor import enumerate_attractor, in_region_Rk
from .core import GameParams, classify_region_batch, sample_simplex, step_T
from .exceptions import GammaCollision, ThresholdCollision
from .poincare import (
    ReturnStructure,
    branch_fixed_point,
    branch_map,
    check_monotonicity,
    classify_Bk,
    itinerary,
    poincare_by_iteration,
    return_structure,
    return_time,
    sample_B,
)
from .scan import classify_basins
from .symmetry import Branch, classify_branch, cyclic_shift, project_pi, step_f

DEFAULT_GRID: Tuple[Tuple[float, float], ...] = tuple(
    (alpha, lam) for alpha in (0.5, 1.0, 2.0) for lam in (0.3, 0.6, 0.8, 0.9)
)


@dataclass
class CheckResult:
    name: str
    alpha: float
    lam: float
    samples: int = 0
    failures: int = 0
    max_error: float = 0.0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class VerifyReport:
    seed: int
    samples: int
    grid: List[Tuple[float, float]]
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_names(self) -> List[str]:
        return sorted({c.name for c in self.checks if not c.passed})

    def to_json(self) -> str:
        payload = {
            "seed": self.seed,
            "samples": self.samples,
            "grid": [list(p) for p in self.grid],
            "passed": self.passed,
            "failed": self.failed_names(),
            "checks": [dict(asdict(c), passed=c.passed) for c in self.checks],
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _regular_points(g, rng, n):
    X = sample_simplex(rng, n)
    return X[classify_region_batch(g, X) > 0]


def check_equivariance(g, rng, n) -> CheckResult:
    res = CheckResult("cyclic-equivariance", g.alpha, g.lam)
    for x in _regular_points(g, rng, n):
        try:
            err = float(np.abs(cyclic_shift(step_T(g, x)) - step_T(g, cyclic_shift(x))).max())
        except GammaCollision:
            continue
        res.samples += 1
        res.max_error = max(res.max_error, err)
        res.failures += err > 1e-12
    return res


def check_semiconjugacy(g, rng, n) -> CheckResult:
    res = CheckResult("semiconjugacy", g.alpha, g.lam)
    for x in _regular_points(g, rng, n):
        try:
            lhs, _ = project_pi(g, step_T(g, x))
            rhs, _ = step_f(g, project_pi(g, x)[0])
        except GammaCollision:
            continue
        err = float(np.abs(lhs - rhs).max())
        res.samples += 1
        res.max_error = max(res.max_error, err)
        res.failures += err > 1e-12
    return res


def check_return_branches(g, rng, n, rs) -> Tuple[CheckResult, CheckResult]:
    part = CheckResult("return-branch-partition", g.alpha, g.lam)
    closed = CheckResult("closed-form-return-map", g.alpha, g.lam)
    for x in sample_B(g, rng, n):
        try:
            k_iter = return_time(g, x, rs)
            y_iter, _ = poincare_by_iteration(g, x, rs)
        except (GammaCollision, ThresholdCollision):
            continue
        part.samples += 1
        closed.samples += 1
        try:
            k_branch = classify_Bk(g, x, rs)
        except ThresholdCollision:
            part.samples -= 1
            closed.samples -= 1
            continue
        except ValueError as exc:
            part.failures += 1
            closed.failures += 1
            part.detail = str(exc)
            continue
        if k_branch != k_iter:
            part.failures += 1
            part.detail = f"branch {k_branch} vs return time {k_iter}"
        y_closed = branch_map(g, x, k_branch)
        err = float(np.abs(y_closed - y_iter).max())
        closed.max_error = max(closed.max_error, err)
        closed.failures += err > 1e-10
    return part, closed


def check_fixed_points(g, rs, kmax=50) -> Tuple[CheckResult, CheckResult]:
    resid = CheckResult("branch-fixed-point-residual", g.alpha, g.lam)
    member = CheckResult("fixed-point-membership", g.alpha, g.lam)
    for k in range(1, kmax + 1):
        w = branch_fixed_point(g.lam, k)
        err = float(np.abs(branch_map(g, w, k) - w).max())
        resid.samples += 1
        resid.max_error = max(resid.max_error, err)
        resid.failures += err > 1e-12
        try:
            geometric = classify_branch(g, w) is Branch.B and classify_Bk(g, w, rs) == k
        except (GammaCollision, ThresholdCollision):
            continue
        except ValueError:
            geometric = False
        member.samples += 1
        if geometric != in_region_Rk(g, k):
            member.failures += 1
            member.detail = f"k={k}: geometric {geometric}, analytic {in_region_Rk(g, k)}"
    return resid, member


def check_itineraries(g, rng, n, rs, length=50) -> CheckResult:
    res = CheckResult("itinerary-monotonicity", g.alpha, g.lam)
    for x in sample_B(g, rng, n):
        try:
            it = itinerary(g, x, length, rs)
        except (GammaCollision, ThresholdCollision):
            continue
        res.samples += 1
        violations = check_monotonicity(it.entries, rs.m)
        if violations:
            res.failures += 1
            res.detail = f"clause {violations[0].clause} at index {violations[0].index}: {it.entries[:12]}"
    return res


def check_global_convergence(g, rng, n, conv_tol=1e-8, iter_budget=20000) -> CheckResult:
    res = CheckResult("global-convergence", g.alpha, g.lam)
    report = enumerate_attractor(g)
    X = _regular_points(g, rng, n)
    labels = classify_basins(g, X, report, iter_budget=iter_budget, conv_tol=conv_tol)
    res.samples = len(labels)
    res.failures = int(np.sum(labels <= 0))
    if res.failures:
        res.detail = f"{res.failures} starts did not reach an enumerated orbit"
    return res


def run_verify(
    samples: int = 1000,
    seed: int = 0,
    grid: Optional[Sequence[Tuple[float, float]]] = None,
    mutate: Optional[Callable[[ReturnStructure], ReturnStructure]] = None,
) -> VerifyReport:
    """Run every check at every grid point.

    ``mutate`` rewrites the return structure before it is used by the
    branch checks; it exists so tests can confirm a wrong threshold is caught.
    """
    grid = list(DEFAULT_GRID if grid is None else grid)
    rng = np.random.default_rng(seed)
    report = VerifyReport(seed=seed, samples=samples, grid=grid)
    for alpha, lam in grid:
        g = GameParams.from_alpha(alpha, lam)
        rs = return_structure(g)
        if mutate is not None:
            rs = mutate(rs)
        report.checks.append(check_equivariance(g, rng, samples))
        report.checks.append(check_semiconjugacy(g, rng, samples))
        report.checks.extend(check_return_branches(g, rng, samples, rs))
        report.checks.extend(check_fixed_points(g, rs))
        report.checks.append(check_itineraries(g, rng, max(1, samples // 10), rs))
        report.checks.append(check_global_convergence(g, rng, samples))
    return report


def shift_thresholds(offset: float) -> Callable[[ReturnStructure], ReturnStructure]:
    """A mutation moving every b_k by ``-offset``."""
    return lambda rs: replace(rs, C_al=rs.C_al + offset)
