"""First-return map of f to B.

A point of B spends one step on the B branch and then ``k - 1`` steps on the
A branch before coming back; ``k`` is the return time n(x). The return
branches are the strips

    B_k = {x in B : b_{k-1} < S^2(u).x < b_k},
    b_k = alpha lam^{-k-1} - C_al,
    C_al = (alpha - 1 + (1 - lam)(alpha + 2)) / lam,

and on B_k the return map is the affine contraction

    P_k(x) = lam^k S(x) + lam^{k-1} (1 - lam) e_1 + (1 - lam^{k-1}) e_2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .core import GameParams, sample_simplex
from .exceptions import BoundViolation, GammaCollision, ThresholdCollision
from .symmetry import Branch, branch_mask_B, branch_threshold, classify_branch, cyclic_shift, f_affine


@dataclass(frozen=True)
class ReturnStructure:
    """Return-time bounds, the monotonicity index ``m`` and ``C_al``.

    ``C`` is the number of A-steps that suffices to bring any point of A
    (worst case e_1) to the closure of B. A point of B first takes one
    B-step, so its return time is bounded by ``max_return`` (= C + 1 unless
    C was clipped to 1). ``b(k)`` gives the branch thresholds; ``m`` is the
    least k with ``lam**k < alpha``.
    """

    alpha: float
    lam: float
    C: int
    m: int
    C_al: float
    max_return: int

    def b(self, k: int) -> float:
        e = (-k - 1) * math.log(self.lam)
        if e > 700.0:
            return math.inf
        return self.alpha * math.exp(e) - self.C_al

    def branch_index(self, s: float) -> int:
        """Candidate k with b_{k-1} < s < b_k, from a logarithm (may be off by one)."""
        z = s + self.C_al
        if z <= 0:
            return 0
        return int(math.floor(math.log(z / self.alpha) / -math.log(self.lam)))


def return_bound(alpha: float, lam: float) -> int:
    return max(1, math.ceil(-1.0 + math.log(alpha / (2.0 * alpha + 1.0)) / math.log(lam)))


def max_return_time(alpha: float, lam: float) -> int:
    return max(1, math.ceil(math.log(alpha / (2.0 * alpha + 1.0)) / math.log(lam)))


def monotone_index(alpha: float, lam: float) -> int:
    """m = min{k >= 1 : lam**k < alpha}."""
    if alpha >= 1.0:
        return 1
    m = 1 + max(0, math.floor(math.log(alpha) / math.log(lam)))
    # guard the floor against rounding at exact powers
    while lam ** m >= alpha:
        m += 1
    while m > 1 and lam ** (m - 1) < alpha:
        m -= 1
    return m


def return_structure(g: GameParams) -> ReturnStructure:
    alpha, lam = g.alpha, g.lam
    C_al = (alpha - 1.0 + (1.0 - lam) * (alpha + 2.0)) / lam
    return ReturnStructure(
        alpha, lam, return_bound(alpha, lam), monotone_index(alpha, lam), C_al, max_return_time(alpha, lam)
    )


def s2u_dot(g: GameParams, x) -> float:
    """S^2(u).x with S^2(u) = (0, alpha + 2, 1 - alpha)."""
    alpha = g.alpha
    return (alpha + 2.0) * float(x[1]) + (1.0 - alpha) * float(x[2])


def _require_B(g: GameParams, x):
    branch = classify_branch(g, x)
    if branch is Branch.GAMMA1:
        raise GammaCollision(f"point {np.asarray(x).tolist()} lies on Gamma1", point=x)
    if branch is not Branch.B:
        raise ValueError(f"point {np.asarray(x).tolist()} is not in B")


def return_time(g: GameParams, x, rs: Optional[ReturnStructure] = None) -> int:
    """First k >= 1 with f^k(x) back in B, by direct iteration of f."""
    rs = rs or return_structure(g)
    _require_B(g, x)
    y = f_affine(g, x, Branch.B)
    k = 1
    while True:
        branch = classify_branch(g, y)
        if branch is Branch.B:
            return k
        if branch is Branch.GAMMA1:
            raise GammaCollision(f"f-orbit hits Gamma1 after {k} steps", point=y)
        if k >= rs.max_return:
            raise BoundViolation(
                f"return time exceeds bound {rs.max_return} at alpha={g.alpha}, lam={g.lam}"
            )
        y = f_affine(g, y, Branch.A)
        k += 1


def classify_Bk(g: GameParams, x, rs: Optional[ReturnStructure] = None) -> int:
    """Index k of the return branch containing ``x`` (x in B)."""
    rs = rs or return_structure(g)
    s = s2u_dot(g, x)
    k = rs.branch_index(s)
    for cand in (k, k - 1, k + 1):
        if cand >= 1 and rs.b(cand - 1) <= s <= rs.b(cand):
            k = cand
            break
    else:
        raise ValueError(f"point {np.asarray(x).tolist()} has S^2(u).x={s!r} below b_0; not in B")
    tol = g.gamma_tol
    lo, hi = rs.b(k - 1), rs.b(k)
    if s - lo <= tol or hi - s <= tol:
        raise ThresholdCollision(f"S^2(u).x={s!r} is within {tol} of a threshold of branch {k}", point=x)
    return k


def branch_map(g: GameParams, x, k: int) -> np.ndarray:
    """The affine extension P_k evaluated at ``x`` (any point of the plane)."""
    lam = g.lam
    lk1 = lam ** (k - 1)
    y = (lam ** k) * cyclic_shift(x)
    y[0] += lk1 * (1.0 - lam)
    y[1] += 1.0 - lk1
    return y


def poincare_step(g: GameParams, x, rs: Optional[ReturnStructure] = None) -> Tuple[np.ndarray, int]:
    """Closed-form return map: ``(P(x), k)`` for x in B_k."""
    _require_B(g, x)
    k = classify_Bk(g, x, rs)
    y = branch_map(g, x, k)
    return y / y.sum(), k


def poincare_by_iteration(g: GameParams, x, rs: Optional[ReturnStructure] = None) -> Tuple[np.ndarray, int]:
    """Return map by composing f until the orbit is back in B."""
    k = return_time(g, x, rs)
    y = f_affine(g, x, Branch.B)
    for _ in range(k - 1):
        y = f_affine(g, y, Branch.A)
    return y, k


def branch_fixed_point(lam: float, k: int) -> np.ndarray:
    """Closed-form fixed point w_k of the extended branch map P_k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    log_lam = math.log(lam)
    one_minus_lk = -math.expm1(k * log_lam)
    one_minus_l3k = -math.expm1(3 * k * log_lam)
    x1 = lam ** (k - 1) * one_minus_lk
    x2 = -math.expm1((k - 1) * log_lam) + lam ** (3 * k - 1) * (1.0 - lam)
    x3 = lam ** (2 * k - 1) * one_minus_lk
    return np.array([x1, x2, x3]) / one_minus_l3k


def _plane_distance(v: np.ndarray, c: float, x: np.ndarray) -> float:
    """Distance inside the plane sum(x) = 1 from ``x`` to {v.x = c}."""
    vp = v - v.mean()
    return abs(float(v @ x) - c) / float(np.linalg.norm(vp))


def stability_radius(g: GameParams, k: int, rs: Optional[ReturnStructure] = None) -> float:
    """Radius of the largest disc about w_k contained in B_k.

    P_k rotates by a third of a turn about w_k and contracts by lam^k, so a
    point of B_k closer to w_k than this radius never leaves B_k. Returns 0
    when w_k is not inside B_k.
    """
    rs = rs or return_structure(g)
    alpha = g.alpha
    w = branch_fixed_point(g.lam, k)
    u = np.array([alpha + 2.0, 1.0 - alpha, 0.0])
    su = cyclic_shift(u)
    s2u = cyclic_shift(u, 2)
    thr = branch_threshold(g)
    lo, hi = rs.b(k - 1), rs.b(k)
    inside = (u @ w > 1.0 and u @ w < thr and su @ w < 1.0 and lo < s2u @ w < hi)
    if not inside:
        return 0.0
    bounds = [(u, 1.0), (u, thr), (su, 1.0), (s2u, lo)]
    if math.isfinite(hi):
        bounds.append((s2u, hi))
    return min(_plane_distance(v, c, w) for v, c in bounds)


@dataclass
class Itinerary:
    entries: List[int] = field(default_factory=list)
    stabilized_at: Optional[int] = None
    stabilized_value: Optional[int] = None
    final_point: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.entries)


def itinerary(g: GameParams, x, max_steps: int, rs: Optional[ReturnStructure] = None) -> Itinerary:
    """Return times ``n(P^j(x))`` for ``j < max_steps``.

    Stabilization is recorded at the first index whose point sits inside the
    invariant disc of :func:`stability_radius` around the branch fixed point,
    which certifies that all later entries repeat the same value.
    """
    rs = rs or return_structure(g)
    it = Itinerary()
    radii: Dict[int, float] = {}
    y = np.asarray(x, dtype=float)
    for j in range(max_steps):
        try:
            y_next, k = poincare_step(g, y, rs)
        except (GammaCollision, ThresholdCollision) as exc:
            exc.partial = it
            raise
        it.entries.append(k)
        if it.stabilized_at is None:
            if k not in radii:
                radii[k] = stability_radius(g, k, rs)
            if np.linalg.norm(y - branch_fixed_point(g.lam, k)) < radii[k]:
                it.stabilized_at = j
                it.stabilized_value = k
        y = y_next
    it.final_point = y
    return it


class Violation(NamedTuple):
    clause: int
    index: int


def check_monotonicity(entries, m: int) -> List[Violation]:
    """Check the three monotonicity clauses of return-time itineraries.

    1. i_k >= m implies i_{k+j} >= m for all j >= 0;
    2. i_k >= m and i_{k+1} <= i_k imply i_{k+2} <= i_{k+1};
    3. i_{k+1} < m and i_{k+1} >= i_k imply i_{k+2} >= i_{k+1}.
    """
    seq = list(getattr(entries, "entries", entries))
    out: List[Violation] = []
    first_high = next((k for k, v in enumerate(seq) if v >= m), None)
    if first_high is not None:
        for k in range(first_high, len(seq)):
            if seq[k] < m:
                out.append(Violation(1, first_high))
                break
    for k in range(len(seq) - 2):
        a, b, c = seq[k], seq[k + 1], seq[k + 2]
        if a >= m and b <= a and c > b:
            out.append(Violation(2, k))
        if b < m and b >= a and c < b:
            out.append(Violation(3, k))
    return out


def sample_B(g: GameParams, rng: np.random.Generator, n: int, batch: int = 4096) -> np.ndarray:
    """``n`` uniform random points of B, by rejection from the simplex."""
    out = []
    have = 0
    while have < n:
        X = sample_simplex(rng, batch)
        X = X[branch_mask_B(g, X)]
        out.append(X)
        have += len(X)
    return np.concatenate(out)[:n]
