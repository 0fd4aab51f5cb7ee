"""Parameter sweeps, basin rasters and their CSV / PPM output."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from .attractor import AttractorReport, bisect, enumerate_attractor, head_tail_count, r_root
from .core import GameParams, step_T_batch

UNRESOLVED = -1
GAMMA_HIT = -2
OUTSIDE = 0

BIFURCATION_HEADER = ["alpha", "lambda", "head", "tail", "count", "boundary"]
RASTER_HEADER = ["i", "j", "x1", "x2", "x3", "label", "period"]

# period/3 mod 8 -> colour
PALETTE = [
    (230, 25, 75),
    (60, 180, 75),
    (0, 130, 200),
    (245, 130, 48),
    (145, 30, 180),
    (70, 240, 240),
    (240, 50, 230),
    (210, 245, 60),
]
OUTSIDE_COLOR = (255, 255, 255)
UNRESOLVED_COLOR = (0, 0, 0)
GAMMA_COLOR = (128, 128, 128)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


@dataclass
class BifurcationScan:
    alpha: float
    lambdas: List[float] = field(default_factory=list)
    heads: List[int] = field(default_factory=list)
    tails: List[int] = field(default_factory=list)
    counts: List[int] = field(default_factory=list)
    boundary_flags: List[bool] = field(default_factory=list)


def bifurcation_sweep(alpha: float, lambda_grid: Sequence[float]) -> BifurcationScan:
    scan = BifurcationScan(float(alpha))
    for lam in lambda_grid:
        ht = head_tail_count(GameParams.from_alpha(alpha, float(lam)))
        scan.lambdas.append(float(lam))
        scan.heads.append(ht.head)
        scan.tails.append(ht.tail)
        scan.counts.append(ht.count)
        scan.boundary_flags.append(ht.boundary)
    return scan


def count_breakpoints(alpha: float, lo: float, hi: float) -> List[float]:
    """All lam in (lo, hi) where the head or tail function jumps.

    The head jumps where lam**n = alpha and the tail where r(lam) = lam**n;
    between consecutive breakpoints the orbit count is constant.
    """
    if not 0.0 < lo < hi < 1.0:
        raise ValueError(f"need 0 < lo < hi < 1, got lo={lo}, hi={hi}")
    points = []
    if alpha < 1.0:
        n_lo = math.log(alpha) / math.log(lo)
        n_hi = math.log(alpha) / math.log(hi)
        for n in range(max(1, math.ceil(n_lo)), math.floor(n_hi) + 1):
            lam = alpha ** (1.0 / n)
            if lo < lam < hi:
                points.append(lam)

    def log_ratio(lam):
        return math.log(r_root(GameParams.from_alpha(alpha, lam))) / math.log(lam)

    z_lo, z_hi = log_ratio(lo), log_ratio(hi)
    for n in range(math.ceil(min(z_lo, z_hi)), math.floor(max(z_lo, z_hi)) + 1):
        try:
            lam = bisect(lambda v: log_ratio(v) - n, lo, hi)
        except ValueError:
            continue
        if lo < lam < hi:
            points.append(lam)
    return sorted(points)


def first_lambda_with_count(alpha: float, count: int, lo: float, hi: float) -> Optional[float]:
    """Smallest lam in [lo, hi] with exactly ``count`` attracting orbits.

    Checks ``lo`` and each interval between consecutive breakpoints, so
    windows narrower than any sampling grid are not missed. Returns the
    breakpoint opening the first such interval (or ``lo``), None if absent.
    """
    edges = [lo] + count_breakpoints(alpha, lo, hi) + [hi]
    for left, right in zip(edges[:-1], edges[1:]):
        probe = left if left == lo else 0.5 * (left + right)
        if head_tail_count(GameParams.from_alpha(alpha, probe)).count == count:
            return left
    return None


@dataclass
class BasinRaster:
    """Per-pixel basin labels on a triangular rendering of the simplex.

    ``labels`` has shape (height, resolution). Pixels whose centre falls
    outside the simplex are OUTSIDE; others hold the index k of the orbit
    they converge to (period 3k), UNRESOLVED, or GAMMA_HIT.
    """

    resolution: int
    labels: np.ndarray
    points: np.ndarray  # (height, resolution, 3) barycentric pixel centres
    params: GameParams
    iter_budget: int
    conv_tol: float
    periods: Dict[int, int] = field(default_factory=dict)

    @property
    def inside(self) -> np.ndarray:
        return self.labels != OUTSIDE

    def distinct_orbits(self) -> List[int]:
        return sorted(int(k) for k in np.unique(self.labels) if k > 0)

    def unresolved_fraction(self) -> float:
        inside = self.labels[self.inside]
        if inside.size == 0:
            return 0.0
        return float(np.mean((inside == UNRESOLVED) | (inside == GAMMA_HIT)))

    def shares(self) -> Dict[int, float]:
        inside = self.labels[self.inside]
        return {k: float(np.mean(inside == k)) for k in self.distinct_orbits()}


def canvas_shape(resolution: int) -> Tuple[int, int]:
    """(height, width) of the raster for ``resolution`` pixels per edge."""
    return math.ceil(resolution * math.sqrt(3.0) / 2.0), resolution


def pixel_barycentric(resolution: int) -> Tuple[np.ndarray, np.ndarray]:
    """Barycentric coordinates of all pixel centres and the inside mask.

    e_1 (Rock) is bottom left, e_2 (Paper) bottom right, e_3 (Scissors) top.
    """
    height, width = canvas_shape(resolution)
    tri_h = resolution * math.sqrt(3.0) / 2.0
    jj, ii = np.meshgrid(np.arange(width) + 0.5, np.arange(height) + 0.5)
    up = height - ii  # distance from the bottom edge
    x3 = up / tri_h
    x2 = (jj - 0.5 * resolution * x3) / resolution
    x1 = 1.0 - x2 - x3
    bary = np.stack([x1, x2, x3], axis=-1)
    inside = (x1 > 0) & (x2 > 0) & (x3 > 0)
    return bary, inside


def _orbit_table(report: AttractorReport):
    pts = report.all_points()
    owner = np.concatenate([np.full(orb.period, orb.k) for orb in report.orbits]) if report.orbits else np.empty(0, int)
    return pts, owner


def _classify_chunk(g, X, tree, owner, iter_budget, conv_tol, check_every):
    n = len(X)
    labels = np.full(n, UNRESOLVED, dtype=np.int64)
    active = np.arange(n)
    cur = X.copy()
    for step in range(iter_budget + 1):
        if step % check_every == 0 or step == iter_budget:
            # orbits are separated by far more than conv_tol, so the nearest
            # orbit point decides the label
            dist, idx = tree.query(cur, k=1, distance_upper_bound=conv_tol)
            hit = np.isfinite(dist)
            if hit.any():
                labels[active[hit]] = owner[idx[hit]]
                keep = ~hit
                active, cur = active[keep], cur[keep]
        if step == iter_budget or len(active) == 0:
            break
        cur, regions = step_T_batch(g, cur)
        gamma = regions == 0
        if gamma.any():
            labels[active[gamma]] = GAMMA_HIT
            keep = ~gamma
            active, cur = active[keep], cur[keep]
    return labels


def classify_basins(
    g: GameParams,
    X,
    report: Optional[AttractorReport] = None,
    iter_budget: int = 5000,
    conv_tol: float = 1e-6,
    check_every: int = 8,
    chunk_size: int = 4096,
    n_jobs: int = 1,
) -> np.ndarray:
    """Orbit index each start converges to, or UNRESOLVED / GAMMA_HIT.

    A start is assigned to the orbit that one of its iterates first comes
    within ``conv_tol`` of (checked every ``check_every`` steps). Chunks are independent, so the
    result does not depend on ``n_jobs``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if report is None:
        report = enumerate_attractor(g)
    pts, owner = _orbit_table(report)
    if len(pts) == 0:
        return np.full(len(X), UNRESOLVED, dtype=np.int64)
    tree = cKDTree(pts)
    chunks = [X[i:i + chunk_size] for i in range(0, len(X), chunk_size)]
    if not chunks:
        return np.empty(0, dtype=np.int64)

    def work(chunk):
        return _classify_chunk(g, chunk, tree, owner, iter_budget, conv_tol, check_every)

    if n_jobs == 1 or len(chunks) == 1:
        results = [work(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
            results = list(pool.map(work, chunks))
    return np.concatenate(results)


def basin_raster(
    g: GameParams,
    resolution: int = 300,
    iter_budget: int = 5000,
    conv_tol: float = 1e-6,
    report: Optional[AttractorReport] = None,
    n_jobs: int = 1,
) -> BasinRaster:
    if resolution < 1:
        raise ValueError(f"resolution must be positive, got {resolution}")
    if report is None:
        report = enumerate_attractor(g)
    bary, inside = pixel_barycentric(resolution)
    labels = np.full(inside.shape, OUTSIDE, dtype=np.int64)
    labels[inside] = classify_basins(
        g, bary[inside], report, iter_budget=iter_budget, conv_tol=conv_tol, n_jobs=n_jobs
    )
    periods = {orb.k: orb.period for orb in report.orbits}
    return BasinRaster(resolution, labels, bary, g, iter_budget, conv_tol, periods)


def write_csv(obj: Union[BifurcationScan, BasinRaster], path) -> None:
    """Write a sweep or a raster as CSV (header row, 17 significant digits)."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if isinstance(obj, BifurcationScan):
                writer.writerow(BIFURCATION_HEADER)
                for lam, h, t, n, flag in zip(obj.lambdas, obj.heads, obj.tails, obj.counts, obj.boundary_flags):
                    writer.writerow([_fmt(obj.alpha), _fmt(lam), h, t, n, int(flag)])
            elif isinstance(obj, BasinRaster):
                writer.writerow(RASTER_HEADER)
                for i, j in zip(*np.nonzero(obj.inside)):
                    label = int(obj.labels[i, j])
                    x = obj.points[i, j]
                    writer.writerow([i, j, _fmt(x[0]), _fmt(x[1]), _fmt(x[2]), label, obj.periods.get(label, 0)])
            else:
                raise TypeError(f"cannot write {type(obj).__name__} as CSV")
    except OSError as exc:
        raise OSError(f"could not write CSV to {path}: {exc}") from exc


def read_bifurcation_csv(path) -> BifurcationScan:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    scan = BifurcationScan(float(rows[0]["alpha"]) if rows else math.nan)
    for row in rows:
        scan.lambdas.append(float(row["lambda"]))
        scan.heads.append(int(row["head"]))
        scan.tails.append(int(row["tail"]))
        scan.counts.append(int(row["count"]))
        scan.boundary_flags.append(bool(int(row["boundary"])))
    return scan


def read_raster_csv(path) -> List[dict]:
    with open(path, newline="") as fh:
        return [
            {
                "i": int(r["i"]), "j": int(r["j"]),
                "x": (float(r["x1"]), float(r["x2"]), float(r["x3"])),
                "label": int(r["label"]), "period": int(r["period"]),
            }
            for r in csv.DictReader(fh)
        ]


def label_color(label: int, periods: Dict[int, int]):
    if label == OUTSIDE:
        return OUTSIDE_COLOR
    if label == UNRESOLVED:
        return UNRESOLVED_COLOR
    if label == GAMMA_HIT:
        return GAMMA_COLOR
    period = periods.get(label, 3 * label)
    return PALETTE[(period // 3) % len(PALETTE)]


def render_rgb(raster: BasinRaster, palette=None) -> np.ndarray:
    pal = PALETTE if palette is None else palette
    img = np.empty(raster.labels.shape + (3,), dtype=np.uint8)
    for label in np.unique(raster.labels):
        if label > 0:
            color = pal[(raster.periods.get(int(label), 3 * int(label)) // 3) % len(pal)]
        else:
            color = label_color(int(label), raster.periods)
        img[raster.labels == label] = color
    return img


def write_ppm(raster: BasinRaster, path, palette=None) -> None:
    """Binary PPM (P6, maxval 255), one pixel per raster cell."""
    img = render_rgb(raster, palette)
    height, width = img.shape[:2]
    try:
        with open(path, "wb") as fh:
            fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
            fh.write(img.tobytes())
    except OSError as exc:
        raise OSError(f"could not write PPM to {path}: {exc}") from exc


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    # header as written by write_ppm: three newline-terminated lines
    magic, dims, maxval, pixels = data.split(b"\n", 3)
    if magic != b"P6":
        raise ValueError(f"{path} is not a binary PPM")
    width, height = (int(v) for v in dims.split())
    if int(maxval) != 255:
        raise ValueError(f"unsupported maxval {int(maxval)}")
    return np.frombuffer(pixels[: width * height * 3], dtype=np.uint8).reshape(height, width, 3)
