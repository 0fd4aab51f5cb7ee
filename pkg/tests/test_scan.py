import numpy as np
import pytest

from rpsbr.attractor import enumerate_attractor, head_tail_count
from rpsbr.core import GameParams, classify_region_batch, sample_simplex
from rpsbr.scan import (
    GAMMA_COLOR,
    GAMMA_HIT,
    OUTSIDE,
    OUTSIDE_COLOR,
    PALETTE,
    UNRESOLVED,
    basin_raster,
    bifurcation_sweep,
    canvas_shape,
    classify_basins,
    count_breakpoints,
    first_lambda_with_count,
    label_color,
    pixel_barycentric,
    read_bifurcation_csv,
    read_ppm,
    read_raster_csv,
    render_rgb,
    write_csv,
    write_ppm,
)


def test_sweep_matches_pointwise_counts():
    grid = np.linspace(0.5, 0.95, 25)
    scan = bifurcation_sweep(1.0, grid)
    for lam, c in zip(scan.lambdas, scan.counts):
        assert c == head_tail_count(GameParams.from_alpha(1.0, lam)).count


def test_breakpoints_bracket_count_changes():
    lo, hi = 0.6, 0.95
    bps = count_breakpoints(0.5, lo, hi)
    assert bps == sorted(bps)
    for bp in bps:
        left = head_tail_count(GameParams.from_alpha(0.5, bp - 1e-9))
        right = head_tail_count(GameParams.from_alpha(0.5, bp + 1e-9))
        assert (left.head, left.tail) != (right.head, right.tail)
    # between consecutive breakpoints head and tail are constant
    edges = [lo] + bps + [hi]
    for a, b in zip(edges, edges[1:]):
        mids = np.linspace(a, b, 7)[1:-1]
        vals = {head_tail_count(GameParams.from_alpha(0.5, m))[:2] for m in mids}
        assert len(vals) == 1


def test_first_lambda_with_count_is_first():
    lam = first_lambda_with_count(1.0, 4, 0.5, 0.99)
    assert head_tail_count(GameParams.from_alpha(1.0, lam + 1e-9)).count == 4
    grid = np.linspace(0.5, lam - 1e-9, 200)
    assert all(c != 4 for c in bifurcation_sweep(1.0, grid).counts)
    assert first_lambda_with_count(1.0, 40, 0.5, 0.6) is None


def test_pixel_grid_geometry():
    R = 40
    H, W = canvas_shape(R)
    assert W == R and H == int(np.ceil(R * np.sqrt(3) / 2))
    pts, inside = pixel_barycentric(R)
    assert pts.shape == (H, W, 3)
    assert inside.shape == (H, W)
    assert np.all(pts[inside] >= 0)
    np.testing.assert_allclose(pts[inside].sum(axis=1), 1.0)
    # bottom row is near the e1-e2 edge, the top near e3
    rows = [i for i in range(H) if inside[i].any()]
    assert pts[rows[-1]][inside[rows[-1]]][:, 2].max() < 0.05
    assert pts[rows[0]][inside[rows[0]]][:, 2].min() > 0.9


def test_basin_labels_are_shift_invariant(rng):
    g = GameParams.from_alpha(1.0, 0.8)
    rep = enumerate_attractor(g)
    X = sample_simplex(rng, 2000)
    X = X[classify_region_batch(g, X) > 0]
    a = classify_basins(g, X, rep)
    b = classify_basins(g, np.roll(X, -1, axis=1), rep)
    ok = (a > 0) & (b > 0)
    assert ok.mean() > 0.99
    np.testing.assert_array_equal(a[ok], b[ok])


def test_basins_deterministic_across_jobs(rng):
    g = GameParams.from_alpha(0.5, 0.9)
    rep = enumerate_attractor(g)
    X = sample_simplex(rng, 3000)
    a = classify_basins(g, X, rep, n_jobs=1, chunk_size=500)
    b = classify_basins(g, X, rep, n_jobs=4, chunk_size=500)
    np.testing.assert_array_equal(a, b)


def test_gamma_start_is_labelled():
    g = GameParams.from_alpha(1.0, 0.8)
    lab = classify_basins(g, np.full((1, 3), 1 / 3))
    assert lab[0] == GAMMA_HIT


def test_tiny_budget_leaves_points_unresolved(rng):
    g = GameParams.from_alpha(1.0, 0.8)
    X = sample_simplex(rng, 200)
    X = X[classify_region_batch(g, X) > 0]
    lab = classify_basins(g, X, iter_budget=1, conv_tol=1e-12)
    assert np.all(lab == UNRESOLVED)


@pytest.fixture(scope="module")
def small_raster():
    return basin_raster(GameParams.from_alpha(1.0, 0.8), resolution=60)


def test_raster_finds_every_orbit(small_raster):
    assert small_raster.distinct_orbits() == [1, 2, 3]
    assert small_raster.unresolved_fraction() == 0.0
    assert sum(small_raster.shares().values()) == pytest.approx(1.0)


def test_raster_csv_round_trip(small_raster, tmp_path):
    path = tmp_path / "r.csv"
    write_csv(small_raster, path)
    rows = read_raster_csv(path)
    assert len(rows) == small_raster.inside.sum()
    for r in rows[:: max(1, len(rows) // 50)]:
        i, j = r["i"], r["j"]
        assert r["label"] == small_raster.labels[i, j]
        assert r["period"] == 3 * r["label"]
        np.testing.assert_array_equal(r["x"], small_raster.points[i, j])


def test_bifurcation_csv_round_trip(tmp_path):
    scan = bifurcation_sweep(0.5, np.linspace(0.9, 0.999, 50))
    path = tmp_path / "b.csv"
    write_csv(scan, path)
    back = read_bifurcation_csv(path)
    assert back.lambdas == scan.lambdas
    assert back.counts == scan.counts
    assert back.boundary_flags == scan.boundary_flags


def test_ppm_round_trip(small_raster, tmp_path):
    path = tmp_path / "r.ppm"
    write_ppm(small_raster, path)
    img = read_ppm(path)
    H, W = small_raster.labels.shape
    assert img.shape == (H, W, 3)
    np.testing.assert_array_equal(img, render_rgb(small_raster))
    assert tuple(img[0, 0]) == OUTSIDE_COLOR
    assert path.read_bytes().startswith(f"P6\n{W} {H}\n255\n".encode())


def test_label_colors():
    periods = {1: 3, 2: 6}
    assert label_color(OUTSIDE, periods) == OUTSIDE_COLOR
    assert label_color(GAMMA_HIT, periods) == GAMMA_COLOR
    assert label_color(2, periods) == PALETTE[2 % len(PALETTE)]


def test_write_to_missing_directory(small_raster, tmp_path):
    with pytest.raises(OSError):
        write_csv(small_raster, tmp_path / "nope" / "x.csv")
