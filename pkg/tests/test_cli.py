import json

import pytest

from rpsbr.attractor import bifurcation_points_sym
from rpsbr.cli import EXIT_BOUNDARY, EXIT_GAMMA, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from rpsbr.scan import read_bifurcation_csv, read_ppm


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_orbit_prints_n_plus_one_rows(capsys):
    code, out, _ = run(capsys, "orbit", "--alpha", "1", "--lambda", "0.8", "--x0", "0.8,0.2,0", "--steps", "7")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].startswith("# alpha=1 lambda=0.8")
    assert lines[1] == "n,x1,x2,x3,region"
    assert len(lines) == 2 + 8
    # full precision
    assert lines[3].split(",")[1] == format(0.8 * 0.8, ".17g")


def test_orbit_json_and_epsilon(capsys):
    code, out, _ = run(capsys, "orbit", "--a", "2", "--b", "4", "--epsilon", "0.25",
                       "--x0", "0.7,0.3,0", "--steps", "3", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["params"]["alpha"] == 0.5
    assert data["params"]["lambda"] == 0.75
    assert len(data["points"]) == 4


def test_orbit_on_gamma_names_the_tie(capsys):
    code, _, err = run(capsys, "orbit", "--alpha", "1", "--lambda", "0.8", "--x0", "0.6666666666666666,0,0.3333333333333334")
    assert code == EXIT_GAMMA
    assert "Rock" in err and "Paper" in err


@pytest.mark.parametrize("argv", [
    ["orbit", "--alpha", "1", "--x0", "1,0,0"],
    ["orbit", "--alpha", "1", "--a", "1", "--b", "1", "--lambda", "0.5", "--x0", "1,0,0"],
    ["orbit", "--alpha", "1", "--lambda", "0.5", "--epsilon", "0.5", "--x0", "1,0,0"],
    ["orbit", "--alpha", "1", "--lambda", "1.5", "--x0", "1,0,0"],
    ["orbit", "--alpha", "1", "--lambda", "0.5", "--x0", "0.5,0.6,0"],
    ["orbit", "--a", "1", "--lambda", "0.5", "--x0", "1,0,0"],
    ["bifurcation", "--alpha", "1", "--lambda-min", "0.9", "--lambda-max", "0.1"],
    ["frobnicate"],
])
def test_bad_input_exit_code(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


def test_attractor_json(capsys):
    code, out, _ = run(capsys, "attractor", "--alpha", "0.5", "--lambda", "0.9")
    assert code == EXIT_OK
    data = json.loads(out)
    assert (data["head"], data["tail"], data["count"]) == (7, 9, 3)
    assert [o["period"] for o in data["orbits"]] == [21, 24, 27]
    assert len(data["orbits"][0]["points"]) == 21
    assert "shapley" in data


def test_attractor_on_boundary(capsys):
    lam = bifurcation_points_sym(1)
    code, out, _ = run(capsys, "attractor", "--alpha", "1", "--lambda", repr(lam))
    assert code == EXIT_BOUNDARY
    assert json.loads(out)["boundary"] is True


def test_bifurcation_csv(capsys, tmp_path):
    path = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bifurcation", "--alpha", "0.5", "--lambda-min", "0.9",
                     "--lambda-max", "0.999", "--points", "100", "--out", str(path))
    assert code == EXIT_OK
    scan = read_bifurcation_csv(path)
    assert len(scan.lambdas) == 100
    assert set(scan.counts) <= {2, 3, 4}


def test_basins_outputs(capsys, tmp_path):
    prefix = str(tmp_path / "fig")
    code, out, _ = run(capsys, "basins", "--alpha", "1", "--lambda", "0.8", "--resolution", "100", "--out", prefix)
    assert code == EXIT_OK
    assert "orbits=3" in out
    img = read_ppm(prefix + ".ppm")
    assert img.shape[1] == 100
    shares = [float(line.split(": ")[1]) for line in out.splitlines() if line.startswith("period")]
    assert sum(shares) == pytest.approx(1.0)


def test_basins_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "basins", "--alpha", "1", "--lambda", "0.8", "--resolution", "10",
                       "--out", str(tmp_path / "missing" / "x"))
    assert code == EXIT_IO
    assert "missing" in err
