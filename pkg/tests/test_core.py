import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpsbr.core import (
    NASH,
    GameParams,
    Region,
    as_strategy,
    best_response,
    classify_region,
    classify_region_batch,
    indifferent_strategies,
    iterate_T,
    payoff_matrix,
    sample_simplex,
    step_T,
    step_T_batch,
)
from rpsbr.exceptions import GammaCollision

simplex_points = st.tuples(
    st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0)
).filter(lambda t: sum(t) > 1e-3).map(lambda t: np.array(t) / sum(t))


class TestGameParams:
    def test_from_alpha_and_epsilon(self):
        g = GameParams.from_alpha(0.5, 0.9)
        assert g.alpha == 0.5 and g.b == 1.0
        assert g.epsilon == pytest.approx(0.1)
        h = GameParams.from_epsilon(3.0, 6.0, 0.1)
        assert h.alpha == 0.5
        assert h.lam == pytest.approx(0.9)

    @pytest.mark.parametrize("kw", [
        dict(a=0.0, b=1.0, lam=0.5),
        dict(a=1.0, b=-1.0, lam=0.5),
        dict(a=1.0, b=1.0, lam=1.0),
        dict(a=1.0, b=1.0, lam=0.0),
        dict(a=float("nan"), b=1.0, lam=0.5),
    ])
    def test_rejects_bad_parameters(self, kw):
        with pytest.raises(ValueError):
            GameParams(**kw)


def test_payoff_matrix_is_cyclic():
    g = GameParams(a=2.0, b=3.0, lam=0.5)
    A = payoff_matrix(g)
    np.testing.assert_array_equal(A, [[0, -3, 2], [2, 0, -3], [-3, 2, 0]])


def test_best_response_at_vertices():
    g = GameParams.from_alpha(1.0, 0.5)
    # against pure Rock, Paper wins
    assert best_response(g, [1, 0, 0]) == 1
    assert best_response(g, [0, 1, 0]) == 2
    assert best_response(g, [0, 0, 1]) == 0
    assert best_response(g, NASH) is None


def test_region_agrees_with_best_response(game, rng):
    X = sample_simplex(rng, 2000)
    labels = classify_region_batch(game, X)
    for x, lab in zip(X, labels):
        br = best_response(game, x)
        if lab == 0:
            continue
        # R_i answers with e_{i+1}
        assert br == int(lab) % 3
        assert classify_region(game, x) == lab


def test_gamma_points_are_reported():
    g = GameParams.from_alpha(1.0, 0.8)
    with pytest.raises(GammaCollision) as info:
        step_T(g, NASH)
    assert info.value.point is not None
    assert indifferent_strategies(g, NASH) == [0, 1, 2]
    # Rock and Paper both earn 1/3 here, Scissors -2/3
    x = np.array([2 / 3, 0.0, 1 / 3])
    assert sorted(indifferent_strategies(g, x)) == [0, 1]


def test_step_T_formula():
    g = GameParams.from_alpha(2.0, 0.7)
    x = np.array([0.8, 0.2, 0.0])
    assert classify_region(g, x) is Region.R1
    np.testing.assert_allclose(step_T(g, x), 0.7 * x + 0.3 * np.array([0, 1, 0]), atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(x=simplex_points, alpha=st.floats(0.1, 5.0), lam=st.floats(0.05, 0.99))
def test_step_stays_on_simplex(x, alpha, lam):
    g = GameParams.from_alpha(alpha, lam)
    if classify_region(g, x) is Region.GAMMA:
        return
    y = step_T(g, x)
    assert y.min() >= 0.0
    assert abs(y.sum() - 1.0) < 1e-14


def test_batch_matches_scalar(game, rng):
    X = sample_simplex(rng, 500)
    Y, labels = step_T_batch(game, X)
    for x, y, lab in zip(X, Y, labels):
        if lab == 0:
            np.testing.assert_array_equal(y, x)
        else:
            np.testing.assert_allclose(y, step_T(game, x), atol=1e-15)


def test_iterate_length_and_gamma_stop():
    g = GameParams.from_alpha(1.0, 0.8)
    traj = iterate_T(g, [0.8, 0.2, 0.0], 10)
    assert len(traj) == 11 and not traj.hit_gamma
    assert traj.as_array().shape == (11, 3)
    stuck = iterate_T(g, NASH, 10)
    assert stuck.hit_gamma and len(stuck) == 1


def test_as_strategy_validation():
    with pytest.raises(ValueError):
        as_strategy([0.5, 0.5])
    with pytest.raises(ValueError):
        as_strategy([0.5, 0.6, 0.0])
    with pytest.raises(ValueError):
        as_strategy([1.1, -0.1, 0.0])
