import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from rpsbr import BestResponseDynamics
from rpsbr.core import GameParams, sample_simplex, step_T


def test_params_round_trip():
    est = BestResponseDynamics(alpha=0.5, lam=0.9, n_steps=3)
    p = est.get_params()
    assert p["alpha"] == 0.5 and p["lam"] == 0.9 and p["n_steps"] == 3
    est2 = clone(est).set_params(lam=0.8)
    assert est2.lam == 0.8 and est.lam == 0.9


def test_fit_attributes():
    est = BestResponseDynamics(alpha=1.0, lam=0.8).fit()
    assert (est.head_, est.tail_, est.n_orbits_) == (1, 3, 3)
    assert est.periods_ == [3, 6, 9]


@pytest.mark.parametrize("bad", [dict(alpha=-1.0), dict(lam=1.0), dict(lam=0.0), dict(alpha="x")])
def test_fit_rejects_bad_params(bad):
    with pytest.raises(ValueError):
        BestResponseDynamics(**bad).fit()


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        BestResponseDynamics().transform([[1.0, 0.0, 0.0]])


def test_transform_matches_step(rng):
    est = BestResponseDynamics(alpha=2.0, lam=0.7, n_steps=2).fit()
    g = GameParams.from_alpha(2.0, 0.7)
    X = sample_simplex(rng, 50)
    Y = est.transform(X)
    for x, y in zip(X, Y):
        np.testing.assert_allclose(y, step_T(g, step_T(g, x)), atol=1e-14)


def test_transform_marks_gamma_rows():
    est = BestResponseDynamics(alpha=1.0, lam=0.8).fit()
    Y = est.fit_transform([[1 / 3, 1 / 3, 1 / 3], [0.8, 0.2, 0.0]])
    assert np.isnan(Y[0]).all() and np.isfinite(Y[1]).all()


@pytest.mark.parametrize("X", [[[0.5, 0.5]], [[0.5, 0.6, 0.0]], [[-0.1, 0.6, 0.5]], [[np.nan, 0.5, 0.5]]])
def test_input_validation(X):
    est = BestResponseDynamics().fit()
    with pytest.raises(ValueError):
        est.transform(X)


def test_predict_periods(rng):
    est = BestResponseDynamics(alpha=0.5, lam=0.9).fit()
    X = sample_simplex(rng, 300)
    k = est.predict(X)
    assert set(np.unique(k)) <= {est.head_ + i for i in range(est.n_orbits_)} | {-2}
    np.testing.assert_array_equal(est.predict_period(X)[k > 0], 3 * k[k > 0])
