"""scikit-learn style front end.

``fit`` computes the attractor for the configured game, ``transform``
advances strategies by ``n_steps`` applications of T, and ``predict``
returns the index k of the periodic orbit (period 3k) each strategy is
attracted to.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_open_unit, check_positive, check_strategies
from .attractor import enumerate_attractor
from .core import DEFAULT_GAMMA_TOL, GameParams, step_T_batch
from .scan import classify_basins


class BestResponseDynamics(TransformerMixin, BaseEstimator):
    """Discretized best-response dynamics of Rock-Paper-Scissors.

    Parameters
    ----------
    alpha : float
        Payoff ratio a / b.
    lam : float
        Contraction factor in (0, 1); the step size is 1 - lam.
    n_steps : int
        Number of map applications performed by ``transform``.
    iter_budget, conv_tol : int, float
        Iteration budget and convergence radius used by ``predict``.
    gamma_tol : float
        Margin below which a point counts as lying on an indifference set.

    Attributes
    ----------
    params_ : GameParams
    attractor_ : AttractorReport
    head_, tail_, n_orbits_ : int
    periods_ : list of int
    """

    def __init__(self, alpha=1.0, lam=0.8, n_steps=1, iter_budget=5000, conv_tol=1e-6,
                 gamma_tol=DEFAULT_GAMMA_TOL, n_jobs=1):
        self.alpha = alpha
        self.lam = lam
        self.n_steps = n_steps
        self.iter_budget = iter_budget
        self.conv_tol = conv_tol
        self.gamma_tol = gamma_tol
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        alpha = check_positive(self.alpha, "alpha")
        lam = check_open_unit(self.lam, "lam")
        if X is not None:
            check_strategies(X)
        self.params_ = GameParams.from_alpha(alpha, lam, gamma_tol=self.gamma_tol)
        self.attractor_ = enumerate_attractor(self.params_)
        self.head_ = self.attractor_.head
        self.tail_ = self.attractor_.tail
        self.n_orbits_ = self.attractor_.count
        self.periods_ = self.attractor_.periods
        return self

    def transform(self, X):
        """Apply T ``n_steps`` times; rows that hit an indifference set become NaN."""
        check_is_fitted(self, "params_")
        X = check_strategies(X).copy()
        lost = np.zeros(len(X), dtype=bool)
        for _ in range(int(self.n_steps)):
            X, regions = step_T_batch(self.params_, X)
            lost |= regions == 0
        X[lost] = np.nan
        return X

    def predict(self, X):
        """Orbit index k for each row; -1 if unresolved, -2 if an indifference set was hit."""
        check_is_fitted(self, "params_")
        X = check_strategies(X)
        return classify_basins(self.params_, X, self.attractor_, iter_budget=self.iter_budget,
                               conv_tol=self.conv_tol, n_jobs=self.n_jobs)

    def predict_period(self, X):
        labels = self.predict(X)
        return np.where(labels > 0, 3 * labels, 0)
