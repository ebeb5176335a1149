"""scikit-learn style wrapper around the Lasso Newton solver."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, check_X_y, check_array

from .lasso import LassoInstance, lasso_solve
from .solver_prox import ProxConfig


class NewtonLasso(RegressorMixin, BaseEstimator):
    """Lasso regression solved by the coderivative-based Newton method.

    Minimizes ``0.5 ||y - X w - c||^2 + alpha ||w||_1``.  Note that, unlike
    :class:`sklearn.linear_model.Lasso`, the squared loss is not divided by
    the number of samples.

    Parameters
    ----------
    alpha : float, default=1.0
        Weight of the l1 penalty.
    lam : float, default=1.0
        Proximal parameter of the Newton iteration.
    tol : float, default=1e-10
        Stopping tolerance on the Moreau gradient.
    max_iter : int, default=100
    fit_intercept : bool, default=True

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    intercept_ : float
    n_iter_ : int
    trace_ : SolveTrace
    """

    def __init__(self, alpha=1.0, lam=1.0, tol=1e-10, max_iter=100, fit_intercept=True):
        self.alpha = alpha
        self.lam = lam
        self.tol = tol
        self.max_iter = max_iter
        self.fit_intercept = fit_intercept

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if self.fit_intercept:
            x_mean, y_mean = X.mean(axis=0), y.mean()
        else:
            x_mean, y_mean = np.zeros(X.shape[1]), 0.0
        inst = LassoInstance(X - x_mean, y - y_mean, self.alpha)
        cfg = ProxConfig(lam=self.lam, tol=self.tol, max_iter=self.max_iter)
        self.trace_ = lasso_solve(inst, np.zeros(X.shape[1]), cfg)
        self.coef_ = self.trace_.extras["minimizer"]
        self.intercept_ = float(y_mean - x_mean @ self.coef_)
        self.n_iter_ = self.trace_.n_iter
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ self.coef_ + self.intercept_
