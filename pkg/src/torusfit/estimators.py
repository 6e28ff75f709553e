"""scikit-learn style density estimators over the functional core.

Each estimator accepts either an ``(n, 2)`` integer array of grid indices
``(x1, x2)`` or a :class:`~torusfit.inference.CountTable`.  ``score`` follows
the scikit-learn density convention: total log-likelihood of the data.

>>> from torusfit.datasets import load_dataset
>>> est = BGWGEstimator().fit(load_dataset("dataset2").table)
>>> round(est.aic_, 2)
892.96
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin
from sklearn.utils.validation import check_is_fitted

from . import baselines
from .distributions import pmf_table
from .errors import DomainError
from .inference import CountTable, FitOptions, fit_bgwg, fit_bwg, log_likelihood
from .sampling import sample_joint
from .torus import TorusGrid

__all__ = ["BWGEstimator", "BGWGEstimator", "BaselineEstimator"]


def _as_pairs(X, grid):
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != 2:
        raise DomainError(f"expected an (n, 2) array of grid indices, got shape {X.shape}")
    if not np.issubdtype(X.dtype, np.integer):
        if not np.all(np.isfinite(X)) or np.any(X != np.round(X)):
            raise DomainError("grid indices must be integers")
        X = X.astype(np.int64)
    if np.any(X < 0) or np.any(X[:, 0] >= grid.m1) or np.any(X[:, 1] >= grid.m2):
        raise DomainError(f"indices outside the {grid.m1}x{grid.m2} grid")
    return X


def _as_table(X, grid):
    if isinstance(X, CountTable):
        if X.grid != grid:
            raise DomainError("count table grid differs from the estimator grid")
        return X
    return CountTable.from_pairs(grid, _as_pairs(X, grid))


class _TorusDensity(DensityMixin, BaseEstimator):
    """Shared fit/score/sample plumbing; subclasses provide ``_fit_table``."""

    def _grid(self):
        return TorusGrid(self.m1, self.m2)

    def _options(self):
        return FitOptions(anchors=self.anchors, compute_se=self.compute_se)

    def fit(self, X, y=None):
        fit = self._fit_table(_as_table(X, self._grid()))
        self.fit_result_ = fit
        self.params_ = fit.params
        self.loglik_ = fit.loglik
        self.aic_ = fit.aic
        self.std_errors_ = dict(fit.std_errors)
        self.n_features_in_ = 2
        return self

    def pmf(self):
        """Fitted cell probabilities, shape ``(m1, m2)``."""
        check_is_fitted(self, "params_")
        if hasattr(self.params_, "table"):
            return self.params_.table().p
        return pmf_table(self.params_).p

    def score_samples(self, X):
        """Log probability of each pair."""
        X = _as_pairs(X, self._grid())
        with np.errstate(divide="ignore"):
            return np.log(self.pmf()[X[:, 0], X[:, 1]])

    def score(self, X, y=None):
        check_is_fitted(self, "params_")
        return log_likelihood(_as_table(X, self._grid()), self.params_)

    def aic(self, X=None):
        """AIC of the fit, or of the fitted model on new data ``X``."""
        check_is_fitted(self, "params_")
        if X is None:
            return self.aic_
        return 2 * self.fit_result_.n_params - 2 * self.score(X)

    def sample(self, n_samples=1, random_state=None):
        """Draw ``n_samples`` index pairs from the fitted model.

        ``random_state`` is anything :func:`numpy.random.default_rng` accepts.
        """
        check_is_fitted(self, "params_")
        p = self.pmf().reshape(-1)
        rng = np.random.default_rng(random_state)
        cells = rng.choice(p.size, size=int(n_samples), p=p)
        return np.column_stack(np.divmod(cells, self.m2))


class BWGEstimator(_TorusDensity):
    """Bivariate wrapped geometric model with integer locations."""

    def __init__(self, m1=16, m2=16, anchors=8, compute_se=True):
        self.m1 = m1
        self.m2 = m2
        self.anchors = anchors
        self.compute_se = compute_se

    def _fit_table(self, table):
        return fit_bwg(table, self._options())

    def sample(self, n_samples=1, random_state=None):
        check_is_fitted(self, "params_")
        rng = np.random.default_rng(random_state)
        return sample_joint(self.params_, int(n_samples), rng=rng).indices


class BGWGEstimator(BWGEstimator):
    """Generalised model with real-valued locations."""

    def _fit_table(self, table):
        return fit_bgwg(table, self._options())


class BaselineEstimator(_TorusDensity):
    """Discretised continuous baseline (``wrapped_cauchy``, ``vm_sine`` or ``vm_cosine``)."""

    def __init__(self, model="vm_sine", m1=16, m2=16, anchors=8, compute_se=True,
                 method="point", subdivisions=baselines.SUBDIVISIONS):
        self.model = model
        self.m1 = m1
        self.m2 = m2
        self.anchors = anchors
        self.compute_se = compute_se
        self.method = method
        self.subdivisions = subdivisions

    def _fit_table(self, table):
        return baselines.fit_baseline(table, self.model, self._options(),
                                      self.method, self.subdivisions)
