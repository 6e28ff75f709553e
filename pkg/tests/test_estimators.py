import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from torusfit.datasets import load_dataset
from torusfit.distributions import BwgParams
from torusfit.errors import DomainError
from torusfit.estimators import BaselineEstimator, BGWGEstimator, BWGEstimator
from torusfit.inference import CountTable, fit_bwg, log_likelihood
from torusfit.sampling import sample_joint
from torusfit.torus import TorusGrid

GRID = TorusGrid(5, 6)
TRUTH = BwgParams(GRID, 2, 4, 0.3, 0.4, 0.6, -1)


@pytest.fixture(scope="module")
def pairs():
    return sample_joint(TRUTH, 400, seed=5).indices


class TestSklearnProtocol:
    @pytest.mark.parametrize("est", [BWGEstimator(m1=5, m2=6, anchors=3),
                                     BGWGEstimator(m1=5, m2=6),
                                     BaselineEstimator("vm_cosine", 5, 6, method="sector")])
    def test_clone_and_params(self, est):
        c = clone(est)
        assert c.get_params() == est.get_params()
        c.set_params(m1=7)
        assert c.m1 == 7 and est.m1 != 7

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            BWGEstimator().pmf()
        with pytest.raises(NotFittedError):
            BWGEstimator().sample(3)


class TestBWGEstimator:
    def test_pairs_and_table_agree(self, pairs):
        a = BWGEstimator(5, 6, compute_se=False).fit(pairs)
        table = CountTable.from_pairs(GRID, pairs)
        b = BWGEstimator(5, 6, compute_se=False).fit(table)
        assert a.params_ == b.params_
        assert a.loglik_ == fit_bwg(table).loglik
        assert a.aic_ == 2 * 6 - 2 * a.loglik_
        assert a.n_features_in_ == 2

    def test_score_is_total_loglik(self, pairs):
        est = BWGEstimator(5, 6).fit(pairs)
        assert est.score(pairs) == pytest.approx(est.loglik_, abs=1e-9)
        np.testing.assert_allclose(est.score_samples(pairs).sum(), est.loglik_, atol=1e-9)
        assert est.aic() == est.aic_
        assert est.aic(pairs[:50]) == pytest.approx(12 - 2 * est.score(pairs[:50]))
        assert set(est.std_errors_) == {"q", "s", "rho"}

    def test_sample(self, pairs):
        est = BWGEstimator(5, 6, compute_se=False).fit(pairs)
        a = est.sample(100, random_state=3)
        np.testing.assert_array_equal(a, est.sample(100, random_state=3))
        assert a.shape == (100, 2)
        assert a[:, 0].max() < 5 and a[:, 1].max() < 6

    def test_pmf_matches_params(self, pairs):
        est = BWGEstimator(5, 6, compute_se=False).fit(pairs)
        assert est.pmf().shape == (5, 6)
        assert est.pmf().sum() == pytest.approx(1.0, abs=1e-12)
        assert log_likelihood(CountTable.from_pairs(GRID, pairs), est.params_) == est.loglik_

    @pytest.mark.parametrize("X", [np.zeros((3, 3), int), np.array([[0, 6]]),
                                   np.array([[0.5, 1]]), np.array([[-1, 0]])])
    def test_bad_input(self, X):
        with pytest.raises(DomainError):
            BWGEstimator(5, 6).fit(X)

    def test_grid_mismatch(self):
        with pytest.raises(DomainError):
            BWGEstimator(4, 4).fit(CountTable(GRID, np.ones((5, 6))))


class TestOtherEstimators:
    def test_bgwg_on_dataset(self):
        est = BGWGEstimator(compute_se=False).fit(load_dataset("dataset2").table)
        assert est.aic_ == pytest.approx(892.961, abs=0.01)
        s = est.sample(10, random_state=0)
        assert s.shape == (10, 2)

    def test_baseline(self, pairs):
        est = BaselineEstimator("vms", 5, 6, anchors=3, compute_se=False).fit(pairs)
        assert est.fit_result_.n_params == 5
        assert est.pmf().sum() == pytest.approx(1.0, abs=1e-12)
        assert est.score(pairs) == pytest.approx(est.loglik_, abs=1e-9)
        s = est.sample(20, random_state=1)
        assert s.shape == (20, 2)
