import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import minimize

from torusfit.optimize import nelder_mead_batch


def rosenbrock(X, members=None):
    return (1 - X[:, 0]) ** 2 + 100 * (X[:, 1] - X[:, 0] ** 2) ** 2


class TestNelderMeadBatch:
    def test_rosenbrock_from_several_starts(self):
        x0 = np.array([[-1.2, 1.0], [0.0, 0.0], [2.0, 2.0]])
        res = nelder_mead_batch(rosenbrock, x0, np.full(2, 0.5), fatol=1e-14, xatol=1e-10,
                                maxfev=10_000)
        assert_allclose(res.x, 1.0, atol=1e-5)
        assert res.converged.all()

    def test_respects_box(self):
        fun = lambda X, m: ((X - 3.0) ** 2).sum(axis=1)
        res = nelder_mead_batch(fun, np.zeros((1, 2)), np.full(2, 0.3), np.array([-1.0, -1.0]),
                                np.array([1.0, 2.0]))
        assert_allclose(res.x[0], [1.0, 2.0], atol=1e-6)

    def test_agrees_with_scipy(self):
        fun = lambda x: np.sin(x[0]) + 0.1 * x[0] ** 2 + (x[1] - 0.5) ** 2
        ref = minimize(fun, [1.0, 1.0], method="Nelder-Mead",
                       options={"fatol": 1e-12, "xatol": 1e-10})
        res = nelder_mead_batch(lambda X, m: np.array([fun(x) for x in X]),
                                np.array([[1.0, 1.0]]), np.full(2, 0.25), fatol=1e-12,
                                xatol=1e-10)
        assert_allclose(res.x[0], ref.x, atol=1e-6)
        assert res.fun[0] == pytest.approx(ref.fun, abs=1e-10)

    def test_budget(self):
        res = nelder_mead_batch(rosenbrock, np.array([[-1.2, 1.0]]), np.full(2, 0.5),
                                fatol=0.0, xatol=0.0, maxfev=40)
        assert not res.converged[0]
        assert res.nfev[0] <= 40 + 3

    def test_members_are_independent(self):
        x0 = np.array([[-1.2, 1.0], [0.5, 0.5]])
        joint = nelder_mead_batch(rosenbrock, x0, np.full(2, 0.5))
        alone = nelder_mead_batch(rosenbrock, x0[1:], np.full(2, 0.5))
        assert_allclose(joint.x[1], alone.x[0])
