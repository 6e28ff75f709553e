import numpy as np
import pytest

from torusfit.distributions import BgwgParams, BwgParams
from torusfit.inference import CountTable, FitOptions, fit_bgwg, fit_bwg
from torusfit.sampling import sample_joint
from torusfit.simulation import (
    THREADS_ENV,
    replicate_seed,
    run_simulation_study,
    worker_count,
)
from torusfit.torus import TorusGrid

GRID = TorusGrid(5, 6)
BWG_TRUTH = BwgParams(GRID, 0, 0, 0.2, 0.3, -0.5, 1)
BGWG_TRUTH = BgwgParams(GRID, 3.0, 2.0, 0.6, 0.7, 0.8, -1)
FAST = FitOptions(anchors=3)


def replicate_sample(truth, n, r, base_seed):
    rng = np.random.Generator(np.random.PCG64(replicate_seed(base_seed, n, r)))
    return CountTable(truth.grid, sample_joint(truth, n, rng=rng, seed=base_seed).counts())


class TestSingleReplicate:
    def test_bwg_equals_single_fit(self):
        s = run_simulation_study(BWG_TRUTH, (200,), 1, base_seed=4, options=FAST)
        fit = fit_bwg(replicate_sample(BWG_TRUTH, 200, 0, 4), FitOptions(anchors=3,
                                                                        compute_se=False))
        size = s[200]
        for k in ("q", "s", "rho"):
            assert size.mean[k] == getattr(fit.params, k)
            assert size.sd[k] == 0.0
        for k in ("alpha", "beta", "delta"):
            assert size.discrete[k] == {getattr(fit.params, k): 1}

    def test_bgwg_equals_single_fit(self):
        s = run_simulation_study(BGWG_TRUTH, (150,), 1, base_seed=9, options=FAST)
        fit = fit_bgwg(replicate_sample(BGWG_TRUTH, 150, 0, 9), FitOptions(anchors=3,
                                                                          compute_se=False))
        for k in ("q", "s", "rho"):
            assert s[150].mean[k] == getattr(fit.params, k)
        # locations are reported in the period nearest the truth
        shift = s[150].mean["alpha"] - fit.params.alpha
        assert shift == pytest.approx(5 * round(shift / 5), abs=1e-12)
        assert abs(s[150].mean["alpha"] - 3.0) <= 2.5
        assert s[150].discrete["delta"] == {fit.params.delta: 1}


class TestStudy:
    def test_deterministic_and_worker_invariant(self):
        a = run_simulation_study(BWG_TRUTH, (80, 120), 4, base_seed=1, options=FAST, workers=1)
        b = run_simulation_study(BWG_TRUTH, (80, 120), 4, base_seed=1, options=FAST, workers=2)
        assert a.to_csv() == b.to_csv()
        for n in (80, 120):
            for k, v in a.estimates[n].items():
                np.testing.assert_array_equal(v, b.estimates[n][k])

    def test_seed_changes_result(self):
        a = run_simulation_study(BWG_TRUTH, (80,), 3, base_seed=1, options=FAST)
        b = run_simulation_study(BWG_TRUTH, (80,), 3, base_seed=2, options=FAST)
        assert a.to_csv() != b.to_csv()

    def test_progress_and_csv(self):
        seen = []
        s = run_simulation_study(BWG_TRUTH, (60, 90), 3, options=FAST,
                                 progress=lambda n, r: seen.append((n, r)))
        assert seen == [(60, 0), (60, 1), (60, 2), (90, 0), (90, 1), (90, 2)]
        lines = s.to_csv().strip().split("\n")
        assert lines[0].split(",")[:5] == ["n", "replicates", "mean_q", "mean_s", "mean_rho"]
        assert [ln.split(",")[0] for ln in lines[1:]] == ["60", "90"]
        assert s[60].frequency("delta", 1) + s[60].frequency("delta", -1) == pytest.approx(1)
        with pytest.raises(KeyError):
            s[500]

    def test_rejects_zero_replicates(self):
        with pytest.raises(ValueError):
            run_simulation_study(BWG_TRUTH, (50,), 0)

    @pytest.mark.slow
    def test_error_shrinks_with_n(self):
        s = run_simulation_study(BWG_TRUTH, (50, 200, 500), 30, base_seed=3, options=FAST)
        err = [np.mean([np.abs(s.estimates[n][k] - getattr(BWG_TRUTH, k)).mean()
                        for k in ("q", "s", "rho")]) for n in (50, 200, 500)]
        assert err[0] >= err[1] >= err[2]


class TestWorkers:
    def test_explicit(self):
        assert worker_count(3) == 3

    def test_zero_means_all(self):
        assert worker_count(0) >= 1

    def test_environment(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "2")
        assert worker_count() == 2
        monkeypatch.delenv(THREADS_ENV)
        assert worker_count() == 1
        monkeypatch.setenv(THREADS_ENV, "many")
        with pytest.raises(ValueError):
            worker_count()

    def test_negative(self):
        with pytest.raises(ValueError):
            worker_count(-1)
