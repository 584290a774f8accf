import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import instance
from splitgof import dgps, spectral
from splitgof.bootstrap import (
    MAMMEN_HIGH,
    MAMMEN_LOW,
    MAMMEN_P_LOW,
    MultiplierKind,
    TestResult,
    draw_multipliers,
    full_sample_fdwb_test,
    multiplier_matrix,
    p_value,
    split_bootstrap_test,
    split_sample_test,
)
from splitgof.errors import BootstrapEstimationFailure, InvalidLevelError, SingularDesignError
from splitgof.estimators import AR, count_fits, parse_model
from splitgof.split import compute_residuals, make_split
from splitgof.streams import stream


class TestMultipliers:
    def test_mammen_law(self):
        assert MAMMEN_P_LOW == pytest.approx(0.723607, abs=1e-6)
        mean = MAMMEN_P_LOW * MAMMEN_LOW + (1 - MAMMEN_P_LOW) * MAMMEN_HIGH
        var = MAMMEN_P_LOW * MAMMEN_LOW ** 2 + (1 - MAMMEN_P_LOW) * MAMMEN_HIGH ** 2
        assert mean == pytest.approx(0.0, abs=1e-15)
        assert var == pytest.approx(1.0, rel=1e-15)

    def test_support(self):
        v = draw_multipliers("mammen", 1000, 3)
        assert set(np.unique(v)) == {MAMMEN_LOW, MAMMEN_HIGH}
        r = draw_multipliers(MultiplierKind.RADEMACHER, 1000, 3)
        assert set(np.unique(r)) == {-1.0, 1.0}

    def test_rademacher_mean(self):
        assert abs(draw_multipliers("rademacher", 10 ** 6, stream(5)).mean()) < 0.005

    def test_mammen_variance(self):
        assert 0.99 < draw_multipliers("mammen", 10 ** 6, stream(6)).var() < 1.01

    def test_deterministic(self):
        a = draw_multipliers("mammen", 50, (1, 2))
        b = draw_multipliers("mammen", 50, (1, 2))
        assert a.tobytes() == b.tobytes()
        assert not np.array_equal(a, draw_multipliers("mammen", 50, (1, 3)))

    def test_rows_use_their_own_streams(self):
        V = multiplier_matrix("rademacher", 5, 20, 7)
        V3 = multiplier_matrix("rademacher", 3, 20, 7)
        assert V[:3].tobytes() == V3.tobytes()

    def test_count(self):
        with pytest.raises(ValueError):
            draw_multipliers("mammen", 0, 1)

    def test_unknown(self):
        with pytest.raises(ValueError):
            MultiplierKind.parse("gaussian")


class TestCountingRule:
    def test_p_value_examples(self):
        assert p_value(2.5, [1, 2, 3, 4]) == 0.5
        assert p_value(9.0, [1, 2, 3, 4]) == 0.0
        assert p_value(2.0, [1, 2, 3, 4]) == 0.75  # ties count as at-or-above


def _ar_residuals(seed=0, n=120):
    y = dgps.simulate("ar1", n, seed).values
    split = make_split(n)
    model = AR(1).fit(y, split.f_n)
    return y, compute_residuals(model, y, split)


class TestSplitBootstrap:
    @pytest.mark.parametrize("weight", ["indicator", "cf"])
    def test_ones_reproduce_statistic(self, weight):
        _, res = _ar_residuals()
        out = split_bootstrap_test(res, weight=weight, B=7, multiplier=lambda b, l: np.ones(l))
        assert np.all(out.boot_draws == out.statistic)
        assert out.p_value == 1.0

    @pytest.mark.parametrize("weight", ["indicator", "cf"])
    def test_statistic_matches_direct(self, weight):
        _, res = _ar_residuals(1)
        out = split_bootstrap_test(res, weight=weight, B=20)
        assert out.statistic == pytest.approx(spectral.statistic(res, weight).value, rel=1e-12)

    def test_draws_match_per_lag_path(self):
        _, res = _ar_residuals(2)
        out = split_bootstrap_test(res, weight="indicator", B=5, seed=11)
        V = multiplier_matrix("mammen", 5, res.split.l_n, 11)
        direct = [spectral.statistic_indicator(res, multipliers=v).value for v in V]
        assert_allclose(out.boot_draws, direct, rtol=1e-12)

    def test_result_invariants(self):
        _, res = _ar_residuals(3)
        out = split_bootstrap_test(res, B=200, alpha=0.1, seed=4)
        assert isinstance(out, TestResult)
        assert out.B == 200 and np.all(out.boot_draws >= 0)
        assert out.p_value == np.mean(out.boot_draws >= out.statistic)
        assert out.critical_value == np.quantile(out.boot_draws, 0.9)
        assert out.reject == (out.statistic > out.critical_value)
        prov = out.provenance
        assert prov["B"] == 200 and prov["alpha"] == 0.1 and prov["seed"] == 4
        assert prov["split"] == "60:120" and prov["model"] == "ar:1"
        assert prov["integrator"] == "empirical_cdf"

    def test_seed_determinism(self):
        _, res = _ar_residuals(4)
        a = split_bootstrap_test(res, weight="cf", B=50, seed=(3, 9))
        b = split_bootstrap_test(res, weight="cf", B=50, seed=(3, 9))
        assert a.boot_draws.tobytes() == b.boot_draws.tobytes()

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
    def test_level(self, alpha):
        _, res = _ar_residuals()
        with pytest.raises(InvalidLevelError):
            split_bootstrap_test(res, B=5, alpha=alpha)

    def test_single_estimator_call(self):
        y = dgps.simulate("ar1", 100, 8).values
        with count_fits() as calls:
            split_sample_test(y, "ar:1", B=100)
        assert calls() == 1

    def test_lagged_override(self):
        _, res = _ar_residuals(5)
        alt = res.lagged.copy()
        alt[1:] = alt[1:] ** 2
        a = split_bootstrap_test(res, lagged=alt, B=10)
        assert a.statistic == pytest.approx(spectral.statistic_indicator(res, lagged=alt).value, rel=1e-12)

    def test_to_dict(self):
        _, res = _ar_residuals()
        d = split_bootstrap_test(res, B=10).to_dict(draws=True)
        assert set(d) >= {"statistic", "p_value", "critical_value", "B", "elapsed_s", "provenance"}
        assert len(d["boot_draws"]) == 10


class TestFdwb:
    def test_b1(self):
        y = dgps.simulate("ar1", 80, 1).values
        out = full_sample_fdwb_test(y, "ar:1", B=1, seed=2)
        assert out.p_value in (0.0, 1.0)

    def test_refits_each_draw(self):
        y = dgps.simulate("ar1", 80, 1).values
        with count_fits() as calls:
            out = full_sample_fdwb_test(y, "ar:1", B=12, seed=2)
        assert calls() == 13
        assert out.provenance["scheme"] == "full_fdwb"
        assert out.provenance["split"] == "80:80"

    def test_statistic_is_full_sample(self):
        y = dgps.simulate("ar1", 80, 3).values
        split = make_split(80, "full")
        res = compute_residuals(AR(1).fit(y, 80), y, split)
        out = full_sample_fdwb_test(y, "ar:1", B=3, weight="cf")
        assert out.statistic == pytest.approx(spectral.statistic_cf(res).value, rel=1e-12)

    def test_ones_hook_refits_original(self):
        # with V = 1 the bootstrap sample is the fitted mean plus the residuals,
        # i.e. the data themselves, so every draw equals the statistic
        y = dgps.simulate("ar1", 80, 4).values
        out = full_sample_fdwb_test(y, "ar:1", B=3, multiplier=lambda b, n: np.ones(n))
        assert_allclose(out.boot_draws, out.statistic, rtol=1e-10)

    @pytest.mark.parametrize("descriptor", ["ar:1", "ar:3:c"])
    @pytest.mark.parametrize("weight", ["indicator", "cf"])
    def test_batched_refits_match_loop(self, monkeypatch, descriptor, weight):
        y = dgps.simulate("ar2", 90, 5).values
        fast = full_sample_fdwb_test(y, descriptor, B=25, seed=7, weight=weight)
        monkeypatch.setattr(AR, "fixed_design_refit", lambda self, y, f_n=None: None)
        slow = full_sample_fdwb_test(y, descriptor, B=25, seed=7, weight=weight)
        assert_allclose(fast.boot_draws, slow.boot_draws, rtol=1e-10)
        assert fast.statistic == slow.statistic

    def test_variance_model_runs(self):
        y = dgps.simulate("arch1", 120, 0).values
        out = full_sample_fdwb_test(y, "arch:1", B=4, seed=1)
        assert np.all(np.isfinite(out.boot_draws))

    def test_redraw_then_abort(self, monkeypatch):
        y = dgps.simulate("ar1", 60, 1).values
        family = parse_model("ar:1")
        original = type(family).fit
        state = {"calls": 0}

        def flaky(self, yy, f_n=None, response=None):
            state["calls"] += 1
            if response is not None and state["calls"] % 2 == 0:
                raise SingularDesignError("injected")
            return original(self, yy, f_n, response)

        monkeypatch.setattr(type(family), "fixed_design_refit", lambda self, y, f_n=None: None)
        monkeypatch.setattr(type(family), "fit", flaky)
        out = full_sample_fdwb_test(y, family, B=4, seed=1)
        assert out.provenance["refit_failures"] > 0

        def broken(self, yy, f_n=None, response=None):
            if response is not None:
                raise SingularDesignError("injected")
            return original(self, yy, f_n, response)

        monkeypatch.setattr(type(family), "fit", broken)
        with pytest.raises(BootstrapEstimationFailure):
            full_sample_fdwb_test(y, family, B=2, seed=1)
