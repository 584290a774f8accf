import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from splitgof.errors import DegenerateResidualsError, InvalidSplitError, ModelMismatchError
from splitgof.estimators import AR, GARCH, FittedModel
from splitgof.split import (
    ResidualSet,
    Series,
    SplitSpec,
    compute_residuals,
    make_split,
    parse_split,
    read_series_csv,
)


class TestSeries:
    def test_rejects_short(self):
        with pytest.raises(ValueError):
            Series(np.arange(7.0))

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_nonfinite(self, bad):
        values = np.arange(10.0)
        values[3] = bad
        with pytest.raises(ValueError):
            Series(values)

    def test_values_read_only(self):
        s = Series(np.arange(8.0))
        with pytest.raises(ValueError):
            s.values[0] = 1.0


class TestMakeSplit:
    @pytest.mark.parametrize("n, f_n, l_n", [(200, 100, 200), (9, 4, 9)])
    def test_half_overlap(self, n, f_n, l_n):
        s = make_split(n)
        assert (s.f_n, s.l_n) == (f_n, l_n)

    def test_custom_full_geometry(self):
        s = make_split(100, "custom", 100, 100)
        assert (s.n, s.f_n, s.l_n) == (100, 100, 100)
        assert s.checking_start == 0

    @pytest.mark.parametrize("f_n, l_n", [(0, 5), (5, 0), (11, 5), (5, 11)])
    def test_invalid(self, f_n, l_n):
        with pytest.raises(InvalidSplitError):
            make_split(10, "custom", f_n, l_n)

    def test_short_series(self):
        with pytest.raises(InvalidSplitError):
            make_split(7)

    @given(st.integers(4, 500).map(lambda m: 2 * m))
    def test_ratio_twice_overlap_for_even_n(self, n):
        s = make_split(n)
        assert s.ratio == pytest.approx(2 * s.overlap, rel=0, abs=0)

    def test_n_j(self):
        s = make_split(20, "custom", 10, 12)
        nj = s.n_j(np.arange(1, 13))
        assert np.all(np.diff(nj) < 0)
        assert s.n_j(12) == 1
        with pytest.raises(InvalidSplitError):
            s.n_j(13)

    @pytest.mark.parametrize("text, pair", [("half", (50, 100)), ("full", (100, 100)), ("60:40", (60, 40))])
    def test_parse(self, text, pair):
        s = parse_split(text, 100)
        assert (s.f_n, s.l_n) == pair
        assert parse_split(s.describe(), 100) == s

    def test_parse_garbage(self):
        with pytest.raises(InvalidSplitError):
            parse_split("a:b:c", 100)


def _ar1(b):
    return FittedModel.from_params(AR(1), [b])


class TestComputeResiduals:
    def test_exact_fit_is_degenerate(self):
        y = np.array([1, 0.6, 0.36, 0.216])
        split = SplitSpec(4, 2, 2)
        with pytest.raises(DegenerateResidualsError):
            compute_residuals(_ar1(0.6), y, split)

    def test_hand_example(self):
        # Y = (..., 1, 1, 2) with the checking sample being the last two points
        y = np.array([0, 0, 0, 0, 0, 1, 1, 2.0])
        res = compute_residuals(_ar1(0.5), y, SplitSpec(8, 1, 2))
        assert_allclose(res.residuals, [0.5, 1.5])
        assert res.sigma_e ** 2 == pytest.approx(1.25, rel=1e-12)
        assert_array_equal(res.lagged, [1.0, 1.0])

    def test_leading_lag_unobserved_when_l_n_is_n(self, rng):
        y = rng.standard_normal(12)
        res = compute_residuals(_ar1(0.2), y, make_split(12))
        assert np.isnan(res.lagged[0])
        assert res.start == 1
        assert_array_equal(res.lagged[1:], y[:-1])
        assert_allclose(res.residuals[1:], y[1:] - 0.2 * y[:-1])
        assert res.residuals[0] == y[0]

    def test_sigma_matches_definition(self, rng):
        y = rng.standard_normal(50)
        res = compute_residuals(_ar1(0.3), y, make_split(50))
        assert res.sigma_e ** 2 == pytest.approx(np.mean(res.residuals ** 2), rel=1e-12)

    def test_garch_residuals_on_squared_scale(self, rng):
        y = rng.standard_normal(30)
        model = FittedModel.from_params(GARCH(1, 1), [0.1, 0.2, 0.5], backcast=1.0)
        res = compute_residuals(model, y, make_split(30))
        s2 = model.conditional_mean(y)
        assert_allclose(res.residuals, y ** 2 - s2)
        assert_allclose(res.lagged[1:], y[:-1] ** 2)

    def test_length_mismatch(self, rng):
        with pytest.raises(ModelMismatchError):
            compute_residuals(_ar1(0.3), rng.standard_normal(20), make_split(21))

    def test_history_too_long(self, rng):
        model = FittedModel.from_params(AR(9), np.zeros(9))
        with pytest.raises(ModelMismatchError):
            compute_residuals(model, rng.standard_normal(9), make_split(9))

    def test_deterministic(self, rng):
        y = rng.standard_normal(40)
        a = compute_residuals(_ar1(0.4), y, make_split(40))
        b = compute_residuals(_ar1(0.4), y, make_split(40))
        assert a.residuals.tobytes() == b.residuals.tobytes()

    def test_with_residuals(self, rng):
        y = rng.standard_normal(40)
        res = compute_residuals(_ar1(0.4), y, make_split(40))
        other = res.with_residuals(2 * res.residuals)
        assert other.sigma_e == pytest.approx(2 * res.sigma_e)


class TestResidualSet:
    def test_shape_checks(self):
        split = SplitSpec(10, 5, 4)
        with pytest.raises(ValueError):
            ResidualSet.from_arrays(np.ones(3), np.ones(4), split)
        with pytest.raises(ValueError):
            ResidualSet.from_arrays(np.ones(4), np.ones(5), split)

    def test_tiny_scale_rejected(self):
        split = SplitSpec(10, 5, 4)
        with pytest.raises(DegenerateResidualsError):
            ResidualSet.from_arrays(np.full(4, 1e-310), np.ones(4), split)


class TestReadCsv:
    def test_single_column_no_header(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("\n".join(str(v) for v in range(10)) + "\n")
        s = read_series_csv(p)
        assert_array_equal(s.values, np.arange(10.0))

    def test_named_column(self, tmp_path):
        p = tmp_path / "b.csv"
        p.write_text("date,x,y\n" + "\n".join(f"d{i},{i},{-i}" for i in range(9)))
        assert_array_equal(read_series_csv(p, "x").values, np.arange(9.0))
        assert_array_equal(read_series_csv(p).values, -np.arange(9.0))
        with pytest.raises(ValueError):
            read_series_csv(p, "z")
