import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from brouwer_entropy.coding import GrowthSeries, SamplingPlan, linear_family, standard_family
from brouwer_entropy.entropy import (
    ExponentEstimate,
    GrowthExponentRegressor,
    PolynomialEntropyEstimator,
    fit_exponent,
    local_entropy_series,
)
from brouwer_entropy.errors import FitError, NonWanderingRegionError
from brouwer_entropy.glued_plane import (
    ChartPoint,
    GluedSystem,
    build_gluing,
    build_linear_example,
    build_translation,
)


class TestFit:
    def test_square_law(self):
        est = fit_exponent([(10, 100), (100, 10_000), (1000, 1_000_000)])
        assert est.exponent == pytest.approx(2.0, abs=1e-12)
        assert est.fit_window == (10, 100 * 10)

    def test_identity(self):
        assert fit_exponent([(n, n) for n in (3, 9, 27, 81)]).exponent == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=80, deadline=None)
    @given(c=st.floats(0.5, 50), beta=st.floats(0.2, 4.5))
    def test_recovers_power_law(self, c, beta):
        ns = [2**k for k in range(4, 12)]
        rows = [(n, max(1, round(c * n**beta * 1e6))) for n in ns]
        assert fit_exponent(rows).exponent == pytest.approx(beta, abs=1e-6)

    def test_ratio_method(self):
        rows = [(n, 7 * n**3) for n in (8, 16, 32, 64)]
        est = fit_exponent(rows, "ratio")
        assert est.method == "ratio"
        assert est.exponent == pytest.approx(3.0, abs=1e-12)

    def test_window(self):
        rows = [(1, 1000), (2, 1000)] + [(n, n * n) for n in (8, 16, 32)]
        assert fit_exponent(rows, window=(8, 32)).exponent == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "rows",
        [[(1, 1), (2, 2)], [(1, 0), (2, 2), (4, 4)], [(1, -3), (2, 2), (4, 4)]],
    )
    def test_bad_rows(self, rows):
        with pytest.raises(FitError):
            fit_exponent(rows)

    def test_bad_method(self):
        with pytest.raises(FitError):
            fit_exponent([(1, 1), (2, 2), (4, 4)], "spline")

    def test_ratio_needs_doubling(self):
        with pytest.raises(FitError):
            fit_exponent([(3, 9), (5, 25), (7, 49)], "ratio")

    def test_json_round_trip(self):
        est = fit_exponent(GrowthSeries(((4, 17, "exact"), (8, 65, "exact"), (16, 257, "exact"))))
        assert ExponentEstimate.from_json(est.to_json()) == est


class TestRegressor:
    def test_fit_predict(self):
        X = np.array([[8], [16], [32], [64]])
        y = 3 * X[:, 0] ** 3
        model = GrowthExponentRegressor().fit(X, y)
        assert model.exponent_ == pytest.approx(3.0)
        assert model.predict(np.array([[128]]))[0] == pytest.approx(3 * 128**3, rel=1e-9)
        assert model.score(X, y) == pytest.approx(1.0)

    def test_params_and_clone(self):
        model = GrowthExponentRegressor(method="ratio")
        assert model.get_params() == {"method": "ratio"}
        assert clone(model).method == "ratio"

    def test_rejects_two_columns(self):
        with pytest.raises(FitError):
            GrowthExponentRegressor().fit(np.ones((4, 2)), np.ones(4))

    def test_unfitted(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            GrowthExponentRegressor().predict([[3]])


class TestPolynomialEntropyEstimator:
    def test_linear(self):
        est = PolynomialEntropyEstimator(build_linear_example(), linear_family()).fit([32, 64, 128, 256])
        assert est.exponent_ == pytest.approx(2.0, abs=0.1)
        assert list(est.series_.ns) == [32, 64, 128, 256]

    def test_glued_plateau_window(self):
        system = GluedSystem(build_gluing(3, 3, 256))
        est = PolynomialEntropyEstimator(system, standard_family(3)).fit([32, 64, 128])
        assert 2.5 < est.exponent_ < 3.2

    def test_rejects_short_grid(self):
        with pytest.raises(FitError):
            PolynomialEntropyEstimator(build_translation(), standard_family(1)).fit([4, 8])


class TestLocal:
    def test_translation_is_linear(self):
        out = local_entropy_series(build_translation(), [ChartPoint(1, 0, 0)], [Fraction(1, 3), Fraction(1, 6)], [32, 64, 128, 256])
        for _, est in out:
            assert est.exponent == pytest.approx(1.0, abs=0.05)

    def test_linear_pair(self):
        out = local_entropy_series(build_linear_example(), [ChartPoint(1, 0, 1), ChartPoint(1, 1, 0)], [Fraction(1, 4)], [32, 64, 128, 256])
        assert out[0][1].exponent == pytest.approx(2.0, abs=0.1)

    def test_nested_sizes_stable(self):
        """Shrinking the boxes around a wandering point leaves the exponent alone."""
        sizes = [Fraction(1, 3), Fraction(1, 5), Fraction(1, 9)]
        out = local_entropy_series(build_linear_example(), [ChartPoint(1, 0, 1), ChartPoint(1, 1, 0)], sizes, [32, 64, 128])
        exps = [est.exponent for _, est in out]
        assert max(exps) - min(exps) < 0.05
        assert [h for h, _ in out] == sizes

    def test_origin_rejected(self):
        with pytest.raises(NonWanderingRegionError):
            local_entropy_series(build_linear_example(), [ChartPoint(1, 0, 0)], [Fraction(1, 4)], [8, 16, 32])

    @pytest.mark.parametrize("sizes", [[Fraction(1, 4), Fraction(1, 2)], [0.0]])
    def test_bad_sizes(self, sizes):
        with pytest.raises(ValueError):
            local_entropy_series(build_translation(), [ChartPoint(1, 0, 0)], sizes, [8, 16, 32])

    def test_glued_boundary_points(self):
        # boxes around the three chart origins; the pre-asymptotic slope sits below 3
        system = GluedSystem(build_gluing(3, 3, 256))
        out = local_entropy_series(system, [ChartPoint(k, 0, 0) for k in (1, 2, 3)], [Fraction(1, 3)], [16, 32, 64])
        assert 2.0 < out[0][1].exponent < 3.3


def test_plan_passed_through():
    system = GluedSystem(build_gluing(3, 3, 64))
    a = PolynomialEntropyEstimator(system, standard_family(3), plan=SamplingPlan(random_fill=5), seed=1).fit([8, 16, 32])
    b = PolynomialEntropyEstimator(system, standard_family(3), plan=SamplingPlan(random_fill=5), seed=1).fit([8, 16, 32])
    assert a.series_ == b.series_
    assert math.isfinite(a.exponent_)
