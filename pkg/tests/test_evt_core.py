import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from extreme_fpt import (
    DomainError,
    RescalingUndefinedError,
    ShortTimeParams,
    evt_core,
    specfun,
)
from extreme_fpt.evt_core import GumbelParams

GAMMA = specfun.EULER_GAMMA
LN_LN_2 = -0.36651292058166432701
SEC41_B_1E6 = 0.020832179579044734925  # C/(p W0(0.5 (A 1e6)^2)), mpmath


@pytest.fixture(scope="module")
def std():
    return GumbelParams(location=0.0, scale=1.0)


class TestGumbel:
    def test_mean(self, std):
        assert evt_core.gumbel_mean(std) == pytest.approx(-GAMMA, abs=1e-12)

    def test_median(self, std):
        assert evt_core.gumbel_median(std) == pytest.approx(LN_LN_2, abs=1e-12)

    def test_variance(self, std):
        assert evt_core.gumbel_variance(std) == pytest.approx(
            math.pi ** 2 / 6.0, abs=1e-12)

    def test_mode_is_location(self):
        g = GumbelParams(location=3.5, scale=0.2)
        assert evt_core.gumbel_mode(g) == 3.5

    def test_survival_at_location(self, std):
        assert evt_core.gumbel_survival(std, 0.0) == pytest.approx(
            math.exp(-1.0), rel=1e-15)

    def test_pdf_normalization(self, std):
        total, _ = quad(lambda x: evt_core.gumbel_pdf(std, x), -30, 10, limit=200)
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_mgf_values(self, std):
        assert evt_core.gumbel_mgf(std, 0.0) == 1.0
        assert evt_core.gumbel_mgf(std, 0.5) == pytest.approx(math.gamma(1.5), rel=1e-14)
        g = GumbelParams(location=2.0, scale=0.5)
        assert evt_core.gumbel_mgf(g, 1.0) == pytest.approx(
            math.gamma(1.5) * math.exp(2.0), rel=1e-14)

    def test_mgf_pole(self, std):
        with pytest.raises(DomainError):
            evt_core.gumbel_mgf(std, -1.0)

    def test_mgf_derivative_matches_mean(self, std):
        h = 1e-6
        deriv = (evt_core.gumbel_mgf(std, h) - evt_core.gumbel_mgf(std, -h)) / (2 * h)
        assert deriv == pytest.approx(evt_core.gumbel_mean(std), abs=1e-6)

    def test_scale_positive(self):
        with pytest.raises(DomainError):
            GumbelParams(location=0.0, scale=0.0)


class TestRescalingLambertW:
    def test_p_zero_closed_form(self):
        stp = ShortTimeParams(A=1.0, p=0.0, C=1.0)
        r = evt_core.rescaling_lambertw(stp, 10 ** 4)
        ln_n = math.log(10 ** 4)
        assert r.b_N == pytest.approx(1.0 / ln_n, rel=1e-14)
        assert r.a_N == pytest.approx(1.0 / ln_n ** 2, rel=1e-14)
        assert r.b_N == pytest.approx(0.108574, abs=5e-7)

    def test_section41_anchor(self, point):
        r = evt_core.rescaling_lambertw(point.short_time, 10 ** 6)
        assert r.b_N == pytest.approx(SEC41_B_1E6, rel=1e-13)
        assert 0.02 < r.b_N < 0.022

    def test_matches_numeric_construction(self, point):
        r_lw = evt_core.rescaling_lambertw(point.short_time, 10 ** 4)
        r_num = evt_core.rescaling_numeric(point, 10 ** 4)
        assert abs(r_lw.b_N - r_num.b_N) / r_num.a_N < 0.05
        # they invert the same law, so the agreement is in fact much tighter
        assert abs(r_lw.b_N - r_num.b_N) / r_num.a_N < 1e-9
        assert abs(r_lw.a_N / r_num.a_N - 1.0) < 1e-9

    @pytest.mark.parametrize("name", ["point1d", "robin1d", "sphere3d"])
    def test_positive_and_decreasing(self, builtin_models, name):
        model = builtin_models[name]
        bs = []
        for N in [10 ** e for e in range(2, 9)]:
            r = evt_core.rescaling_lambertw(model.short_time, N)
            assert r.a_N > 0.0 and r.b_N > 0.0
            bs.append(r.b_N)
        assert all(b < a for a, b in zip(bs, bs[1:]))

    def test_lower_branch_domain_reports_minimal_n(self):
        stp = ShortTimeParams(A=0.01, p=-0.5, C=0.25)
        with pytest.raises(RescalingUndefinedError) as err:
            evt_core.rescaling_lambertw(stp, 50)
        n_min = err.value.min_valid_n
        assert n_min is not None and n_min > 50
        evt_core.rescaling_lambertw(stp, n_min)  # valid at the reported N
        with pytest.raises(RescalingUndefinedError):
            evt_core.rescaling_lambertw(stp, n_min - 1)

    def test_p_zero_needs_an_above_one(self):
        stp = ShortTimeParams(A=1e-3, p=0.0, C=1.0)
        with pytest.raises(RescalingUndefinedError) as err:
            evt_core.rescaling_lambertw(stp, 100)
        assert err.value.min_valid_n == 1001

    def test_small_n_rejected(self, point):
        with pytest.raises(DomainError):
            evt_core.rescaling_lambertw(point.short_time, 1)


class TestRescalingElementary:
    def test_p_zero_case(self):
        stp = ShortTimeParams(A=1.0, p=0.0, C=1.0)
        r = evt_core.rescaling_elementary(stp, 10 ** 4)
        ln_n = math.log(10 ** 4)
        assert r.b_N == pytest.approx(1.0 / ln_n, rel=1e-14)
        assert r.a_N == pytest.approx(1.0 / ln_n ** 2, rel=1e-14)

    def test_section41_value(self, point):
        stp = point.short_time
        ln_n = math.log(10 ** 6)
        expected = (stp.C / ln_n
                    + stp.C * stp.p * math.log(ln_n) / ln_n ** 2
                    - stp.C * math.log(stp.A * stp.C ** stp.p) / ln_n ** 2)
        r = evt_core.rescaling_elementary(stp, 10 ** 6)
        assert r.b_N == pytest.approx(expected, rel=1e-14)
        assert r.b_N == pytest.approx(0.02057, abs=1e-5)

    def test_needs_three(self, point):
        with pytest.raises(DomainError):
            evt_core.rescaling_elementary(point.short_time, 2)

    def test_equivalence_trend_point_model(self, point):
        # Eq.-style equivalence: a'/a -> 1 and (b'-b)/a -> 0; for this model
        # the final-decade values sit inside 0.2 and improve on the first
        ratios, gaps = [], []
        for N in [10 ** e for e in range(2, 9)]:
            r_lw = evt_core.rescaling_lambertw(point.short_time, N)
            r_el = evt_core.rescaling_elementary(point.short_time, N)
            ratios.append(abs(r_el.a_N / r_lw.a_N - 1.0))
            gaps.append(abs(r_el.b_N - r_lw.b_N) / r_lw.a_N)
        assert ratios[-1] < ratios[0] and ratios[-1] < 0.2
        assert gaps[-1] < gaps[0] and gaps[-1] < 0.2

    @pytest.mark.parametrize("name", ["point1d", "robin1d", "sphere3d"])
    def test_numeric_variant_satisfies_equivalence_tightly(self, builtin_models, name):
        model = builtin_models[name]
        for N in [10 ** e for e in range(2, 9)]:
            r_lw = evt_core.rescaling_lambertw(model.short_time, N)
            r_num = evt_core.rescaling_numeric(model, N)
            assert abs(r_num.a_N / r_lw.a_N - 1.0) < 1e-9
            assert abs(r_num.b_N - r_lw.b_N) / r_lw.a_N < 1e-9


class TestRescalingNumeric:
    def test_p_zero_closed_form(self):
        stp = ShortTimeParams(A=1.0, p=0.0, C=1.0)
        r = evt_core.rescaling_numeric(stp, 10 ** 3)
        ln_n = math.log(10 ** 3)
        assert r.b_N == pytest.approx(1.0 / ln_n, rel=1e-12)
        assert r.b_N == pytest.approx(0.144765, abs=5e-7)
        assert r.a_N == pytest.approx(r.b_N ** 2, rel=1e-12)

    def test_residual(self, point):
        stp = point.short_time
        r = evt_core.rescaling_numeric(point, 10 ** 6)
        s0 = 1.0 - stp.A * r.b_N ** stp.p * math.exp(-stp.C / r.b_N)
        assert abs(s0 - (1.0 - 1e-6)) < 1e-12

    @pytest.mark.parametrize("name", ["point1d", "robin1d", "sphere3d"])
    def test_positive_and_decreasing(self, builtin_models, name):
        model = builtin_models[name]
        bs = []
        for N in [10 ** e for e in range(2, 9)]:
            r = evt_core.rescaling_numeric(model, N)
            assert r.a_N > 0.0 and r.b_N > 0.0
            bs.append(r.b_N)
        assert all(b < a for a, b in zip(bs, bs[1:]))


class TestXk:
    def test_k1_is_standard_gumbel_pdf(self, std):
        for x in (-3.0, -1.0, 0.0, 1.5):
            assert evt_core.xk_pdf(1, x) == pytest.approx(
                evt_core.gumbel_pdf(std, x), rel=1e-14)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_normalization(self, k):
        # left tail of the k = 1 density decays only like e^x
        total, _ = quad(lambda x: evt_core.xk_pdf(k, x), -30, 20, limit=200)
        assert total == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_quadrature_moments_match_polygamma(self, k):
        mean, _ = quad(lambda x: x * evt_core.xk_pdf(k, x), -30, 20, limit=200)
        var, _ = quad(lambda x: (x - mean) ** 2 * evt_core.xk_pdf(k, x), -30, 20,
                      limit=200)
        assert mean == pytest.approx(specfun.digamma(k), abs=1e-8)
        assert var == pytest.approx(specfun.trigamma(k), abs=1e-8)

    def test_means_and_harmonic_gaps(self):
        assert evt_core.xk_mean(1) == pytest.approx(-GAMMA, abs=1e-13)
        assert evt_core.xk_mean(2) - evt_core.xk_mean(1) == pytest.approx(1.0, abs=1e-13)
        assert evt_core.xk_mean(4) - evt_core.xk_mean(1) == pytest.approx(
            specfun.harmonic(3), abs=1e-13)
        assert evt_core.xk_variance(1) == pytest.approx(math.pi ** 2 / 6, abs=1e-13)

    def test_k_validation(self):
        with pytest.raises(DomainError):
            evt_core.xk_pdf(0, 0.0)
        with pytest.raises(DomainError):
            evt_core.xk_mean(-2)


class TestXkJoint:
    def test_unordered_is_zero(self):
        assert evt_core.xk_joint_pdf([1.0, 0.0]) == 0.0

    def test_single_coordinate_reduces_to_marginal(self):
        for x in (-2.0, 0.0, 1.0):
            assert evt_core.xk_joint_pdf([x]) == pytest.approx(
                evt_core.xk_pdf(1, x), rel=1e-14)

    @pytest.mark.parametrize("x2", [-1.0, 0.0, 1.0])
    def test_marginalizing_first_coordinate(self, x2):
        inner, _ = quad(lambda x1: evt_core.xk_joint_pdf([x1, x2]), -40, x2,
                        limit=200)
        assert inner == pytest.approx(evt_core.xk_pdf(2, x2), abs=1e-8)

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            evt_core.xk_joint_pdf([])

    @given(st.lists(st.floats(min_value=-5, max_value=5), min_size=1, max_size=5))
    @settings(max_examples=60, deadline=None)
    def test_nonnegative_everywhere(self, xs):
        assert evt_core.xk_joint_pdf(xs) >= 0.0


class TestApproxMoments:
    def test_k1_matches_gumbel_formulas(self, point):
        r = evt_core.rescaling_lambertw(point.short_time, 10 ** 4)
        m = evt_core.approx_moments(r, 1)
        assert m.mean == pytest.approx(r.b_N - GAMMA * r.a_N, rel=1e-14)
        assert m.variance == pytest.approx(
            (math.pi ** 2 / 6.0) * r.a_N ** 2, rel=1e-14)

    def test_harmonic_gap_between_orders(self, point):
        r = evt_core.rescaling_lambertw(point.short_time, 10 ** 4)
        m1 = evt_core.approx_moments(r, 1)
        m2 = evt_core.approx_moments(r, 2)
        assert m2.mean - m1.mean == pytest.approx(r.a_N, rel=1e-12)
