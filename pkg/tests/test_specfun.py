"""Special-function layer: frozen reference values and structural identities.

Reference numbers were computed once with mpmath at 40 significant digits
and are hard-coded, so any regression in the wrappers shows up as a plain
numeric diff rather than a silent drift.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.stats import poisson

from aerolink.specfun import (
    KappaMuParams,
    NoncentralChi2Params,
    bessel_i,
    bessel_k,
    chi2_cdf,
    chi2_pdf,
    gk_cdf,
    gk_cdf_grid,
    gk_pdf,
    kappa_mu_convert,
    kappa_mu_invert,
    laguerre,
    laguerre_half,
    marcum_q,
    ncchi2_cdf,
    ncchi2_pdf,
    poisson_truncation,
    q_func,
    q_inv,
    rician_envelope_mean,
)

RTOL = 1e-11


class TestBessel:
    # (nu, x) -> mpmath besseli / besselk
    I_REF = [
        (0, 0.5, 1.0634833707413235),
        (2, 3.7, 4.7192954719881339),
        (5, 12.0, 6493.6125766038085),
        (0, 90.0, 5.1392383455086638e37),
    ]
    K_REF = [
        (0, 0.5, 0.92441907122766586),
        (3, 2.2, 0.44854592806594531),
        (1.5, 4.0, 0.014347030720760067),
    ]

    @pytest.mark.parametrize("nu,x,ref", I_REF)
    def test_bessel_i_frozen(self, nu, x, ref):
        assert bessel_i(nu, x) == pytest.approx(ref, rel=RTOL)

    @pytest.mark.parametrize("nu,x,ref", K_REF)
    def test_bessel_k_frozen(self, nu, x, ref):
        assert bessel_k(nu, x) == pytest.approx(ref, rel=RTOL)

    def test_scaled_variants(self):
        # scaled I carries e^{-x}, scaled K carries e^{+x}
        assert bessel_i(0, 90.0, scaled=True) == pytest.approx(
            bessel_i(0, 90.0) * math.exp(-90.0), rel=1e-10
        )
        assert bessel_k(3, 2.2, scaled=True) == pytest.approx(
            bessel_k(3, 2.2) * math.exp(2.2), rel=1e-12
        )

    def test_vectorized(self):
        x = np.array([0.5, 3.7])
        out = bessel_i(0, x)
        assert out.shape == (2,)
        assert out[0] == pytest.approx(1.0634833707413235, rel=RTOL)


class TestMarcumQ:
    REF = [
        (1.0, 1.0, 2.0, 0.26901206003591),
        (2.5, 0.5, 1.2, 0.92755443061188133),
        (4.0, 3.0, 2.0, 0.99289721179242945),
        (3.0, 0.0, 2.5, 0.39577565990459963),  # a = 0 degenerates to gamma tail
    ]

    @pytest.mark.parametrize("k,a,b,ref", REF)
    def test_frozen(self, k, a, b, ref):
        assert marcum_q(k, a, b) == pytest.approx(ref, rel=1e-10)

    def test_limits(self):
        assert marcum_q(2.0, 1.5, 0.0) == pytest.approx(1.0, abs=1e-14)
        assert marcum_q(2.0, 1.5, 60.0) == pytest.approx(0.0, abs=1e-12)

    def test_monotone_in_b(self):
        b = np.linspace(0.0, 8.0, 40)
        vals = np.array([marcum_q(2.0, 1.2, bi) for bi in b])
        assert np.all(np.diff(vals) <= 1e-14)


class TestNoncentralChi2:
    def test_frozen_pdf_cdf(self):
        p = NoncentralChi2Params(shape=2.5, noncentrality=3.2, scale=1.4)
        assert ncchi2_pdf(p, 4.1) == pytest.approx(0.089616951422483201, rel=1e-10)
        assert ncchi2_cdf(p, 4.1) == pytest.approx(0.17412242466744241, rel=1e-10)
        q = NoncentralChi2Params(shape=6.0, noncentrality=25.0, scale=0.5)
        assert ncchi2_cdf(q, 20.0) == pytest.approx(0.88143406440705255, rel=1e-10)

    def test_central_reduces_to_gamma(self):
        # lambda = 0: density x^{k-1} e^{-x/s} / (Gamma(k) s^k)
        p = NoncentralChi2Params(shape=1.0, noncentrality=0.0, scale=1.0)
        assert ncchi2_pdf(p, 0.3) == pytest.approx(math.exp(-0.3), rel=1e-12)
        k, s = 3.4, 0.7
        p = NoncentralChi2Params(shape=k, noncentrality=0.0, scale=s)
        for x in (0.4, 1.9, 6.0):
            ref = x ** (k - 1) * math.exp(-x / s) / (math.gamma(k) * s**k)
            assert ncchi2_pdf(p, x) == pytest.approx(ref, rel=1e-12)

    def test_cdf_matches_marcum(self):
        # F(x) = 1 - Q_k(sqrt(2 lam), sqrt(2 x / s))
        p = NoncentralChi2Params(shape=3.0, noncentrality=4.5, scale=2.0)
        for x in (0.5, 3.0, 11.0, 40.0):
            ref = 1.0 - marcum_q(3.0, math.sqrt(9.0), math.sqrt(2.0 * x / 2.0))
            assert ncchi2_cdf(p, x) == pytest.approx(ref, abs=1e-13)

    def test_pdf_normalizes(self):
        for p in (
            NoncentralChi2Params(2.5, 3.2, 1.4),
            NoncentralChi2Params(6.0, 25.0, 0.5),
        ):
            total, _ = quad(lambda x: ncchi2_pdf(p, x), 0, np.inf, limit=200)
            assert total == pytest.approx(1.0, abs=1e-8)

    def test_mean_and_variance(self):
        p = NoncentralChi2Params(shape=3.0, noncentrality=2.0, scale=0.5)
        mean, _ = quad(lambda x: x * ncchi2_pdf(p, x), 0, np.inf, limit=200)
        assert mean == pytest.approx(0.5 * (3.0 + 2.0), rel=1e-8)
        m2, _ = quad(lambda x: x * x * ncchi2_pdf(p, x), 0, np.inf, limit=200)
        assert m2 - mean**2 == pytest.approx(0.25 * (3.0 + 2.0 * 2.0), rel=1e-7)

    def test_cdf_monotone_bounded(self):
        p = NoncentralChi2Params(2.5, 3.2, 1.4)
        x = np.linspace(0.0, 80.0, 400)
        c = ncchi2_cdf(p, x)
        assert np.all(np.diff(c) >= -1e-14)
        assert c[0] == pytest.approx(0.0, abs=1e-14) and c[-1] > 0.999999

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            NoncentralChi2Params(shape=0.0, noncentrality=1.0)
        with pytest.raises(ValueError):
            NoncentralChi2Params(shape=2.0, noncentrality=-0.1)
        with pytest.raises(ValueError):
            NoncentralChi2Params(shape=2.0, noncentrality=1.0, scale=0.0)


class TestKappaMuMapping:
    def test_forward_point(self):
        km = kappa_mu_convert(NoncentralChi2Params(3.0, 2.0, 0.5))
        assert km.mu == pytest.approx(3.0)
        assert km.kappa == pytest.approx(2.0 / 3.0)
        assert km.omega == pytest.approx(0.5 * 5.0)

    def test_round_trip_random(self):
        rng = np.random.default_rng(321)
        for _ in range(100):
            p = NoncentralChi2Params(
                shape=float(rng.uniform(0.3, 20.0)),
                noncentrality=float(rng.uniform(0.0, 50.0)),
                scale=float(rng.uniform(0.01, 10.0)),
            )
            q = kappa_mu_invert(kappa_mu_convert(p))
            assert q.shape == pytest.approx(p.shape, rel=1e-12)
            assert q.noncentrality == pytest.approx(p.noncentrality, rel=1e-12, abs=1e-12)
            assert q.scale == pytest.approx(p.scale, rel=1e-12)

    @given(
        k=st.floats(0.5, 15.0),
        lam=st.floats(1e-6, 40.0),
        s=st.floats(0.05, 5.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_round_trip_property(self, k, lam, s):
        p = NoncentralChi2Params(k, lam, s)
        q = kappa_mu_invert(kappa_mu_convert(p))
        assert math.isclose(q.shape, k, rel_tol=1e-10)
        assert math.isclose(q.noncentrality, lam, rel_tol=1e-9, abs_tol=1e-12)
        assert math.isclose(q.scale, s, rel_tol=1e-10)


class TestGammaProductKernel:
    REF = [
        # (a, alpha, x, pdf, cdf) against the exact Bessel-K form
        (2.0, 3.0, 1.7, 0.14334021936182945, 0.19936787821051479),
        (5.5, 1.2, 4.0, 0.086857955788298473, 0.46999308774270404),
    ]

    @pytest.mark.parametrize("a,alpha,x,fpdf,fcdf", REF)
    def test_frozen(self, a, alpha, x, fpdf, fcdf):
        assert gk_pdf(a, alpha, x) == pytest.approx(fpdf, rel=1e-10)
        assert gk_cdf(a, alpha, x) == pytest.approx(fcdf, rel=1e-7)

    def test_large_shape_surrogate(self):
        # shape 60 rides the chi-squared limit; ~1% model error is expected
        assert gk_pdf(60.0, 2.0, 110.0) == pytest.approx(
            0.0048173459408303802, rel=1e-3
        )
        assert gk_cdf(60.0, 2.0, 110.0) == pytest.approx(
            0.55209079136751779, rel=2e-2
        )

    def test_symmetric_in_shapes(self):
        for x in (0.3, 1.7, 9.0):
            assert gk_pdf(2.0, 3.0, x) == pytest.approx(gk_pdf(3.0, 2.0, x), rel=1e-12)

    def test_pdf_normalizes(self):
        total, _ = quad(lambda x: gk_pdf(2.0, 3.0, x), 0, np.inf, limit=200)
        assert total == pytest.approx(1.0, abs=1e-7)

    def test_mean_is_product_of_scales(self):
        # X = G(a,1) * G(alpha,1) has mean a * alpha
        a, alpha = 2.0, 3.0
        mean, _ = quad(lambda x: x * gk_pdf(a, alpha, x), 0, np.inf, limit=200)
        assert mean == pytest.approx(a * alpha, rel=1e-7)

    def test_grid_matches_scalar(self):
        xs = np.array([0.5, 1.7, 4.0])
        grid = gk_cdf_grid(2.0, 3.0, xs)
        for xv, cv in zip(xs, grid):
            assert cv == pytest.approx(gk_cdf(2.0, 3.0, float(xv)), abs=1e-8)


class TestLaguerreAndEnvelope:
    def test_laguerre_half_frozen(self):
        assert laguerre_half(-10.0) == pytest.approx(3.6586716081480355, rel=1e-11)
        assert laguerre_half(-2.0) == pytest.approx(1.8130996534803382, rel=1e-11)
        assert laguerre_half(-0.3) == pytest.approx(1.1446436000315019, rel=1e-11)

    def test_laguerre_integer_orders(self):
        for x in (-2.0, 0.0, 1.3):
            assert laguerre(0, x) == pytest.approx(1.0)
            assert laguerre(1, x) == pytest.approx(1.0 - x)
            assert laguerre(2, x) == pytest.approx(0.5 * (x * x - 4 * x + 2))

    def test_envelope_mean_frozen(self):
        assert rician_envelope_mean(1e-4) == pytest.approx(0.88622692600605505, rel=1e-4)
        assert rician_envelope_mean(1.0) == pytest.approx(0.90645402552196947, rel=1e-11)
        assert rician_envelope_mean(10.0) == pytest.approx(0.97762439090461111, rel=1e-11)

    def test_envelope_mean_limits(self):
        # K -> 0 is Rayleigh (sqrt(pi)/2), K -> inf pins the envelope at 1
        assert rician_envelope_mean(0.0) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-9)
        assert rician_envelope_mean(1e6) == pytest.approx(1.0, abs=1e-5)


class TestGaussianQ:
    def test_frozen(self):
        assert q_inv(1e-4) == pytest.approx(3.7190164854556806, rel=1e-12)
        assert q_inv(0.05) == pytest.approx(1.6448536269514727, rel=1e-12)

    def test_round_trip(self):
        for p in (1e-8, 1e-4, 0.02, 0.3, 0.5):
            assert q_func(q_inv(p)) == pytest.approx(p, rel=1e-10)

    @given(st.floats(1e-9, 0.5))
    @settings(max_examples=60, deadline=None)
    def test_round_trip_property(self, p):
        assert math.isclose(q_func(q_inv(p)), p, rel_tol=1e-9)

    def test_tail_values(self):
        assert q_func(0.0) == pytest.approx(0.5)
        assert q_func(np.inf) == 0.0


class TestPoissonWindow:
    def test_degenerate(self):
        assert poisson_truncation(0.0) == (0, 0)

    @pytest.mark.parametrize("mean", [0.5, 3.0, 100.0, 4000.0])
    def test_window_holds_mass(self, mean):
        lo, hi = poisson_truncation(mean, epsilon=1e-10)
        assert 0 <= lo <= mean <= hi
        mass = poisson.cdf(hi, mean) - (poisson.cdf(lo - 1, mean) if lo else 0.0)
        assert mass >= 1.0 - 5e-10


class TestChi2Helpers:
    def test_frozen(self):
        assert chi2_cdf(2.0, 1.5) == pytest.approx(0.4421745996289252, rel=1e-12)

    def test_pdf_is_central_ncchi2(self):
        p = NoncentralChi2Params(2.0, 0.0, 1.0)
        for x in (0.2, 1.5, 5.0):
            assert chi2_pdf(2.0, x) == pytest.approx(ncchi2_pdf(p, x), rel=1e-12)
            assert chi2_cdf(2.0, x) == pytest.approx(ncchi2_cdf(p, x), rel=1e-12)
