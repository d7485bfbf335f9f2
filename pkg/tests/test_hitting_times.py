import math

import numpy as np
import pytest

from wiener_coding import (
    DriftHitSpec,
    ParameterError,
    band_exit_lower_prob,
    band_exit_upper_prob,
    hit_moments,
    laplace_transform,
    sample_hit_time,
    sample_hit_times,
)


class TestLaplaceTransform:
    def test_at_zero(self):
        assert laplace_transform(DriftHitSpec(1, 1), 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_closed_form_points(self):
        # sqrt(1 + 2*1.5) = 2, so the exponent is -c
        assert laplace_transform(DriftHitSpec(1, 1), 1.5) == pytest.approx(
            math.exp(-1), rel=1e-14
        )
        assert laplace_transform(DriftHitSpec(2, 1), 1.5) == pytest.approx(
            math.exp(-2), rel=1e-14
        )

    def test_negative_lambda_rejected(self):
        with pytest.raises(ParameterError):
            laplace_transform(DriftHitSpec(1, 1), -0.1)

    @pytest.mark.parametrize("c,mu", [(0.5, 0.7), (1, 1), (2, 3)])
    def test_derivatives_match_moments(self, c, mu):
        # finite-difference derivatives of Psi at 0 reproduce the first two
        # moments; the transform's domain starts at 0, so the stencils are
        # second-order one-sided rather than centered
        spec = DriftHitSpec(c, mu)
        h = 1e-4
        f = [laplace_transform(spec, k * h) for k in range(4)]
        m1, m2, _, _ = hit_moments(spec)
        d1 = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
        d2 = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h)
        assert -d1 == pytest.approx(m1, rel=1e-4)
        assert d2 == pytest.approx(m2, rel=1e-4)


class TestHitMoments:
    def test_closed_form_values(self):
        m = hit_moments(DriftHitSpec(2, 1))
        assert m[0] == 2.0
        assert m[1] == 6.0
        m = hit_moments(DriftHitSpec(1, 10))
        assert m[0] == pytest.approx(0.1, rel=1e-15)
        assert m[1] == pytest.approx(0.011, rel=1e-15)

    def test_variance_nonnegative(self):
        for c in (0.1, 1, 5):
            for mu in (0.2, 1, 8):
                m = hit_moments(DriftHitSpec(c, mu))
                assert m[1] >= m[0] ** 2

    def test_invalid_spec(self):
        with pytest.raises(ParameterError):
            DriftHitSpec(0, 1)
        with pytest.raises(ParameterError):
            DriftHitSpec(1, -1)


class TestBandExit:
    def test_symmetry_point(self):
        assert band_exit_upper_prob(0.0, 1.0, 1.0) == 0.5

    def test_boundary(self):
        assert band_exit_upper_prob(1.0, 1.0, 1.0) == 1.0
        assert band_exit_upper_prob(-1.0, 1.0, 1.0) == 0.0

    def test_linear_interpolation(self):
        assert band_exit_upper_prob(0.3, 1, 1) == pytest.approx(0.65, abs=1e-15)

    def test_complement_exact(self):
        for x in (-0.8, 0.0, 0.4):
            up = band_exit_upper_prob(x, 1.2, 0.9)
            dn = band_exit_lower_prob(x, 1.2, 0.9)
            assert up + dn == 1.0

    def test_domain_errors(self):
        with pytest.raises(ParameterError):
            band_exit_upper_prob(2.0, 1.0, 1.0)
        with pytest.raises(ParameterError):
            band_exit_upper_prob(0.0, 0.0, 0.0)


class TestSampler:
    def test_deterministic_given_seed(self):
        a = sample_hit_times(DriftHitSpec(1, 2), 1e-3, 500, rng_seed=7)
        b = sample_hit_times(DriftHitSpec(1, 2), 1e-3, 500, rng_seed=7)
        assert np.array_equal(a, b)

    def test_strong_drift_limit(self):
        # mu=1000, c=1: hitting is essentially deterministic at t = 1e-3
        t = sample_hit_time(DriftHitSpec(1, 1000), 1e-6, rng_seed=3)
        assert t == pytest.approx(1e-3, abs=2e-4)

    def test_single_path_wraps_batch(self):
        t = sample_hit_time(DriftHitSpec(1, 1), 1e-3, rng_seed=11)
        assert t > 0 and math.isfinite(t)

    def test_moments_smoke(self):
        # light version of the acceptance check; tolerances sized ~4 MC sigma
        spec = DriftHitSpec(1, 1)
        times = sample_hit_times(spec, 1e-4, 20_000, rng_seed=5)
        m1, m2, _, _ = hit_moments(spec)
        assert float(times.mean()) == pytest.approx(m1, rel=0.03)
        assert float((times**2).mean()) == pytest.approx(m2, rel=0.09)

    def test_invalid_args(self):
        with pytest.raises(ParameterError):
            sample_hit_times(DriftHitSpec(1, 1), 0.0, 10, rng_seed=0)
        with pytest.raises(ParameterError):
            sample_hit_times(DriftHitSpec(1, 1), 1e-3, 0, rng_seed=0)

    def test_horizon_cap_is_loud(self):
        from wiener_coding import HorizonError

        with pytest.raises(HorizonError):
            sample_hit_times(DriftHitSpec(5, 0.1), 1e-3, 50, rng_seed=2, horizon=0.5)
