import itertools
import math

import numpy as np
import pytest

import oracles
from wiener_coding import (
    BandStop,
    Codebook,
    DeterministicStop,
    ModelError,
    ParameterError,
    SlopedStop,
    ThresholdConfig,
    ideal_benchmark_mse,
    mse_exact,
    mse_integral_oracle,
    mse_large_mu,
    sampling_rate,
    scale_to_sigma,
)

INF = math.inf


class TestCodebook:
    def test_integer_kraft_violation(self):
        with pytest.raises(ParameterError):
            Codebook.integer(1, 1, 2, 2)

    def test_integer_requires_integers(self):
        with pytest.raises(ParameterError):
            Codebook.integer(1.5, 3, 3, 3)
        with pytest.raises(ParameterError):
            Codebook.integer(0, 3, 3, 3)

    def test_integer_allows_inf_for_dead_events(self):
        cb = Codebook.integer(1, INF, INF, 1)
        assert cb.kraft_sum() == 1.0

    def test_relaxed_rejects_nonpositive(self):
        with pytest.raises(ParameterError):
            Codebook.relaxed(1, 2, 0.0, 2)

    def test_unknown_mode(self):
        with pytest.raises(ParameterError):
            Codebook(1, 2, 3, 4, mode="huffman")


class TestLargeMu:
    def test_zero_threshold_anchor(self):
        cfg = ThresholdConfig(0, 0, 100)
        bd = mse_large_mu(cfg, Codebook.relaxed(1, INF, INF, 1))
        assert bd.mse == pytest.approx(1.5, abs=1e-12)
        assert bd.sr == pytest.approx(1.0, abs=1e-12)

    def test_uniform_two_at_origin(self):
        bd = mse_large_mu(ThresholdConfig(0, 0, 100), Codebook.uniform(2.0))
        assert bd.mse == pytest.approx(3.0, abs=1e-12)
        assert bd.sr == pytest.approx(0.5, abs=1e-12)

    def test_frozen_unit_band_uniform(self):
        bd = mse_large_mu(ThresholdConfig(1, 1, 100), Codebook.uniform(2.0))
        assert bd.mse == pytest.approx(2.8020053204014825, abs=1e-12)
        assert bd.sr == pytest.approx(0.33694051764915667, abs=1e-12)

    def test_matches_quadrature_oracle(self):
        for a, b, ls in [
            (1, 1, (2, 2, 2, 2)),
            (0.5, 1.5, (1, 3, 4, 2)),
            (2, 2, (3.5, 1.2, 1.2, 3.5)),
        ]:
            bd = mse_large_mu(ThresholdConfig(a, b, 100), Codebook.relaxed(*ls))
            mse, sr = oracles.oracle_mse_large_mu(a, b, ls)
            assert bd.mse == pytest.approx(mse, abs=1e-10)
            assert bd.sr == pytest.approx(sr, abs=1e-10)

    def test_constant_delay_reduction(self):
        # uniform lengths L0 collapse the formula to (K + 1) * L0 exactly
        for a in (0.0, 0.7, 1.3, 2.5):
            cfg = ThresholdConfig(a, a, 100)
            from wiener_coding import scheme_constants

            k = scheme_constants(cfg).k
            for l0 in (1.0, 2.0, 3.7):
                bd = mse_large_mu(cfg, Codebook.uniform(l0))
                assert bd.mse == pytest.approx(k * l0 + l0, abs=1e-12)

    def test_age_form_symmetry(self):
        cfg = ThresholdConfig(1.2, 1.2, 100)
        m1 = mse_large_mu(cfg, Codebook.relaxed(1.5, 3, 2.5, 4)).mse
        m2 = mse_large_mu(cfg, Codebook.relaxed(4, 2.5, 3, 1.5)).mse
        assert m1 == pytest.approx(m2, abs=1e-12)

    def test_infinite_length_with_weight_rejected(self):
        cfg = ThresholdConfig(1, 1, 100)
        with pytest.raises(ModelError):
            mse_large_mu(cfg, Codebook.relaxed(1, INF, INF, 1))

    def test_positivity(self):
        bd = mse_large_mu(ThresholdConfig(0.8, 1.4, 50), Codebook.relaxed(2, 3, 1, 4))
        for f in ("mse", "sr", "ey4", "ecy2", "etau", "lbar", "l2bar", "lsqrtbar", "ltilde"):
            assert getattr(bd, f) > 0


class TestExact:
    def test_huge_mu_agrees_with_large_mu(self):
        for a, b in [(0, 0), (1, 1), (0.4, 2.1)]:
            cfg = ThresholdConfig(a, b, 1e6)
            cb = Codebook.relaxed(2, 3, 3, 2)
            assert mse_exact(cfg, cb).mse == pytest.approx(
                mse_large_mu(cfg, cb).mse, abs=1e-3
            )

    def test_gap_bound_at_mu_1e4(self):
        # |exact - large| <= 10/mu over the full small-integer codebook grid
        mu = 1e4
        for a in (0.0, 0.5, 1.0, 2.0):
            cfg = ThresholdConfig(a, a, mu)
            for ls in itertools.product((1, 2, 3, 4), repeat=4):
                cb = Codebook.relaxed(*ls)
                gap = abs(mse_exact(cfg, cb).mse - mse_large_mu(cfg, cb).mse)
                assert gap <= 10.0 / mu

    def test_gap_decreasing_in_mu(self):
        cb = Codebook.uniform(2.0)
        gaps = []
        for mu in (1, 3, 10, 30, 100, 1000):
            cfg = ThresholdConfig(1, 1, mu)
            gaps.append(abs(mse_exact(cfg, cb).mse - mse_large_mu(cfg, cb).mse))
        assert all(x > y for x, y in zip(gaps, gaps[1:]))

    def test_etau_is_reciprocal_sr(self):
        cfg = ThresholdConfig(0.6, 1.1, 5)
        bd = mse_exact(cfg, Codebook.relaxed(1, 2, 3, 4))
        assert bd.etau == pytest.approx(1.0 / bd.sr, rel=1e-14)

    def test_exact_has_positive_mu_corrections(self):
        # finite mu lengthens cycles and grows the MSE at the origin config
        cfg_small = ThresholdConfig(0, 0, 1)
        cfg_big = ThresholdConfig(0, 0, 1e8)
        cb = Codebook.uniform(2.0)
        assert mse_exact(cfg_small, cb).mse > mse_exact(cfg_big, cb).mse


class TestSamplingRate:
    def test_mode_dispatch(self):
        cfg = ThresholdConfig(1, 1, 10)
        cb = Codebook.uniform(2.0)
        assert sampling_rate(cfg, cb, "exact") == mse_exact(cfg, cb).sr
        assert sampling_rate(cfg, cb, "large_mu") == mse_large_mu(cfg, cb).sr
        with pytest.raises(ParameterError):
            sampling_rate(cfg, cb, "medium")

    def test_unit_rate_anchor(self):
        cfg = ThresholdConfig(0, 0, 100)
        assert sampling_rate(cfg, Codebook.relaxed(1, INF, INF, 1), "large_mu") == (
            pytest.approx(1.0, abs=1e-12)
        )


class TestSigmaScaling:
    def test_identity_at_unit_variance(self):
        cfg = ThresholdConfig(1, 1, 10)
        assert scale_to_sigma(cfg) is cfg

    def test_canonical_mapping(self):
        cfg = ThresholdConfig(2, 2, 20, sigma2=4)
        canon = scale_to_sigma(cfg)
        assert canon.a == pytest.approx(1.0)
        assert canon.mu == pytest.approx(10.0)
        assert canon.sigma2 == 1.0

    def test_mse_scales_by_sigma2(self):
        # scaled thresholds on the sigma process quadruple the MSE at sigma=2
        base = ThresholdConfig(1, 1, 10)
        scaled = ThresholdConfig(2, 2, 20, sigma2=4)
        cb = Codebook.uniform(2.0)
        for fn in (mse_large_mu, mse_exact):
            assert fn(scaled, cb).mse == pytest.approx(4 * fn(base, cb).mse, rel=1e-12)
            assert fn(scaled, cb).sr == pytest.approx(fn(base, cb).sr, rel=1e-12)


class TestIdealBenchmark:
    def test_zero_threshold(self):
        mse, sr = ideal_benchmark_mse(0.0)
        assert mse == pytest.approx(1.5, abs=1e-12)
        assert sr == pytest.approx(1.0, abs=1e-12)

    def test_rejects_negative(self):
        with pytest.raises(ParameterError):
            ideal_benchmark_mse(-0.5)

    def test_nonzero_minimum(self):
        # the benchmark's best threshold is strictly positive
        grid = np.arange(0, 2.01, 0.05)
        mses = [ideal_benchmark_mse(a)[0] for a in grid]
        assert min(mses) < mses[0]


class TestIntegralOracle:
    def test_deterministic_exact_value(self):
        r = mse_integral_oracle(DeterministicStop(1.0), n_paths=20_000, step=1e-3, seed=3)
        # both sides are t^2/2 analytically
        assert abs(r.lhs - 0.5) <= 1.96 * r.lhs_se
        assert abs(r.rhs - 0.5) <= 1.96 * r.rhs_se
        assert abs(r.diff) <= 1.96 * r.diff_se
        assert r.n_truncated == 0

    def test_band_exit_sides_agree(self):
        r = mse_integral_oracle(BandStop(1, 1), n_paths=20_000, step=1e-3, seed=3)
        assert abs(r.diff) <= 1.96 * r.diff_se

    def test_sloped_sides_agree(self):
        r = mse_integral_oracle(SlopedStop(1, 2), n_paths=20_000, step=1e-3, seed=3)
        assert abs(r.diff) <= 1.96 * r.diff_se

    def test_bad_specs(self):
        with pytest.raises(ParameterError):
            mse_integral_oracle(DeterministicStop(-1))
        with pytest.raises(ParameterError):
            mse_integral_oracle(BandStop(0, 1))
        with pytest.raises(ParameterError):
            mse_integral_oracle(SlopedStop(1, 0))

    def test_truncation_flagged(self):
        # an absurdly tight horizon leaves paths unfinished but still reports
        r = mse_integral_oracle(BandStop(3, 3), horizon=0.05, n_paths=500, step=1e-3, seed=1)
        assert r.n_truncated > 0
        assert math.isfinite(r.lhs) and math.isfinite(r.rhs)
