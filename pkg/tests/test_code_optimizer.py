import math

import numpy as np
import pytest

import oracles
from wiener_coding import (
    Codebook,
    InfeasibleError,
    ParameterError,
    RateConstraint,
    ThresholdConfig,
    UnsupportedConfigurationError,
    build_qp,
    dinkelbach_solve,
    integer_oracle,
    mse_large_mu,
    optimize_threshold,
    scheme_constants,
    solve_qp,
    verify_ktilde_negative,
)

MU = 1e6
UNC = RateConstraint(math.inf)


def sym_cfg(a):
    return ThresholdConfig(a, a, MU)


def _quadratic_part_first_principles(a, l1, l2):
    """K*E[L^2] + E[L]*E_Ptilde[L] assembled from PMF sums, no Q involved."""
    sc = scheme_constants(sym_cfg(a))
    p1, p2 = sc.probs.p1, sc.probs.p2
    pt1, pt2 = sc.p_tilde[0], sc.p_tilde[1]
    m1 = 2 * (p1 * l1 + p2 * l2)
    m2 = 2 * (p1 * l1**2 + p2 * l2**2)
    lt = 2 * (pt1 * l1 + pt2 * l2)
    return sc.k * m2 + m1 * lt


class TestBuildQp:
    def test_requires_symmetric_thresholds(self):
        with pytest.raises(UnsupportedConfigurationError):
            build_qp(ThresholdConfig(1, 2, MU), 1.0, UNC)

    def test_theta_zero_kills_linear_term(self):
        inst = build_qp(sym_cfg(1.0), 0.0, UNC)
        assert np.all(inst.q_theta == 0.0)

    @pytest.mark.parametrize("a", [0.1, 0.5, 1.0, 2.0, 3.5])
    def test_q_psd(self, a):
        inst = build_qp(sym_cfg(a), 1.0, UNC)
        assert np.linalg.eigvalsh(inst.Q).min() >= -1e-10
        assert inst.Q[0, 1] == inst.Q[1, 0]

    @pytest.mark.parametrize("a", [0.3, 1.0, 2.2])
    def test_q_matches_fd_hessian(self, a):
        # the parametric objective is exactly quadratic, so a wide-step
        # second difference of the first-principles form is exact
        inst = build_qp(sym_cfg(a), 0.7, UNC)
        h = 0.25
        x = np.array([3.0, 3.0])

        def f(l1, l2):
            return _quadratic_part_first_principles(a, l1, l2)

        h11 = (f(x[0] + h, x[1]) - 2 * f(*x) + f(x[0] - h, x[1])) / h**2
        h22 = (f(x[0], x[1] + h) - 2 * f(*x) + f(x[0], x[1] - h)) / h**2
        h12 = (
            f(x[0] + h, x[1] + h)
            - f(x[0] + h, x[1] - h)
            - f(x[0] - h, x[1] + h)
            + f(x[0] - h, x[1] - h)
        ) / (4 * h**2)
        fd = np.array([[h11, h12], [h12, h22]])
        assert np.abs(fd / 2.0 - inst.Q).max() <= 1e-8

    def test_rate_bound_value(self):
        sc = scheme_constants(sym_cfg(1.0))
        inst = build_qp(sym_cfg(1.0), 1.0, RateConstraint(0.5))
        assert inst.rate_bound == pytest.approx(1.0 / (sc.d * 0.5), rel=1e-14)


class TestSolveQp:
    def test_unconstrained_fixed_point_identity(self):
        # with both constraints slack, lengths satisfy the stationarity
        # fixed point l_i = (1 + (p_i - pt_i)/(2K p_i)) * E_P[L]
        a, theta = 1.0, 60.0
        inst = build_qp(sym_cfg(a), theta, UNC)
        sol = solve_qp(inst)
        assert sol.pattern == "interior"
        sc = scheme_constants(sym_cfg(a))
        p = sc.probs.as_tuple()
        pt = sc.p_tilde
        lengths = (sol.l1, sol.l2, sol.l2, sol.l1)
        epl = sum(pi * li for pi, li in zip(p, lengths))
        for pi, qi, li in zip(p, pt, lengths):
            assert li == pytest.approx(
                (1 + (pi - qi) / (2 * sc.k * pi)) * epl, rel=1e-9
            )

    @pytest.mark.parametrize(
        "a,theta,fmax",
        [
            (0.5, 2.0, math.inf),
            (1.0, 2.8, math.inf),
            (2.0, 2.5, math.inf),
            (0.5, 2.0, 0.3),
            (1.0, 4.0, 0.2),
            (2.2, 1.0, 0.6),
        ],
    )
    def test_kkt_residuals_and_random_optimality(self, a, theta, fmax):
        inst = build_qp(sym_cfg(a), theta, RateConstraint(fmax))
        sol = solve_qp(inst)
        if not sol.capped:
            # stationarity residual of the full KKT system
            g = 2 * inst.Q @ np.array([sol.l1, sol.l2]) - inst.q_theta
            g -= sol.lam * math.log(2) * np.array([2.0**-sol.l1, 2.0**-sol.l2])
            g -= sol.gamma * 2 * np.array(inst.p)
            assert np.abs(g).max() <= 1e-8
            assert abs(sol.lam * inst.kraft_slack(sol.l1, sol.l2)) <= 1e-8
            assert abs(sol.gamma * inst.rate_slack(sol.l1, sol.l2)) <= 1e-8
        # no random feasible point does better
        rng = np.random.default_rng(12345)
        pts = rng.uniform(1.0, 30.0, size=(40_000, 2))
        feas = 2.0 ** -pts[:, 0] + 2.0 ** -pts[:, 1] <= inst.kraft_bound
        feas &= 2 * (inst.p[0] * pts[:, 0] + inst.p[1] * pts[:, 1]) >= inst.rate_bound
        pts = pts[feas][:10_000]
        assert pts.shape[0] > 1000
        objs = (
            pts[:, 0] ** 2 * inst.Q[0, 0]
            + 2 * pts[:, 0] * pts[:, 1] * inst.Q[0, 1]
            + pts[:, 1] ** 2 * inst.Q[1, 1]
            - pts @ inst.q_theta
        )
        assert objs.min() >= sol.objective - 1e-8

    def test_infeasible_rate_floor(self):
        with pytest.raises(InfeasibleError):
            solve_qp(build_qp(sym_cfg(1.0), 1.0, RateConstraint(1e-4)))


class TestDinkelbach:
    def test_origin_anchor(self):
        res = dinkelbach_solve(sym_cfg(0.0), UNC)
        assert res.theta_star == pytest.approx(1.5, abs=1e-6)
        assert res.lengths.l1 == pytest.approx(1.0, abs=1e-6)
        assert res.capped  # l2 pushed to the cap, standing in for infinity

    def test_sign_property(self):
        for a in (0.5, 1.5):
            res = dinkelbach_solve(sym_cfg(a), UNC)
            for delta, sign in ((-0.1, 1), (0.1, -1)):
                inst = build_qp(sym_cfg(a), res.theta_star + delta, UNC)
                assert math.copysign(1, solve_qp(inst).objective) == sign

    def test_matches_dense_grid(self):
        theta_grid, _, _ = oracles.grid_search_theta(1.0, math.inf)
        res = dinkelbach_solve(sym_cfg(1.0), UNC)
        assert res.theta_star == pytest.approx(theta_grid, abs=1e-3)

    def test_fractional_consistency(self):
        res = dinkelbach_solve(sym_cfg(0.8), RateConstraint(0.4))
        val = mse_large_mu(sym_cfg(0.8), res.lengths).mse
        assert val == pytest.approx(res.theta_star, abs=1e-6)

    def test_sigma_guard(self):
        with pytest.raises(UnsupportedConfigurationError):
            dinkelbach_solve(ThresholdConfig(1, 1, MU, sigma2=4), UNC)

    def test_band_codeword_diverges_at_small_thresholds(self):
        # shrinking a drives l1 to 1 and l2 toward infinity (capped + flagged)
        l2_seen = []
        for a in (0.2, 0.1, 0.05, 0.0):
            res = dinkelbach_solve(sym_cfg(a), UNC)
            l2_seen.append(res.lengths.l2)
        assert all(x < y for x, y in zip(l2_seen, l2_seen[1:]))
        res = dinkelbach_solve(sym_cfg(0.0), UNC)
        assert res.capped and res.lengths.l2 == 64.0
        assert res.lengths.l1 == pytest.approx(1.0, abs=1e-6)


class TestOptimizeThreshold:
    def test_unconstrained_optimum_at_zero(self):
        res = optimize_threshold(UNC, a_grid=(0.0, 1.0, 0.05))
        assert res.a_star == 0.0
        assert res.mse == pytest.approx(1.5, abs=1e-6)
        assert res.sr == pytest.approx(1.0, abs=1e-6)
        assert "kraft" in res.active

    def test_constrained_optimum_nonzero(self):
        res = optimize_threshold(RateConstraint(0.2), a_grid=(0.0, 3.0, 0.1))
        assert res.a_star > 0.0
        assert min(res.kraft_slack, res.rate_slack) <= 1e-6

    def test_one_constraint_always_tight(self):
        for fmax in (0.2, 0.5, math.inf):
            res = optimize_threshold(
                RateConstraint(fmax), a_grid=(0.0, 2.0, 0.25), refine=False
            )
            assert min(res.kraft_slack, res.rate_slack) <= 1e-6
            assert res.mse == pytest.approx(
                mse_large_mu(sym_cfg(res.a_star), res.lengths).mse, abs=1e-9
            )

    def test_bad_grid(self):
        with pytest.raises(ParameterError):
            optimize_threshold(UNC, a_grid=(1.0, 0.5, 0.1))

    def test_all_infeasible(self):
        with pytest.raises(InfeasibleError):
            optimize_threshold(RateConstraint(1e-4), a_grid=(0.5, 1.0, 0.25))


class TestIntegerOracle:
    def test_relaxation_bound(self):
        for a, fmax in [(0.5, math.inf), (1.0, 0.5), (2.0, 0.3)]:
            rc = RateConstraint(fmax)
            relaxed = dinkelbach_solve(sym_cfg(a), rc)
            _, int_mse = integer_oracle(sym_cfg(a), rc, l_max=12)
            assert relaxed.theta_star <= int_mse + 1e-9

    def test_origin_prefers_short_first_codeword(self):
        # dead band events carry no codeword (length inf), freeing l1 = 1
        cb, mse = integer_oracle(sym_cfg(0.0), UNC, l_max=12)
        assert cb.l1 == 1
        assert math.isinf(cb.l2)
        assert mse == pytest.approx(1.5, abs=1e-12)

    def test_longer_budget_weakly_improves(self):
        for a in (0.0, 0.3):
            _, mse8 = integer_oracle(sym_cfg(a), UNC, l_max=8)
            _, mse12 = integer_oracle(sym_cfg(a), UNC, l_max=12)
            assert mse12 <= mse8 + 1e-15

    def test_l_max_guard(self):
        with pytest.raises(ParameterError):
            integer_oracle(sym_cfg(1.0), UNC, l_max=20)

    def test_infeasible_reported(self):
        with pytest.raises(InfeasibleError):
            integer_oracle(sym_cfg(1.0), RateConstraint(0.01), l_max=4)


class TestKtilde:
    def test_negative_on_grid(self):
        rep = verify_ktilde_negative(np.arange(0.01, 4.001, 0.05))
        assert rep.all_negative
        assert rep.max_value < 0

    def test_zero_threshold_convention(self):
        # at a = 0 the band terms drop and Ktilde = -1 exactly
        rep = verify_ktilde_negative([0.0])
        assert rep.values[0] == pytest.approx(-1.0, abs=1e-12)

    def test_reports_argmax(self):
        rep = verify_ktilde_negative([0.5, 1.0, 2.0])
        assert rep.argmax_a in (0.5, 1.0, 2.0)
        assert rep.max_value == rep.values.max()

    def test_empty_grid(self):
        with pytest.raises(ParameterError):
            verify_ktilde_negative([])
