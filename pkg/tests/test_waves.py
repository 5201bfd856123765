"""Traveling-wave construction: sonic conditions, shocks, profiles, trains."""

import math
import warnings

import numpy as np
import pytest

from jamiton import (
    cj_construct,
    critical_densities,
    desired_speed,
    integrate_profile,
    periodic_train,
    pressure,
    rh_jump,
    solitary_jamiton,
    sonic_slope,
    sound_speed,
    sweep_existence,
)
from jamiton.errors import NoJamiton, ZeroStrengthShock
from jamiton.waves import (
    WaveFrame,
    eta_span_by_quadrature,
    mean_train_density,
    ode_rhs,
    wave_denominator,
    wave_numerator,
)

REFERENCE_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5)


def momentum_invariant(params, frame, u):
    return frame.m * u + pressure(params, frame.m / (u - frame.s))


@pytest.fixture(scope="module")
def cj_035(params):
    """Frame and sonic state at rho_minus = 0.35 * rho_max."""
    return cj_construct(params, 0.35 * params.rho_max)


class TestOdeRhs:
    def test_zero_at_equilibrium_root(self, params, cj_035):
        frame, _ = cj_035
        u_minus = desired_speed(params, 0.35 * params.rho_max)
        assert abs(ode_rhs(params, frame, u_minus)) < 1e-10

    def test_finite_limit_at_sonic_point(self, params, cj_035):
        frame, sonic = cj_035
        # Oracle: evaluate just off the sonic point and extrapolate the
        # two-sided average, which cancels the first-order term.
        h = 1e-6
        avg = 0.5 * (
            ode_rhs(params, frame, sonic.u_s + h) + ode_rhs(params, frame, sonic.u_s - h)
        )
        at_sonic = ode_rhs(params, frame, sonic.u_s)
        assert at_sonic == pytest.approx(avg, rel=1e-6)
        assert at_sonic == pytest.approx(sonic.slope, rel=1e-12)

    def test_positive_between_shock_and_sonic(self, params, cj_035):
        frame, sonic = cj_035
        u_minus = desired_speed(params, 0.35 * params.rho_max)
        u_plus = rh_jump(params, frame, u_minus)
        # Oracle: sign sampling; numerator and denominator both negative there.
        for u in np.linspace(u_plus + 1e-9, sonic.u_s - 1e-6, 41):
            assert wave_numerator(params, frame, u) < 0.0
            assert wave_denominator(params, frame, u) < 0.0
            assert ode_rhs(params, frame, u) > 0.0


class TestCjConstruct:
    def test_reference_case_closed_form(self, params, cj_035):
        # Independent algebraic oracle: the numerator roots of the wave ODE
        # are u_minus and s + u0 - u_minus, so the sonic offset is pinned at
        # w = u0 * rho_minus / rho_max; the sonic cubic then gives the flux
        # m = rho_max * w^3 / (w^2 + beta) in closed form, and s follows from
        # m = rho_minus * (u_minus - s).
        frame, sonic = cj_035
        rho_minus = 0.35 * params.rho_max
        w = params.u0 * rho_minus / params.rho_max
        m_expected = params.rho_max * w ** 3 / (w ** 2 + params.beta)
        s_expected = desired_speed(params, rho_minus) - m_expected / rho_minus
        assert frame.m == pytest.approx(m_expected, abs=1e-6 * params.u0)
        assert frame.s == pytest.approx(s_expected, abs=1e-6 * params.u0)
        assert frame.s < desired_speed(params, rho_minus)

    def test_sonic_state_invariants(self, params, cj_035):
        frame, sonic = cj_035
        w = sonic.u_s - frame.s
        assert w ** 2 == pytest.approx(sound_speed(params, sonic.rho_s) ** 2, rel=1e-10)
        assert desired_speed(params, sonic.rho_s) == pytest.approx(sonic.u_s, rel=1e-10)
        assert math.isfinite(sonic.slope) and sonic.slope > 0.0

    def test_cj_residuals(self, params):
        scale = params.u0 ** 2
        for frac in REFERENCE_FRACTIONS:
            frame, sonic = cj_construct(params, frac * params.rho_max)
            assert abs(wave_numerator(params, frame, sonic.u_s)) < 1e-10 * scale
            assert abs(wave_denominator(params, frame, sonic.u_s)) < 1e-10 * scale

    def test_equilibrium_quadratic_structure(self, params):
        for frac in REFERENCE_FRACTIONS:
            rho = frac * params.rho_max
            frame, sonic = cj_construct(params, rho)
            u_minus = desired_speed(params, rho)
            for root in (sonic.u_s, u_minus):
                q = root ** 2 - (frame.s + params.u0) * root + params.u0 * (
                    frame.s + frame.m / params.rho_max
                )
                assert abs(q) < 1e-8 * params.u0 ** 2

    def test_amplitude_vanishes_at_upper_edge(self, params):
        # Oracle: amplitude along a density ramp into the band edge.
        _, hi = critical_densities(params)
        amplitudes = []
        for shrink in (3e-3, 1e-3, 3e-4):
            rho = hi * (1.0 - shrink)
            frame, _ = cj_construct(params, rho)
            u_minus = desired_speed(params, rho)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ZeroStrengthShock)
                amplitudes.append(u_minus - rh_jump(params, frame, u_minus))
        assert amplitudes[0] > amplitudes[1] > amplitudes[2]
        assert amplitudes[2] < 1e-2 * params.u0

    def test_below_band_raises(self, params):
        with pytest.raises(NoJamiton):
            cj_construct(params, 0.002)

    def test_lax_condition_at_far_state(self, params):
        for frac in REFERENCE_FRACTIONS:
            rho = frac * params.rho_max
            frame, _ = cj_construct(params, rho)
            assert desired_speed(params, rho) - frame.s > sound_speed(params, rho)


class TestRhJump:
    def test_involution(self, params, cj_035):
        frame, _ = cj_035
        u_minus = desired_speed(params, 0.35 * params.rho_max)
        u_plus = rh_jump(params, frame, u_minus)
        assert rh_jump(params, frame, u_plus) == pytest.approx(u_minus, rel=1e-10)

    def test_zero_strength_at_sonic(self, params, cj_035):
        frame, sonic = cj_035
        with pytest.warns(ZeroStrengthShock):
            assert rh_jump(params, frame, sonic.u_s) == sonic.u_s

    def test_reference_case_against_scan_oracle(self, params, cj_035):
        # Oracle: dense scan of the conservation function over (s, u_pre)
        # locating the sign change, then bisection.
        frame, sonic = cj_035
        u_minus = desired_speed(params, 0.35 * params.rho_max)
        target = momentum_invariant(params, frame, u_minus)

        def gap(u):
            return momentum_invariant(params, frame, u) - target

        floor = frame.s + frame.m / params.rho_max
        grid = np.linspace(floor * (1.0 + 1e-9) + 1e-9, u_minus - 1e-6, 20_000)
        values = np.array([gap(u) for u in grid])
        sign_flips = np.flatnonzero(np.sign(values[:-1]) != np.sign(values[1:]))
        assert len(sign_flips) >= 1
        a, b = grid[sign_flips[0]], grid[sign_flips[0] + 1]
        for _ in range(200):
            mid = 0.5 * (a + b)
            if gap(a) * gap(mid) <= 0.0:
                b = mid
            else:
                a = mid
        u_plus_oracle = 0.5 * (a + b)
        u_plus = rh_jump(params, frame, u_minus)
        assert u_plus == pytest.approx(u_plus_oracle, abs=1e-9 * params.u0)
        assert u_plus < sonic.u_s

    def test_conservation_residual(self, params):
        for frac in REFERENCE_FRACTIONS:
            rho = frac * params.rho_max
            frame, _ = cj_construct(params, rho)
            u_minus = desired_speed(params, rho)
            u_plus = rh_jump(params, frame, u_minus)
            lhs = momentum_invariant(params, frame, u_minus)
            rhs = momentum_invariant(params, frame, u_plus)
            assert abs(lhs - rhs) / abs(lhs) < 1e-10

    def test_lax_admissibility(self, params):
        for frac in REFERENCE_FRACTIONS:
            rho = frac * params.rho_max
            frame, _ = cj_construct(params, rho)
            u_minus = desired_speed(params, rho)
            u_plus = rh_jump(params, frame, u_minus)
            rho_plus = frame.m / (u_plus - frame.s)
            assert (u_minus - frame.s) - sound_speed(params, rho) > 0.0
            assert sound_speed(params, rho_plus) - (u_plus - frame.s) > 0.0


class TestSonicSlope:
    def test_derivatives_match_finite_differences(self, params, cj_035):
        frame, sonic = cj_035
        h = 1e-6 * params.u0
        n_fd = (
            wave_numerator(params, frame, sonic.u_s + h)
            - wave_numerator(params, frame, sonic.u_s - h)
        ) / (2.0 * h)
        d_fd = (
            wave_denominator(params, frame, sonic.u_s + h)
            - wave_denominator(params, frame, sonic.u_s - h)
        ) / (2.0 * h)
        assert sonic.slope == pytest.approx(n_fd / d_fd, rel=1e-6)

    def test_matches_richardson_limit_of_rhs(self, params, cj_035):
        frame, sonic = cj_035
        # Oracle: two-sided averages of the ODE right-hand side at shrinking
        # offsets, Richardson-extrapolated.
        hs = np.array([1e-3, 1e-4, 1e-5]) * params.u0
        avgs = [
            0.5 * (ode_rhs(params, frame, sonic.u_s + h) + ode_rhs(params, frame, sonic.u_s - h))
            for h in hs
        ]
        richardson = (100.0 * avgs[1] - avgs[0]) / 99.0
        assert sonic.slope == pytest.approx(richardson, rel=1e-6)
        assert sonic.slope == pytest.approx(avgs[2], rel=1e-4)

    def test_value_recomputable_from_state(self, params, cj_035):
        frame, sonic = cj_035
        assert sonic_slope(params, frame, sonic) == sonic.slope
        assert sonic_slope(params, frame, sonic.u_s) == sonic.slope


class TestIntegrateProfile:
    def test_first_integral_identity(self, params, cj_035):
        frame, sonic = cj_035
        u_minus = desired_speed(params, 0.35 * params.rho_max)
        u_plus = rh_jump(params, frame, u_minus)
        prof = integrate_profile(params, frame, sonic, u_plus=u_plus)
        residual = np.abs(prof.rho * (prof.u - frame.s) - frame.m) / frame.m
        assert residual.max() < 1e-12

    def test_endpoint_matches_rh_jump(self, params, cj_035):
        frame, sonic = cj_035
        u_minus = desired_speed(params, 0.35 * params.rho_max)
        u_plus = rh_jump(params, frame, u_minus)
        prof = integrate_profile(params, frame, sonic, u_plus=u_plus)
        assert abs(prof.u[0] - u_plus) < 1e-8 * params.u0

    def test_monotone_and_sonic_interior(self, params, cj_035):
        frame, sonic = cj_035
        u_minus = desired_speed(params, 0.35 * params.rho_max)
        u_plus = rh_jump(params, frame, u_minus)
        prof = integrate_profile(params, frame, sonic, u_plus=u_plus)
        assert np.all(np.diff(prof.u) > 0.0)
        assert np.all(np.diff(prof.rho) < 0.0)
        assert prof.eta[0] == 0.0
        assert 0.0 < prof.eta_sonic < prof.eta[-1]

    def test_eps_halving_self_convergence(self, params, cj_035):
        frame, sonic = cj_035
        u_minus = desired_speed(params, 0.35 * params.rho_max)
        u_plus = rh_jump(params, frame, u_minus)
        eps0 = 1e-6 * params.u0
        prof_a = integrate_profile(params, frame, sonic, u_plus=u_plus, eps=eps0)
        prof_b = integrate_profile(params, frame, sonic, u_plus=u_plus, eps=0.5 * eps0)
        grid = np.linspace(0.0, min(prof_a.eta[-1], prof_b.eta[-1]), 2000)
        ua = np.interp(grid, prof_a.eta, prof_a.u)
        ub = np.interp(grid, prof_b.eta, prof_b.u)
        assert np.max(np.abs(ua - ub)) < 1e-6 * params.u0

    def test_quadrature_cross_check(self, params, cj_035):
        # The eta-parametrized integration and the u-parametrized quadrature
        # are independent formulations of the same profile.
        frame, sonic = cj_035
        u_minus = desired_speed(params, 0.35 * params.rho_max)
        u_plus = rh_jump(params, frame, u_minus)
        prof = integrate_profile(params, frame, sonic, u_plus=u_plus)
        u_hi = prof.u[-1]
        span_ode = prof.eta[-1]
        span_quad = eta_span_by_quadrature(params, frame, u_plus, u_hi)
        assert span_ode == pytest.approx(span_quad, rel=1e-7)


class TestSolitaryJamiton:
    @pytest.mark.parametrize("frac", REFERENCE_FRACTIONS)
    def test_reference_family(self, params, frac):
        rho = frac * params.rho_max
        sol = solitary_jamiton(params, rho)
        # Far state matches the requested pair (rho/rho_max, u/u0).
        assert sol.far.rho == pytest.approx(rho, rel=1e-14)
        assert sol.far.u / params.u0 == pytest.approx(1.0 - frac, rel=1e-14)
        # The sonic point sits strictly between the shock and the far field.
        assert 0.0 < sol.eta_sonic < sol.smooth_eta[-1]
        # Ordering of the three states.
        assert sol.post_shock.u < sol.sonic.u_s < sol.far.u
        assert sol.post_shock.rho > sol.sonic.rho_s > sol.far.rho
        # Density relaxes back to the far value at the downstream truncation.
        assert abs(sol.rho[-1] - sol.far.rho) < 1e-3 * params.rho_max

    def test_profile_first_integral(self, params):
        sol = solitary_jamiton(params, 0.07)
        residual = np.abs(sol.rho * (sol.u - sol.frame.s) - sol.frame.m) / sol.frame.m
        assert residual.max() < 1e-12

    def test_flags(self, params):
        sol = solitary_jamiton(params, 0.07)
        assert sol.sonic_flag.sum() == 1
        assert sol.shock_flag.sum() == 2
        i_pre, i_post = np.flatnonzero(sol.shock_flag)
        assert sol.eta[i_pre] == 0.0 and sol.eta[i_post] == 0.0
        assert sol.u[i_pre] == pytest.approx(sol.far.u)
        assert sol.u[i_post] == pytest.approx(sol.post_shock.u)
        i_sonic = int(np.flatnonzero(sol.sonic_flag)[0])
        assert sol.u[i_sonic] == pytest.approx(sol.sonic.u_s)

    def test_tail_rate_matches_profile_decay(self, params):
        sol = solitary_jamiton(params, 0.07)
        # Oracle: log-slope of |u - u_minus| over the last stretch of the tail.
        eta = sol.smooth_eta
        gap = sol.far.u - sol.smooth_u
        sel = (gap > 1e-5 * params.u0) & (gap < 1e-3 * params.u0)
        assert sel.sum() > 5
        slope = np.polyfit(eta[sel], np.log(gap[sel]), 1)[0]
        assert slope == pytest.approx(sol.tail_rate, rel=1e-3)


class TestPeriodicTrain:
    def test_rh_conservation_across_periodic_shock(self, params, cj_035):
        frame, _ = cj_035
        train = periodic_train(params, frame, 60.0)
        u_one = train.u[-1]
        u_plus = train.post_shock.u
        lhs = momentum_invariant(params, frame, u_one)
        rhs = momentum_invariant(params, frame, u_plus)
        assert abs(lhs - rhs) / abs(lhs) < 1e-10

    def test_period_span(self, params, cj_035):
        frame, _ = cj_035
        train = periodic_train(params, frame, 60.0)
        assert train.eta[0] == 0.0
        assert train.eta[-1] == pytest.approx(60.0, rel=1e-9)
        assert train.wavelength_eta == 60.0

    def test_long_wavelength_approaches_solitary(self, params, cj_035):
        frame, _ = cj_035
        u_minus = desired_speed(params, 0.35 * params.rho_max)
        short = periodic_train(params, frame, 120.0)
        long = periodic_train(params, frame, 380.0)
        assert u_minus - long.u[-1] < u_minus - short.u[-1]
        solitary = solitary_jamiton(params, 0.35 * params.rho_max)
        grid = np.linspace(0.0, 100.0, 1000)
        u_train = np.interp(grid, long.smooth_eta, long.smooth_u)
        u_sol = np.interp(grid, solitary.smooth_eta, solitary.smooth_u)
        assert np.max(np.abs(u_train - u_sol)) < 1e-3 * params.u0

    def test_mean_density_by_quadrature_vs_sampled(self, params, cj_035):
        frame, _ = cj_035
        train = periodic_train(params, frame, 60.0)
        mean_quad = mean_train_density(params, frame, train.post_shock.u, train.u[-1], 60.0)
        # Oracle: trapezoid rule over the sampled profile (second order in the
        # node spacing; the steep post-shock flank limits it to ~1e-4).
        mean_trapz = np.trapezoid(train.rho, train.eta) / 60.0
        assert mean_quad == pytest.approx(mean_trapz, rel=2e-4)
        assert mean_quad > float(train.rho.min())
        assert mean_quad > train.far.rho


class TestSweep:
    def test_reference_densities_exist(self, params):
        grid = [f * params.rho_max for f in REFERENCE_FRACTIONS]
        result = sweep_existence(params, grid)
        assert all(row.exists for row in result.rows)

    def test_below_band_does_not_exist(self, params):
        result = sweep_existence(params, [0.002])
        assert not result.rows[0].exists
        assert "NoJamiton" in result.rows[0].reason

    def test_band_agreement(self, params):
        lo, hi = critical_densities(params)
        grid = np.linspace(0.001, 0.199, 67)
        result = sweep_existence(params, grid)
        assert result.band_linear == (lo, hi)
        for row in result.rows:
            assert row.exists == (lo < row.rho_minus < hi)

    def test_speed_monotonicity_reported(self, params):
        grid = np.linspace(0.02, 0.18, 9)
        result = sweep_existence(params, grid)
        assert isinstance(result.s_monotone, bool)
        # With these closures the measured wave speed decreases with density.
        speeds = [row.s for row in result.rows if row.exists]
        assert all(a > b for a, b in zip(speeds[:-1], speeds[1:]))


class TestWaveFrame:
    def test_rejects_nonpositive_flux(self):
        with pytest.raises(Exception):
            WaveFrame(s=1.0, m=0.0)

    def test_density_of(self, params, cj_035):
        frame, sonic = cj_035
        assert frame.density_of(sonic.u_s) == pytest.approx(sonic.rho_s, rel=1e-14)
