import math

import numpy as np
import pytest
from scipy.integrate import quad

from cusplab.profiles import (
    BandProfile,
    ConvergenceVerdict,
    CuspGeometry,
    ExpRateProfile,
    HyperbolicProfile,
    PolyLogProfile,
    ProfileError,
    TableProfile,
    convergence_test,
    curvature_range,
    cusp_distance,
    cusp_distance_log,
    delta_parabolic,
    horo_area,
    load_table_profile,
    omega_estimate,
    parabolic_orbit_distance,
    parabolic_orbit_distance_log,
    tau_a,
    tau_abeta,
)

POLYLOG = PolyLogProfile(3.0, 0.7)


class TestProfileBasics:
    def test_hyperbolic_curvature(self):
        assert curvature_range(HyperbolicProfile(), 0.0, 10.0) == pytest.approx((-1.0, -1.0))

    def test_exp_rate_curvature(self):
        lo, hi = curvature_range(ExpRateProfile(3.0), 0.0, 10.0)
        assert lo == pytest.approx(-9.0)
        assert hi == pytest.approx(-9.0)

    def test_polylog_curvature_window(self):
        # on [10, 40] both ratios hover near -omega^2 within a modest margin
        lo, hi = curvature_range(POLYLOG, 10.0, 40.0)
        assert -9.0 * 1.2 < lo <= hi < -9.0 * 0.8

    def test_polylog_value(self):
        t = 3.7
        expect = 1.7 * math.log1p(t) - 3.0 * t
        assert float(POLYLOG.log_tau(t)) == pytest.approx(expect, rel=1e-14)
        # glued below zero
        assert float(POLYLOG.log_tau(-2.0)) == pytest.approx(2.0)

    def test_polylog_parameter_validation(self):
        with pytest.raises(ProfileError):
            PolyLogProfile(1.5, 0.7)
        with pytest.raises(ProfileError):
            PolyLogProfile(3.0, 1.2)

    def test_omega_estimator(self):
        for p in (HyperbolicProfile(), ExpRateProfile(2.5), POLYLOG):
            est = omega_estimate(p)
            assert est == pytest.approx(p.omega, rel=0.01)


class TestShifted:
    def test_hyperbolic_shift_is_identity(self):
        p = tau_a(HyperbolicProfile(), 2.0)
        ts = np.linspace(-3, 8, 23)
        assert np.allclose(p.log_tau(ts), -ts)

    def test_shift_value_at_a(self):
        p = tau_a(POLYLOG, 1.5)
        assert float(p.log_tau(1.5)) == pytest.approx(-1.5 + float(POLYLOG.log_tau(0.0)))

    def test_hyperbolic_below_a_for_glued_inner(self):
        p = tau_a(POLYLOG, 2.0)
        ts = np.linspace(-1.0, 2.0, 7)
        assert np.allclose(p.log_tau(ts), -ts)

    def test_omega_preserved(self):
        p = tau_a(POLYLOG, 3.0)
        assert p.omega == POLYLOG.omega
        assert omega_estimate(p) == pytest.approx(p.omega, rel=0.01)


class TestBand:
    def test_hyperbolic_below_a(self):
        p = tau_abeta(POLYLOG, 1.0, 2.0, 0.2, curv_lo=0.3, curv_hi=7.0)
        assert float(p.log_tau(0.5)) == pytest.approx(-0.5, abs=1e-12)

    def test_exact_on_band(self):
        p = tau_abeta(POLYLOG, 1.0, 2.0, 0.2, curv_lo=0.3, curv_hi=7.0)
        lo, hi = p.band
        for t in np.linspace(lo, hi, 9):
            assert float(p.log_tau(t)) == pytest.approx(-3.0 * t, abs=1e-9)

    def test_exp_inner_constant_curvature_beyond_transition(self):
        p = tau_abeta(ExpRateProfile(3.0), 0.5, 0.0, 0.2, curv_lo=0.3, curv_hi=7.0)
        ts = np.linspace(p.band[0], p.band[0] + 25.0, 101)
        tangent, radial = p.curvature_ratios(ts)
        assert np.allclose(tangent, -9.0, atol=1e-6)
        assert np.allclose(radial, -9.0, atol=1e-4)

    def test_pinching_enforced(self):
        p = tau_abeta(POLYLOG, 1.0, 4.0, 0.2, curv_lo=0.3, curv_hi=7.0)
        lo, hi = curvature_range(p, 0.0, p.tail_start + 25.0)
        assert -(7.2 ** 2) <= lo <= hi <= -(0.1 ** 2)

    def test_infeasible_reported(self):
        # B barely above omega leaves no room for the bridge overshoot
        with pytest.raises(ProfileError):
            tau_abeta(POLYLOG, 4.0, 1.0, 0.05, curv_lo=0.1, curv_hi=3.01)

    def test_omega_preserved_on_tail(self):
        p = tau_abeta(POLYLOG, 0.5, 2.0, 0.2, curv_lo=0.3, curv_hi=7.0)
        assert omega_estimate(p) == pytest.approx(3.0, rel=0.01)

    def test_delta_independent_of_b(self):
        d0 = tau_abeta(POLYLOG, 0.5, 0.0, 0.2, curv_lo=0.3, curv_hi=7.0).delta
        d9 = tau_abeta(POLYLOG, 0.5, 9.0, 0.2, curv_lo=0.3, curv_hi=7.0).delta
        assert d0 == d9


class TestAreaAndExponent:
    def test_horo_area_examples(self):
        assert horo_area(CuspGeometry(HyperbolicProfile(), 2, 1.0), 0.0) == pytest.approx(1.0)
        g = CuspGeometry(ExpRateProfile(2.0), 2, 1.0)
        assert horo_area(g, 3.0) == pytest.approx(math.exp(-6.0))
        g3 = CuspGeometry(HyperbolicProfile(), 3, 1.0)
        assert horo_area(g3, 2.0) == pytest.approx(math.exp(-4.0))

    def test_delta_parabolic(self):
        assert delta_parabolic(CuspGeometry(ExpRateProfile(3.0), 2)) == pytest.approx(1.5)
        assert delta_parabolic(CuspGeometry(HyperbolicProfile(), 2)) == pytest.approx(0.5)
        assert delta_parabolic(CuspGeometry(ExpRateProfile(2.0), 3)) == pytest.approx(2.0)


class TestConvergence:
    def test_hyperbolic_divergent(self):
        v = convergence_test(CuspGeometry(HyperbolicProfile(), 2))
        assert v.status == "divergent"

    def test_exp_rate_divergent(self):
        v = convergence_test(CuspGeometry(ExpRateProfile(2.0), 2))
        assert v.status == "divergent"

    def test_polylog_convergent_value(self):
        # integrand (1+t)^{-1.7}: integral 1/0.7
        v = convergence_test(CuspGeometry(POLYLOG, 2))
        assert v.status == "convergent"
        assert v.value == pytest.approx(1.0 / 0.7, rel=1e-4)

    def test_agrees_with_delta_parabolic_dichotomy(self):
        # polylog cusps with positive tail power are convergent, exp are not
        assert convergence_test(CuspGeometry(PolyLogProfile(2.5, 0.4), 2)).is_convergent
        assert not convergence_test(CuspGeometry(ExpRateProfile(2.5), 2)).is_convergent


class TestCuspDistance:
    def test_exprate_scaling_law(self):
        for omega in (1.0, 2.0, 3.0):
            g = CuspGeometry(ExpRateProfile(omega))
            for ell in np.geomspace(0.1, 1e4, 13):
                exact = (2.0 / omega) * math.asinh(omega * ell / 2.0)
                assert cusp_distance(g, ell) == pytest.approx(exact, rel=1e-8)

    def test_hyperbolic_example(self):
        g = CuspGeometry(HyperbolicProfile())
        assert cusp_distance(g, 2.0) == pytest.approx(2.0 * math.asinh(1.0), rel=1e-10)

    def test_small_displacement_limit(self):
        g = CuspGeometry(HyperbolicProfile())
        assert cusp_distance(g, 0.01) == pytest.approx(0.01, abs=1e-6)

    def test_monotone_in_ell(self):
        g = CuspGeometry(POLYLOG)
        els = np.geomspace(0.5, 1e5, 31)
        ds = [cusp_distance(g, e) for e in els]
        assert np.all(np.diff(ds) > 0)

    def test_independent_quadrature_oracle(self):
        # re-derive the two Clairaut integrals with scipy.quad in raw form
        p = POLYLOG
        t_star = 2.3
        c = math.exp(float(p.log_tau(t_star)))

        def ell_integrand(t):
            tau = math.exp(float(p.log_tau(t)))
            return c / (tau * math.sqrt(max(tau * tau - c * c, 1e-300)))

        def len_integrand(t):
            tau = math.exp(float(p.log_tau(t)))
            return tau / math.sqrt(max(tau * tau - c * c, 1e-300))

        ell = 2.0 * quad(ell_integrand, 0.0, t_star, points=[t_star], limit=400)[0]
        length = 2.0 * quad(len_integrand, 0.0, t_star, points=[t_star], limit=400)[0]
        g = CuspGeometry(p)
        assert cusp_distance(g, ell) == pytest.approx(length, rel=1e-7)

    def test_budget_error(self):
        g = CuspGeometry(HyperbolicProfile())
        with pytest.raises(ProfileError):
            cusp_distance_log(g, 1e7, t_max=100.0)


class TestParabolicOrbit:
    def test_hyperbolic_example(self):
        g = CuspGeometry(HyperbolicProfile(), 2, 1.0)
        assert parabolic_orbit_distance(g, 0.0, 10) == pytest.approx(2.0 * math.asinh(5.0), rel=1e-9)

    def test_symmetry(self):
        g = CuspGeometry(POLYLOG, 2, 0.7)
        assert parabolic_orbit_distance(g, 0.4, 17) == parabolic_orbit_distance(g, 0.4, -17)

    def test_zero_rejected(self):
        g = CuspGeometry(POLYLOG, 2, 1.0)
        with pytest.raises(ValueError):
            parabolic_orbit_distance(g, 0.0, 0)

    def test_polylog_asymptotic_model_bounded(self):
        g = CuspGeometry(POLYLOG, 2, 1.0)
        devs = []
        for n in np.geomspace(1e2, 1e6, 9):
            n = int(n)
            model = (2.0 / 3.0) * (math.log(n) + 1.7 * math.log(math.log(n)))
            devs.append(parabolic_orbit_distance(g, 0.0, n) - model)
        assert max(map(abs, devs)) < 1.0

    def test_base_depth_additive(self):
        g = CuspGeometry(POLYLOG, 2, 1.0)
        d0 = parabolic_orbit_distance(g, 0.0, 25)
        d1 = parabolic_orbit_distance(g, 1.25, 25)
        assert d1 - d0 == pytest.approx(2.5, abs=1e-12)

    def test_log_variant_matches(self):
        g = CuspGeometry(POLYLOG, 2, 1.0)
        assert parabolic_orbit_distance_log(g, 0.0, math.log(1000)) == pytest.approx(
            parabolic_orbit_distance(g, 0.0, 1000), rel=1e-12)


class TestRadialFlowSandwich:
    def test_area_between_jacobian_bounds(self):
        # e^{-B(N-1)t} <= A(t)/A(0) <= e^{-A(N-1)t} with A, B from curvature_range
        p = tau_abeta(POLYLOG, 0.5, 1.0, 0.2, curv_lo=0.3, curv_hi=7.0)
        g = CuspGeometry(p, 2, 1.0)
        lo, hi = curvature_range(p, 0.0, 40.0)
        bigB, bigA = math.sqrt(-lo), math.sqrt(-hi)
        a0 = horo_area(g, 0.0)
        for t in np.linspace(0.5, 30.0, 12):
            ratio = horo_area(g, t) / a0
            assert math.exp(-bigB * t) * (1 - 1e-9) <= ratio <= math.exp(-bigA * t) * (1 + 1e-9)


class TestTableProfile:
    def test_roundtrip_csv(self, tmp_path):
        ts = np.linspace(0.0, 12.0, 60)
        taus = np.exp(-1.8 * ts)
        path = tmp_path / "profile.csv"
        with open(path, "w") as fh:
            fh.write("t,tau\n")
            for t, tau in zip(ts, taus):
                fh.write(f"{float(t)!r},{float(tau)!r}\n")
        p = load_table_profile(path, omega=1.8)
        assert float(p.log_tau(5.0)) == pytest.approx(-9.0, abs=1e-8)
        assert float(p.log_slope(5.0)) == pytest.approx(1.8, abs=1e-6)

    def test_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        with open(path, "w") as fh:
            fh.write("0.0,1.0\n1.0,0.5\n2.0,0.25\n3.0,0.125\n")
        with pytest.raises(ProfileError):
            load_table_profile(path, omega=1.0)

    def test_non_monotone_rejected(self, tmp_path):
        path = tmp_path / "nm.csv"
        with open(path, "w") as fh:
            fh.write("t,tau\n0,1\n1,0.6\n2,0.7\n3,0.3\n")
        with pytest.raises(ProfileError):
            load_table_profile(path, omega=1.0)

    def test_distance_through_table(self):
        ts = np.linspace(0.0, 40.0, 400)
        p = TableProfile(ts, np.exp(-2.0 * ts), omega=2.0)
        g = CuspGeometry(p)
        assert cusp_distance(g, 10.0) == pytest.approx(math.asinh(10.0), rel=1e-6)
