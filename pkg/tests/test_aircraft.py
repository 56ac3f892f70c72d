import math

import numpy as np
import pytest

from flatchain.aircraft import kernels
from flatchain.aircraft.aero import (
    DomainError,
    dynamics,
    envelope_violations,
    forces_and_torques,
    gna_coefficients,
)
from flatchain.aircraft.params import AircraftParams, AircraftState, Controls, rho_at
from flatchain.aircraft.singular import (
    deflection_block_det,
    output_determinant,
    position_block_det,
    rates_block_det,
    singularity_determinants,
)
from flatchain.aircraft.trim import TrimError, stall_analysis, trim_level_flight


def trivial_airfoil(theta1=0.0) -> AircraftParams:
    theta = [0.0] * 45
    theta[0] = theta1  # constant drag
    theta[16] = 1.0  # C_L = alpha
    theta[26] = -0.3  # aileron
    theta[31] = -1.0  # elevator
    theta[42] = -0.2  # rudder
    return AircraftParams(
        name="trivial", m=100.0, S=5.0, span=4.0, chord=1.25,
        Ixx=50.0, Iyy=40.0, Izz=80.0, Ixz=2.0, y_p=1.0, eps=0.0,
        theta=tuple(theta),
    )


def random_state(rng) -> AircraftState:
    return AircraftState(
        x=float(rng.normal() * 100),
        y=float(rng.normal() * 100),
        z=-float(rng.uniform(100, 5000)),
        V=float(rng.uniform(5, 150)),
        gamma=float(rng.uniform(-1.2, 1.2)),
        chi=float(rng.uniform(-math.pi, math.pi)),
        alpha=float(rng.uniform(-0.07, 0.5)),
        beta=float(rng.uniform(-0.3, 0.3)),
        mu=float(rng.uniform(-math.pi, math.pi)),
        p=float(rng.uniform(-1, 1)),
        q=float(rng.uniform(-1, 1)),
        r=float(rng.uniform(-1, 1)),
    )


def random_controls(rng, fmax=500.0) -> Controls:
    return Controls(
        F=float(rng.uniform(0, fmax)),
        delta_l=float(rng.uniform(-0.15, 0.15)),
        delta_m=float(rng.uniform(-0.3, 0.15)),
        delta_n=float(rng.uniform(-0.5, 0.5)),
    )


class TestCoefficients:
    def test_only_constant_terms_survive_at_origin(self, skylark):
        coeffs = gna_coefficients(skylark, 0.0, 0.0, 0.0, 0.0, 0.0, 50.0, Controls(F=0.0))
        th = skylark.theta
        assert coeffs.C_D == th[0]
        assert coeffs.C_Y == 0.0
        assert coeffs.C_L == th[15]
        assert coeffs.C_l == 0.0
        assert coeffs.C_m == th[28]
        assert coeffs.C_n == 0.0

    def test_sideslip_rotation(self, skylark, rng):
        for _ in range(50):
            beta = float(rng.uniform(-0.4, 0.4))
            alpha = float(rng.uniform(-0.05, 0.4))
            CD, CY, CL = kernels.force_coeffs(
                skylark.packed, 40.0, alpha, beta, 0.1, 0.2, -0.1, 0.01, 0.02, 0.03, False
            )
            Cx, Cy, Cz = kernels.wind_coeffs(CD, CY, CL, beta)
            assert Cx == pytest.approx(math.cos(beta) * CD - math.sin(beta) * CY, abs=1e-15)
            assert Cy == pytest.approx(math.sin(beta) * CD + math.cos(beta) * CY, abs=1e-15)
            assert Cz == CL

    def test_round_trip_exact(self, skylark, rng):
        # acceptance: the sideslip rotation inverts to 1e-12
        for _ in range(200):
            beta = float(rng.uniform(-0.5, 0.5))
            CD, CY, CL = rng.uniform(-1, 2, 3)
            Cx, Cy, Cz = kernels.wind_coeffs(CD, CY, CL, beta)
            cb, sb = math.cos(beta), math.sin(beta)
            back = (cb * Cx + sb * Cy, -sb * Cx + cb * Cy, Cz)
            assert abs(back[0] - CD) < 1e-12
            assert abs(back[1] - CY) < 1e-12
            assert abs(back[2] - CL) < 1e-12

    def test_simplified_differs_only_through_rate_and_deflection_terms(self, skylark, rng):
        # term-by-term oracle: the simplified force coefficients equal the
        # full ones evaluated at zero rates and deflections
        for _ in range(50):
            alpha = float(rng.uniform(-0.05, 0.45))
            beta = float(rng.uniform(-0.3, 0.3))
            p, q, r = rng.uniform(-1, 1, 3)
            ctrl = random_controls(rng)
            simp = gna_coefficients(skylark, alpha, beta, p, q, r, 40.0, ctrl, simplified=True)
            full_zeroed = gna_coefficients(
                skylark, alpha, beta, 0.0, 0.0, 0.0, 40.0, Controls(F=ctrl.F), simplified=False
            )
            assert simp.C_D == full_zeroed.C_D
            assert simp.C_Y == full_zeroed.C_Y
            assert simp.C_L == full_zeroed.C_L
            # moments keep the rate/deflection terms even in simplified mode
            full = gna_coefficients(skylark, alpha, beta, p, q, r, 40.0, ctrl, simplified=False)
            assert simp.C_m == full.C_m

    def test_rate_scaling_modes(self, skylark):
        raw = skylark.with_options(rate_scaling="raw")
        pt_std = kernels.rate_terms(skylark.packed, 20.0, 1.0, 1.0, 1.0)
        pt_pap = kernels.rate_terms(raw.packed, 20.0, 1.0, 1.0, 1.0)
        assert pt_std == pytest.approx((6.0 / 40.0, 1.8 / 40.0, 6.0 / 40.0), rel=1e-15)
        assert pt_pap == pytest.approx((6.0, 1.8, 6.0), rel=1e-15)


class TestForces:
    def test_gliding_level_x_force(self, skylark, rng):
        # F = 0, level flight: X = -qbar C_x - g m sin(gamma)
        for _ in range(20):
            st = random_state(rng)
            ft = forces_and_torques(skylark, st, Controls(F=0.0), simplified=True)
            rho = rho_at(skylark, st.z)
            qbar = 0.5 * rho * skylark.S * st.V**2
            expected = -qbar * ft.C_x - skylark.g * skylark.m * math.sin(st.gamma)
            assert ft.X == pytest.approx(expected, rel=1e-12)

    def test_symmetric_flight_lateral_terms_vanish(self, skylark, rng):
        for _ in range(20):
            st = random_state(rng)
            st = AircraftState(
                x=st.x, y=st.y, z=st.z, V=st.V, gamma=st.gamma, chi=st.chi,
                alpha=st.alpha, beta=0.0, mu=0.0, p=0.0, q=st.q, r=0.0,
            )
            ctrl = Controls(F=200.0, delta_m=0.1)
            ft = forces_and_torques(skylark, st, ctrl)
            assert ft.Y == pytest.approx(0.0, abs=1e-12)
            assert ft.L == pytest.approx(0.0, abs=1e-12)
            assert ft.N == pytest.approx(0.0, abs=1e-12)

    def test_differential_thrust_yaw_moment(self, skylark):
        st = AircraftState()
        base = forces_and_torques(skylark, st, Controls(F=300.0, eta=0.0))
        out = forces_and_torques(skylark, st, Controls(F=300.0, eta=1.0))
        assert out.N - base.N == pytest.approx(
            skylark.y_p * math.cos(skylark.eps) * 300.0, rel=1e-12
        )
        assert out.L - base.L == pytest.approx(
            -skylark.y_p * math.sin(skylark.eps) * 300.0, rel=1e-12
        )

    def test_altitude_density_law(self, skylark):
        alt = skylark.with_options(rho_altitude=True)
        assert rho_at(alt, 0.0) == pytest.approx(1.225)
        # about 2000 m up the standard troposphere gives ~1.0065 kg/m^3
        assert rho_at(alt, -2000.0) == pytest.approx(1.0065, rel=1e-3)
        assert rho_at(skylark, -2000.0) == skylark.rho0


class TestDynamics:
    def test_kinematic_rows(self, skylark):
        st = AircraftState(V=42.0, gamma=0.0, chi=0.0)
        out = dynamics(skylark, st, Controls(F=100.0), simplified=True)
        assert out[0] == pytest.approx(42.0)
        assert out[1] == 0.0
        assert out[2] == pytest.approx(0.0, abs=1e-12)

    def test_trim_plug_back(self, skylark):
        tp = trim_level_flight(skylark, 0.12, "simplified")
        st = AircraftState(z=-1000.0, V=tp.V, gamma=0.0, alpha=tp.alpha)
        out = dynamics(skylark, st, Controls(F=tp.F, delta_m=tp.delta_m), simplified=True)
        # everything still except the position advance rows
        assert out[0] == pytest.approx(tp.V, rel=1e-12)
        assert np.max(np.abs(out[1:])) < 1e-9 * skylark.m * skylark.g

    def test_full_model_trim_plug_back(self, skylark):
        tp = trim_level_flight(skylark, 0.12, "full")
        st = AircraftState(z=-1000.0, V=tp.V, gamma=0.0, alpha=tp.alpha)
        out = dynamics(skylark, st, Controls(F=tp.F, delta_m=tp.delta_m), simplified=False)
        assert np.max(np.abs(out[1:])) < 1e-8 * skylark.m * skylark.g

    def test_restricted_mode_drops_rows(self, skylark, rng):
        st = random_state(rng)
        ctrl = random_controls(rng)
        full = dynamics(skylark, st, ctrl)
        nine = dynamics(skylark, st, ctrl, restricted=True)
        assert nine.shape == (9,)
        assert np.array_equal(nine, full[[2, 3, 4, 6, 7, 8, 9, 10, 11]])

    def test_domain_errors(self, skylark):
        with pytest.raises(DomainError):
            dynamics(skylark, AircraftState(V=-1.0), Controls(F=0.0))
        with pytest.raises(DomainError):
            dynamics(skylark, AircraftState(beta=1.6), Controls(F=0.0))
        with pytest.raises(DomainError):
            dynamics(skylark, AircraftState(gamma=1.6), Controls(F=0.0))

    def test_lateral_symmetry_invariant_subspace(self, skylark, rng):
        # acceptance: beta = mu = p = r = dl = dn = 0 stays invariant
        scale = skylark.m * skylark.g
        for _ in range(200):
            st = random_state(rng)
            st = AircraftState(
                x=st.x, y=st.y, z=st.z, V=st.V, gamma=st.gamma, chi=st.chi,
                alpha=st.alpha, beta=0.0, mu=0.0, p=0.0, q=st.q, r=0.0,
            )
            ctrl = Controls(F=float(rng.uniform(0, 500)), delta_m=float(rng.uniform(-0.3, 0.15)))
            for simplified in (True, False):
                ft = forces_and_torques(skylark, st, ctrl, simplified)
                assert abs(ft.Y) < 1e-12 * scale
                assert abs(ft.L) < 1e-12 * scale
                assert abs(ft.N) < 1e-12 * scale
                out = dynamics(skylark, st, ctrl, simplified)
                for idx in (7, 8, 9, 11):  # betadot, mudot, pdot, rdot
                    assert abs(out[idx]) < 1e-12 * scale

    def test_energy_balance_along_glide(self, skylark):
        # dE/dt = -qbar V C_x for F = 0 (E = kinetic + potential)
        pk = skylark.packed
        st = np.array([0, 0, -1000.0, 12.0, -0.1, 0.0, 0.12, 0.0, 0.0, 0.0, 0.0, 0.0])
        h = 1e-3
        states = [st.copy()]
        for _ in range(2000):
            def f(s):
                return kernels.dynamics12(pk, s, 0.0, 0.0, 0.0, 0.0, 0.0, True, 0, 0, 0)
            k1 = f(st)
            k2 = f(st + h / 2 * k1)
            k3 = f(st + h / 2 * k2)
            k4 = f(st + h * k3)
            st = st + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            states.append(st.copy())
        arr = np.array(states)
        m, g = skylark.m, skylark.g
        E = 0.5 * m * arr[:, 3] ** 2 - m * g * arr[:, 2]
        dE = np.gradient(E, h)
        for k in range(10, len(arr) - 10, 100):
            z, V, al, be = arr[k, 2], arr[k, 3], arr[k, 6], arr[k, 7]
            CD, CY, CL = kernels.force_coeffs(pk, V, al, be, 0, 0, 0, 0, 0, 0, True)
            Cx, _, _ = kernels.wind_coeffs(CD, CY, CL, be)
            qbar = 0.5 * rho_at(skylark, z) * skylark.S * V**2
            assert dE[k] == pytest.approx(-qbar * V * Cx, rel=1e-4)


class TestJacobians:
    def test_force_jacobian_against_finite_differences(self, skylark, rng):
        pk = skylark.packed
        for simplified in (True, False):
            for _ in range(40):
                st = random_state(rng)
                ctrl = random_controls(rng)
                args = (st.z, st.V, st.gamma, st.alpha, st.beta, st.mu, ctrl.F)
                J = kernels.force_jacobian(
                    pk, *args, ctrl.delta_l, ctrl.delta_m, ctrl.delta_n,
                    st.p, st.q, st.r, simplified,
                )
                for col in range(7):
                    h = 1e-6 * max(1.0, abs(args[col]))
                    up = list(args)
                    up[col] += h
                    dn = list(args)
                    dn[col] -= h
                    fu = kernels.forces_moments(
                        pk, *up, ctrl.delta_l, ctrl.delta_m, ctrl.delta_n,
                        st.p, st.q, st.r, 0.0, simplified,
                    )[:3]
                    fl = kernels.forces_moments(
                        pk, *dn, ctrl.delta_l, ctrl.delta_m, ctrl.delta_n,
                        st.p, st.q, st.r, 0.0, simplified,
                    )[:3]
                    fd = (np.array(fu) - np.array(fl)) / (2 * h)
                    scale = max(1.0, float(np.max(np.abs(J))))
                    assert np.max(np.abs(fd - J[:, col])) < 5e-5 * scale

    def test_altitude_law_z_column(self, rng, skylark):
        alt = skylark.with_options(rho_altitude=True)
        pk = alt.packed
        st = random_state(rng)
        J = kernels.force_jacobian(
            pk, st.z, st.V, st.gamma, st.alpha, st.beta, st.mu, 200.0,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, True,
        )
        h = 1e-3
        fu = np.array(kernels.forces_moments(
            pk, st.z + h, st.V, st.gamma, st.alpha, st.beta, st.mu, 200.0,
            0, 0, 0, 0, 0, 0, 0.0, True)[:3])
        fl = np.array(kernels.forces_moments(
            pk, st.z - h, st.V, st.gamma, st.alpha, st.beta, st.mu, 200.0,
            0, 0, 0, 0, 0, 0, 0.0, True)[:3])
        fd = (fu - fl) / (2 * h)
        assert np.allclose(J[:, 0], fd, rtol=1e-6, atol=1e-9)

    def test_third_derivative_map_against_nested_differences(self, skylark, rng):
        pk = skylark.packed

        def ext_rhs(s10, cmd):
            x, y, z, V, g, chi, a, b, mu, F = s10
            X, Y, Z = kernels.forces_moments(
                pk, z, V, g, a, b, mu, F, 0, 0, 0, 0, 0, 0, 0.0, True
            )[:3]
            S = Y * math.sin(mu) + Z * math.cos(mu)
            C = Y * math.cos(mu) - Z * math.sin(mu)
            ad, bd, md = kernels.angle_rates(pk, V, g, a, b, mu, Y, Z, cmd[0], cmd[1], cmd[2])
            return np.array([
                V * math.cos(chi) * math.cos(g), V * math.sin(chi) * math.cos(g),
                -V * math.sin(g), X / skylark.m, -S / (skylark.m * V),
                C / (skylark.m * V * math.cos(g)), ad, bd, md, cmd[3],
            ])

        def xddot(s10):
            return np.array(kernels.position_chain(pk, *s10[2:])[3:])

        for _ in range(25):
            s10 = np.array([
                0.0, 0.0, -1000.0, float(rng.uniform(10, 60)), float(rng.uniform(-0.4, 0.4)),
                float(rng.uniform(-3, 3)), float(rng.uniform(-0.05, 0.4)),
                float(rng.uniform(-0.2, 0.2)), float(rng.uniform(-0.8, 0.8)),
                float(rng.uniform(20, 400)),
            ])
            cmd = np.array([
                float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)),
                float(rng.uniform(-1, 1)), float(rng.uniform(-50, 50)),
            ])
            got = np.array(kernels.third_derivative_map(pk, *s10, *cmd, 0)[:3])
            f = ext_rhs(s10, cmd)
            d = 1e-6
            fd = (xddot(s10 + d * f) - xddot(s10 - d * f)) / (2 * d)
            assert np.max(np.abs(got - fd)) < 5e-5 * max(1.0, float(np.max(np.abs(fd))))


class TestSingularityDeterminants:
    def test_closed_forms_on_random_states(self, skylark, rng):
        # acceptance: -V^2 cos(gamma) and 1/cos(beta) at 1000 states, 1e-9
        for _ in range(1000):
            st = random_state(rng)
            pos = position_block_det(st)
            expected = -st.V**2 * math.cos(st.gamma)
            assert abs(pos - expected) < 1e-9 * abs(expected)
            rates = rates_block_det(skylark, st)
            expected = 1.0 / math.cos(st.beta)
            assert abs(rates - expected) < 1e-9 * abs(expected)

    def test_deflection_block_closed_form(self, skylark, rng):
        th = skylark.theta
        for _ in range(100):
            st = random_state(rng)
            ctrl = random_controls(rng)
            got = deflection_block_det(skylark, st, ctrl)
            qbar = 0.5 * rho_at(skylark, st.z) * skylark.S * st.V**2
            a2 = st.alpha**2
            ddelta = np.array([
                [th[26], 0.0, th[27]],
                [0.0, th[31] + th[34] * a2 + th[36] * a2 * st.alpha, 0.0],
                [th[41], 0.0, th[42]],
            ])
            arms = qbar * np.diag([skylark.span, skylark.chord, skylark.span])
            expected = np.linalg.det(arms @ ddelta) / np.linalg.det(skylark.inertia)
            assert got == pytest.approx(expected, rel=1e-9)

    def test_zero_lift_state_is_singular_for_sideslip_output(self, skylark):
        th = skylark.theta
        lo, hi = -0.1, 0.1
        cl = lambda a: th[15] + th[16] * a + th[20] * a**2 + th[21] * a**3 + th[22] * a**4
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if cl(mid) * cl(lo) <= 0:
                hi = mid
            else:
                lo = mid
        st = AircraftState(V=40.0, alpha=mid, beta=0.0, mu=0.7, gamma=0.1)
        det = output_determinant(skylark, st, Controls(F=0.0), "beta")
        scale = (skylark.m * skylark.g) ** 3
        assert abs(det) < 1e-9 * scale

    def test_alpha_output_singular_at_symmetric_state(self, skylark):
        st = AircraftState(V=30.0, alpha=0.1, beta=0.0, mu=0.0)
        det = output_determinant(skylark, st, Controls(F=100.0), "alpha")
        assert abs(det) < 1e-9 * (skylark.m * skylark.g) ** 3

    def test_mu_determinant_brackets_stall(self, skylark):
        res = stall_analysis(skylark, "simplified")
        assert res.case == "extremum"
        vals = []
        for da in (-0.03, 0.03):
            tp = trim_level_flight(skylark, res.alpha + da, "simplified", V0=res.V)
            st = AircraftState(z=-1000.0, V=tp.V, alpha=tp.alpha)
            vals.append(output_determinant(skylark, st, Controls(F=tp.F), "mu"))
        assert vals[0] * vals[1] < 0

    def test_record_fields(self, skylark, rng):
        st = random_state(rng)
        rec = singularity_determinants(skylark, st, random_controls(rng))
        assert rec.position_block == pytest.approx(-st.V**2 * math.cos(st.gamma), rel=1e-9)
        assert rec.rates_block == pytest.approx(1.0 / math.cos(st.beta), rel=1e-9)


class TestTrimAndStall:
    def test_closed_form_zero_drag(self):
        P = trivial_airfoil(theta1=0.0)
        for alpha in (0.05, 0.1, 0.3):
            tp = trim_level_flight(P, alpha, "simplified")
            expected_V = math.sqrt(2 * P.m * P.g / (P.rho0 * P.S * alpha))
            assert tp.V == pytest.approx(expected_V, rel=1e-9)
            assert tp.F == pytest.approx(0.0, abs=1e-6 * P.m * P.g)

    def test_closed_form_with_drag(self):
        theta1 = 0.04
        P = trivial_airfoil(theta1=theta1)
        for alpha in (0.05, 0.2):
            tp = trim_level_flight(P, alpha, "simplified")
            # X = 0 gives F = qbar theta1 / cos(alpha); Z = 0 then yields
            # V^2 = 2 m g / (rho S (alpha + theta1 tan(alpha)))
            expected_V = math.sqrt(
                2 * P.m * P.g / (P.rho0 * P.S * (alpha + theta1 * math.tan(alpha)))
            )
            assert tp.V == pytest.approx(expected_V, rel=1e-9)
            qbar = 0.5 * P.rho0 * P.S * tp.V**2
            assert tp.F == pytest.approx(qbar * theta1 / math.cos(alpha), rel=1e-9)

    def test_below_zero_lift_fails(self, skylark):
        with pytest.raises(TrimError):
            trim_level_flight(skylark, -0.05, "simplified")

    def test_stall_extremum_is_interior_minimum(self, skylark):
        res = stall_analysis(skylark, "simplified")
        assert res.case == "extremum"
        for da in (-0.02, -0.005, 0.005, 0.02):
            tp = trim_level_flight(skylark, res.alpha + da, "simplified", V0=res.V)
            assert tp.V > res.V

    def test_thrust_limited_case(self, skylark):
        base = stall_analysis(skylark, "simplified")
        res = stall_analysis(skylark, "simplified", F_max=0.9 * base.F)
        assert res.case == "thrust-limited"
        assert res.alpha < base.alpha
        assert res.F == pytest.approx(0.9 * base.F, rel=1e-3)

    def test_no_stall_for_monotone_lift_and_high_thrust(self):
        theta = [0.0] * 45
        theta[0] = 0.02
        theta[16] = 3.0  # monotone lift over the whole range
        theta[26] = -0.3
        theta[31] = -1.0
        theta[42] = -0.2
        P = AircraftParams(
            name="monotone", m=50.0, S=4.0, span=4.0, chord=1.0,
            Ixx=30.0, Iyy=25.0, Izz=50.0, Ixz=1.0, y_p=0.8, eps=0.0,
            theta=tuple(theta), F_max=1e9,
        )
        res = stall_analysis(P, "simplified")
        assert res.case == "none"

    def test_full_model_stall_near_simplified(self, skylark):
        simp = stall_analysis(skylark, "simplified")
        full = stall_analysis(skylark, "full")
        assert full.case == "extremum"
        assert abs(full.alpha - simp.alpha) < 0.1


class TestEnvelope:
    def test_violations_reported(self, skylark):
        st = AircraftState(alpha=0.6)
        out = envelope_violations(st, Controls(F=0.0, delta_n=0.6))
        assert any(v.startswith("alpha") for v in out)
        assert any(v.startswith("delta_n") for v in out)
        assert envelope_violations(AircraftState(alpha=0.1), Controls(F=0.0)) == []
