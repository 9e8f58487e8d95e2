import numpy as np
import pytest

from helpers import (irk_ode_step, linear_alpha_ode, lotka_volterra_ode,
                     random_kepler_positions)
from vprk.diagnostics import fit_order
from vprk.errors import InconsistentState, NewtonDivergence
from vprk.linalg import condition_estimate, fd_jacobian
from vprk.solver import (SolverConfig, integrate_fixed, integrate_to,
                         prk_step, solve_stages, stage_jacobian,
                         stage_positions, stage_residual, w_matrix)
from vprk.system import PhasePoint, consistent_init, el_vector_field
from vprk.tableaus import METHOD_IDS, make_tableau


class TestSolverConfig:
    def test_defaults(self):
        cfg = SolverConfig()
        assert cfg.newton_tol == 1e-12
        assert cfg.max_newton_iters == 50
        assert cfg.jacobian_mode == "exact"

    def test_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(newton_tol=0.0)
        with pytest.raises(ValueError):
            SolverConfig(max_newton_iters=0)
        with pytest.raises(ValueError):
            SolverConfig(jacobian_mode="magic")


class TestStageResidual:
    def test_toy_consistent_zero(self, toy):
        x = consistent_init(toy.system, np.array([1.0, 2.0]))
        for mid in ("gauss1", "gauss3", "lobatto3"):
            t = make_tableau(mid)
            r = stage_residual(toy.system, t, 0.2, x, np.zeros((t.s, 2)))
            assert np.all(r == 0.0)

    def test_lv_equilibrium_zero(self, lotka_volterra):
        x = consistent_init(lotka_volterra.system, np.array([1.0, 2.0]))
        t = make_tableau("gauss2")
        r = stage_residual(lotka_volterra.system, t, 0.1, x, np.zeros((2, 2)))
        assert np.max(np.abs(r)) < 1e-15

    def test_kepler_midpoint_scripted_value(self, kepler):
        # independent evaluation of the one-stage residual, written out by hand
        sys_ = kepler.system
        x = consistent_init(sys_, kepler.q0)
        h = 0.1
        t = make_tableau("gauss1")
        v = el_vector_field(sys_, x.q)
        got = stage_residual(sys_, t, h, x, v[None, :])

        q_stage = x.q + 0.5 * h * v
        scripted = (sys_.alpha(q_stage) - x.p
                    - 0.5 * h * (sys_.d_alpha(q_stage).T @ v - sys_.dh(q_stage)))
        np.testing.assert_allclose(got[0], scripted, atol=1e-16)

        # nonzero and O(h^2): halving h shrinks it by about 4
        assert np.max(np.abs(got)) > 1e-5
        got_half = stage_residual(sys_, t, h / 2, x,
                                  v[None, :])
        ratio = np.max(np.abs(got)) / np.max(np.abs(got_half))
        assert 3.0 < ratio < 5.0


class TestStageJacobian:
    @pytest.mark.parametrize("model,mid", [
        ("kepler", "gauss2"), ("kepler", "lobatto3"),
        ("lotka_volterra", "gauss2"), ("lotka_volterra", "radau_iia2"),
        ("vortex2", "gauss3"),
    ])
    def test_exact_matches_finite_differences(self, model, mid, request):
        setup = request.getfixturevalue(
            model if model != "vortex2" else "vortex2")
        sys_ = setup.system
        x = consistent_init(sys_, setup.q0)
        t = make_tableau(mid)
        rng = np.random.default_rng(hash((model, mid)) % 2**32)
        v = np.tile(el_vector_field(sys_, x.q), (t.s, 1))
        v += 0.1 * rng.standard_normal(v.shape)
        h = 0.07
        jac = stage_jacobian(sys_, t, h, x, v, mode="exact")

        def flat_residual(vv):
            return stage_residual(sys_, t, h, x, vv.reshape(t.s, sys_.n)).ravel()

        jac_fd = fd_jacobian(flat_residual, v.ravel())
        rel = np.max(np.abs(jac - jac_fd)) / (1.0 + np.max(np.abs(jac_fd)))
        assert rel < 1e-6

    def test_linear_alpha_simplified_differs_by_d2h_only(self, kepler):
        sys_ = kepler.system
        x = consistent_init(sys_, kepler.q0)
        t = make_tableau("gauss2")
        v = np.tile(el_vector_field(sys_, x.q), (2, 1))
        h = 0.1
        exact = stage_jacobian(sys_, t, h, x, v, mode="exact")
        simplified = stage_jacobian(sys_, t, h, x, v, mode="simplified")
        # remaining difference is exactly the h^2 abar (-D2H) a chain term
        big_q = stage_positions(t, h, x.q, v)
        d2h = np.array([sys_.d2h(big_q[k]) for k in range(2)])
        chain = h * h * np.einsum("ik,kmn,kj->imjn", t.a_bar, -d2h, t.a)
        np.testing.assert_allclose(exact - simplified, -chain.reshape(8, 8),
                                   atol=1e-14)

    def test_vanishes_as_h_to_zero(self, lotka_volterra):
        sys_ = lotka_volterra.system
        x = consistent_init(sys_, lotka_volterra.q0)
        t = make_tableau("gauss2")
        v = np.zeros((2, 2))
        for h in (1e-3, 1e-6):
            jac = stage_jacobian(sys_, t, h, x, v)
            assert np.max(np.abs(jac)) < 10.0 * h


class TestSolveStages:
    def test_toy_immediate_convergence(self, toy):
        x = consistent_init(toy.system, np.array([1.0, 2.0]))
        for mid in METHOD_IDS:
            t = make_tableau(mid)
            qdots, pdots, report = solve_stages(toy.system, t, 0.5, x)
            assert report.converged
            assert report.iterations <= 2
            assert np.all(qdots == 0.0)
            assert np.all(pdots == 0.0)

    def test_residual_tolerance_contract(self, kepler):
        x = consistent_init(kepler.system, kepler.q0)
        cfg = SolverConfig()
        for h in (0.1, 0.0035):
            _, _, report = solve_stages(kepler.system, make_tableau("gauss2"),
                                        h, x, cfg)
            assert report.converged
            assert report.final_residual <= cfg.newton_tol * h

    def test_kepler_gauss1_matches_midpoint_on_ode(self, kepler):
        sys_ = kepler.system
        x = consistent_init(sys_, kepler.q0)
        h = 0.1
        new, report = prk_step(sys_, make_tableau("gauss1"), h, x)
        assert report.iterations <= 10
        f, df = linear_alpha_ode(sys_)
        t = make_tableau("gauss1")
        q_oracle = irk_ode_step(f, df, x.q, h, t.a, t.b)
        assert np.max(np.abs(new.q - q_oracle)) <= 1e-12

    def test_lv_gauss2_differs_from_ode_integration(self, lotka_volterra):
        # nonlinear one-form: the DAE step is NOT the ODE step
        sys_ = lotka_volterra.system
        x = consistent_init(sys_, np.array([1.0, 1.0]))
        h = 0.05
        new, _ = prk_step(sys_, make_tableau("gauss2"), h, x)
        f, df = lotka_volterra_ode()
        t = make_tableau("gauss2")
        q_oracle = irk_ode_step(f, df, x.q, h, t.a, t.b)
        assert np.max(np.abs(new.q - q_oracle)) > 1e-10

    def test_newton_divergence_at_large_step(self, kepler):
        x = consistent_init(kepler.system, kepler.q0)
        with pytest.raises(NewtonDivergence) as exc_info:
            solve_stages(kepler.system, make_tableau("gauss1"), 0.35, x)
        report = exc_info.value.report
        assert not report.converged
        assert report.final_residual > 0.0
        assert report.w_condition is not None

    def test_inconsistent_state_rejected(self, kepler):
        q = kepler.q0
        p = kepler.system.alpha(q) + 0.5
        x = PhasePoint(t=0.0, q=q, p=p)
        with pytest.raises(InconsistentState):
            solve_stages(kepler.system, make_tableau("gauss1"), 1e-3, x)

    def test_w_condition_recorded_on_request(self, kepler):
        x = consistent_init(kepler.system, kepler.q0)
        cfg = SolverConfig(record_w_condition=True)
        _, _, report = solve_stages(kepler.system, make_tableau("gauss2"),
                                    0.1, x, cfg)
        assert report.w_condition is not None
        assert report.w_condition < 1e3

    def test_zero_guess_mode_converges(self, kepler):
        x = consistent_init(kepler.system, kepler.q0)
        cfg = SolverConfig(initial_guess_mode="zero")
        _, _, report = solve_stages(kepler.system, make_tableau("gauss1"),
                                    0.05, x, cfg)
        assert report.converged

    def test_simplified_jacobian_converges(self, lotka_volterra):
        x = consistent_init(lotka_volterra.system, np.array([1.0, 1.0]))
        cfg = SolverConfig(jacobian_mode="simplified")
        _, _, report = solve_stages(lotka_volterra.system,
                                    make_tableau("gauss2"), 0.05, x, cfg)
        assert report.converged

    def test_stage_positions_stay_order_h_close(self, kepler):
        sys_ = kepler.system
        x = consistent_init(sys_, kepler.q0)
        t = make_tableau("gauss2")
        hs = [0.08, 0.04, 0.02]
        gaps = []
        for h in hs:
            qdots, _, _ = solve_stages(sys_, t, h, x)
            big_q = stage_positions(t, h, x.q, qdots)
            gaps.append(np.max(np.abs(big_q - x.q[None, :])))
        assert fit_order(hs, gaps) >= 0.9


class TestPrkStep:
    def test_toy_identity_fixed_point(self, toy):
        x = consistent_init(toy.system, np.array([1.0, 2.0]))
        for mid in METHOD_IDS:
            new, _ = prk_step(toy.system, make_tableau(mid), 0.7, x)
            np.testing.assert_array_equal(new.q, x.q)
            np.testing.assert_array_equal(new.p, x.p)
            assert new.t == pytest.approx(0.7)

    @pytest.mark.parametrize("mid", ["gauss1", "gauss2", "gauss3"])
    def test_kepler_constraint_invariance(self, kepler, mid):
        sys_ = kepler.system
        lam = sys_.linear_alpha
        x = consistent_init(sys_, kepler.q0)
        for _ in range(20):
            x, _ = prk_step(sys_, make_tableau(mid), 0.1, x)
            assert np.max(np.abs(x.p + 0.5 * lam @ x.q)) <= 1e-11

    def test_lv_constraint_not_preserved(self, lotka_volterra):
        sys_ = lotka_volterra.system
        x = consistent_init(sys_, np.array([1.0, 1.0]))
        x, _ = prk_step(sys_, make_tableau("gauss2"), 0.1, x)
        assert x.constraint_residual(sys_) > 1e-8

    def test_reversed_step_returns(self, kepler):
        sys_ = kepler.system
        x0 = consistent_init(sys_, kepler.q0)
        for mid in ("gauss1", "gauss2", "gauss3"):
            mid_t = make_tableau(mid)
            fwd, _ = prk_step(sys_, mid_t, 0.1, x0)
            back, _ = prk_step(sys_, mid_t, -0.1, fwd)
            assert np.max(np.abs(back.q - x0.q)) <= 1e-10
            assert np.max(np.abs(back.p - x0.p)) <= 1e-10

    def test_step_map_jacobian_identity_on_toy(self, toy):
        t = make_tableau("gauss1")

        def step_q(y):
            x = consistent_init(toy.system, y)
            return prk_step(toy.system, t, 0.3, x)[0].q

        jac = fd_jacobian(step_q, np.array([1.0, 2.0]))
        np.testing.assert_allclose(jac, np.eye(2), atol=1e-8)

    def test_poisson_property_random_states(self, kepler):
        # finite-difference symplecticity of the q-map at off-orbit states
        from vprk.diagnostics import poisson_map_check
        rng = np.random.default_rng(23)
        for q in random_kepler_positions(rng, 3):
            assert poisson_map_check(kepler.system, "gauss2", 0.1, q) <= 1e-6


class TestWMatrix:
    def test_kronecker_structure_linear_alpha(self, kepler):
        sys_ = kepler.system
        t = make_tableau("gauss2")
        xi = np.tile(kepler.q0, (2, 1))
        w = w_matrix(sys_, t, xi)
        m = sys_.linear_alpha  # mass matrix of a linear one-form
        np.testing.assert_allclose(w, np.kron(t.a, m), atol=1e-15)

    def test_toy_gauss1_block(self, toy):
        w = w_matrix(toy.system, make_tableau("gauss1"),
                     np.array([[1.0, 2.0]]))
        np.testing.assert_allclose(w, 0.5 * np.array([[0.0, -1.0], [1.0, 0.0]]),
                                   atol=1e-15)
        assert condition_estimate(w) == pytest.approx(1.0)

    def test_gauss2_kepler_condition_moderate(self, kepler):
        w = w_matrix(kepler.system, make_tableau("gauss2"),
                     np.tile(kepler.q0, (2, 1)))
        assert condition_estimate(w) < 1e3

    def test_lobatto2_solvable_but_frozen(self, kepler):
        # The 2-stage pair yields a solvable stage system whose step leaves q
        # unchanged while p drifts: the scheme is inconsistent, not singular.
        sys_ = kepler.system
        t = make_tableau("lobatto2")
        w = w_matrix(sys_, t, np.tile(kepler.q0, (2, 1)))
        assert np.isfinite(condition_estimate(w))
        x = consistent_init(sys_, kepler.q0)
        new, report = prk_step(sys_, t, 0.1, x)
        assert report.converged
        assert np.max(np.abs(new.q - x.q)) < 1e-14
        assert np.max(np.abs(new.p - x.p)) > 1e-3


class TestIntegrators:
    def test_integrate_fixed_counts(self, kepler):
        x0 = consistent_init(kepler.system, kepler.q0)
        traj = integrate_fixed(kepler.system, make_tableau("gauss1"), 0.1,
                               x0, 25, keep_reports=True)
        assert len(traj.samples) == 26
        assert len(traj.reports) == 25
        assert traj.samples[-1].t == pytest.approx(2.5)

    def test_integrate_to_partial_step(self, kepler):
        x0 = consistent_init(kepler.system, kepler.q0)
        end = integrate_to(kepler.system, make_tableau("gauss2"), x0, 1.0, 0.3)
        assert end.t == pytest.approx(1.0, abs=1e-12)

    def test_integrate_to_rejects_bad_span(self, kepler):
        x0 = consistent_init(kepler.system, kepler.q0)
        with pytest.raises(ValueError):
            integrate_to(kepler.system, make_tableau("gauss1"), x0, -1.0, 0.1)
