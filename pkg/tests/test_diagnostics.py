import numpy as np
import pytest

from vprk.diagnostics import (fit_order, poisson_map_check, run_convergence,
                              run_drift)
from vprk.errors import FewerThanTwoPoints, UnsupportedSystem


class TestFitOrder:
    def test_exact_power_law(self):
        hs = np.array([0.1, 0.05, 0.025, 0.0125])
        errors = 3.7 * hs ** 2
        assert fit_order(hs, errors) == pytest.approx(2.0, abs=1e-12)

    def test_noisy_sixth_order(self):
        rng = np.random.default_rng(8)
        hs = np.geomspace(0.4, 0.01, 12)
        errors = 2.0 * hs ** 6 * (1.0 + 0.1 * rng.uniform(-1, 1, size=12))
        assert fit_order(hs, errors) == pytest.approx(6.0, abs=0.3)

    def test_single_point_rejected(self):
        with pytest.raises(FewerThanTwoPoints):
            fit_order([0.1], [1e-3])


class TestRunConvergence:
    def test_toy_with_identity_reference(self, toy):
        rep = run_convergence(toy.system, "gauss1", np.array([1.0, 2.0]), 1.0,
                              [0.5, 0.25, 0.125],
                              lambda t: np.array([1.0, 2.0]))
        # exact integrator: all errors at roundoff, below the fit floor
        assert all(e <= 1e-14 for e in rep.errors_q)
        assert rep.fitted_order is None
        assert not any(rep.failures)

    def test_step_sizes_snapped_to_even_counts(self, toy):
        rep = run_convergence(toy.system, "gauss1", np.array([1.0, 2.0]), 1.0,
                              [0.3, 0.11], lambda t: np.array([1.0, 2.0]))
        for h in rep.step_sizes:
            n = 1.0 / h
            assert n == pytest.approx(round(n), abs=1e-9)
            assert round(n) % 2 == 0

    def test_kepler_gauss1_short_horizon(self, kepler, vortex_closed_form,
                                         vortex2):
        # cheap end-to-end order check against the closed-form reference
        rep = run_convergence(vortex2.system, "gauss1", vortex2.q0, 2.0,
                              np.geomspace(0.2, 0.0125, 5), vortex_closed_form)
        assert rep.fitted_order == pytest.approx(2.0, abs=0.2)
        assert rep.errors_p[-1] is not None

    def test_failures_recorded_not_raised(self, kepler, vortex_closed_form,
                                          vortex2):
        rep = run_convergence(kepler.system, "lobatto2", kepler.q0, 2.0,
                              [0.1, 0.05], None or (lambda t: kepler.q0))
        assert all(f is not None for f in rep.failures)
        assert rep.fitted_order is None

    def test_mismatched_trajectory_reference_rejected(self, kepler,
                                                      kepler_reference):
        with pytest.raises(ValueError):
            run_convergence(kepler.system, "gauss1", kepler.q0, 3.0,
                            [0.1], kepler_reference)  # reference ends at 7.0


class TestRunDrift:
    def test_toy_energy_identically_zero(self, toy):
        rep = run_drift(toy.system, "gauss2", np.array([1.0, 2.0]), 0.1, 50.0)
        assert np.all(rep.hamiltonian_values == 0.0)
        assert rep.linear_drift_rate == 0.0
        assert rep.max_abs_hamiltonian == 0.0
        assert rep.failure is None

    def test_sample_thinning(self, kepler):
        rep = run_drift(kepler.system, "gauss1", kepler.q0, 0.1, 20.0,
                        max_samples=10)
        assert len(rep.sample_times) <= 11
        assert rep.sample_times[-1] == pytest.approx(20.0)

    def test_radau_keeps_constraint_on_every_model(self, kepler, vortex2,
                                                   lotka_volterra, toy):
        # stiffly accurate: the step is the last stage, so it stays on N
        for setup in (kepler, vortex2, lotka_volterra, toy):
            rep = run_drift(setup.system, "radau_iia3", setup.q0, 0.1, 20.0)
            assert rep.max_constraint_residual <= 1e-11, setup.system.name

    def test_gauss2_leaves_constraint_on_lv(self, lotka_volterra):
        rep = run_drift(lotka_volterra.system, "gauss2", lotka_volterra.q0,
                        0.1, 10.0)
        assert rep.max_constraint_residual > 1e-8

    def test_early_termination_recorded(self, kepler):
        # 3-stage Lobatto on Kepler destabilizes within t ~ 20 at h = 0.1
        rep = run_drift(kepler.system, "lobatto3", kepler.q0, 0.1, 100.0)
        assert rep.failure is not None
        assert rep.sample_times[-1] < 100.0


class TestPoissonMapCheck:
    def test_toy_identity(self, toy):
        assert poisson_map_check(toy.system, "gauss1", 0.5, toy.q0) <= 1e-10

    def test_kepler_gauss2(self, kepler):
        assert poisson_map_check(kepler.system, "gauss2", 0.1,
                                 kepler.q0) <= 1e-6

    def test_kepler_radau_defect(self, kepler):
        assert poisson_map_check(kepler.system, "radau_iia3", 0.1,
                                 kepler.q0) > 1e-6

    def test_nonlinear_alpha_unsupported(self, lotka_volterra):
        with pytest.raises(UnsupportedSystem):
            poisson_map_check(lotka_volterra.system, "gauss1", 0.1,
                              lotka_volterra.q0)
