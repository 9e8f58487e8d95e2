"""Geometric integration toolkit for Lagrangian systems linear in velocities.

The dynamics of L = alpha(q) . qdot - H(q) lives on the primary constraint
p = alpha(q) and forms an index-1 DAE. This package integrates it with
variational partitioned Runge-Kutta methods (Gauss, Lobatto IIIA-IIIB) and
comparison schemes (Radau IIA), and ships the convergence-order and
energy-conservation experiment harness for the Kepler, point-vortex, and
Lotka-Volterra models.
"""

__version__ = "0.1.0"

from .diagnostics import (ConvergenceReport, DriftReport, fit_order,
                          poisson_map_check, run_convergence, run_drift)
from .errors import (ConfigError, DomainError, FewerThanTwoPoints,
                     InconsistentState, NewtonDivergence, SingularMassMatrix,
                     SingularMatrix, SingularStageJacobian,
                     UnsupportedStageCount, UnsupportedSystem, VprkError,
                     ZeroWeight)
from .linalg import condition_estimate, fd_jacobian, lu_solve
from .models import (KeplerParams, LotkaVolterraParams, ModelSetup,
                     VortexParams, kepler_pericenter, kepler_system,
                     lotka_volterra_system, make_model, toy_system,
                     vortex_exact, vortex_initial, vortex_period,
                     vortex_system, MODEL_BUILDERS)
from .reference import erk_step, reference_solution, rk4, verner65
from .solver import (SolverConfig, StageSolveReport, integrate_fixed,
                     integrate_to, prk_step, solve_stages, stage_jacobian,
                     stage_residual, w_matrix)
from .system import (PhasePoint, Trajectory, VelocityLinearSystem,
                     consistent_init, dae_residual, el_vector_field,
                     mass_matrix, CONSISTENCY_TOL)
from .tableaus import (METHOD_IDS, PartitionedTableau, check_order_conditions,
                       check_symplecticity, conjugate_tableau, gauss,
                       lobatto_iiia_iiib, make_tableau, radau_iia)
