"""One step of the partitioned Runge-Kutta method for the constrained system.

The stage equations are reduced to the stage velocities Vi (the momentum
stages and their derivatives are eliminated through the momentum equation),
leaving s*n unknowns:

    Ri = alpha(Qi) - p - h * sum_j abar_ij (Dalpha(Qj)^T Vj - DH(Qj)) = 0,
    Qi = q + h * sum_j a_ij Vj.

Newton's method solves Ri = 0 with the exact Jacobian (including the
second-derivative contractions) or a simplified one that drops them. The
momentum stage derivatives are recovered afterwards as
Pdot_i = Dalpha(Qi)^T Vi - DH(Qi), and the step is the b-weighted update of
both q and p.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (InconsistentState, NewtonDivergence, SingularMatrix,
                     SingularStageJacobian)
from .linalg import condition_estimate, lu_solve
from .system import PhasePoint, Trajectory, el_vector_field


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-12          # max-norm tolerance, scaled by |h|
    max_newton_iters: int = 50
    jacobian_mode: str = "exact"       # "exact" | "simplified"
    initial_guess_mode: str = "el_field"  # "el_field" | "zero"
    record_w_condition: bool = False

    def __post_init__(self):
        if self.newton_tol <= 0.0:
            raise ValueError("newton_tol must be positive")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be at least 1")
        if self.jacobian_mode not in ("exact", "simplified"):
            raise ValueError(f"unknown jacobian_mode {self.jacobian_mode!r}")
        if self.initial_guess_mode not in ("el_field", "zero"):
            raise ValueError(f"unknown initial_guess_mode {self.initial_guess_mode!r}")


@dataclass(frozen=True)
class StageSolveReport:
    iterations: int
    final_residual: float
    converged: bool
    w_condition: Optional[float] = None


def stage_positions(tableau, h, q, qdots):
    """Qi = q + h * sum_j a_ij * qdot_j, stacked as an (s, n) array."""
    return q[None, :] + h * (tableau.a @ qdots)


def stage_residual(sys, tableau, h, x, qdots):
    """Residual of the reduced stage equations, shape (s, n)."""
    qdots = np.asarray(qdots, dtype=float)
    big_q = stage_positions(tableau, h, x.q, qdots)
    alphas = np.array([sys.alpha(big_q[i]) for i in range(tableau.s)])
    pdots = np.array([
        sys.d_alpha(big_q[i]).T @ qdots[i] - sys.dh(big_q[i])
        for i in range(tableau.s)
    ])
    return alphas - x.p[None, :] - h * (tableau.a_bar @ pdots)


def stage_jacobian(sys, tableau, h, x, qdots, mode="exact"):
    """Jacobian of the stacked stage residual with respect to the stacked
    stage velocities, shape (s*n, s*n).

    Block (i, j) is h a_ij Dalpha(Qi) - h abar_ij Dalpha(Qj)^T minus, in
    exact mode, the chain terms h^2 sum_k abar_ik B_k a_kj with
    B_k = D^2 alpha . Vk - D^2 H at Qk.
    """
    qdots = np.asarray(qdots, dtype=float)
    s, n = tableau.s, sys.n
    big_q = stage_positions(tableau, h, x.q, qdots)
    da = np.array([sys.d_alpha(big_q[i]) for i in range(s)])
    jac = h * np.einsum("ij,imn->imjn", tableau.a, da)
    jac -= h * np.einsum("ij,jnm->imjn", tableau.a_bar, da)
    if mode == "exact":
        bk = np.array([
            sys.d2_alpha_vp(big_q[k], qdots[k]) - sys.d2h(big_q[k])
            for k in range(s)
        ])
        jac -= h * h * np.einsum("ik,kmn,kj->imjn", tableau.a_bar, bk, tableau.a)
    return jac.reshape(s * n, s * n)


def w_matrix(sys, tableau, q_stages):
    """Stage-system matrix W whose bounded invertibility guarantees solvable
    stage equations: block (i, j) = abar_ij Dalpha(xi_j)^T - a_ij Dalpha(xi_j)."""
    q_stages = np.asarray(q_stages, dtype=float)
    s, n = tableau.s, sys.n
    da = np.array([sys.d_alpha(q_stages[j]) for j in range(s)])
    w = np.einsum("ij,jnm->imjn", tableau.a_bar, da)
    w -= np.einsum("ij,jmn->imjn", tableau.a, da)
    return w.reshape(s * n, s * n)


def _check_near_constraint(sys, x, h):
    # solvability requires p - alpha(q) = O(h); enforced with a generous factor
    gap = float(np.max(np.abs(x.p - sys.alpha(x.q))))
    bound = 10.0 * abs(h) * (1.0 + np.max(np.abs(x.q)))
    if gap > bound:
        raise InconsistentState(
            f"||p - alpha(q)|| = {gap:.3e} exceeds O(h) bound {bound:.3e}"
        )


def solve_stages(sys, tableau, h, x, cfg=None):
    """Newton-solve the stage equations; returns (qdots, pdots, report)."""
    cfg = cfg or SolverConfig()
    _check_near_constraint(sys, x, h)
    s, n = tableau.s, sys.n

    if cfg.initial_guess_mode == "el_field":
        qdots = np.tile(el_vector_field(sys, x.q), (s, 1))
    else:
        qdots = np.zeros((s, n))

    tol = cfg.newton_tol * abs(h)
    iterations = 0
    residual = stage_residual(sys, tableau, h, x, qdots)
    res_norm = float(np.max(np.abs(residual)))
    while res_norm > tol:
        if iterations >= cfg.max_newton_iters:
            report = StageSolveReport(
                iterations=iterations, final_residual=res_norm, converged=False,
                w_condition=_w_condition(sys, tableau, h, x, qdots),
            )
            raise NewtonDivergence(
                f"residual {res_norm:.3e} above tolerance {tol:.3e} "
                f"after {iterations} iterations", report,
            )
        jac = stage_jacobian(sys, tableau, h, x, qdots, mode=cfg.jacobian_mode)
        try:
            delta = lu_solve(jac, -residual.reshape(s * n))
        except SingularMatrix as exc:
            report = StageSolveReport(
                iterations=iterations, final_residual=res_norm, converged=False,
                w_condition=_w_condition(sys, tableau, h, x, qdots),
            )
            raise SingularStageJacobian(
                f"stage Newton matrix singular for {tableau.name} "
                f"on '{sys.name}': {exc}", ) from exc
        qdots = qdots + delta.reshape(s, n)
        iterations += 1
        residual = stage_residual(sys, tableau, h, x, qdots)
        res_norm = float(np.max(np.abs(residual)))

    big_q = stage_positions(tableau, h, x.q, qdots)
    pdots = np.array([
        sys.d_alpha(big_q[i]).T @ qdots[i] - sys.dh(big_q[i]) for i in range(s)
    ])
    w_cond = None
    if cfg.record_w_condition:
        w_cond = condition_estimate(w_matrix(sys, tableau, big_q))
    report = StageSolveReport(iterations=iterations, final_residual=res_norm,
                              converged=True, w_condition=w_cond)
    return qdots, pdots, report


def _w_condition(sys, tableau, h, x, qdots):
    try:
        big_q = stage_positions(tableau, h, x.q, qdots)
        return condition_estimate(w_matrix(sys, tableau, big_q))
    except Exception:
        return None


def prk_step(sys, tableau, h, x, cfg=None):
    """Advance one step of size h; returns (PhasePoint, StageSolveReport)."""
    qdots, pdots, report = solve_stages(sys, tableau, h, x, cfg)
    q_new = x.q + h * (tableau.b @ qdots)
    p_new = x.p + h * (tableau.b @ pdots)
    return PhasePoint(t=x.t + h, q=q_new, p=p_new), report


def integrate_fixed(sys, tableau, h, x0, n_steps, cfg=None, keep_reports=False):
    """n_steps of size h from x0; returns the full Trajectory."""
    samples = [x0]
    reports = [] if keep_reports else None
    x = x0
    for _ in range(n_steps):
        x, rep = prk_step(sys, tableau, h, x, cfg)
        samples.append(x)
        if keep_reports:
            reports.append(rep)
    return Trajectory(samples=samples, reports=reports)


def integrate_to(sys, tableau, x0, t_final, h, cfg=None):
    """Integrate from x0 to exactly t_final: full steps of size h plus one
    adjusted final step when h does not divide the interval."""
    span = t_final - x0.t
    if span <= 0.0 or h <= 0.0:
        raise ValueError("need t_final > x0.t and h > 0")
    n_full = int(np.floor(span / h + 1e-9))
    x = x0
    for _ in range(n_full):
        x, _ = prk_step(sys, tableau, h, x, cfg)
    rest = t_final - x.t
    if rest > 1e-12 * max(1.0, abs(t_final)):
        x, _ = prk_step(sys, tableau, rest, x, cfg)
    return x
