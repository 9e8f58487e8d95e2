"""Experiment drivers: convergence-order studies, long-run Hamiltonian and
constraint drift, and the Poisson-map check for linear one-forms."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FewerThanTwoPoints, UnsupportedSystem, VprkError
from .linalg import fd_jacobian
from .solver import prk_step
from .system import consistent_init
from .tableaus import make_tableau

# Errors below the floor are dominated by the reference solution's accuracy
# and accumulated roundoff. Points within one decade of the floor sit in the
# crossover and still bend the fit, so they are excluded as well.
ERROR_FLOOR = 1e-12
FLOOR_MARGIN = 10.0


@dataclass(frozen=True)
class ConvergenceReport:
    method_id: str
    model_id: str
    t_final: float
    step_sizes: tuple          # strictly decreasing
    errors_q: tuple            # None where the run failed
    errors_p: tuple
    failures: tuple            # error message or None, aligned with step_sizes
    fitted_order: Optional[float]
    fit_range: tuple           # indices into step_sizes used for the fit


@dataclass(frozen=True)
class DriftReport:
    method_id: str
    model_id: str
    h: float
    t_final: float
    sample_times: np.ndarray
    hamiltonian_values: np.ndarray
    constraint_residuals: np.ndarray
    linear_drift_rate: float
    max_abs_hamiltonian: float      # over every computed step, not just samples
    max_constraint_residual: float  # likewise
    failure: Optional[str] = None   # set when the run terminated early


def fit_order(step_sizes, errors):
    """Least-squares slope of log(error) against log(h)."""
    step_sizes = np.asarray(step_sizes, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if step_sizes.size < 2:
        raise FewerThanTwoPoints("order fit needs at least two (h, error) pairs")
    slope, _ = np.polyfit(np.log(step_sizes), np.log(errors), 1)
    return float(slope)


def _select_fit_range(step_sizes, errors):
    """Largest contiguous index range (h decreasing) where the error decreases
    monotonically and sits above the reference floor, with pre-asymptotic
    points trimmed off the large-h end."""
    usable = [
        i for i in range(len(step_sizes))
        if errors[i] is not None and errors[i] > FLOOR_MARGIN * ERROR_FLOOR
    ]
    best = []
    run = []
    for i in usable:
        if run and i == run[-1] + 1 and errors[i] < errors[run[-1]]:
            run.append(i)
        else:
            run = [i]
        if len(run) >= len(best):
            best = list(run)
    if len(best) < 2:
        return []
    # Trim leading points whose local slope is far off the slope fitted to
    # the rest of the run: they sit outside the asymptotic regime.
    while len(best) > 3:
        first_slope = fit_order([step_sizes[i] for i in best[:2]],
                                [errors[i] for i in best[:2]])
        rest_slope = fit_order([step_sizes[i] for i in best[1:]],
                               [errors[i] for i in best[1:]])
        if abs(first_slope - rest_slope) <= 1.0:
            break
        best = best[1:]
    return best


def run_convergence(sys, method_id, q0, t_final, step_sizes, reference,
                    cfg=None, model_id=None):
    """Integrate at each step size and fit the observed order of convergence.

    ``reference`` is either a Trajectory whose final sample sits at t_final
    or a callable t -> q (closed-form solution). Runs that fail (Newton
    divergence, domain violations, ...) are recorded, not raised.

    Step sizes are snapped so that an even number of steps divides the
    interval exactly (the snapped values are what the report carries). A
    trailing partial step would superimpose its own h-dependence on the
    error curve, and symmetric partitioned pairs carry error components
    that alternate sign step to step and cancel only over even step counts;
    either effect corrupts the order fit.
    """
    step_sizes = sorted((float(h) for h in step_sizes), reverse=True)
    step_sizes = tuple(dict.fromkeys(
        t_final / max(2, 2 * round(t_final / (2.0 * h))) for h in step_sizes))
    if callable(reference):
        q_ref = np.asarray(reference(t_final), dtype=float)
    else:
        end = reference.samples[-1]
        if abs(end.t - t_final) > 1e-9 * max(1.0, abs(t_final)):
            raise ValueError(
                f"reference trajectory ends at t={end.t}, expected {t_final}")
        q_ref = end.q
    p_ref = sys.alpha(q_ref)

    tableau = make_tableau(method_id)
    x0 = consistent_init(sys, np.asarray(q0, dtype=float))
    errors_q, errors_p, failures = [], [], []
    for h in step_sizes:
        try:
            x_end = x0
            for _ in range(round(t_final / h)):
                x_end, _ = prk_step(sys, tableau, h, x_end, cfg)
        except VprkError as exc:
            errors_q.append(None)
            errors_p.append(None)
            failures.append(f"{type(exc).__name__}: {exc}")
            continue
        errors_q.append(float(np.max(np.abs(x_end.q - q_ref))))
        errors_p.append(float(np.max(np.abs(x_end.p - p_ref))))
        failures.append(None)

    fit_idx = _select_fit_range(step_sizes, errors_q)
    if fit_idx:
        order = fit_order([step_sizes[i] for i in fit_idx],
                          [errors_q[i] for i in fit_idx])
    else:
        order = None
    return ConvergenceReport(
        method_id=method_id, model_id=model_id or sys.name, t_final=t_final,
        step_sizes=step_sizes, errors_q=tuple(errors_q), errors_p=tuple(errors_p),
        failures=tuple(failures), fitted_order=order, fit_range=tuple(fit_idx),
    )


def run_drift(sys, method_id, q0, h, t_final, max_samples=2000, cfg=None,
              model_id=None):
    """Long fixed-step integration recording H and the constraint residual at
    uniformly thinned samples. Early termination is recorded in ``failure``
    together with the reached time; the samples collected so far are kept.

    The drift rate and the running maxima are accumulated over every step.
    Fitting the slope to thinned samples instead would alias the fast
    Hamiltonian oscillation into a spurious trend.
    """
    tableau = make_tableau(method_id)
    n_steps = int(round(t_final / h))
    stride = max(1, int(np.ceil(n_steps / max(1, max_samples - 1))))

    x = consistent_init(sys, np.asarray(q0, dtype=float))
    times = [x.t]
    h_values = [sys.h_fn(x.q)]
    residuals = [x.constraint_residual(sys)]
    # running sums for the least-squares line through (t_k, H_k)
    s0, st, stt, sh, sth = 1.0, x.t, x.t * x.t, h_values[0], x.t * h_values[0]
    max_h = abs(h_values[0])
    max_res = residuals[0]
    failure = None
    for k in range(1, n_steps + 1):
        try:
            x, _ = prk_step(sys, tableau, h, x, cfg)
        except VprkError as exc:
            failure = f"{type(exc).__name__} at t={x.t:.6g}: {exc}"
            break
        hk = sys.h_fn(x.q)
        res = x.constraint_residual(sys)
        s0 += 1.0
        st += x.t
        stt += x.t * x.t
        sh += hk
        sth += x.t * hk
        max_h = max(max_h, abs(hk))
        max_res = max(max_res, res)
        if k % stride == 0 or k == n_steps:
            times.append(x.t)
            h_values.append(hk)
            residuals.append(res)

    denom = s0 * stt - st * st
    drift_rate = (s0 * sth - st * sh) / denom if denom > 0.0 else np.nan
    return DriftReport(
        method_id=method_id, model_id=model_id or sys.name, h=h,
        t_final=t_final, sample_times=np.array(times),
        hamiltonian_values=np.array(h_values),
        constraint_residuals=np.array(residuals),
        linear_drift_rate=float(drift_rate),
        max_abs_hamiltonian=float(max_h),
        max_constraint_residual=float(max_res), failure=failure,
    )


def poisson_map_check(sys, method_id, h, q, cfg=None):
    """Defect of the Poisson-integrator identity J L^-1 J^T = L^-1 for the
    q-component of one step, with J the finite-difference Jacobian of the
    step map q -> qbar (momenta consistent-initialized at each probe)."""
    if sys.linear_alpha is None:
        raise UnsupportedSystem(
            f"Poisson-map check needs a linear one-form; '{sys.name}' has none")
    tableau = make_tableau(method_id)

    def step_map(y):
        x, _ = prk_step(sys, tableau, h, consistent_init(sys, y), cfg)
        return x.q

    jac = fd_jacobian(step_map, np.asarray(q, dtype=float))
    lam_inv = np.linalg.inv(sys.linear_alpha)
    return float(np.max(np.abs(jac @ lam_inv @ jac.T - lam_inv)))
