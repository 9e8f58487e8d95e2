"""High-order explicit Runge-Kutta reference integration of the first-order
Euler-Lagrange ODE ``qdot = M(q)^-1 DH(q)``.

Reference trajectories use Verner's 8-stage, 6th-order method (the classical
DVERK propagation tableau; the embedded error weights are not shipped because
the step size is fixed by protocol). Classical RK4 is included as a
cross-check. When numba is importable and the model registered a closed-form
ODE field, the step loop is jit-compiled; otherwise a plain numpy loop runs.
The two paths agree to roundoff and tests pin that.
"""

from dataclasses import dataclass

import numpy as np

from .system import PhasePoint, Trajectory, consistent_init, el_vector_field

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None


@dataclass(frozen=True)
class ExplicitTableau:
    a: np.ndarray   # strictly lower triangular
    b: np.ndarray
    c: np.ndarray
    name: str
    order: int

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if np.max(np.abs(np.triu(a))) != 0.0:
            raise ValueError("explicit tableau requires strictly lower triangular a")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))


def verner65():
    a = np.zeros((8, 8))
    a[1, 0] = 1.0 / 6.0
    a[2, :2] = [4.0 / 75.0, 16.0 / 75.0]
    a[3, :3] = [5.0 / 6.0, -8.0 / 3.0, 5.0 / 2.0]
    a[4, :4] = [-165.0 / 64.0, 55.0 / 6.0, -425.0 / 64.0, 85.0 / 96.0]
    a[5, :5] = [12.0 / 5.0, -8.0, 4015.0 / 612.0, -11.0 / 36.0, 88.0 / 255.0]
    a[6, :6] = [-8263.0 / 15000.0, 124.0 / 75.0, -643.0 / 680.0,
                -81.0 / 250.0, 2484.0 / 10625.0, 0.0]
    a[7, :7] = [3501.0 / 1720.0, -300.0 / 43.0, 297275.0 / 52632.0,
                -319.0 / 2322.0, 24068.0 / 84065.0, 0.0, 3850.0 / 26703.0]
    b = np.array([3.0 / 40.0, 0.0, 875.0 / 2244.0, 23.0 / 72.0,
                  264.0 / 1955.0, 0.0, 125.0 / 11592.0, 43.0 / 616.0])
    c = np.array([0.0, 1.0 / 6.0, 4.0 / 15.0, 2.0 / 3.0, 5.0 / 6.0,
                  1.0, 1.0 / 15.0, 1.0])
    return ExplicitTableau(a=a, b=b, c=c, name="verner65", order=6)


def rk4():
    a = np.zeros((4, 4))
    a[1, 0] = 0.5
    a[2, 1] = 0.5
    a[3, 2] = 1.0
    b = np.array([1.0, 2.0, 2.0, 1.0]) / 6.0
    c = np.array([0.0, 0.5, 0.5, 1.0])
    return ExplicitTableau(a=a, b=b, c=c, name="rk4", order=4)


EXPLICIT_TABLEAUS = {"verner65": verner65, "rk4": rk4}


def erk_step(sys, tableau, h, t, q):
    """One explicit RK step on the Euler-Lagrange ODE. The field is the
    mass-matrix solve, so SingularMassMatrix propagates from it."""
    return _erk_step_field(lambda y: el_vector_field(sys, y), tableau, h, q)


def _erk_step_field(field, tableau, h, q):
    s = tableau.b.size
    k = np.zeros((s, q.size))
    for i in range(s):
        y = q + h * (tableau.a[i, :i] @ k[:i]) if i else q
        k[i] = field(y)
    return q + h * (tableau.b @ k)


def _run_numpy(field, tableau, q, h, n_steps):
    q = q.copy()
    for _ in range(n_steps):
        q = _erk_step_field(field, tableau, h, q)
    return q


_JIT_CACHE = {}


def _jit_runner(field, q_probe):
    """Compile an n-step ERK runner around a numba-compatible field. Returns
    None when numba is unavailable or the field does not compile. The probe
    state is used for a zero-step-size warmup call."""
    if numba is None:
        return None
    if field in _JIT_CACHE:
        return _JIT_CACHE[field]
    try:
        jf = numba.njit(field)

        @numba.njit
        def run(q, h, n_steps, a, b):
            s = b.size
            n = q.size
            q = q.copy()
            k = np.zeros((s, n))
            for _ in range(n_steps):
                for i in range(s):
                    y = q.copy()
                    for j in range(i):
                        aij = a[i, j]
                        if aij != 0.0:
                            for m in range(n):
                                y[m] += h * aij * k[j, m]
                    k[i] = jf(y)
                for i in range(s):
                    bi = b[i]
                    if bi != 0.0:
                        for m in range(n):
                            q[m] += h * bi * k[i, m]
            return q

        run(np.asarray(q_probe, dtype=float).copy(), 0.0, 1,
            np.zeros((1, 1)), np.ones(1))
    except Exception:
        run = None
    _JIT_CACHE[field] = run
    return run


def reference_solution(sys, q0, t_final, h_ref=1e-6, tableau=None, field=None,
                       max_samples=1001):
    """Dense fixed-step ERK integration from a consistent start.

    Stored samples are thinned to at most ``max_samples`` (the endpoint is
    always exact and always stored); the momentum column is filled through
    the constraint p = alpha(q). ``field`` may supply a closed-form ODE
    right-hand side equal to the mass-matrix solve; without it the generic
    solve is used.
    """
    tableau = tableau or verner65()
    q0 = np.asarray(q0, dtype=float)
    if field is None:
        field = _generic_field(sys)
        runner = None
    else:
        runner = _jit_runner(field, q0)
    if runner is None:
        runner = lambda q, h, n, a, b: _run_numpy(field, tableau, q, h, n)

    n_total = int(np.floor(t_final / h_ref + 1e-9))
    rest = t_final - n_total * h_ref
    stride = max(1, int(np.ceil(n_total / max(1, max_samples - 1))))

    samples = [consistent_init(sys, q0)]
    q = q0.copy()
    done = 0
    while done < n_total:
        chunk = min(stride, n_total - done)
        q = runner(q, h_ref, chunk, tableau.a, tableau.b)
        done += chunk
        samples.append(PhasePoint(t=done * h_ref, q=q, p=sys.alpha(q)))
    if rest > 1e-12 * max(1.0, abs(t_final)):
        q = runner(q, rest, 1, tableau.a, tableau.b)
        samples.append(PhasePoint(t=t_final, q=q, p=sys.alpha(q)))
    elif len(samples) > 1:
        # land the last stored time exactly on t_final
        last = samples[-1]
        samples[-1] = PhasePoint(t=t_final, q=last.q, p=last.p)
    return Trajectory(samples=samples)


def _generic_field(sys):
    if sys.linear_alpha is not None:
        # constant mass matrix: factor once
        binv = np.linalg.inv(sys.linear_alpha)
        return lambda q: binv @ sys.dh(q)
    return lambda q: el_vector_field(sys, q)
