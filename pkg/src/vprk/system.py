"""Core abstraction for Lagrangian systems linear in velocities.

A system ``L(q, qdot) = alpha(q) . qdot - H(q)`` is degenerate: the Legendre
transform collapses to the algebraic constraint ``p = alpha(q)``, and the
dynamics is the index-1 DAE

    p    = alpha(q),
    pdot = Dalpha(q)^T qdot - DH(q),

equivalently the first-order ODE ``M(q) qdot = DH(q)`` with the antisymmetric
mass matrix ``M = Dalpha^T - Dalpha``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import SingularMassMatrix, SingularMatrix
from .linalg import lu_solve

# A point counts as consistent when ||p - alpha(q)||_inf is below this.
CONSISTENCY_TOL = 1e-10


@dataclass(frozen=True)
class VelocityLinearSystem:
    """One physical model: the one-form alpha, the Hamiltonian H, derivatives.

    Derivatives are analytic callables supplied by the model; finite
    differences are used only as test oracles. ``d2_alpha_vp(q, v)`` is the
    contraction ``sum_b D^2 alpha_b(q) v^b``, i.e. the Hessian of
    ``q -> alpha(q) . v``; the full rank-3 tensor is never materialized.
    ``linear_alpha`` holds the constant antisymmetric matrix L with
    ``alpha(q) = -1/2 L q`` when alpha is exactly linear, else None.
    """

    n: int
    alpha: Callable[[np.ndarray], np.ndarray]
    d_alpha: Callable[[np.ndarray], np.ndarray]
    d2_alpha_vp: Callable[[np.ndarray, np.ndarray], np.ndarray]
    h_fn: Callable[[np.ndarray], float]
    dh: Callable[[np.ndarray], np.ndarray]
    d2h: Callable[[np.ndarray], np.ndarray]
    linear_alpha: Optional[np.ndarray] = None
    name: str = "system"

    def __post_init__(self):
        if self.n <= 0 or self.n % 2 != 0:
            raise ValueError(f"phase dimension must be even and positive, got {self.n}")
        if self.linear_alpha is not None:
            lam = np.asarray(self.linear_alpha, dtype=float)
            if lam.shape != (self.n, self.n):
                raise ValueError("linear_alpha must be n-by-n")
            if not np.allclose(lam, -lam.T, atol=1e-14):
                raise ValueError("linear_alpha must be antisymmetric")
            svals = np.linalg.svd(lam, compute_uv=False)
            if svals[-1] <= 1e-12 * svals[0]:
                raise ValueError("linear_alpha must be invertible")
            object.__setattr__(self, "linear_alpha", lam)


@dataclass(frozen=True)
class PhasePoint:
    """A (t, q, p) sample of the flow on T*Q."""

    t: float
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float).copy())
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).copy())
        if not (np.isfinite(self.t) and np.all(np.isfinite(self.q))
                and np.all(np.isfinite(self.p))):
            raise ValueError("phase point entries must be finite")

    def constraint_residual(self, sys):
        """Distance off the primary constraint, ``||p - alpha(q)||_inf``."""
        return float(np.max(np.abs(self.p - sys.alpha(self.q))))

    def is_consistent(self, sys, tol=CONSISTENCY_TOL):
        return self.constraint_residual(sys) <= tol


@dataclass
class Trajectory:
    """Time-ordered phase points plus per-step solver reports (optional)."""

    samples: list
    reports: Optional[list] = field(default=None)

    def __post_init__(self):
        ts = [s.t for s in self.samples]
        if any(t1 <= t0 for t0, t1 in zip(ts, ts[1:])):
            raise ValueError("sample times must be strictly increasing")

    @property
    def times(self):
        return np.array([s.t for s in self.samples])

    @property
    def positions(self):
        return np.array([s.q for s in self.samples])

    @property
    def momenta(self):
        return np.array([s.p for s in self.samples])


def mass_matrix(sys, q):
    """Antisymmetric mass matrix ``M(q) = Dalpha(q)^T - Dalpha(q)``."""
    da = np.asarray(sys.d_alpha(q), dtype=float)
    return da.T - da


def el_vector_field(sys, q):
    """Right-hand side of the Euler-Lagrange ODE: solve ``M(q) qdot = DH(q)``.

    Raises SingularMassMatrix where the regularity assumption on M fails.
    """
    m = mass_matrix(sys, q)
    try:
        return lu_solve(m, sys.dh(q))
    except SingularMatrix as exc:
        raise SingularMassMatrix(
            f"mass matrix of '{sys.name}' singular at q={np.asarray(q)}"
        ) from exc


def dae_residual(sys, x, qdot, pdot):
    """Residuals of the two DAE equations at a point/velocity pair.

    Returns ``(p - alpha(q), pdot - Dalpha(q)^T qdot + DH(q))``; both vanish
    iff the pair satisfies the DAE.
    """
    q, p = x.q, x.p
    r_constraint = p - sys.alpha(q)
    r_momentum = np.asarray(pdot) - sys.d_alpha(q).T @ np.asarray(qdot) + sys.dh(q)
    return r_constraint, r_momentum


def consistent_init(sys, q0, t0=0.0):
    """Phase point on the primary constraint: ``p = alpha(q0)``."""
    q0 = np.asarray(q0, dtype=float)
    return PhasePoint(t=t0, q=q0, p=sys.alpha(q0))
