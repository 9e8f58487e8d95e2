"""The experiment models: Kepler, planar point vortices, Lotka-Volterra, and
the two-dimensional toy whose exact flow is the identity.

Each model ships analytic first and second derivatives of alpha and H.
The Kepler and vortex one-forms are exactly linear, ``alpha = -1/2 L q``;
Lotka-Volterra has a genuinely nonlinear alpha, which is what triggers the
order reduction the experiments measure.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedSystem
from .system import VelocityLinearSystem


@dataclass(frozen=True)
class KeplerParams:
    e: float = 0.5          # eccentricity
    a_axis: float = 1.0     # semi-major axis
    h0: float = -0.5        # Hamiltonian offset, chosen so H=0 on the test orbit

    def __post_init__(self):
        if not 0.0 <= self.e < 1.0:
            raise ValueError(f"eccentricity must be in [0, 1), got {self.e}")
        if self.a_axis <= 0.0:
            raise ValueError(f"semi-major axis must be positive, got {self.a_axis}")


@dataclass(frozen=True)
class VortexParams:
    gammas: tuple = (4.0, 2.0)   # circulations
    h0: float = 0.0

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gammas)
        if len(gammas) < 2:
            raise ValueError("at least two vortices required")
        if any(g == 0.0 for g in gammas):
            raise ValueError("circulations must be nonzero")
        object.__setattr__(self, "gammas", gammas)


@dataclass(frozen=True)
class LotkaVolterraParams:
    h0: float = 2.0          # offset, chosen so H=0 on the test solution


# Structure matrix of the Kepler one-form, alpha(q) = -1/2 LAMBDA q.
_KEPLER_LAMBDA = np.array([
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
])


def kepler_system(params=None):
    """Planar Kepler problem in the velocity-linear formulation, n=4.

    Coordinates are q = (x, y, p_x, p_y); the antisymmetrized one-form is
    alpha(q) = (q3/2, q4/2, -q1/2, -q2/2) and H is kinetic plus the -1/r
    potential, shifted by h0.
    """
    params = params or KeplerParams()
    h0 = params.h0
    lam = _KEPLER_LAMBDA.copy()
    d_alpha_const = -0.5 * lam

    def _r2(q):
        r2 = q[0] * q[0] + q[1] * q[1]
        if r2 <= 1e-24:
            raise DomainError("Kepler potential singular at the origin")
        return r2

    def alpha(q):
        return 0.5 * np.array([q[2], q[3], -q[0], -q[1]])

    def d_alpha(q):
        return d_alpha_const.copy()

    def d2_alpha_vp(q, v):
        return np.zeros((4, 4))

    def h_fn(q):
        r2 = _r2(q)
        return 0.5 * (q[2] * q[2] + q[3] * q[3]) - 1.0 / math.sqrt(r2) - h0

    def dh(q):
        r2 = _r2(q)
        r3 = r2 * math.sqrt(r2)
        return np.array([q[0] / r3, q[1] / r3, q[2], q[3]])

    def d2h(q):
        r2 = _r2(q)
        r = math.sqrt(r2)
        r3, r5 = r2 * r, r2 * r2 * r
        out = np.zeros((4, 4))
        out[0, 0] = 1.0 / r3 - 3.0 * q[0] * q[0] / r5
        out[1, 1] = 1.0 / r3 - 3.0 * q[1] * q[1] / r5
        out[0, 1] = out[1, 0] = -3.0 * q[0] * q[1] / r5
        out[2, 2] = out[3, 3] = 1.0
        return out

    return VelocityLinearSystem(
        n=4, alpha=alpha, d_alpha=d_alpha, d2_alpha_vp=d2_alpha_vp,
        h_fn=h_fn, dh=dh, d2h=d2h, linear_alpha=lam, name="kepler",
    )


def kepler_pericenter(params=None):
    """Initial condition at pericenter of the elliptic test orbit."""
    params = params or KeplerParams()
    e, a = params.e, params.a_axis
    return np.array([(1.0 - e) * a, 0.0, 0.0, a * math.sqrt((1.0 + e) / (1.0 - e))])


def _vortex_lambda(gammas):
    n = 2 * len(gammas)
    lam = np.zeros((n, n))
    for i, g in enumerate(gammas):
        lam[2 * i, 2 * i + 1] = g
        lam[2 * i + 1, 2 * i] = -g
    return lam


def vortex_system(params=None):
    """K interacting point vortices in the plane, n = 2K.

    Coordinates are q = (x1, y1, ..., xK, yK). The one-form is linear with a
    block-diagonal structure matrix scaled by the circulations; H is the usual
    pairwise logarithmic interaction with a 1/(4 pi) factor, shifted by h0.
    """
    params = params or VortexParams()
    gammas = np.array(params.gammas)
    k = len(gammas)
    n = 2 * k
    h0 = params.h0
    lam = _vortex_lambda(gammas)
    d_alpha_const = -0.5 * lam

    def _pair_sep2(q, i, j):
        dx = q[2 * i] - q[2 * j]
        dy = q[2 * i + 1] - q[2 * j + 1]
        r2 = dx * dx + dy * dy
        if r2 <= 1e-24:
            raise DomainError(f"vortices {i} and {j} coincide")
        return dx, dy, r2

    def alpha(q):
        out = np.empty(n)
        for i in range(k):
            out[2 * i] = -0.5 * gammas[i] * q[2 * i + 1]
            out[2 * i + 1] = 0.5 * gammas[i] * q[2 * i]
        return out

    def d_alpha(q):
        return d_alpha_const.copy()

    def d2_alpha_vp(q, v):
        return np.zeros((n, n))

    def h_fn(q):
        total = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                _, _, r2 = _pair_sep2(q, i, j)
                total += gammas[i] * gammas[j] * math.log(r2)
        return total / (4.0 * math.pi) - h0

    def dh(q):
        out = np.zeros(n)
        for i in range(k):
            for j in range(i + 1, k):
                dx, dy, r2 = _pair_sep2(q, i, j)
                w = gammas[i] * gammas[j] / (2.0 * math.pi * r2)
                out[2 * i] += w * dx
                out[2 * i + 1] += w * dy
                out[2 * j] -= w * dx
                out[2 * j + 1] -= w * dy
        return out

    def d2h(q):
        out = np.zeros((n, n))
        for i in range(k):
            for j in range(i + 1, k):
                dx, dy, r2 = _pair_sep2(q, i, j)
                w = gammas[i] * gammas[j] / (2.0 * math.pi)
                u = np.array([dx, dy])
                block = w * (np.eye(2) / r2 - 2.0 * np.outer(u, u) / (r2 * r2))
                si, sj = slice(2 * i, 2 * i + 2), slice(2 * j, 2 * j + 2)
                out[si, si] += block
                out[sj, sj] += block
                out[si, sj] -= block
                out[sj, si] -= block
        return out

    return VelocityLinearSystem(
        n=n, alpha=alpha, d_alpha=d_alpha, d2_alpha_vp=d2_alpha_vp,
        h_fn=h_fn, dh=dh, d2h=d2h, linear_alpha=lam, name=f"vortex{k}",
    )


def vortex_initial(params=None, d=1.0):
    """Two-vortex initial condition at separation d on the x-axis, centered
    on the vorticity center."""
    params = params or VortexParams()
    if len(params.gammas) != 2:
        raise UnsupportedSystem("canonical initial condition defined for K=2 only")
    g1, g2 = params.gammas
    gs = g1 + g2
    return np.array([g2 * d / gs, 0.0, -g1 * d / gs, 0.0])


def vortex_exact(params, d, t):
    """Closed-form two-vortex solution: circular motion about the vorticity
    center with angular velocity (G1+G2)/(2 pi d^2). K=2 only."""
    if len(params.gammas) != 2:
        raise UnsupportedSystem("closed-form solution available for K=2 only")
    g1, g2 = params.gammas
    gs = g1 + g2
    omega = gs / (2.0 * math.pi * d * d)
    ct, st = math.cos(omega * t), math.sin(omega * t)
    return np.array([
        g2 * d / gs * ct, g2 * d / gs * st,
        -g1 * d / gs * ct, -g1 * d / gs * st,
    ])


def vortex_period(params, d=1.0):
    g1, g2 = params.gammas
    return (2.0 * math.pi) ** 2 * d * d / (g1 + g2)


def lotka_volterra_system(params=None):
    """Lotka-Volterra predator-prey model recast with a nonlinear one-form.

    q = (u, v) with u, v > 0; alpha = (log(v)/u + v, u) reproduces
    udot = u(v-2), vdot = v(1-u). This is the one model here whose alpha is
    nonlinear in q, so the primary constraint is not preserved by Gauss
    methods and their order drops.
    """
    params = params or LotkaVolterraParams()
    h0 = params.h0

    def _check(q):
        u, v = q[0], q[1]
        if u <= 0.0 or v <= 0.0:
            raise DomainError(f"Lotka-Volterra state outside u,v > 0: ({u}, {v})")
        return u, v

    def alpha(q):
        u, v = _check(q)
        return np.array([math.log(v) / u + v, u])

    def d_alpha(q):
        u, v = _check(q)
        return np.array([
            [-math.log(v) / (u * u), 1.0 / (u * v) + 1.0],
            [1.0, 0.0],
        ])

    def d2_alpha_vp(q, w):
        u, v = _check(q)
        # alpha_2 is linear, so only the alpha_1 Hessian contributes.
        hess1 = np.array([
            [2.0 * math.log(v) / u**3, -1.0 / (u * u * v)],
            [-1.0 / (u * u * v), -1.0 / (u * v * v)],
        ])
        return w[0] * hess1

    def h_fn(q):
        u, v = _check(q)
        return u - math.log(u) + v - 2.0 * math.log(v) - h0

    def dh(q):
        u, v = _check(q)
        return np.array([1.0 - 1.0 / u, 1.0 - 2.0 / v])

    def d2h(q):
        u, v = _check(q)
        return np.array([[1.0 / (u * u), 0.0], [0.0, 2.0 / (v * v)]])

    return VelocityLinearSystem(
        n=2, alpha=alpha, d_alpha=d_alpha, d2_alpha_vp=d2_alpha_vp,
        h_fn=h_fn, dh=dh, d2h=d2h, linear_alpha=None, name="lotka_volterra",
    )


_TOY_LAMBDA = np.array([[0.0, -1.0], [1.0, 0.0]])


def toy_system():
    """L = y xdot / 2 - x ydot / 2 with H = 0: the exact flow is the identity."""
    lam = _TOY_LAMBDA.copy()
    d_alpha_const = -0.5 * lam

    def alpha(q):
        return np.array([0.5 * q[1], -0.5 * q[0]])

    def d_alpha(q):
        return d_alpha_const.copy()

    def d2_alpha_vp(q, v):
        return np.zeros((2, 2))

    def h_fn(q):
        return 0.0

    def dh(q):
        return np.zeros(2)

    def d2h(q):
        return np.zeros((2, 2))

    return VelocityLinearSystem(
        n=2, alpha=alpha, d_alpha=d_alpha, d2_alpha_vp=d2_alpha_vp,
        h_fn=h_fn, dh=dh, d2h=d2h, linear_alpha=lam, name="toy",
    )


# ODE right-hand sides q -> M(q)^-1 DH(q) in closed form, for the explicit
# reference integrator. Kept numba-compatible (scalar math, no closures over
# python objects) so the reference runs can be jitted; tests pin them against
# el_vector_field.

def kepler_ode_field(params=None):
    def field(q):
        r2 = q[0] * q[0] + q[1] * q[1]
        r3 = r2 * np.sqrt(r2)
        return np.array([q[2], q[3], -q[0] / r3, -q[1] / r3])
    return field


def vortex_ode_field(params=None):
    params = params or VortexParams()
    gammas = np.array(params.gammas)
    k = len(gammas)

    def field(q):
        out = np.zeros(2 * k)
        for i in range(k):
            for j in range(k):
                if i == j:
                    continue
                dx = q[2 * i] - q[2 * j]
                dy = q[2 * i + 1] - q[2 * j + 1]
                w = gammas[j] / (2.0 * np.pi * (dx * dx + dy * dy))
                out[2 * i] += -w * dy
                out[2 * i + 1] += w * dx
        return out
    return field


def lotka_volterra_ode_field(params=None):
    def field(q):
        return np.array([q[0] * (q[1] - 2.0), q[1] * (1.0 - q[0])])
    return field


def toy_ode_field(params=None):
    def field(q):
        return np.zeros(2)
    return field


@dataclass(frozen=True)
class ModelSetup:
    """A registered model: the system, its canonical initial state, and the
    closed-form ODE field used by the reference integrator."""

    system: VelocityLinearSystem
    q0: np.ndarray
    ode_field: callable
    params: object = None


def _build_kepler(e=0.5, a_axis=1.0, h0=-0.5):
    p = KeplerParams(e=e, a_axis=a_axis, h0=h0)
    return ModelSetup(kepler_system(p), kepler_pericenter(p),
                      kepler_ode_field(p), p)


def _build_vortex2(gammas=(4.0, 2.0), h0=0.0, separation=1.0):
    p = VortexParams(gammas=tuple(gammas), h0=h0)
    return ModelSetup(vortex_system(p), vortex_initial(p, separation),
                      vortex_ode_field(p), p)


def _build_lotka_volterra(h0=2.0):
    p = LotkaVolterraParams(h0=h0)
    return ModelSetup(lotka_volterra_system(p), np.array([1.0, 1.0]),
                      lotka_volterra_ode_field(p), p)


def _build_toy():
    return ModelSetup(toy_system(), np.array([1.0, 2.0]), toy_ode_field())


MODEL_BUILDERS = {
    "kepler": _build_kepler,
    "vortex2": _build_vortex2,
    "lotka_volterra": _build_lotka_volterra,
    "toy": _build_toy,
}


def make_model(name, **overrides):
    """Build a registered model by id, with keyword parameter overrides."""
    try:
        builder = MODEL_BUILDERS[name]
    except KeyError:
        raise KeyError(
            f"unknown model '{name}'; available: {sorted(MODEL_BUILDERS)}"
        ) from None
    return builder(**overrides)
