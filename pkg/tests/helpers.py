"""Shared test utilities: in-domain random state generators and an
independently coded implicit-RK-on-the-ODE oracle.

The oracle deliberately uses raw numpy only (no package linear algebra or
stage machinery) so that agreement tests compare two separate code paths.
"""

import numpy as np


def random_kepler_positions(rng, count, r_min=0.4, r_max=1.8):
    """States with radius in [r_min, r_max] and moderate momenta."""
    out = []
    while len(out) < count:
        q = rng.uniform(-r_max, r_max, size=4)
        if r_min <= np.hypot(q[0], q[1]) <= r_max:
            out.append(q)
    return out


def random_vortex_positions(rng, count, sep_min=0.4, sep_max=1.8):
    """Two-vortex states with pair separation in [sep_min, sep_max]."""
    out = []
    while len(out) < count:
        q = rng.uniform(-1.5, 1.5, size=4)
        if sep_min <= np.hypot(q[0] - q[2], q[1] - q[3]) <= sep_max:
            out.append(q)
    return out


def random_lv_positions(rng, count, lo=0.3, hi=3.0):
    return [rng.uniform(lo, hi, size=2) for _ in range(count)]


def random_toy_positions(rng, count):
    return [rng.uniform(-2.0, 2.0, size=2) for _ in range(count)]


def irk_ode_step(f, df, q, h, a, b, tol=1e-13, max_iters=60):
    """One implicit Runge-Kutta step on qdot = f(q), solved by Newton on the
    stacked stage derivatives. ``df`` is the Jacobian of f.

    Returns the new position q + h * sum_j b_j K_j.
    """
    q = np.asarray(q, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s, n = b.size, q.size
    k = np.tile(f(q), (s, 1))
    for _ in range(max_iters):
        stages = q[None, :] + h * a @ k
        resid = k - np.array([f(stages[i]) for i in range(s)])
        if np.max(np.abs(resid)) <= tol:
            break
        jac = np.zeros((s, n, s, n))
        for i in range(s):
            dfi = df(stages[i])
            for j in range(s):
                if i == j:
                    jac[i, :, j, :] = np.eye(n)
                jac[i, :, j, :] -= h * a[i, j] * dfi
        delta = np.linalg.solve(jac.reshape(s * n, s * n), -resid.reshape(s * n))
        k = k + delta.reshape(s, n)
    else:
        raise RuntimeError("oracle Newton did not converge")
    return q + h * (b @ k)


def linear_alpha_ode(system):
    """f and Df of the Euler-Lagrange ODE for a linear one-form, built from
    the constant structure matrix."""
    lam_inv = np.linalg.inv(system.linear_alpha)

    def f(q):
        return lam_inv @ system.dh(q)

    def df(q):
        return lam_inv @ system.d2h(q)

    return f, df


def lotka_volterra_ode():
    """The predator-prey ODE written out directly (independent of the model's
    one-form construction)."""

    def f(q):
        u, v = q
        return np.array([u * (v - 2.0), v * (1.0 - u)])

    def df(q):
        u, v = q
        return np.array([[v - 2.0, u], [-v, 1.0 - u]])

    return f, df
