"""Butcher tableaus for the partitioned Runge-Kutta methods under study.

Coefficients are hard-coded in exact surd form evaluated to double precision
(standard collocation constructions); the test suite re-verifies them through
quadrature order conditions, stage consistency, and the symplecticity
condition b_i abar_ij + b_j a_ji = b_i b_j.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedStageCount, ZeroWeight

_S3 = math.sqrt(3.0)
_S5 = math.sqrt(5.0)
_S6 = math.sqrt(6.0)
_S15 = math.sqrt(15.0)


@dataclass(frozen=True)
class PartitionedTableau:
    """Coefficient pair (a for positions, a_bar for momenta) with shared
    weights b and nodes c. Non-partitioned methods simply have a_bar == a."""

    s: int
    a: np.ndarray
    a_bar: np.ndarray
    b: np.ndarray
    c: np.ndarray
    name: str
    classical_order: int
    stiffly_accurate: bool = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        a_bar = np.asarray(self.a_bar, dtype=float)
        b = np.asarray(self.b, dtype=float)
        c = np.asarray(self.c, dtype=float)
        for name, arr, shape in (("a", a, (self.s, self.s)),
                                 ("a_bar", a_bar, (self.s, self.s)),
                                 ("b", b, (self.s,)), ("c", c, (self.s,))):
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
        if abs(b.sum() - 1.0) > 1e-14:
            raise ValueError(f"weights must sum to 1, got {b.sum()!r}")
        if np.max(np.abs(a.sum(axis=1) - c)) > 1e-14:
            raise ValueError("stage consistency c_i = sum_j a_ij violated")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "a_bar", a_bar)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        # Last stage coincides with the step for both the position and the
        # momentum update; this is what preserves algebraic constraints.
        stiff = bool(np.allclose(a[-1], b, atol=1e-14)
                     and np.allclose(a_bar[-1], b, atol=1e-14))
        object.__setattr__(self, "stiffly_accurate", stiff)


_GAUSS = {
    1: (
        [[0.5]],
        [1.0],
        [0.5],
    ),
    2: (
        [[0.25, 0.25 - _S3 / 6.0],
         [0.25 + _S3 / 6.0, 0.25]],
        [0.5, 0.5],
        [0.5 - _S3 / 6.0, 0.5 + _S3 / 6.0],
    ),
    3: (
        [[5.0 / 36.0, 2.0 / 9.0 - _S15 / 15.0, 5.0 / 36.0 - _S15 / 30.0],
         [5.0 / 36.0 + _S15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - _S15 / 24.0],
         [5.0 / 36.0 + _S15 / 30.0, 2.0 / 9.0 + _S15 / 15.0, 5.0 / 36.0]],
        [5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0],
        [0.5 - _S15 / 10.0, 0.5, 0.5 + _S15 / 10.0],
    ),
}

_RADAU_IIA = {
    2: (
        [[5.0 / 12.0, -1.0 / 12.0],
         [0.75, 0.25]],
        [0.75, 0.25],
        [1.0 / 3.0, 1.0],
    ),
    3: (
        [[(88.0 - 7.0 * _S6) / 360.0, (296.0 - 169.0 * _S6) / 1800.0,
          (-2.0 + 3.0 * _S6) / 225.0],
         [(296.0 + 169.0 * _S6) / 1800.0, (88.0 + 7.0 * _S6) / 360.0,
          (-2.0 - 3.0 * _S6) / 225.0],
         [(16.0 - _S6) / 36.0, (16.0 + _S6) / 36.0, 1.0 / 9.0]],
        [(16.0 - _S6) / 36.0, (16.0 + _S6) / 36.0, 1.0 / 9.0],
        [(4.0 - _S6) / 10.0, (4.0 + _S6) / 10.0, 1.0],
    ),
}

# Lobatto IIIA (collocation at Lobatto nodes) and its symplectic partner
# Lobatto IIIB, sharing weights and nodes.
_LOBATTO = {
    2: (
        [[0.0, 0.0],
         [0.5, 0.5]],
        [[0.5, 0.0],
         [0.5, 0.0]],
        [0.5, 0.5],
        [0.0, 1.0],
    ),
    3: (
        [[0.0, 0.0, 0.0],
         [5.0 / 24.0, 1.0 / 3.0, -1.0 / 24.0],
         [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]],
        [[1.0 / 6.0, -1.0 / 6.0, 0.0],
         [1.0 / 6.0, 1.0 / 3.0, 0.0],
         [1.0 / 6.0, 5.0 / 6.0, 0.0]],
        [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        [0.0, 0.5, 1.0],
    ),
    4: (
        [[0.0, 0.0, 0.0, 0.0],
         [(11.0 + _S5) / 120.0, (25.0 - _S5) / 120.0,
          (25.0 - 13.0 * _S5) / 120.0, (-1.0 + _S5) / 120.0],
         [(11.0 - _S5) / 120.0, (25.0 + 13.0 * _S5) / 120.0,
          (25.0 + _S5) / 120.0, (-1.0 - _S5) / 120.0],
         [1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0]],
        [[1.0 / 12.0, (-1.0 - _S5) / 24.0, (-1.0 + _S5) / 24.0, 0.0],
         [1.0 / 12.0, (25.0 + _S5) / 120.0, (25.0 - 13.0 * _S5) / 120.0, 0.0],
         [1.0 / 12.0, (25.0 + 13.0 * _S5) / 120.0, (25.0 - _S5) / 120.0, 0.0],
         [1.0 / 12.0, (11.0 - _S5) / 24.0, (11.0 + _S5) / 24.0, 0.0]],
        [1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0],
        [0.0, 0.5 - _S5 / 10.0, 0.5 + _S5 / 10.0, 1.0],
    ),
}


def gauss(s):
    """s-stage Gauss collocation method, classical order 2s. Self-conjugate
    under the symplecticity condition, so a_bar = a."""
    if s not in _GAUSS:
        raise UnsupportedStageCount(f"Gauss tableau shipped for s in 1..3, got {s}")
    a, b, c = _GAUSS[s]
    return PartitionedTableau(s=s, a=a, a_bar=a, b=b, c=c,
                              name=f"gauss{s}", classical_order=2 * s)


def radau_iia(s):
    """s-stage Radau IIA collocation method, classical order 2s-1. Stiffly
    accurate but not variational."""
    if s not in _RADAU_IIA:
        raise UnsupportedStageCount(f"Radau IIA tableau shipped for s in 2..3, got {s}")
    a, b, c = _RADAU_IIA[s]
    return PartitionedTableau(s=s, a=a, a_bar=a, b=b, c=c,
                              name=f"radau_iia{s}", classical_order=2 * s - 1)


def lobatto_iiia_iiib(s):
    """Partitioned pair: Lobatto IIIA for positions, Lobatto IIIB for momenta."""
    if s not in _LOBATTO:
        raise UnsupportedStageCount(f"Lobatto pair shipped for s in 2..4, got {s}")
    a, a_bar, b, c = _LOBATTO[s]
    return PartitionedTableau(s=s, a=a, a_bar=a_bar, b=b, c=c,
                              name=f"lobatto{s}", classical_order=2 * s - 2)


def conjugate_tableau(a, b):
    """Symplectic-conjugate coefficients: abar_ij = b_j - (b_j / b_i) a_ji.

    The pair (a, abar) then satisfies the symplecticity condition exactly up
    to rounding. Undefined when some b_i = 0 (raises ZeroWeight).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(b == 0.0):
        raise ZeroWeight("conjugate tableau undefined for zero weights")
    return b[None, :] - (b[None, :] / b[:, None]) * a.T


def check_symplecticity(tableau):
    """Max residual of b_i abar_ij + b_j a_ji - b_i b_j over all (i, j)."""
    b, a, a_bar = tableau.b, tableau.a, tableau.a_bar
    res = b[:, None] * a_bar + b[None, :] * a.T - np.outer(b, b)
    return float(np.max(np.abs(res)))


def check_order_conditions(tableau, up_to):
    """Quadrature and stage-order condition residuals up to the given order.

    Returns a list of ("B(k)" | "C(k)", residual) pairs, where B(k) is
    sum_i b_i c_i^(k-1) = 1/k and C(k) is sum_j a_ij c_j^(k-1) = c_i^k / k
    (reported as the max residual over stages).
    """
    b, c, a = tableau.b, tableau.c, tableau.a
    out = []
    for k in range(1, up_to + 1):
        out.append((f"B({k})", float(abs(b @ c ** (k - 1) - 1.0 / k))))
    for k in range(1, up_to + 1):
        res = a @ c ** (k - 1) - c ** k / k
        out.append((f"C({k})", float(np.max(np.abs(res)))))
    return out


_TABLEAU_BUILDERS = {
    "gauss1": lambda: gauss(1),
    "gauss2": lambda: gauss(2),
    "gauss3": lambda: gauss(3),
    "radau_iia2": lambda: radau_iia(2),
    "radau_iia3": lambda: radau_iia(3),
    "lobatto2": lambda: lobatto_iiia_iiib(2),
    "lobatto3": lambda: lobatto_iiia_iiib(3),
    "lobatto4": lambda: lobatto_iiia_iiib(4),
}

METHOD_IDS = tuple(_TABLEAU_BUILDERS)


def make_tableau(method_id):
    """Look up a shipped tableau by string id (e.g. "gauss2", "lobatto3")."""
    try:
        return _TABLEAU_BUILDERS[method_id]()
    except KeyError:
        raise KeyError(
            f"unknown method '{method_id}'; available: {list(METHOD_IDS)}"
        ) from None
