"""Fold involutions, the first return map at a two-fold and its linearization."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import DEFAULT_TOL, PiecewiseSystem, ToleranceConfig, lie_derivative, lift_chart
from .flow import NoReturnError, orbit_return_to_M
from .polynomial import Poly, VectorField

__all__ = ["ReturnMapData", "involution", "first_return", "return_linearization", "TYPE_MARGIN"]

TYPE_MARGIN = 1e-6


@lru_cache(maxsize=256)
def _contact(X: VectorField, h: Poly) -> Poly:
    return lie_derivative(X, h)


def involution(X: VectorField, h: Poly, u, side: int, tol: ToleranceConfig = DEFAULT_TOL, t_max: float = 50.0) -> np.ndarray:
    """gamma_X at chart point u = (x1, x2) of M.

    ``side`` is +1 for X+ (orbits in h > 0) and -1 for X-.  Points where the
    orbit leaves M into its side flow forward; points where it arrives flow
    backward; points of the tangency line S_X are fixed.
    """
    p = lift_chart(h, u, tol)
    xh = _contact(tuple(X), h)(p)
    if abs(xh) <= tol.zero_eps:
        return np.array([p[0], p[1]])
    backward = side * xh < 0
    q, _ = orbit_return_to_M(X, h, p, side, tol, t_max=t_max, backward=backward)
    return np.array([q[0], q[1]])


def first_return(sys: PiecewiseSystem, u, tol: ToleranceConfig = DEFAULT_TOL, t_max: float = 50.0) -> np.ndarray:
    """phi_X = gamma_{X-} o gamma_{X+}."""
    v = involution(sys.x_plus, sys.h, u, +1, tol, t_max)
    return involution(sys.x_minus, sys.h, v, -1, tol, t_max)


@dataclass
class ReturnMapData:
    L: np.ndarray
    trace: float
    det: float
    eigenvalues: np.ndarray
    type: str
    invariant_directions: np.ndarray | None
    fd_step: float

    def to_dict(self) -> dict:
        return {
            "L": self.L.tolist(),
            "trace": self.trace,
            "det": self.det,
            "eigenvalues": [[float(np.real(z)), float(np.imag(z))] for z in self.eigenvalues],
            "type": self.type,
            "invariant_directions": None if self.invariant_directions is None else self.invariant_directions.T.tolist(),
            "fd_step": self.fd_step,
        }


def _fd_matrix(sys, base, step, tol):
    L = np.zeros((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = step
        L[:, j] = (first_return(sys, base + e, tol) - first_return(sys, base - e, tol)) / (2 * step)
    return L


def return_linearization(sys: PiecewiseSystem, tol: ToleranceConfig = DEFAULT_TOL, point=(0.0, 0.0)) -> ReturnMapData:
    """L = D phi_X at the two-fold by Richardson-extrapolated central differences."""
    base = np.asarray(point, dtype=float)
    dstep = tol.fd_step
    try:
        L1 = _fd_matrix(sys, base, dstep, tol)
        L2 = _fd_matrix(sys, base, dstep / 2, tol)
    except NoReturnError as exc:
        raise ValueError(f"first return map unavailable: {exc}") from exc
    L = (4 * L2 - L1) / 3
    tr = float(np.trace(L))
    det = float(np.linalg.det(L))
    w, V = np.linalg.eig(L)
    if abs(tr) > 2 + TYPE_MARGIN:
        kind = "saddle"
        dirs = np.real(V)
    elif abs(tr) < 2 - TYPE_MARGIN:
        kind = "elliptic"
        dirs = None
    else:
        kind = "parabolic_boundary"
        dirs = None
    return ReturnMapData(L, tr, det, w, kind, dirs, dstep)
