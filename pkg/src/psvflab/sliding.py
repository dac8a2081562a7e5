"""Sliding vector fields, pseudo-equilibria and planar equilibrium analysis."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .core import DEFAULT_TOL, PiecewiseSystem, RegionTag, ToleranceConfig, region_from_values
from .polynomial import Poly, X1, X2

__all__ = [
    "SlidingField",
    "EquilibriumReport",
    "SlidingBoundaryError",
    "sliding_field",
    "filippov_field",
    "pseudo_equilibria",
    "classify_equilibrium",
    "first_lyapunov",
    "return_displacement",
]


class SlidingBoundaryError(ValueError):
    """X-h - X+h vanishes: the point is on the boundary of the sliding region."""


@dataclass(frozen=True)
class SlidingField:
    """Rescaled sliding field X^s = (X-h) X+ - (X+h) X-.

    ``spatial`` is the 3-component field on M.  ``planar`` holds its image in
    the chart (x1, x2) -> (x1, x2, x3(x1, x2)), available when M is a graph
    over the (x1, x2) plane; planar components are polynomials in x1, x2.
    """

    parent: PiecewiseSystem
    spatial: tuple[Poly, Poly, Poly]
    rescaled: bool = True
    _derived: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def planar(self) -> tuple[Poly, Poly] | None:
        """Chart image, composed on first use (curved surfaces make this costly)."""
        if "planar" not in self._derived:
            sys = self.parent
            planar = None
            if sys.is_graph_surface():
                coef = sys.h.coefficient((0, 0, 1))
                x3 = -(sys.h - Poly({(0, 0, 1): coef})) / coef
                subs = [X1, X2, x3]
                planar = (self.spatial[0].compose(subs), self.spatial[1].compose(subs))
            self._derived["planar"] = planar
        return self._derived["planar"]

    def value(self, p) -> np.ndarray:
        return np.array([c(p) for c in self.spatial])

    def _need_planar(self) -> tuple[Poly, Poly]:
        if self.planar is None:
            raise ValueError("planar sliding field needs a switching surface of graph form a*x3 + q(x1, x2)")
        return self.planar

    def planar_value(self, u) -> np.ndarray:
        F = self._need_planar()
        q = (float(u[0]), float(u[1]), 0.0)
        return np.array([F[0](q), F[1](q)])

    def planar_many(self, U) -> np.ndarray:
        F = self._need_planar()
        P = np.column_stack([U[:, 0], U[:, 1], np.zeros(len(U))])
        return np.column_stack([F[0].evaluate_many(P), F[1].evaluate_many(P)])

    def _partials(self, order: int):
        key = ("d", order)
        if key not in self._derived:
            F = self._need_planar()
            idx = [(i,) for i in range(2)]
            for _ in range(order - 1):
                idx = [a + (i,) for a in idx for i in range(2)]
            table = []
            for comp in F:
                row = []
                for a in idx:
                    q = comp
                    for i in a:
                        q = q.deriv(i)
                    row.append(q)
                table.append(row)
            self._derived[key] = (idx, table)
        return self._derived[key]

    def derivative_tensor(self, u, order: int) -> np.ndarray:
        """Array T[k, i, j, ...] = d^order F_k / du_i du_j ... at u."""
        idx, table = self._partials(order)
        q = (float(u[0]), float(u[1]), 0.0)
        T = np.zeros((2,) + (2,) * order)
        for k in range(2):
            for a, poly in zip(idx, table[k]):
                T[(k,) + a] = poly(q)
        return T

    def jacobian(self, u) -> np.ndarray:
        return self.derivative_tensor(u, 1)

    def jacobian_many(self, U) -> np.ndarray:
        idx, table = self._partials(1)
        P = np.column_stack([U[:, 0], U[:, 1], np.zeros(len(U))])
        J = np.zeros((len(U), 2, 2))
        for k in range(2):
            for (i,), poly in zip(idx, table[k]):
                J[:, k, i] = poly.evaluate_many(P)
        return J

    def lift(self, u) -> np.ndarray:
        """Point of M over chart coordinates u."""
        h = self.parent.h
        a = h.coefficient((0, 0, 1))
        q = h - Poly({(0, 0, 1): a})
        return np.array([float(u[0]), float(u[1]), -q((float(u[0]), float(u[1]), 0.0)) / float(a)])

    def is_identically_null(self) -> bool:
        return all(c.is_zero() for c in self.spatial)


def sliding_field(sys: PiecewiseSystem) -> SlidingField:
    cache = sys.__dict__.setdefault("_poly_cache", {})
    if "sliding" in cache:
        return cache["sliding"]
    a, b = sys.xph, sys.xmh
    spatial = tuple(b * xp - a * xm for xp, xm in zip(sys.x_plus, sys.x_minus))
    sf = SlidingField(sys, spatial)
    cache["sliding"] = sf
    return sf


def filippov_field(sys: PiecewiseSystem, p, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Normalized Filippov field (X-h X+ - X+h X-) / (X-h - X+h) at p."""
    a, b = sys.xph(p), sys.xmh(p)
    den = b - a
    if abs(den) <= tol.zero_eps:
        raise SlidingBoundaryError(f"X-h - X+h = {den:.3e} at {list(p)}: boundary of the sliding region")
    return (b * sys.eval_field("+", p) - a * sys.eval_field("-", p)) / den


def sliding_region_at(sf: SlidingField, u, tol: ToleranceConfig = DEFAULT_TOL) -> RegionTag:
    p = sf.lift(u)
    return region_from_values(sf.parent.xph(p), sf.parent.xmh(p), tol.zero_eps)


def pseudo_equilibria(
    sf: SlidingField,
    search_box=((-1.0, 1.0), (-1.0, 1.0)),
    grid_n: int = 21,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> list[np.ndarray]:
    """Zeros of the planar sliding field in a box, Newton-refined from a grid."""
    (a0, a1), (b0, b1) = search_box
    g1, g2 = np.meshgrid(np.linspace(a0, a1, grid_n), np.linspace(b0, b1, grid_n), indexing="ij")
    U = np.column_stack([g1.ravel(), g2.ravel()])
    for _ in range(tol.newton_max_iter + 20):
        F = sf.planar_many(U)
        J = sf.jacobian_many(U)
        step = np.einsum("nij,nj->ni", np.linalg.pinv(J), F)
        U = U - step
        if not np.all(np.isfinite(U)):
            U = np.where(np.isfinite(U), U, 1e6)
        U = np.clip(U, -1e6, 1e6)
        if np.max(np.abs(step)) < tol.newton_tol * 1e-3:
            break
    F = sf.planar_many(U)
    res = np.max(np.abs(F), axis=1)
    slack = 1e-9
    inside = (
        (U[:, 0] >= a0 - slack) & (U[:, 0] <= a1 + slack) & (U[:, 1] >= b0 - slack) & (U[:, 1] <= b1 + slack)
    )
    good = U[(res <= tol.newton_tol) & inside]
    radius = max(10 * tol.newton_tol, 10 * np.sqrt(tol.newton_tol))
    out: list[np.ndarray] = []
    for u in good[np.lexsort((good[:, 1], good[:, 0]))] if len(good) else []:
        if all(np.linalg.norm(u - v) > radius for v in out):
            out.append(u.copy())
    # snap roundoff-level coordinates to zero for readable reports
    return [np.where(np.abs(u) < 1e-14, 0.0, u) for u in out]


@dataclass
class EquilibriumReport:
    point: np.ndarray
    sigma: float
    delta: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    kind: str
    lyapunov_1: float | None = None
    delta_1: float | None = None
    kernel_direction: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def hyperbolic(self) -> bool:
        return self.kind.startswith("hyperbolic")

    def to_dict(self) -> dict:
        return {
            "point": [float(x) for x in self.point],
            "sigma": self.sigma,
            "delta": self.delta,
            "eigenvalues": [[float(np.real(l)), float(np.imag(l))] for l in self.eigenvalues],
            "kind": self.kind,
            "lyapunov_1": self.lyapunov_1,
            "delta_1": self.delta_1,
            "notes": list(self.notes),
        }


def _normalize_columns(V: np.ndarray) -> np.ndarray:
    V = np.array(V, dtype=float)
    for j in range(V.shape[1]):
        v = V[:, j] / np.linalg.norm(V[:, j])
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        V[:, j] = v
    return V


def graph_second_derivative(F1: tuple, F2: tuple) -> float:
    """g''(0) for g(z1) = G1(z1, chi(z1)) with G2(z1, chi(z1)) = 0.

    F1, F2 are (d1, d2, d11, d12, d22) partials of the two components at 0.
    """
    a1, a2, a11, a12, a22 = F1
    b1, b2, b11, b12, b22 = F2
    c1 = -b1 / b2
    c2 = -(b11 + 2 * b12 * c1 + b22 * c1 * c1) / b2
    return a11 + 2 * a12 * c1 + a22 * c1 * c1 + a2 * c2


def _frame_tensors(sf: SlidingField, u, P: np.ndarray):
    """First, second and third derivative tensors of P^{-1} F(u + P z) at z=0."""
    Pi = np.linalg.inv(P)
    D1 = np.einsum("km,ma,ai->ki", Pi, sf.derivative_tensor(u, 1), P)
    D2 = np.einsum("km,mab,ai,bj->kij", Pi, sf.derivative_tensor(u, 2), P, P)
    D3 = np.einsum("km,mabc,ai,bj,cl->kijl", Pi, sf.derivative_tensor(u, 3), P, P, P)
    return D1, D2, D3


def _partials_tuple(D1, D2, k: int) -> tuple:
    return (D1[k, 0], D1[k, 1], D2[k, 0, 0], D2[k, 0, 1], D2[k, 1, 1])


def delta_one(sf: SlidingField, u, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[float, np.ndarray]:
    """Quadratic defect along the kernel direction at a one-zero-eigenvalue point."""
    J = sf.jacobian(u)
    w, V = np.linalg.eig(J)
    order = np.argsort(np.abs(w))
    w, V = w[order], np.real(V[:, order])
    P = _normalize_columns(V)
    D1, D2, _ = _frame_tensors(sf, u, P)
    g2 = graph_second_derivative(_partials_tuple(D1, D2, 0), _partials_tuple(D1, D2, 1))
    return float(g2), P


def first_lyapunov(sf: SlidingField, u, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """First Lyapunov coefficient at a planar equilibrium with trace 0, det > 0."""
    J = sf.jacobian(u)
    sigma, delta = float(np.trace(J)), float(np.linalg.det(J))
    if abs(sigma) > max(tol.zero_eps, 1e-7) or delta <= tol.zero_eps:
        raise ValueError(f"first Lyapunov coefficient needs trace 0 and det > 0 (trace={sigma:.3e}, det={delta:.3e})")
    omega = np.sqrt(delta - sigma * sigma / 4)
    w, V = np.linalg.eig(J)
    k = int(np.argmax(np.imag(w)))
    p, q = np.real(V[:, k]), np.imag(V[:, k])
    T = np.column_stack([q, p])
    d = np.linalg.det(T)
    if d < 0:
        T = np.column_stack([-q, p])
        d = -d
    T = T / np.sqrt(d)
    _, D2, D3 = _frame_tensors(sf, u, T)
    f, g = 0, 1
    a = (D3[f, 0, 0, 0] + D3[f, 0, 1, 1] + D3[g, 0, 0, 1] + D3[g, 1, 1, 1]) / 16.0
    a += (
        D2[f, 0, 1] * (D2[f, 0, 0] + D2[f, 1, 1])
        - D2[g, 0, 1] * (D2[g, 0, 0] + D2[g, 1, 1])
        - D2[f, 0, 0] * D2[g, 0, 0]
        + D2[f, 1, 1] * D2[g, 1, 1]
    ) / (16.0 * omega)
    return float(a)


def classify_equilibrium(sf: SlidingField, u, tol: ToleranceConfig = DEFAULT_TOL) -> EquilibriumReport:
    u = np.asarray(u, dtype=float)
    notes = []
    res = float(np.max(np.abs(sf.planar_value(u))))
    if res > max(tol.newton_tol, 1e-10):
        notes.append(f"residual |X^s| = {res:.3e} exceeds newton_tol")
    J = sf.jacobian(u)
    sigma, delta = float(np.trace(J)), float(np.linalg.det(J))
    w, V = np.linalg.eig(J)
    order = np.argsort(np.abs(w), kind="stable")
    w, V = w[order], V[:, order]
    eps = tol.zero_eps
    rep = EquilibriumReport(u, sigma, delta, w, V, "degenerate", notes=notes)
    small = np.abs(w) <= eps
    if small.all():
        rep.notes.append("both eigenvalues vanish")
    elif small[0]:
        d1, P = delta_one(sf, u, tol)
        rep.delta_1 = d1
        rep.kernel_direction = P[:, 0]
        if abs(d1) > eps:
            rep.kind = "saddle_node"
        else:
            rep.notes.append("quadratic defect along the kernel vanishes")
    elif delta < 0:
        rep.kind = "hyperbolic_saddle"
    elif abs(sigma) <= eps:
        l1 = first_lyapunov(sf, u, tol)
        rep.lyapunov_1 = l1
        if abs(l1) > eps:
            rep.kind = "hopf"
        else:
            rep.notes.append("first Lyapunov coefficient vanishes (linear centre)")
    elif sigma * sigma - 4 * delta >= 0:
        rep.kind = "hyperbolic_node"
    else:
        rep.kind = "hyperbolic_focus"
    return rep


def return_displacement(
    sf: SlidingField,
    center,
    r: float,
    direction=(1.0, 0.0),
    t_max: float = 200.0,
    rtol: float = 1e-12,
) -> float | None:
    """rho(r) - r for the planar return map on a ray from ``center``.

    The polar angle around ``center`` is integrated alongside the flow and the
    return is the first time it has wound by 2*pi.  None if no return.
    """
    c = np.asarray(center, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    u0 = c + r * d
    F0 = sf.planar_value(u0)
    turn = np.sign(d[0] * F0[1] - d[1] * F0[0])
    if turn == 0:
        return None

    def rhs(_t, y):
        F = sf.planar_value(y[:2])
        e = y[:2] - c
        return [F[0], F[1], (e[0] * F[1] - e[1] * F[0]) / (e @ e)]

    def wound(_t, y):
        return y[2] - 2 * np.pi * turn

    wound.terminal = True
    sol = solve_ivp(rhs, (0.0, t_max), [u0[0], u0[1], 0.0], method="DOP853", events=wound, rtol=rtol, atol=1e-14)
    if not sol.t_events[0].size:
        return None
    y = sol.y_events[0][0]
    return float((y[:2] - c) @ d) - r
