"""Submersion functionals eta for the codimension-one classes and unfolding sweeps."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .catalog import get_descriptor
from .classify import Classification, classify_psvf
from .core import DEFAULT_TOL, PiecewiseSystem, ToleranceConfig, lie_derivative, project_to_surface
from .lie import lie_tower
from .sliding import graph_second_derivative, pseudo_equilibria, sliding_field

__all__ = [
    "UnfoldingRecord",
    "ConvergenceError",
    "eta_lips_beak",
    "eta_swallowtail",
    "eta_boundary_equilibrium",
    "eta_saddle_node",
    "eta_hopf",
    "unfold_sweep",
    "locate_organizing_point",
    "fitted_slope",
    "sweep_to_csv",
    "ETA_FUNCTIONS",
]


class ConvergenceError(RuntimeError):
    """Newton's method did not converge on the class's defining equations."""


def _newton(F, J, x0, tol: ToleranceConfig, scale_tol: float | None = None):
    """Gauss-Newton with least-squares steps (minimum-norm when underdetermined)."""
    x = np.asarray(x0, dtype=float).copy()
    target = scale_tol or tol.newton_tol
    for _ in range(tol.newton_max_iter):
        r = np.asarray(F(x), dtype=float)
        if np.max(np.abs(r)) <= target:
            return x
        step = np.linalg.lstsq(np.asarray(J(x), dtype=float), r, rcond=None)[0]
        x = x - step
        if not np.all(np.isfinite(x)):
            break
        if np.max(np.abs(step)) <= 1e-16 * max(1.0, np.max(np.abs(x))):
            r = np.asarray(F(x), dtype=float)
            if np.max(np.abs(r)) <= max(target, 1e-11):
                return x
            break
    r = np.asarray(F(x), dtype=float)
    if np.all(np.isfinite(r)) and np.max(np.abs(r)) <= max(target, 1e-11):
        return x
    raise ConvergenceError(f"Newton did not converge (residual {np.max(np.abs(r)) if np.all(np.isfinite(r)) else np.inf:.3e})")


def _polys_system(polys):
    grads = [[q.deriv(j) for j in range(3)] for q in polys]

    def F(x):
        return [q(x) for q in polys]

    def J(x):
        return [[g(x) for g in row] for row in grads]

    return F, J


def _tangency_point(sys, side, seed, tol, n_conditions):
    X = sys.x_plus if side > 0 else sys.x_minus
    polys = [sys.h]
    f = sys.h
    for _ in range(n_conditions - 1):
        f = lie_derivative(X, f)
        polys.append(f)
    F, J = _polys_system(polys)
    return _newton(F, J, seed, tol), X


def eta_lips_beak(sys: PiecewiseSystem, seed=(0.0, 0.0, 0.0), tol: ToleranceConfig = DEFAULT_TOL, side: int = 1):
    """Solve h = Xh = X^2h = 0 from seed; eta = det[dh; d(Xh); d(X^2h)] there."""
    p, X = _tangency_point(sys, side, seed, tol, 3)
    t = lie_tower(X, sys.h, p, depth=2)
    return p, float(t.det_frame)


def eta_swallowtail(sys: PiecewiseSystem, seed=(0.0, 0.0, 0.0), tol: ToleranceConfig = DEFAULT_TOL, side: int = 1):
    """Solve h = Xh = X^2h = 0 from seed; eta = X^3h there."""
    p, X = _tangency_point(sys, side, seed, tol, 3)
    return p, float(lie_tower(X, sys.h, p, depth=3).values[2])


def eta_boundary_equilibrium(sys: PiecewiseSystem, tol: ToleranceConfig = DEFAULT_TOL, seed=(0.0, 0.0, 0.0)):
    """Equilibrium p of X+ near seed; eta = h(p), the signed height above M."""
    F, J = _polys_system(list(sys.x_plus))
    try:
        p = _newton(F, J, seed, tol)
    except ConvergenceError as exc:
        raise ConvergenceError(f"no equilibrium of X+ found near {list(seed)}: {exc}") from exc
    return p, float(sys.h(p))


def _sliding_frame(sf, u):
    J = sf.jacobian(u)
    w, V = np.linalg.eig(J)
    if np.any(np.abs(np.imag(w)) > 0):
        raise ConvergenceError("sliding Jacobian has complex eigenvalues; no saddle-node frame")
    order = np.argsort(np.abs(np.real(w)))
    V = np.real(V[:, order])
    for j in range(2):
        V[:, j] /= np.linalg.norm(V[:, j])
        if V[np.argmax(np.abs(V[:, j])), j] < 0:
            V[:, j] = -V[:, j]
    return V


def eta_saddle_node(sys: PiecewiseSystem, seed=(0.0, 0.0), tol: ToleranceConfig = DEFAULT_TOL, frame=None):
    """Graph reduction along the nonzero eigendirection, then the critical value of g.

    In the eigenframe z (kernel direction first) with G = P^{-1} X^s(u0 + P z):
    (a) solve G2(z1, chi(z1)) = 0, (b) g(z1) = G1(z1, chi(z1)),
    (c) Newton on g'(z1) = 0; eta = g at the critical point.
    Returns (organizing chart point, eta).
    """
    sf = sliding_field(sys)
    u0 = np.asarray(seed, dtype=float)[:2]
    P = _sliding_frame(sf, u0) if frame is None else np.asarray(frame, dtype=float)
    Pi = np.linalg.inv(P)

    def G(z):
        return Pi @ sf.planar_value(u0 + P @ z)

    def DG(z):
        return np.einsum("km,ma,ai->ki", Pi, sf.derivative_tensor(u0 + P @ z, 1), P)

    def D2G(z):
        return np.einsum("km,mab,ai,bj->kij", Pi, sf.derivative_tensor(u0 + P @ z, 2), P, P)

    def chi(z1, z2):
        for _ in range(tol.newton_max_iter):
            z = np.array([z1, z2])
            r = G(z)[1]
            if abs(r) <= tol.newton_tol:
                return z2
            d = DG(z)[1, 1]
            if d == 0:
                break
            z2 -= r / d
        if abs(G(np.array([z1, z2]))[1]) <= 1e-11:
            return z2
        raise ConvergenceError("graph solve for the nonzero-eigenvalue component failed")

    z1, z2 = 0.0, 0.0
    for _ in range(tol.newton_max_iter):
        z2 = chi(z1, z2)
        z = np.array([z1, z2])
        D1, D2 = DG(z), D2G(z)
        c1 = -D1[1, 0] / D1[1, 1]
        gp = D1[0, 0] + D1[0, 1] * c1
        if abs(gp) <= tol.newton_tol:
            break
        gpp = graph_second_derivative(
            (D1[0, 0], D1[0, 1], D2[0, 0, 0], D2[0, 0, 1], D2[0, 1, 1]),
            (D1[1, 0], D1[1, 1], D2[1, 0, 0], D2[1, 0, 1], D2[1, 1, 1]),
        )
        if gpp == 0:
            raise ConvergenceError("g'' vanishes: the critical point of g is not isolated")
        z1 -= gp / gpp
    else:
        raise ConvergenceError("critical-point solve for g failed")
    z2 = chi(z1, z2)
    z = np.array([z1, z2])
    return u0 + P @ z, float(G(z)[0])


def eta_hopf(sys: PiecewiseSystem, tol: ToleranceConfig = DEFAULT_TOL, seed=(0.0, 0.0)):
    """Trace of DX^s at the Newton-refined sliding equilibrium near seed."""
    sf = sliding_field(sys)
    u = _newton(sf.planar_value, sf.jacobian, np.asarray(seed, dtype=float)[:2], tol)
    return u, float(np.trace(sf.jacobian(u)))


def _eta_dispatch(kind: str, sys: PiecewiseSystem, seed, tol):
    """Uniform (3D organizing point, eta) interface."""
    if kind == "lips_beak":
        return eta_lips_beak(sys, seed, tol)
    if kind == "swallowtail":
        return eta_swallowtail(sys, seed, tol)
    if kind == "boundary_equilibrium":
        return eta_boundary_equilibrium(sys, tol, seed)
    sf = sliding_field(sys)
    if kind == "saddle_node":
        u, eta = eta_saddle_node(sys, seed[:2], tol)
    elif kind == "hopf":
        u, eta = eta_hopf(sys, tol, seed[:2])
    else:
        raise ValueError(f"no eta functional for {kind!r}")
    return sf.lift(u), eta


ETA_FUNCTIONS = ("lips_beak", "swallowtail", "boundary_equilibrium", "saddle_node", "hopf")


@dataclass
class UnfoldingRecord:
    lam: float
    organizing_point: np.ndarray
    eta: float
    verdict: Classification | None
    converged: bool
    message: str = ""

    @property
    def verdict_name(self) -> str:
        return self.verdict.verdict if self.verdict is not None else "unclassified"


def _classification_point(sys, kind, p, tol):
    if kind == "boundary_equilibrium":
        q = np.array(p, dtype=float)
        return project_to_surface(sys, q, tol)
    return np.asarray(p, dtype=float)


def unfold_sweep(family_name: str, lambda_grid, tol: ToleranceConfig = DEFAULT_TOL, params: dict | None = None) -> list[UnfoldingRecord]:
    desc = get_descriptor(family_name)
    if desc.unfold_param is None or desc.eta_kind is None:
        raise ValueError(f"family {family_name!r} has no unfolding parameter with an eta functional")
    params = dict(params or {})
    records: list[UnfoldingRecord] = []
    seed = np.zeros(3)
    for lam in lambda_grid:
        lam = float(lam)
        sys = desc.build(**{**params, desc.unfold_param: lam})
        try:
            p, eta = _eta_dispatch(desc.eta_kind, sys, seed, tol)
            converged = True
            seed = np.asarray(p, dtype=float)
            msg = ""
        except (ConvergenceError, np.linalg.LinAlgError, ValueError) as exc:
            p, eta, converged, msg = seed.copy(), float("nan"), False, str(exc)
        try:
            verdict = classify_psvf(sys, _classification_point(sys, desc.eta_kind, p, tol), tol)
        except Exception as exc:  # recorded per row, the sweep carries on
            verdict, msg = None, (msg + "; " if msg else "") + f"classification failed: {exc}"
        records.append(UnfoldingRecord(lam, np.asarray(p, dtype=float), eta, verdict, converged, msg))
    return records


def fitted_slope(records: list[UnfoldingRecord]) -> float | None:
    pts = [(r.lam, r.eta) for r in records if r.converged and np.isfinite(r.eta)]
    if len(pts) < 2:
        return None
    lam, eta = np.array(pts).T
    return float(np.polyfit(lam, eta, 1)[0])


def sweep_to_csv(records: list[UnfoldingRecord], fh=None) -> str:
    buf = fh or io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "x1", "x2", "x3", "eta", "verdict", "converged"])
    for r in records:
        x = r.organizing_point
        w.writerow([f"{r.lam:.17g}", f"{x[0]:.17g}", f"{x[1]:.17g}", f"{x[2]:.17g}", f"{r.eta:.17g}", r.verdict_name, str(r.converged).lower()])
    return buf.getvalue() if fh is None else ""


# ------------------------------------------------ organizing-point location
def locate_organizing_point(sys: PiecewiseSystem, locator: str, seed=(0.0, 0.0, 0.0), tol: ToleranceConfig = DEFAULT_TOL, radius: float = 0.1):
    """Point of M near seed where the class's defining equations hold.

    Used after perturbing a catalog system: the singular point moves, and the
    verdict is taken at its new location.  Returns None if nothing is found,
    in which case callers classify at the projected seed.
    """
    seed = np.asarray(seed, dtype=float)
    try:
        if locator == "fold":
            side = 1 if abs(sys.xph(seed)) <= abs(sys.xmh(seed)) else -1
            p, _ = _tangency_point(sys, side, seed, tol, 2)
        elif locator == "tangency":
            side = 1 if abs(sys.xph(seed)) <= abs(sys.xmh(seed)) else -1
            p, _ = _tangency_point(sys, side, seed, tol, 3)
        elif locator == "two_fold":
            F, J = _polys_system([sys.h, sys.xph, sys.xmh])
            p = _newton(F, J, seed, tol)
        elif locator == "boundary_equilibrium":
            p, _ = eta_boundary_equilibrium(sys, tol, seed)
            p = project_to_surface(sys, p, tol)
        elif locator == "sliding_equilibrium":
            sf = sliding_field(sys)
            box = ((seed[0] - radius, seed[0] + radius), (seed[1] - radius, seed[1] + radius))
            eqs = pseudo_equilibria(sf, box, grid_n=11, tol=tol)
            if not eqs:
                return None
            u = min(eqs, key=lambda e: np.linalg.norm(e - seed[:2]))
            p = sf.lift(u)
        else:
            return project_to_surface(sys, seed, tol)
    except (ConvergenceError, np.linalg.LinAlgError):
        return None
    if np.linalg.norm(p - seed) > radius:
        return None
    return p
