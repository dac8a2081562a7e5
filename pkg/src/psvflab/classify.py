"""Codimension-zero / codimension-one classification of a point of a PSVF."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_TOL,
    NotOnSurfaceError,
    PiecewiseSystem,
    RegionTag,
    ToleranceConfig,
    lift_chart,
    region_from_values,
)
from .lie import LieTower, frame_rank, lie_tower, restricted_hessian_signature
from .flow import NoReturnError
from .sliding import (
    EquilibriumReport,
    classify_equilibrium,
    pseudo_equilibria,
    return_displacement,
    sliding_field,
)
from .twofold import involution, return_linearization

__all__ = [
    "TangencyClass",
    "ConditionReport",
    "Classification",
    "SingularPointError",
    "classify_tangency",
    "classify_two_fold",
    "check_H",
    "check_P",
    "check_E",
    "check_HS",
    "classify_psvf",
    "VERDICTS",
    "TANGENCY_VERDICT",
]

VERDICTS = (
    "Xi0_1", "Xi0_2", "Xi0_3", "Xi0_4",
    "Xi1_1", "Xi1_2", "Xi1_3", "Xi1_4", "Xi1_5", "Xi1_6",
    "Xi1_6_candidate", "Omega_T", "degenerate",
)
TANGENCY_VERDICT = {
    "fold": "Xi0_2",
    "cusp": "Xi0_3",
    "lips": "Xi1_1",
    "beak_to_beak": "Xi1_2",
    "swallowtail": "Xi1_3",
}
# certificates obtained by finite differences of numerically integrated maps
FD_EPS = 1e-6


class SingularPointError(ValueError):
    """The field vanishes at the point: use the boundary-equilibrium path."""


@dataclass
class TangencyClass:
    kind: str
    certificates: dict
    tower: LieTower | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "certificates": _jsonable(self.certificates)}


@dataclass
class ConditionReport:
    name: str
    passed: bool
    flags: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    subtype: str | None = None
    heuristic: bool = False
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "passed": bool(self.passed),
            "flags": {k: bool(v) for k, v in self.flags.items()},
            "certificates": _jsonable(self.certificates),
            "notes": list(self.notes),
        }
        if self.subtype is not None:
            d["subtype"] = self.subtype
        if self.heuristic:
            d["label"] = "HEURISTIC"
        return d


@dataclass
class Classification:
    verdict: str
    point: np.ndarray
    region: str | None = None
    reason: str = ""
    tangency: dict = field(default_factory=dict)
    two_fold: str | None = None
    boundary_equilibrium: ConditionReport | None = None
    equilibrium: EquilibriumReport | None = None
    conditions: dict = field(default_factory=dict)
    pseudo_equilibria: list = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def codimension(self) -> int | None:
        if self.verdict.startswith("Xi0"):
            return 0
        if self.verdict.startswith("Xi1"):
            return 1
        return None

    @property
    def is_degenerate(self) -> bool:
        return self.verdict == "degenerate"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "point": [float(x) for x in self.point],
            "region": self.region,
            "reason": self.reason,
            "degenerate": self.is_degenerate,
            "tangency": {k: v.to_dict() for k, v in self.tangency.items()},
            "two_fold": self.two_fold,
            "boundary_equilibrium": None if self.boundary_equilibrium is None else self.boundary_equilibrium.to_dict(),
            "equilibrium": None if self.equilibrium is None else self.equilibrium.to_dict(),
            "conditions": {k: v.to_dict() for k, v in self.conditions.items()},
            "pseudo_equilibria": _jsonable(self.pseudo_equilibria),
            "notes": list(self.notes),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(np.real(obj)), float(np.imag(obj))]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


# ------------------------------------------------------------------ tangency
def classify_tangency(X, h, p, tol: ToleranceConfig = DEFAULT_TOL) -> TangencyClass:
    p = np.asarray(p, dtype=float)
    xv = np.array([c(p) for c in X])
    if np.linalg.norm(xv) <= tol.zero_eps:
        raise SingularPointError(f"X vanishes at {p.tolist()}")
    eps = tol.zero_eps
    t1 = lie_tower(X, h, p, depth=1)
    if abs(t1.values[0]) > eps:
        return TangencyClass("m_regular", {"Xh": t1.values[0]}, t1)
    t = lie_tower(X, h, p, depth=4)
    v1, v2, v3, v4 = t.values
    rank = frame_rank(t, tol)
    hs = restricted_hessian_signature(t, tol)
    tg = float(np.linalg.norm(t.tangential_gradient))
    cert = {
        "Xh": v1, "X2h": v2, "X3h": v3, "X4h": v4,
        "frame_rank": rank, "det_frame": t.det_frame,
        "hessian_det": hs["det"], "hessian_signature": hs["signature"],
        "tangential_gradient_norm": tg,
    }
    if abs(v2) > eps:
        kind = "fold"
    elif abs(v3) > eps:
        if rank == 3:
            kind = "cusp"
        elif rank == 2 and tg <= eps and hs["det"] > eps:
            kind = "lips"
        elif rank == 2 and tg <= eps and hs["det"] < -eps:
            kind = "beak_to_beak"
        else:
            kind = "degenerate"
    elif abs(v4) > eps and tg > eps:
        kind = "swallowtail"
    else:
        kind = "degenerate"
    return TangencyClass(kind, cert, t)


def _second_lie(X, h, p) -> float:
    return lie_tower(X, h, p, depth=2).values[1]


def classify_two_fold(sys: PiecewiseSystem, p, tol: ToleranceConfig = DEFAULT_TOL) -> str:
    tp = classify_tangency(sys.x_plus, sys.h, p, tol)
    tm = classify_tangency(sys.x_minus, sys.h, p, tol)
    if tp.kind != "fold" or tm.kind != "fold":
        raise ValueError(f"not a two-fold: X+ is {tp.kind}, X- is {tm.kind}")
    a2, b2 = tp.certificates["X2h"], tm.certificates["X2h"]
    if a2 > 0 and b2 < 0:
        return "hyperbolic"
    if a2 < 0 and b2 > 0:
        return "elliptic"
    return "parabolic"


# ------------------------------------------------------------- condition H
def _eig_sorted(J):
    w, V = np.linalg.eig(J)
    order = np.lexsort((np.imag(w), np.real(w)))
    return w[order], V[:, order]


def _pairwise_distinct(w, eps) -> tuple[bool, float]:
    gaps = [abs(w[i] - w[j]) for i in range(len(w)) for j in range(i + 1, len(w))]
    m = float(min(gaps)) if gaps else np.inf
    return m > eps, m


def check_H(sys: PiecewiseSystem, tol: ToleranceConfig = DEFAULT_TOL, p=(0.0, 0.0, 0.0)) -> ConditionReport:
    p = np.asarray(p, dtype=float)
    eps = tol.zero_eps
    xp, xm = sys.eval_field("+", p), sys.eval_field("-", p)
    if np.linalg.norm(xp) > eps or np.linalg.norm(xm) <= eps:
        raise ValueError("condition (H) needs X+(p) = 0 and X-(p) != 0")
    g = sys.grad_h_at(p)
    gn = g / np.linalg.norm(g)
    DXp = np.array([[c.deriv(j)(p) for j in range(3)] for c in sys.x_plus])
    wp, Vp = _eig_sorted(DXp)
    sf = sliding_field(sys)
    cert: dict = {"X-h": sys.xmh(p), "eig_DX+": wp}
    flags: dict = {}
    notes: list[str] = []
    flags["a_transversal_X-"] = abs(sys.xmh(p)) > eps

    if sf.planar is not None:
        Js = sf.jacobian(p[:2])
        ws, Vs = _eig_sorted(Js)
    else:
        Js, ws, Vs = None, np.array([]), None
        notes.append("planar sliding field unavailable for this switching surface")
    cert["DX^s"] = Js
    cert["eig_DX^s"] = ws
    hyp_p = bool(np.all(np.abs(np.real(wp)) > eps))
    hyp_s = bool(ws.size == 2 and np.all(np.abs(np.real(ws)) > eps))
    flags["b_hyperbolic_X+"] = hyp_p
    flags["b_hyperbolic_X^s"] = hyp_s
    dp, gp = _pairwise_distinct(wp, eps)
    ds, gs = _pairwise_distinct(ws, eps) if ws.size == 2 else (False, 0.0)
    flags["c_simple_X+"] = dp
    flags["c_simple_X^s"] = ds
    cert["min_eigen_gap_X+"] = gp
    cert["min_eigen_gap_X^s"] = gs

    # (d) eigen-directions of DX+ transversal to M
    trans = []
    done = set()
    for k in range(3):
        if k in done:
            continue
        if abs(np.imag(wp[k])) <= eps:
            v = np.real(Vp[:, k])
            trans.append(abs(v @ gn) / np.linalg.norm(v))
            done.add(k)
        else:
            mate = next(j for j in range(3) if j != k and j not in done and abs(wp[j] - np.conj(wp[k])) <= 1e-8 * max(1, abs(wp[k])))
            re, im = np.real(Vp[:, k]), np.imag(Vp[:, k])
            n = np.cross(re, im)
            trans.append(float(np.linalg.norm(np.cross(n / np.linalg.norm(n), gn))))
            done.update({k, mate})
    cert["eigen_transversality"] = trans
    flags["d_eigen_transversal"] = bool(min(trans) > eps)

    # subtype (node / saddle / focus) from DX+
    real = np.abs(np.imag(wp)) <= eps
    subtype = "fails_H"
    if real.all():
        signs = np.sign(np.real(wp))
        subtype = "node" if abs(signs.sum()) == 3 else "saddle"
        flags["distinct_real_parts"] = dp
    else:
        c = np.real(wp[real][0]) if real.any() else np.nan
        a = np.real(wp[~real][0])
        b = np.imag(wp[~real][0])
        cert["focus_abc"] = [a, abs(b), c]
        ok = abs(a) > eps and abs(b) > eps and abs(c) > eps and abs(a - c) > eps
        flags["distinct_real_parts"] = ok
        subtype = "focus"
    if not flags.get("distinct_real_parts", True):
        notes.append("non-conjugate eigenvalues of DX+ share a real part")
    if Vs is not None and ws.size == 2 and np.all(np.abs(np.imag(ws)) <= eps):
        notes.append("DX^s has real eigenvalues")
    passed = all(flags.values())
    return ConditionReport("H", passed, flags, cert, subtype if passed else "fails_H", notes=notes)


# ------------------------------------------------------- two-fold conditions
def _chart_gradient(fun, u, step=1e-6) -> np.ndarray:
    g = np.zeros(2)
    for j in range(2):
        e = np.zeros(2)
        e[j] = step
        g[j] = (fun(u + e) - fun(u - e)) / (2 * step)
    return g


def _involution_jacobian(X, h, u, side, tol, step=1e-5) -> np.ndarray:
    D = np.zeros((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = step
        D[:, j] = (involution(X, h, u + e, side, tol) - involution(X, h, u - e, side, tol)) / (2 * step)
    return D


def _sin_angle(v, w) -> float:
    return float((v[0] * w[1] - v[1] * w[0]) / (np.linalg.norm(v) * np.linalg.norm(w)))


def check_P(sys: PiecewiseSystem, tol: ToleranceConfig = DEFAULT_TOL, p=(0.0, 0.0, 0.0), radii=(0.02, 0.05, 0.1), n_angles: int = 72) -> ConditionReport:
    p = np.asarray(p, dtype=float)
    kind = classify_two_fold(sys, p, tol)
    if kind != "parabolic":
        raise ValueError(f"condition (P) applies to parabolic two-folds, got {kind}")
    h = sys.h
    u0 = p[:2]

    def xmh_chart(u):
        return sys.xmh(lift_chart(h, u, tol))

    gm = _chart_gradient(xmh_chart, u0)
    t_minus = np.array([-gm[1], gm[0]])
    t_minus /= np.linalg.norm(t_minus)
    try:
        Dg = _involution_jacobian(sys.x_plus, h, u0, +1, tol)
    except NoReturnError as exc:
        raise ValueError(f"involution of X+ undefined near the two-fold: {exc}") from exc
    v = Dg @ t_minus
    sin_a = _sin_angle(v, t_minus)
    flags = {"a_gamma_S-_transversal_S-": abs(sin_a) > FD_EPS}
    cert: dict = {"tangent_S-": t_minus, "D_gamma+": Dg, "sin_angle_a": sin_a}

    sf = sliding_field(sys)
    Js = sf.jacobian(u0)
    det_c = _sin_angle(v, Js @ v) if np.linalg.norm(Js @ v) > 0 else 0.0
    cert["sin_angle_c"] = det_c
    flags["c_gamma_S-_transversal_X^s"] = abs(det_c) > FD_EPS

    # (b): sign of det[X^s(q), gamma* X^s(q)] on sampled arcs of M^s ∩ gamma(M^e)
    eps = tol.zero_eps
    runs_ok, n_samples, min_abs = True, 0, np.inf
    for r in radii:
        run_sign = None
        for th in np.linspace(0, 2 * np.pi, n_angles, endpoint=False):
            q = u0 + r * np.array([np.cos(th), np.sin(th)])
            rq = _chart_region(sys, q, tol)
            if rq != RegionTag.STABLE_SLIDING:
                run_sign = None
                continue
            try:
                gq = involution(sys.x_plus, h, q, +1, tol)
            except NoReturnError:
                run_sign = None
                continue
            if _chart_region(sys, gq, tol) != RegionTag.UNSTABLE_SLIDING:
                run_sign = None
                continue
            Dg_q = _involution_jacobian(sys.x_plus, h, gq, +1, tol)
            push = Dg_q @ sf.planar_value(gq)
            s = _sin_angle(sf.planar_value(q), push)
            n_samples += 1
            min_abs = min(min_abs, abs(s))
            if abs(s) <= eps or (run_sign is not None and np.sign(s) != run_sign):
                runs_ok = False
            run_sign = np.sign(s)
    cert["b_samples"] = n_samples
    cert["b_min_abs_sin"] = None if n_samples == 0 else min_abs
    flags["b_X^s_transversal_pushforward"] = runs_ok
    notes = []
    if n_samples == 0:
        notes.append("M^s ∩ gamma(M^e) has no sampled points: (b) holds vacuously")
    return ConditionReport("P", all(flags.values()), flags, cert, notes=notes)


def _chart_region(sys, u, tol) -> RegionTag:
    q = lift_chart(sys.h, u, tol)
    return region_from_values(sys.xph(q), sys.xmh(q), tol.zero_eps)


def check_E(sys: PiecewiseSystem, tol: ToleranceConfig = DEFAULT_TOL, p=(0.0, 0.0, 0.0), radii=(1e-3, 1e-2)) -> ConditionReport:
    p = np.asarray(p, dtype=float)
    kind = classify_two_fold(sys, p, tol)
    if kind != "elliptic":
        raise ValueError(f"condition (E) applies to elliptic two-folds, got {kind}")
    data = return_linearization(sys, tol, point=p[:2])
    cert: dict = {"L": data.L, "trace": data.trace, "det": data.det, "type": data.type}
    flags = {"saddle": data.type == "saddle"}
    per_radius = {}
    if data.type == "saddle":
        for r in radii:
            ok = True
            for k in range(2):
                v = data.invariant_directions[:, k]
                v = v / np.linalg.norm(v)
                for s in (1, -1):
                    tag = _chart_region(sys, p[:2] + s * r * v, tol)
                    ok &= tag.is_crossing
            per_radius[str(r)] = ok
        flags["invariant_lines_in_M^c"] = all(per_radius.values())
    else:
        flags["invariant_lines_in_M^c"] = False
    cert["crossing_membership_by_radius"] = per_radius
    return ConditionReport("E", all(flags.values()), flags, cert)


def check_HS(sys: PiecewiseSystem, box=None, tol: ToleranceConfig = DEFAULT_TOL, p=(0.0, 0.0, 0.0), n_radii: int = 16) -> ConditionReport:
    """Heuristic check of (HS) on a desk-scale box around p."""
    p = np.asarray(p, dtype=float)
    sf = sliding_field(sys)
    u0 = p[:2]
    if box is None:
        box = ((u0[0] - 1, u0[0] + 1), (u0[1] - 1, u0[1] + 1))
    eqs = pseudo_equilibria(sf, box, tol=tol)
    cert: dict = {"equilibria": [e.tolist() for e in eqs]}
    unique = len(eqs) == 1 and np.linalg.norm(eqs[0] - u0) < 1e-6
    flags = {"a_unique_equilibrium": unique}
    notes = ["HEURISTIC: (b)-(d) are judged from a sampled return-map displacement on one ray"]
    reach = min(u0[0] - box[0][0], box[0][1] - u0[0], u0[1] - box[1][0], box[1][1] - u0[1])
    radii = np.linspace(reach / (n_radii + 1), reach * 0.9, n_radii)
    disp = []
    for r in radii:
        d = return_displacement(sf, u0, r)
        disp.append(d)
    cert["radii"] = radii
    cert["displacement"] = disp
    defined = [d is not None for d in disp]
    cycles, tangent_zero = [], False
    for i in range(len(radii) - 1):
        d0, d1 = disp[i], disp[i + 1]
        if d0 is None or d1 is None:
            continue
        if d0 * d1 < 0:
            cycles.append(float(radii[i] - d0 * (radii[i + 1] - radii[i]) / (d1 - d0)))
    for d in disp:
        if d is not None and abs(d) <= 1e-13:
            tangent_zero = True
    cert["periodic_orbit_radii"] = cycles
    flags["b_hyperbolic_cycles"] = not tangent_zero
    flags["c_limit_sets_recurrent"] = all(defined)
    flags["d_no_saddle_connections"] = unique or not any(
        classify_equilibrium(sf, e, tol).kind == "hyperbolic_saddle" for e in eqs
    )
    return ConditionReport("HS", all(flags.values()), flags, cert, heuristic=True, notes=notes)


# ------------------------------------------------------------- dispatcher
def _null_sliding(sys, u0, half_width, n=21) -> float:
    sf = sliding_field(sys)
    g = np.linspace(-half_width, half_width, n)
    worst = 0.0
    for a in g:
        for b in g:
            q = lift_chart(sys.h, (u0[0] + a, u0[1] + b))
            worst = max(worst, float(np.max(np.abs(sf.value(q)))))
    return worst


def _inventory(sys, u0, half_width, tol):
    sf = sliding_field(sys)
    box = ((u0[0] - half_width, u0[0] + half_width), (u0[1] - half_width, u0[1] + half_width))
    out = []
    for e in pseudo_equilibria(sf, box, tol=tol):
        rep = classify_equilibrium(sf, e, tol)
        region = _chart_region(sys, e, tol)
        out.append({"point": e.tolist(), "kind": rep.kind, "region": region.value})
    return out


def classify_psvf(sys: PiecewiseSystem, p=(0.0, 0.0, 0.0), tol: ToleranceConfig = DEFAULT_TOL, box: float = 1.0) -> Classification:
    """Verdict for point p of M; ``box`` is the half-width of the chart box searched for equilibria."""
    p = np.asarray(p, dtype=float)
    if abs(sys.h(p)) > tol.zero_eps:
        raise NotOnSurfaceError(f"point {p.tolist()} is not on M")
    eps = tol.zero_eps
    xp, xm = sys.eval_field("+", p), sys.eval_field("-", p)
    a, b = sys.xph(p), sys.xmh(p)
    region = region_from_values(a, b, eps)
    C = Classification("degenerate", p, region.value)
    zp, zm = np.linalg.norm(xp) <= eps, np.linalg.norm(xm) <= eps
    if zp and zm:
        C.reason = "both fields vanish at p"
        return C
    if zp or zm:
        work = sys if zp else sys.mirrored()
        if zm:
            C.notes.append("X- vanishes at p; analysed with the sides swapped")
        rep = check_H(work, tol, p)
        C.boundary_equilibrium = rep
        C.conditions["H"] = rep
        if rep.passed:
            C.verdict, C.reason = "Xi1_4", f"boundary equilibrium of {rep.subtype} type satisfying (H)"
        else:
            failed = [k for k, v in rep.flags.items() if not v]
            C.reason = "boundary equilibrium failing (H): " + ", ".join(failed)
        return C

    tp = classify_tangency(sys.x_plus, sys.h, p, tol)
    tm = classify_tangency(sys.x_minus, sys.h, p, tol)
    C.tangency = {"X_plus": tp, "X_minus": tm}
    tang_p, tang_m = tp.kind != "m_regular", tm.kind != "m_regular"

    if tang_p and tang_m:
        if tp.kind == "fold" and tm.kind == "fold":
            kind = classify_two_fold(sys, p, tol)
            C.two_fold = kind
            if kind == "hyperbolic":
                C.verdict, C.reason = "Xi0_4", "hyperbolic two-fold; (P) and (E) do not apply"
            elif kind == "parabolic":
                rep = check_P(sys, tol, p)
                C.conditions["P"] = rep
                C.verdict = "Xi0_4" if rep.passed else "degenerate"
                C.reason = "parabolic two-fold " + ("satisfying (P)" if rep.passed else "failing (P)")
            else:
                try:
                    rep = check_E(sys, tol, p)
                except ValueError as exc:
                    C.reason = f"elliptic two-fold, return map unavailable: {exc}"
                    return C
                C.conditions["E"] = rep
                C.verdict = "Xi0_4" if rep.passed else "degenerate"
                C.reason = "elliptic two-fold " + ("satisfying (E)" if rep.passed else "failing (E)")
            return C
        C.verdict = "Omega_T"
        C.reason = f"both sides tangent (X+: {tp.kind}, X-: {tm.kind}); not classified further"
        return C

    if tang_p or tang_m:
        t = tp if tang_p else tm
        side = "X+" if tang_p else "X-"
        if t.kind in TANGENCY_VERDICT:
            C.verdict = TANGENCY_VERDICT[t.kind]
            C.reason = f"{t.kind} singularity of {side}, other side transversal"
        else:
            C.reason = f"degenerate tangency of {side} ({_tangency_reason(t)})"
        return C

    # both transversal
    if region.is_crossing:
        C.verdict, C.reason = "Xi0_1", "regular-regular crossing point"
        return C
    sf = sliding_field(sys)
    worst = _null_sliding(sys, p[:2], box)
    if worst <= 1e-12:
        C.reason = "sliding field identically null on grid"
        C.notes.append(f"max |X^s| on a 21x21 grid = {worst:.3e}; infinite codimension")
        return C
    if sf.planar is None:
        C.reason = "sliding analysis needs a graph-form switching surface"
        return C
    C.pseudo_equilibria = _inventory(sys, p[:2], box, tol)
    val = sf.planar_value(p[:2])
    if np.max(np.abs(val)) > max(tol.newton_tol, eps):
        C.verdict, C.reason = "Xi0_1", "regular-regular sliding point, X^s(p) != 0"
        return C
    rep = classify_equilibrium(sf, p[:2], tol)
    C.equilibrium = rep
    if rep.hyperbolic:
        C.verdict = "Xi0_1"
        C.reason = f"regular-regular point, {rep.kind.replace('_', ' ')} pseudo-equilibrium"
    elif rep.kind == "saddle_node":
        C.verdict, C.reason = "Xi1_5", "saddle-node pseudo-equilibrium"
    elif rep.kind == "hopf":
        cube = ((p[0] - box, p[0] + box), (p[1] - box, p[1] + box))
        hs = check_HS(sys, cube, tol, p)
        C.conditions["HS"] = hs
        if hs.passed:
            C.verdict, C.reason = "Xi1_6", "Hopf pseudo-equilibrium satisfying (HS) (heuristic)"
        else:
            C.verdict, C.reason = "Xi1_6_candidate", "Hopf pseudo-equilibrium, (HS) unverified"
    else:
        C.reason = "non-hyperbolic pseudo-equilibrium outside the saddle-node/Hopf cases"
        C.notes.extend(rep.notes)
    return C


def _tangency_reason(t: TangencyClass) -> str:
    c = t.certificates
    if abs(c.get("X3h", 1.0)) > 0 and c.get("frame_rank") == 2:
        return "rank-2 frame without a Morse critical point of Xh|M"
    return "tower vanishes to the tested depth" if all(abs(c.get(k, 0)) == 0 for k in ("X2h", "X3h", "X4h")) else "conditions not met"
