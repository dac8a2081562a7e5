"""Filippov trajectories: smooth arcs, surface events and sliding segments.

The smooth arcs use scipy's DOP853 stepper directly so that every accepted
step can be scanned on its dense output for sign changes of h (or of X+h,
X-h while sliding); roots are then located with brentq and the junction
state is projected onto M with Newton steps along grad h.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import brentq

from .core import (
    DEFAULT_TOL,
    PiecewiseSystem,
    RegionTag,
    ToleranceConfig,
    lie_derivative,
    project_to_surface,
    region_from_values,
)
from .polynomial import Poly, VectorField

__all__ = [
    "TrajectorySegment",
    "Trajectory",
    "integrate",
    "orbit_return_to_M",
    "NoReturnError",
    "trajectory_to_csv",
]

EVENTS = ("start", "surface_hit", "sliding_entry", "sliding_exit_at_tangency", "time_horizon", "left_domain")
RTOL, ATOL = 1e-12, 1e-14
SUBSAMPLES = 8


class NoReturnError(RuntimeError):
    """The orbit did not come back to the switching surface before t_max."""


@dataclass
class TrajectorySegment:
    governing: str  # "X_plus", "X_minus" or "sliding"
    times: np.ndarray
    states: np.ndarray
    entry_event: str
    exit_event: str
    region: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def start(self) -> np.ndarray:
        return self.states[0]

    @property
    def end(self) -> np.ndarray:
        return self.states[-1]


@dataclass
class Trajectory:
    segments: list[TrajectorySegment]
    total_time: float
    status: str = "ok"
    diagnostic: str | None = None

    @property
    def final_state(self) -> np.ndarray:
        return self.segments[-1].end

    def junctions(self) -> list[tuple[float, np.ndarray]]:
        return [(s.times[-1], s.end) for s in self.segments[:-1]]

    def summary(self) -> str:
        parts = [f"{s.governing}[{s.entry_event}->{s.exit_event}]" for s in self.segments]
        line = f"{len(self.segments)} segment(s): " + ", ".join(parts) + f"; t={self.total_time:.6g}"
        if self.diagnostic:
            line += f"; diagnostic: {self.diagnostic}"
        return line


def _evaluator(X: VectorField):
    c0, c1, c2 = X

    def f(_t, y):
        return np.array([c0(y), c1(y), c2(y)])

    return f


@dataclass
class _ArcResult:
    times: list
    states: list
    status: str  # "event", "horizon", "left_domain", "failed"
    event_index: int | None = None
    message: str | None = None


def _run_arc(fun, y0, t0, t_end, guards, signs, bound, max_step, post_step=None, first_trick=1, snap=1e-9):
    """Integrate until one of the scalar guards changes sign away from ``signs``.

    ``guards`` are callables of the state; ``signs[k]`` is the sign guard k is
    expected to keep.  On the first step the guards are divided by
    (t - t0)**first_trick after subtracting their starting values, which removes
    the trivial root of that multiplicity (2 for a fold departure) together
    with the round-off offset of guards that start within ``snap`` of zero.
    """
    times, states = [t0], [np.array(y0, dtype=float)]
    if t_end <= t0:
        return _ArcResult(times, states, "horizon")
    solver = DOP853(fun, t0, np.array(y0, dtype=float), t_end, rtol=RTOL, atol=ATOL, max_step=max_step)
    first = first_trick

    start_vals = [g(states[0]) for g in guards]
    start_vals = [v if abs(v) <= snap else 0.0 for v in start_vals]

    def G(k, t, y, t_start, use_trick):
        if not use_trick:
            return signs[k] * guards[k](y)
        v = signs[k] * (guards[k](y) - start_vals[k])
        return v / (t - t_start) ** first_trick if t > t_start else v
        return v

    while True:
        ta = solver.t
        msg = solver.step()
        if solver.status == "failed":
            return _ArcResult(times, states, "failed", message=f"step failure: {msg}")
        tb = solver.t
        dense = solver.dense_output()
        sub = np.linspace(ta, tb, SUBSAMPLES + 1)[1:]
        hit = None
        prev_t = ta
        prev_vals = None if first else [G(k, ta, dense(ta), ta, False) for k in range(len(guards))]
        for t in sub:
            y = dense(t)
            vals = [G(k, t, y, ta, first) for k in range(len(guards))]
            for k, v in enumerate(vals):
                if v < 0 and (prev_vals is None or prev_vals[k] >= 0):
                    hit = (k, prev_t, t)
                    break
            if hit:
                break
            prev_t, prev_vals = t, vals
        if hit is not None:
            k, lo, hi = hit
            use_trick = first
            if use_trick and lo == ta:
                lo = ta + 1e-6 * (hi - ta)
                if G(k, lo, dense(lo), ta, True) < 0:
                    lo = ta
                    use_trick = False
            def root_fn(t):
                return guards[k](dense(t)) if not use_trick else G(k, t, dense(t), ta, True)
            try:
                tr = brentq(root_fn, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            except ValueError:
                tr = hi
            times.append(tr)
            states.append(dense(tr))
            return _ArcResult(times, states, "event", event_index=k)
        first = False
        y = solver.y.copy()
        if post_step is not None:
            y2 = post_step(y)
            if y2 is not None:
                y = y2
                solver = DOP853(fun, tb, y, t_end, rtol=RTOL, atol=ATOL, max_step=max_step)
        times.append(tb)
        states.append(y)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > bound:
            return _ArcResult(times, states, "left_domain")
        if solver.status == "finished" or tb >= t_end:
            return _ArcResult(times, states, "horizon")


def _effective_sign(value: float, second: float, eps: float) -> int:
    if abs(value) > eps:
        return 1 if value > 0 else -1
    if abs(second) > eps:
        return 1 if second > 0 else -1
    return 0


class _Dispatcher:
    def __init__(self, sys: PiecewiseSystem, tol: ToleranceConfig):
        self.sys, self.tol = sys, tol
        self.a, self.b = sys.xph, sys.xmh
        self.a2 = lie_derivative(sys.x_plus, self.a)
        self.b2 = lie_derivative(sys.x_minus, self.b)

    def signs(self, p):
        eps = self.tol.zero_eps
        return (
            _effective_sign(self.a(p), self.a2(p), eps),
            _effective_sign(self.b(p), self.b2(p), eps),
        )

    def mode_on_surface(self, p):
        sp, sm = self.signs(p)
        if sp == 0 or sm == 0:
            return None, (sp, sm)
        if sp > 0 and sm > 0:
            return "X_plus", (sp, sm)
        if sp < 0 and sm < 0:
            return "X_minus", (sp, sm)
        return "sliding", (sp, sm)


def integrate(
    sys: PiecewiseSystem,
    p0,
    t_max: float,
    tol: ToleranceConfig = DEFAULT_TOL,
    bound: float = 1e3,
    max_step: float = 0.05,
) -> Trajectory:
    """Filippov trajectory from p0 over [0, t_max]."""
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    disp = _Dispatcher(sys, tol)
    h = sys.h
    fplus, fminus = _evaluator(sys.x_plus), _evaluator(sys.x_minus)
    p = np.asarray(p0, dtype=float)
    t = 0.0
    segments: list[TrajectorySegment] = []
    hits = 0
    entry = "start"
    region_note = None

    hv = h(p)
    if abs(hv) <= tol.event_tol:
        p = project_to_surface(sys, p, tol) if hv != 0 else p
        mode, sgn = disp.mode_on_surface(p)
    else:
        mode, sgn = ("X_plus" if hv > 0 else "X_minus"), None

    def finish(status="ok", diag=None):
        if not segments:
            segments.append(TrajectorySegment(mode or "X_plus", np.array([t]), np.array([p]), entry, "time_horizon"))
        return Trajectory(segments, segments[-1].times[-1], status, diag)

    while True:
        if mode is None:
            return finish("diagnostic", f"degenerate tangency at {p.tolist()}: second Lie derivative below zero_eps")
        if mode in ("X_plus", "X_minus"):
            s = 1 if mode == "X_plus" else -1
            order = 0
            if abs(h(p)) <= tol.event_tol:
                contact = disp.a(p) if s > 0 else disp.b(p)
                order = 1 if abs(contact) > tol.zero_eps else 2
            arc = _run_arc(
                fplus if s > 0 else fminus, p, t, t_max, [h], [s], bound, max_step, first_trick=order, snap=tol.event_tol
            )
        else:
            sp, sm = sgn
            region_note = "stable_sliding" if sp < 0 < sm else "unstable_sliding"

            def fil(_t, y):
                a, b = disp.a(y), disp.b(y)
                return (b * fplus(0, y) - a * fminus(0, y)) / (b - a)

            def reproject(y):
                if abs(h(y)) > 0.1 * tol.event_tol:
                    return project_to_surface(sys, y, tol)
                return None

            arc = _run_arc(fil, p, t, t_max, [disp.a, disp.b], [sp, sm], bound, max_step, post_step=reproject, snap=tol.zero_eps)
        T = np.array(arc.times)
        S = np.array(arc.states)
        notes = []
        if mode == "sliding" and region_note == "unstable_sliding":
            notes.append("unstable sliding: followed the Filippov field (reverse-time meaning of X^s)")
        if arc.status == "event":
            end = S[-1]
            if mode != "sliding":
                end = project_to_surface(sys, end, tol)
            S[-1] = end
            exit_event = "surface_hit" if mode != "sliding" else "sliding_exit_at_tangency"
            seg = TrajectorySegment(mode, T, S, entry, exit_event, region_note if mode == "sliding" else None, notes)
            segments.append(seg)
            hits += 1
            if hits > tol.max_surface_hits:
                return finish("diagnostic", f"chattering guard: more than {tol.max_surface_hits} surface hits")
            p, t = end, float(T[-1])
            new_mode, sgn = disp.mode_on_surface(p)
            if new_mode == "sliding":
                entry = "sliding_entry"
            elif mode == "sliding":
                entry = "sliding_exit_at_tangency"
            else:
                entry = "surface_hit"
            if mode == "sliding" and new_mode == "sliding":
                notes.append("sliding continued through a tangency of the invisible kind")
            mode = new_mode
            continue
        exit_event = {"horizon": "time_horizon", "left_domain": "left_domain"}.get(arc.status, arc.status)
        segments.append(
            TrajectorySegment(mode, T, S, entry, exit_event, region_note if mode == "sliding" else None, notes)
        )
        if arc.status == "failed":
            return finish("diagnostic", arc.message)
        return finish()


def orbit_return_to_M(
    X: VectorField,
    h: Poly,
    p0,
    side: int,
    tol: ToleranceConfig = DEFAULT_TOL,
    t_max: float = 50.0,
    backward: bool = False,
    max_step: float = 0.05,
) -> tuple[np.ndarray, float]:
    """First return to M of the orbit of X (or of -X if ``backward``) from p0 on M.

    ``side`` is +1 when the orbit lives in h > 0 and -1 for h < 0.
    Returns (return point, flight time).
    """
    fwd = _evaluator(X)
    fun = (lambda t, y: -fwd(t, y)) if backward else fwd
    p0 = np.asarray(p0, dtype=float)
    arc = _run_arc(fun, p0, 0.0, t_max, [h], [side], 1e6, max_step, first_trick=1, snap=tol.event_tol)
    if arc.status != "event":
        raise NoReturnError(f"orbit from {p0.tolist()} did not return to M within t={t_max}")
    q = np.asarray(arc.states[-1])
    for _ in range(3):
        g = np.array([d(q) for d in h.gradient()])
        q = q - h(q) * g / (g @ g)
    return q, float(arc.times[-1])


def trajectory_rows(traj: Trajectory):
    last = None
    for i, seg in enumerate(traj.segments):
        for t, y in zip(seg.times, seg.states):
            key = (float(t), tuple(float(v) for v in y))
            if key == last:
                continue
            last = key
            yield (t, y[0], y[1], y[2], i, seg.governing)


def trajectory_to_csv(traj: Trajectory, fh=None) -> str:
    buf = fh or io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x1", "x2", "x3", "segment_index", "governing"])
    for t, a, b, c, i, g in trajectory_rows(traj):
        w.writerow([f"{t:.17g}", f"{a:.17g}", f"{b:.17g}", f"{c:.17g}", i, g])
    return buf.getvalue() if fh is None else ""
