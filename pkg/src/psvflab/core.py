"""Piecewise smooth systems, the switching surface and Filippov regions."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .polynomial import Poly, VectorField, vector_field

__all__ = [
    "PiecewiseSystem",
    "RegionTag",
    "ToleranceConfig",
    "region_of",
    "on_switching_surface",
    "lift_to_surface",
    "lift_chart",
    "lie_derivative",
    "system_from_json",
    "system_to_json",
    "load_system",
    "save_system",
    "NotOnSurfaceError",
]


class NotOnSurfaceError(ValueError):
    """Raised when a point handed to a surface operation is not on M."""


@dataclass(frozen=True)
class ToleranceConfig:
    zero_eps: float = 1e-9
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    event_tol: float = 1e-10
    fd_step: float = 1e-4
    max_surface_hits: int = 10_000

    def __post_init__(self):
        for name in ("zero_eps", "newton_tol", "newton_max_iter", "event_tol", "fd_step", "max_surface_hits"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be strictly positive")

    def with_(self, **kw) -> ToleranceConfig:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT_TOL = ToleranceConfig()


class RegionTag(str, Enum):
    CROSSING_UP = "crossing_up"
    CROSSING_DOWN = "crossing_down"
    STABLE_SLIDING = "stable_sliding"
    UNSTABLE_SLIDING = "unstable_sliding"
    TANGENTIAL_PLUS = "tangential_plus"
    TANGENTIAL_MINUS = "tangential_minus"
    TANGENTIAL_BOTH = "tangential_both"

    @property
    def is_sliding(self) -> bool:
        return self in (RegionTag.STABLE_SLIDING, RegionTag.UNSTABLE_SLIDING)

    @property
    def is_crossing(self) -> bool:
        return self in (RegionTag.CROSSING_UP, RegionTag.CROSSING_DOWN)

    @property
    def is_tangential(self) -> bool:
        return self.value.startswith("tangential")


def lie_derivative(X: VectorField, f: Poly) -> Poly:
    """Exact polynomial ``Xf = sum_i X_i df/dx_i``."""
    return X[0] * f.deriv(0) + X[1] * f.deriv(1) + X[2] * f.deriv(2)


@dataclass(frozen=True)
class PiecewiseSystem:
    """X = (X+, X-) with M = h^{-1}(0); X+ governs h > 0 and X- governs h < 0."""

    x_plus: VectorField
    x_minus: VectorField
    h: Poly
    name: str = "system"
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "x_plus", vector_field(*self.x_plus))
        object.__setattr__(self, "x_minus", vector_field(*self.x_minus))
        if not isinstance(self.h, Poly):
            raise TypeError("h must be a Poly")
        if self.h.degree < 1:
            raise ValueError("switching function must be non-constant")

    # exact derived polynomials, cached on the instance
    def _cache(self, key, fn):
        c = self.__dict__.setdefault("_poly_cache", {})
        if key not in c:
            c[key] = fn()
        return c[key]

    @property
    def grad_h(self) -> tuple[Poly, Poly, Poly]:
        return self._cache("grad_h", self.h.gradient)

    @property
    def xph(self) -> Poly:
        return self._cache("xph", lambda: lie_derivative(self.x_plus, self.h))

    @property
    def xmh(self) -> Poly:
        return self._cache("xmh", lambda: lie_derivative(self.x_minus, self.h))

    def field(self, side: str) -> VectorField:
        if side in ("+", "plus", "X_plus"):
            return self.x_plus
        if side in ("-", "minus", "X_minus"):
            return self.x_minus
        raise ValueError(f"unknown side {side!r}")

    def eval_field(self, side: str, p) -> np.ndarray:
        return np.array([c(p) for c in self.field(side)])

    def grad_h_at(self, p) -> np.ndarray:
        return np.array([g(p) for g in self.grad_h])

    def mirrored(self) -> PiecewiseSystem:
        """Swap the roles of the two sides: (X-, X+, -h) describes the same system."""
        return PiecewiseSystem(self.x_minus, self.x_plus, -self.h, self.name + "~mirror", dict(self.meta))

    def is_graph_surface(self) -> bool:
        """True when h = a*x3 + q(x1, x2) with constant a != 0."""
        linear = self.h.coefficient((0, 0, 1))
        return linear != 0 and all(e[2] == 0 or e == (0, 0, 1) for e in self.h.coeffs)


def region_of(sys: PiecewiseSystem, p, tol: ToleranceConfig = DEFAULT_TOL) -> RegionTag:
    p = np.asarray(p, dtype=float)
    if abs(sys.h(p)) > tol.zero_eps:
        raise NotOnSurfaceError(f"point {p.tolist()} is not on the switching surface (h={sys.h(p):.3e})")
    return region_from_values(sys.xph(p), sys.xmh(p), tol.zero_eps)


def region_from_values(a: float, b: float, eps: float) -> RegionTag:
    """Region tag from X+h and X-h; values within eps of 0 are tangential."""
    za, zb = abs(a) <= eps, abs(b) <= eps
    if za and zb:
        return RegionTag.TANGENTIAL_BOTH
    if za:
        return RegionTag.TANGENTIAL_PLUS
    if zb:
        return RegionTag.TANGENTIAL_MINUS
    if a > 0 and b > 0:
        return RegionTag.CROSSING_UP
    if a < 0 and b < 0:
        return RegionTag.CROSSING_DOWN
    if a < 0 < b:
        return RegionTag.STABLE_SLIDING
    return RegionTag.UNSTABLE_SLIDING


def on_switching_surface(sys: PiecewiseSystem, p, tol: ToleranceConfig = DEFAULT_TOL):
    """Return (is_on_M, projected point) using one Newton step along grad h."""
    p = np.asarray(p, dtype=float)
    g = sys.grad_h_at(p)
    n2 = float(g @ g)
    if n2 == 0.0:
        raise ValueError("gradient of h vanishes; 0 is not a regular value here")
    hv = sys.h(p)
    return abs(hv) <= tol.zero_eps, p - hv * g / n2


def project_to_surface(sys: PiecewiseSystem, p, tol: ToleranceConfig = DEFAULT_TOL, max_iter: int | None = None) -> np.ndarray:
    """Iterate the gradient Newton step until |h| <= newton_tol."""
    q = np.asarray(p, dtype=float)
    for _ in range(max_iter or tol.newton_max_iter):
        if abs(sys.h(q)) <= tol.newton_tol:
            return q
        _, q = on_switching_surface(sys, q, tol)
    if abs(sys.h(q)) > max(tol.newton_tol, tol.event_tol):
        raise NotOnSurfaceError("projection onto the switching surface did not converge")
    return q


def lift_chart(h: Poly, u, tol: ToleranceConfig = DEFAULT_TOL, x3_guess: float = 0.0) -> np.ndarray:
    """Chart map (x1, x2) -> point of h = 0, solving for x3 by Newton."""
    x = np.array([float(u[0]), float(u[1]), float(x3_guess)])
    d3 = h.deriv(2)
    for _ in range(tol.newton_max_iter):
        hv = h(x)
        if abs(hv) <= tol.newton_tol:
            return x
        slope = d3(x)
        if slope == 0.0:
            break
        x[2] -= hv / slope
    if abs(h(x)) <= tol.zero_eps:
        return x
    raise NotOnSurfaceError(f"could not lift chart point {tuple(u)} onto the switching surface")


def lift_to_surface(sys: PiecewiseSystem, u, tol: ToleranceConfig = DEFAULT_TOL, x3_guess: float = 0.0) -> np.ndarray:
    return lift_chart(sys.h, u, tol, x3_guess)


# ---------------------------------------------------------------- JSON I/O
def _field_to_json(X: VectorField) -> list:
    return [c.to_json() for c in X]


def _field_from_json(obj, label: str) -> VectorField:
    if not isinstance(obj, list) or len(obj) != 3:
        raise ValueError(f"'{label}' must be a list of three polynomials")
    return tuple(Poly.from_json(c) for c in obj)


def system_to_json(sys: PiecewiseSystem) -> dict:
    return {
        "name": sys.name,
        "h": sys.h.to_json(),
        "x_plus": _field_to_json(sys.x_plus),
        "x_minus": _field_to_json(sys.x_minus),
    }


def system_from_json(obj: dict) -> PiecewiseSystem:
    if not isinstance(obj, dict):
        raise ValueError("system definition must be a JSON object")
    for key in ("h", "x_plus", "x_minus"):
        if key not in obj:
            raise ValueError(f"system definition is missing '{key}'")
    return PiecewiseSystem(
        _field_from_json(obj["x_plus"], "x_plus"),
        _field_from_json(obj["x_minus"], "x_minus"),
        Poly.from_json(obj["h"]),
        str(obj.get("name", "system")),
    )


def load_system(path) -> PiecewiseSystem:
    with open(Path(path)) as fh:
        return system_from_json(json.load(fh))


def save_system(sys: PiecewiseSystem, path) -> None:
    Path(path).write_text(json.dumps(system_to_json(sys), indent=2) + "\n")
