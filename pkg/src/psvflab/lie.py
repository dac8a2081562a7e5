"""Lie-derivative towers X^k h and the differential certificates built on them."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_TOL, ToleranceConfig
from .jets import jet_of, lie_jet
from .polynomial import Poly, VectorField

__all__ = [
    "LieTower",
    "lie_tower",
    "frame_rank",
    "restricted_hessian_signature",
    "tangent_basis",
]


@dataclass(frozen=True)
class LieTower:
    point: tuple[float, float, float]
    depth: int
    values: list[float]
    differentials: list[np.ndarray]
    restricted_hessian: np.ndarray
    tangential_gradient: np.ndarray
    det_frame: float | None
    hessian_xh: np.ndarray = field(repr=False)

    def value(self, k: int) -> float:
        """X^k h(p) for 1 <= k <= depth."""
        if not 1 <= k <= self.depth:
            raise IndexError(f"tower computed to depth {self.depth}, asked for X^{k}h")
        return self.values[k - 1]

    def frame(self) -> np.ndarray:
        return np.vstack(self.differentials[:3])

    def to_dict(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "dh": self.differentials[0].tolist(),
            "dXh": self.differentials[1].tolist(),
            "dX2h": self.differentials[2].tolist(),
            "det_frame": self.det_frame,
            "restricted_hessian": self.restricted_hessian.tolist(),
        }


def tangent_basis(grad: np.ndarray) -> np.ndarray:
    """Orthonormal 3x2 basis of ker <grad, .>.

    Gram-Schmidt on the two coordinate axes most orthogonal to grad; the pair
    is kept in index order so h = x3 gives exactly (e1, e2).
    """
    g = np.asarray(grad, dtype=float)
    norm = np.linalg.norm(g)
    if norm == 0.0:
        raise ValueError("gradient of h vanishes")
    n = g / norm
    axes = sorted(np.argsort(np.abs(n), kind="stable")[:2])
    cols = []
    for i in axes:
        v = np.zeros(3)
        v[i] = 1.0
        v = v - (v @ n) * n
        for u in cols:
            v = v - (v @ u) * u
        cols.append(v / np.linalg.norm(v))
    return np.column_stack(cols)


def lie_tower(X: VectorField, h: Poly, p, depth: int = 4) -> LieTower:
    """Values X^k h(p) for k <= depth plus dh, d(Xh), d(X^2h) and the Hessian data.

    h is expanded at order max(depth, 3) and X one order lower, so the chain
    of directional derivatives is exact for polynomial inputs.
    """
    if not 1 <= depth <= 4:
        raise ValueError("tower depth must be in 1..4")
    p = tuple(float(x) for x in p)
    order = max(depth, 3)
    hj = jet_of(h, p, order)
    xj = jet_of(X, p, order - 1)
    chain = [hj]
    for _ in range(order):
        chain.append(lie_jet(xj, chain[-1]))
    values = [chain[k].value for k in range(1, depth + 1)]
    diffs = [chain[k].gradient() for k in range(3)]
    dh = diffs[0]
    B = tangent_basis(dh)
    ddh = float(dh @ dh)
    mu = float(diffs[1] @ dh) / ddh
    H_xh = chain[1].hessian()
    H_h = hj.hessian()
    RH = B.T @ (H_xh - mu * H_h) @ B
    RH = 0.5 * (RH + RH.T)
    det_frame = float(np.linalg.det(np.vstack(diffs))) if depth >= 2 else None
    return LieTower(p, depth, values, diffs, RH, B.T @ diffs[1], det_frame, H_xh)


def frame_rank(tower: LieTower, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    s = np.linalg.svd(tower.frame(), compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.zero_eps * s[0]))


def restricted_hessian_signature(tower: LieTower, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    H = tower.restricted_hessian
    det = float(H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0])
    if det > tol.zero_eps:
        sig = "pos_def" if H[0, 0] + H[1, 1] > 0 else "neg_def"
    elif det < -tol.zero_eps:
        sig = "indefinite"
    else:
        sig = "degenerate"
    return {"det": det, "signature": sig}
