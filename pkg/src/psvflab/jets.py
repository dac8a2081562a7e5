"""Truncated Taylor jets in three variables up to total order 4.

A jet stores ``c_a = (1/a!) d^a f(p)`` for every multi-index ``a`` with
``|a| <= order``, densely over the simplex (35 slots at order 4).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .polynomial import Poly

MAX_ORDER = 4

__all__ = ["Jet", "jet_of", "directional_compose", "multi_indices", "MAX_ORDER"]


@lru_cache(maxsize=None)
def multi_indices(order: int) -> tuple[tuple[int, int, int], ...]:
    """Graded list of multi-indices with total degree <= order."""
    out = []
    for d in range(order + 1):
        for i in range(d, -1, -1):
            for j in range(d - i, -1, -1):
                out.append((i, j, d - i - j))
    return tuple(out)


@lru_cache(maxsize=None)
def _position(order: int) -> dict[tuple[int, int, int], int]:
    return {a: n for n, a in enumerate(multi_indices(order))}


@lru_cache(maxsize=None)
def _mul_table(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    idx = multi_indices(order)
    pos = _position(order)
    ia, ib, io = [], [], []
    for na, a in enumerate(idx):
        for nb, b in enumerate(idx):
            s = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
            if sum(s) <= order:
                ia.append(na)
                ib.append(nb)
                io.append(pos[s])
    return np.array(ia), np.array(ib), np.array(io)


@lru_cache(maxsize=None)
def _deriv_table(order: int, i: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source slots, target slots and factors for d/dx_i (order -> order-1)."""
    src, dst, fac = [], [], []
    low = _position(order - 1)
    for n, a in enumerate(multi_indices(order)):
        if a[i] == 0:
            continue
        b = list(a)
        b[i] -= 1
        src.append(n)
        dst.append(low[tuple(b)])
        fac.append(a[i])
    return np.array(src, dtype=int), np.array(dst, dtype=int), np.array(fac, dtype=float)


@dataclass(frozen=True, eq=False)
class Jet:
    """Taylor jet of a scalar field at ``base_point`` truncated at ``order``.

    Order 0 jets (value only) are allowed internally as the tail of a Lie tower.
    """

    base_point: tuple[float, float, float]
    order: int
    coefficients: np.ndarray

    def __post_init__(self):
        if not 0 <= self.order <= MAX_ORDER:
            raise ValueError(f"jet order must be in 0..{MAX_ORDER}, got {self.order}")
        c = np.asarray(self.coefficients, dtype=float)
        if c.shape != (len(multi_indices(self.order)),):
            raise ValueError("coefficient array does not match jet order")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "base_point", tuple(float(x) for x in self.base_point))

    # -- construction / access -----------------------------------------
    @classmethod
    def from_dict(cls, base_point, order: int, coeffs: dict) -> Jet:
        pos = _position(order)
        c = np.zeros(len(pos))
        for a, v in coeffs.items():
            a = tuple(a)
            if sum(a) > order:
                raise ValueError(f"multi-index {a} exceeds jet order {order}")
            c[pos[a]] += v
        return cls(tuple(base_point), order, c)

    @classmethod
    def constant(cls, base_point, order: int, value: float) -> Jet:
        c = np.zeros(len(multi_indices(order)))
        c[0] = value
        return cls(tuple(base_point), order, c)

    def __getitem__(self, a) -> float:
        a = tuple(a)
        if sum(a) > self.order:
            raise KeyError(a)
        return float(self.coefficients[_position(self.order)[a]])

    def as_dict(self) -> dict[tuple[int, int, int], float]:
        return {a: float(v) for a, v in zip(multi_indices(self.order), self.coefficients)}

    @property
    def value(self) -> float:
        return float(self.coefficients[0])

    def gradient(self) -> np.ndarray:
        if self.order < 1:
            raise ValueError("gradient needs a jet of order >= 1")
        return np.array([self[(1, 0, 0)], self[(0, 1, 0)], self[(0, 0, 1)]])

    def hessian(self) -> np.ndarray:
        if self.order < 2:
            raise ValueError("hessian needs a jet of order >= 2")
        H = np.empty((3, 3))
        for i in range(3):
            for j in range(3):
                a = [0, 0, 0]
                a[i] += 1
                a[j] += 1
                # c_a = d^a f / a!, so the mixed partial is c_a * a!
                H[i, j] = self[tuple(a)] * np.prod([factorial(k) for k in a])
        return H

    def derivative(self, a) -> float:
        """Partial derivative ``d^a f(p)`` (not divided by a!)."""
        return self[a] * float(np.prod([factorial(k) for k in a]))

    # -- arithmetic ----------------------------------------------------
    def _check(self, other: Jet) -> None:
        if self.order != other.order or self.base_point != other.base_point:
            raise ValueError("jet arithmetic requires equal base point and order")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.base_point, self.order, self.coefficients + other.coefficients)
        c = self.coefficients.copy()
        c[0] += float(other)
        return Jet(self.base_point, self.order, c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.base_point, self.order, -self.coefficients)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.base_point, self.order, self.coefficients * float(other))
        self._check(other)
        ia, ib, io = _mul_table(self.order)
        w = self.coefficients[ia] * other.coefficients[ib]
        c = np.bincount(io, weights=w, minlength=len(self.coefficients))
        return Jet(self.base_point, self.order, c)

    __rmul__ = __mul__

    def deriv(self, i: int) -> Jet:
        """Jet of ``df/dx_i``; the order drops by one."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        src, dst, fac = _deriv_table(self.order, i)
        c = np.zeros(len(multi_indices(self.order - 1)))
        np.add.at(c, dst, self.coefficients[src] * fac)
        return Jet(self.base_point, self.order - 1, c)

    def truncate(self, order: int) -> Jet:
        if order > self.order or order < 0:
            raise ValueError("can only truncate to a lower order")
        return Jet(self.base_point, order, self.coefficients[: len(multi_indices(order))].copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Jet):
            return NotImplemented
        return (
            self.order == other.order
            and self.base_point == other.base_point
            and np.array_equal(self.coefficients, other.coefficients)
        )

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, at={self.base_point}, value={self.value:.6g})"


def _check_order(order: int) -> None:
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_ORDER:
        raise ValueError(f"jet order must be an integer in 1..{MAX_ORDER}, got {order!r}")


def _scalar_jet(f: Poly, p, order: int) -> Jet:
    return Jet.from_dict(p, order, f.taylor_coefficients(p, order))


def jet_of(field, p, order: int, *, _allow_zero: bool = False):
    """Jet of a polynomial scalar field, or a tuple of jets for a vector field."""
    if not (_allow_zero and order == 0):
        _check_order(order)
    p = tuple(float(x) for x in p)
    if len(p) != 3:
        raise ValueError("base point must be a 3-vector")
    if isinstance(field, Poly):
        return _scalar_jet(field, p, order)
    if isinstance(field, (tuple, list)) and len(field) == 3:
        return tuple(_scalar_jet(c, p, order) for c in field)
    raise TypeError("field must be a Poly or a 3-tuple of Poly")


def lie_jet(xjets, fjet: Jet) -> Jet:
    """Jet of ``<X, grad f>`` from jets of X (order n-1) and of f (order n)."""
    if fjet.order < 1:
        raise ValueError("insufficient input order for a directional derivative")
    n = fjet.order - 1
    out = None
    for i in range(3):
        xi = xjets[i] if xjets[i].order == n else xjets[i].truncate(n)
        term = xi * fjet.deriv(i)
        out = term if out is None else out + term
    return out


def directional_compose(X, f, p, order: int) -> Jet:
    """Jet of ``Xf = <X, grad f>`` at p, of the given order.

    Input jets of f and X are taken at ``order + 1`` and ``order`` internally:
    the output order is one less than the order of the f jet that feeds it.
    """
    _check_order(order)
    if order + 1 > MAX_ORDER:
        raise ValueError(f"insufficient input order: f would need a jet of order {order + 1}")
    fj = jet_of(f, p, order + 1)
    xj = jet_of(X, p, order)
    return lie_jet(xj, fj)
