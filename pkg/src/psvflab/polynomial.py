"""Exact polynomials in three real variables.

Coefficients are held as :class:`fractions.Fraction` so that algebra on
user-supplied fields (products, Lie derivatives, sliding fields) carries no
rounding at all; floats are produced only on evaluation or export.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from math import comb
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, int, int]

__all__ = ["Poly", "VectorField", "as_fraction", "vector_field"]


def as_fraction(c) -> Fraction:
    """Convert a number to an exact Fraction (floats are taken bit-exactly)."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, (float, np.floating)):
        return Fraction(float(c))
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as a polynomial coefficient")


class Poly:
    """Immutable polynomial ``sum c_e x1^e1 x2^e2 x3^e3`` with exact coefficients."""

    __slots__ = ("_c", "__dict__")

    def __init__(self, coeffs: Mapping[Exponent, object] | None = None):
        c: dict[Exponent, Fraction] = {}
        for e, v in (coeffs or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != 3 or min(e) < 0:
                raise ValueError(f"bad exponent {e!r}")
            f = c.get(e, Fraction(0)) + as_fraction(v)
            c[e] = f
        self._c = {e: v for e, v in c.items() if v != 0}

    # -- constructors --------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Sequence[int], object]]) -> Poly:
        """Build from (exponent, coefficient) pairs; duplicates are summed exactly."""
        acc: dict[Exponent, Fraction] = {}
        for e, v in terms:
            e = tuple(int(k) for k in e)
            acc[e] = acc.get(e, Fraction(0)) + as_fraction(v)
        return cls(acc)

    @classmethod
    def const(cls, c) -> Poly:
        return cls({(0, 0, 0): c})

    @classmethod
    def var(cls, i: int) -> Poly:
        e = [0, 0, 0]
        e[i] = 1
        return cls({tuple(e): 1})

    # -- basic protocol -------------------------------------------------
    @property
    def coeffs(self) -> dict[Exponent, Fraction]:
        return dict(self._c)

    def coefficient(self, e: Sequence[int]) -> Fraction:
        return self._c.get(tuple(e), Fraction(0))

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._c), default=0)

    def is_zero(self) -> bool:
        return not self._c

    def depends_on(self, i: int) -> bool:
        return any(e[i] > 0 for e in self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self._c == other._c
        if isinstance(other, (int, float, Fraction)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for e in sorted(self._c, key=lambda e: (sum(e), tuple(-k for k in e))):
            c = self._c[e]
            mono = "*".join(
                f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k
            )
            cs = f"{float(c):.17g}"
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- arithmetic -----------------------------------------------------
    @staticmethod
    def _lift(other) -> Poly:
        return other if isinstance(other, Poly) else Poly.const(other)

    def __add__(self, other) -> Poly:
        other = self._lift(other)
        out = dict(self._c)
        for e, v in other._c.items():
            out[e] = out.get(e, Fraction(0)) + v
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly({e: -v for e, v in self._c.items()})

    def __sub__(self, other) -> Poly:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> Poly:
        return self._lift(other) - self

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            f = as_fraction(other)
            return Poly({e: v * f for e, v in self._c.items()})
        out: dict[Exponent, Fraction] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = out.get(e, Fraction(0)) + v1 * v2
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Poly:
        f = as_fraction(other)
        return Poly({e: v / f for e, v in self._c.items()})

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            raise ValueError("negative power")
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def deriv(self, i: int) -> Poly:
        out = {}
        for e, v in self._c.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = v * e[i]
        return Poly(out)

    def gradient(self) -> tuple[Poly, Poly, Poly]:
        return (self.deriv(0), self.deriv(1), self.deriv(2))

    def compose(self, subs: Sequence[Poly]) -> Poly:
        """Substitute ``x_i -> subs[i]`` exactly."""
        subs = [self._lift(s) for s in subs]
        cache: dict[tuple[int, int], Poly] = {}

        def power(i: int, k: int) -> Poly:
            if (i, k) not in cache:
                cache[(i, k)] = subs[i] ** k
            return cache[(i, k)]

        out = Poly()
        for e, v in self._c.items():
            term = Poly.const(v)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    # -- numerics -------------------------------------------------------
    @cached_property
    def _compiled(self) -> tuple[np.ndarray, np.ndarray]:
        if not self._c:
            return np.zeros((0, 3), dtype=np.int64), np.zeros(0)
        exps = np.array(list(self._c.keys()), dtype=np.int64)
        cs = np.array([float(v) for v in self._c.values()])
        return exps, cs

    @cached_property
    def _terms(self) -> tuple[tuple[float, int, int, int], ...]:
        return tuple((float(v), e[0], e[1], e[2]) for e, v in self._c.items())

    def __call__(self, p) -> float:
        x, y, z = float(p[0]), float(p[1]), float(p[2])
        return float(sum(c * x**i * y**j * z**k for c, i, j, k in self._terms))

    def evaluate_many(self, pts) -> np.ndarray:
        """Evaluate at an ``(n, 3)`` array of points."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        exps, cs = self._compiled
        if cs.size == 0:
            return np.zeros(pts.shape[0])
        top = int(exps.max()) + 1
        mono = np.ones((pts.shape[0], len(cs)))
        for i in range(3):
            table = np.cumprod(np.concatenate([np.ones((pts.shape[0], 1)), np.repeat(pts[:, i : i + 1], top - 1, axis=1)], axis=1), axis=1)
            mono *= table[:, exps[:, i]]
        return mono @ cs

    def taylor_coefficients(self, p, order: int) -> dict[Exponent, float]:
        """Taylor coefficients ``(1/a!) d^a f(p)`` for all ``|a| <= order``."""
        p = [float(x) for x in p]
        out: dict[Exponent, float] = {}
        for e, v in self._c.items():
            cv = float(v)
            for a0 in range(min(e[0], order) + 1):
                for a1 in range(min(e[1], order - a0) + 1):
                    for a2 in range(min(e[2], order - a0 - a1) + 1):
                        w = cv * comb(e[0], a0) * comb(e[1], a1) * comb(e[2], a2)
                        w *= p[0] ** (e[0] - a0) * p[1] ** (e[1] - a1) * p[2] ** (e[2] - a2)
                        key = (a0, a1, a2)
                        out[key] = out.get(key, 0.0) + w
        return out

    # -- serialization ----------------------------------------------------
    def to_json(self) -> list[dict]:
        terms = []
        for e in sorted(self._c):
            v = self._c[e]
            item: dict = {"exp": list(e), "c": float(v)}
            if Fraction(float(v)) != v:
                item["q"] = f"{v.numerator}/{v.denominator}"
            terms.append(item)
        return terms

    @classmethod
    def from_json(cls, terms) -> Poly:
        if not isinstance(terms, list):
            raise ValueError("polynomial must be a list of {'exp', 'c'} terms")
        pairs = []
        for t in terms:
            if not isinstance(t, dict) or "exp" not in t or "c" not in t:
                raise ValueError(f"malformed polynomial term {t!r}")
            exp = t["exp"]
            if not (isinstance(exp, list) and len(exp) == 3):
                raise ValueError(f"term exponent must be a list of 3 integers: {exp!r}")
            c = t["c"]
            if isinstance(c, bool) or not isinstance(c, (int, float)):
                raise ValueError(f"term coefficient must be a real number: {c!r}")
            if "q" in t:
                q = Fraction(t["q"])
                if float(q) != float(c):
                    raise ValueError(f"exact coefficient {t['q']} disagrees with c={c!r}")
                pairs.append((exp, q))
            else:
                pairs.append((exp, float(c)))
        return cls.from_terms(pairs)


VectorField = tuple[Poly, Poly, Poly]


def vector_field(*components) -> VectorField:
    """Build a 3-component polynomial field; numbers become constant polys."""
    if len(components) == 1 and isinstance(components[0], (list, tuple)):
        components = tuple(components[0])
    if len(components) != 3:
        raise ValueError("a vector field needs exactly three components")
    return tuple(c if isinstance(c, Poly) else Poly.const(c) for c in components)


X1, X2, X3 = Poly.var(0), Poly.var(1), Poly.var(2)
