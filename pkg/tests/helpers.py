"""Shared helpers for the test suite: sympy oracles and random system generators."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy as sp

from psvflab.core import PiecewiseSystem
from psvflab.polynomial import Poly

x1, x2, x3 = SYMS = sp.symbols("x1 x2 x3")


def to_sympy(p: Poly) -> sp.Expr:
    return sum((sp.Rational(c.numerator, c.denominator) * x1**e[0] * x2**e[1] * x3**e[2] for e, c in p.coeffs.items()), sp.Integer(0))


def from_sympy(expr) -> Poly:
    poly = sp.Poly(sp.expand(expr), *SYMS)
    return Poly({tuple(m): Fraction(int(sp.Rational(c).p), int(sp.Rational(c).q)) for m, c in poly.terms()})


def random_poly(rng: np.random.Generator, degree: int = 3, density: float = 0.6, denom: int = 4) -> Poly:
    """Random polynomial with small rational coefficients."""
    terms = {}
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            for k in range(degree + 1 - i - j):
                if rng.random() < density:
                    terms[(i, j, k)] = Fraction(int(rng.integers(-4 * denom, 4 * denom + 1)), denom)
    return Poly(terms)


def random_field(rng, degree: int = 3, density: float = 0.6):
    return tuple(random_poly(rng, degree, density) for _ in range(3))


def random_system(rng, degree: int = 3, curved: bool = False) -> PiecewiseSystem:
    h = Poly.var(2)
    if curved:
        q = random_poly(rng, 3, 0.5)
        q = Poly({e: c for e, c in q.coeffs.items() if e[2] == 0 and sum(e) >= 2})
        h = h - q
    return PiecewiseSystem(random_field(rng, degree), random_field(rng, degree), h, "random")


def surface_point(sys: PiecewiseSystem, u) -> np.ndarray:
    """Point of M over chart coordinates u when h = x3 - q(x1, x2)."""
    q = Poly.var(2) - sys.h
    return np.array([u[0], u[1], q((u[0], u[1], 0.0))])
