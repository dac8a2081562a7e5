"""Registry of built-in parameterized families.

Every family is stored as exact polynomials; numeric parameter values are
converted to Fractions (floats bit-exactly) before the fields are built.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .core import PiecewiseSystem, system_from_json, system_to_json
from .polynomial import Poly, X1, X2, X3, as_fraction

__all__ = ["FamilyDescriptor", "family", "list_families", "get_descriptor", "perturb_system", "UnknownFamilyError"]


class UnknownFamilyError(KeyError):
    pass


ONE = Poly.const(1)
ZERO = Poly()


def C(v) -> Poly:
    return Poly.const(v)


@dataclass(frozen=True)
class FamilyDescriptor:
    name: str
    defaults: dict
    builder: Callable[[dict], PiecewiseSystem] = field(repr=False)
    expected_verdict_at_zero: str
    expected_verdict_off_zero: str | None = None
    unfold_param: str | None = None
    eta_kind: str | None = None
    eta_slope: float | None = None
    locator: str = "regular"
    origin: str = ""
    notes: str = ""
    stated_sliding: Callable[[dict], tuple] | None = field(default=None, repr=False)

    def build(self, **params) -> PiecewiseSystem:
        values = dict(self.defaults)
        for k, v in params.items():
            if k == "lambda" and self.unfold_param and self.unfold_param != "lambda":
                k = self.unfold_param
            if k not in values:
                raise ValueError(f"family {self.name!r} has no parameter {k!r} (known: {sorted(values)})")
            values[k] = v
        values = {k: as_fraction(v) for k, v in values.items()}
        sys = self.builder(values)
        return PiecewiseSystem(sys.x_plus, sys.x_minus, sys.h, self.name, {"params": values})

    def stated_sliding_field(self, **params):
        if self.stated_sliding is None:
            return None
        values = {k: as_fraction(v) for k, v in {**self.defaults, **params}.items()}
        return self.stated_sliding(values)

    def summary(self) -> dict:
        return {
            "name": self.name,
            "parameters": {k: float(v) for k, v in self.defaults.items()},
            "unfold_parameter": self.unfold_param,
            "expected_verdict_at_zero": self.expected_verdict_at_zero,
            "expected_verdict_off_zero": self.expected_verdict_off_zero,
            "eta": self.eta_kind,
            "origin": self.origin,
        }


_REGISTRY: dict[str, FamilyDescriptor] = {}


def _register(d: FamilyDescriptor) -> None:
    _REGISTRY[d.name] = d


def _sys(xp, xm, h=X3) -> PiecewiseSystem:
    return PiecewiseSystem(tuple(xp), tuple(xm), h)


R2 = X1 ** 2 + X2 ** 2

# -------------------------------------------------- tangential normal forms
_register(FamilyDescriptor(
    "lips", {"lambda": 0}, lambda p: _sys((ONE, ZERO, X1 ** 2 + p["lambda"] * X2 + X2 ** 2), (ZERO, ZERO, ONE)),
    "Xi1_1", "Xi0_3", "lambda", "lips_beak", -2.0, "tangency",
    "lips normal form, flat switching surface",
))
_register(FamilyDescriptor(
    "beak_to_beak", {"lambda": 0}, lambda p: _sys((ONE, ZERO, X1 ** 2 + p["lambda"] * X2 - X2 ** 2), (ZERO, ZERO, ONE)),
    "Xi1_2", "Xi0_3", "lambda", "lips_beak", -2.0, "tangency",
    "beak-to-beak normal form, flat switching surface",
))
_register(FamilyDescriptor(
    "swallowtail", {"lambda": 0}, lambda p: _sys((ONE, ZERO, X1 ** 3 - X2 + p["lambda"] * X1 ** 2), (ZERO, ZERO, ONE)),
    "Xi1_3", "Xi0_3", "lambda", "swallowtail", 2.0, "tangency",
    "swallowtail normal form, flat switching surface",
))
_register(FamilyDescriptor(
    "lips_curved", {"lambda": 0},
    lambda p: _sys((ONE, ZERO, p["lambda"] * X2), (ZERO, ZERO, ONE), X3 - (X1 ** 3 + X1 * X2 ** 2)),
    "Xi1_1", "Xi0_3", "lambda", "lips_beak", 6.0, "tangency",
    "lips with a straight field and curved switching surface h = x3 - (x1^3 + x1 x2^2)",
))
_register(FamilyDescriptor(
    "beak_curved", {"lambda": 0},
    lambda p: _sys((ONE, ZERO, p["lambda"] * X2), (ZERO, ZERO, ONE), X3 - (X1 ** 3 - X1 * X2 ** 2)),
    "Xi1_2", "Xi0_3", "lambda", "lips_beak", 6.0, "tangency",
    "beak-to-beak with curved switching surface h = x3 - (x1^3 - x1 x2^2)",
))
_register(FamilyDescriptor(
    "swallowtail_curved", {"lambda": 0},
    lambda p: _sys((ONE, p["lambda"] * X1, ZERO), (ZERO, ZERO, ONE), X3 - (X1 ** 4 + X1 * X2)),
    "Xi1_3", "Xi0_3", "lambda", "swallowtail", -3.0, "tangency",
    "swallowtail with curved switching surface h = x3 - (x1^4 + x1 x2)",
))

# --------------------------------------------------- boundary equilibria
_register(FamilyDescriptor(
    "boundary_equilibrium_real",
    {"lambda": 0, "alpha1": 1, "alpha2": 2, "alpha3": 3, "a": 1, "b": 0, "c": 1},
    lambda p: _sys(
        (p["alpha1"] * X1, X1 + p["alpha2"] * X2, p["alpha3"] * (X3 - p["lambda"]) + X2),
        (C(p["a"]), C(p["b"]), C(p["c"])),
    ),
    "Xi1_4", "Xi0_1", "lambda", "boundary_equilibrium", 1.0, "boundary_equilibrium",
    "boundary equilibrium with real eigenvalues (node for alpha = (1, 2, 3))",
    "X- = (1, 0, 1) by default: X- = (a, 0, 0) would be tangent to M",
))
_register(FamilyDescriptor(
    "boundary_equilibrium_complex",
    {"lambda": 0, "alpha": 1, "lambda1": -1, "a": 1, "b": 0, "c": 1},
    lambda p: _sys(
        (p["lambda1"] * X1, X1 + p["alpha"] * X2 + (X3 - p["lambda"]), -X2 + p["alpha"] * (X3 - p["lambda"])),
        (C(p["a"]), C(p["b"]), C(p["c"])),
    ),
    "Xi1_4", "Xi0_1", "lambda", "boundary_equilibrium", 1.0, "boundary_equilibrium",
    "boundary equilibrium with a complex pair alpha +- i (focus)",
    "unfolded by translating the equilibrium to (0, 0, lambda)",
))
_register(FamilyDescriptor(
    "boundary_equilibrium_complex_literal",
    {"lambda": 0, "alpha": 1, "lambda1": -1, "a": 1, "b": 0, "c": 1},
    lambda p: _sys(
        (p["lambda1"] * X1, X1 + p["alpha"] * X2 + X3, -X2 + X3 * (p["alpha"] - p["lambda"])),
        (C(p["a"]), C(p["b"]), C(p["c"])),
    ),
    "Xi1_4", "Xi1_4", "lambda", None, None, "boundary_equilibrium",
    "complex boundary equilibrium with the parameter entering the x3 coefficient",
    "the equilibrium stays on M for every lambda, so this curve does not unfold the singularity",
))

# ------------------------------------------------------- sliding equilibria
def _saddle_node_example(p):
    a = [p[f"a{i}"] for i in range(1, 9)]
    mu = p["mu"]
    if a[0] == 0:
        raise ValueError("saddle_node_example needs a1 != 0")
    xp = (a[0] * X1 + a[1] * X3 + a[0] * (a[0] + a[2]), a[3] * X3, a[4] * X3 - 1)
    xm = (mu + a[2] * X1 + a[5] * X3 - a[0] * (a[0] + a[2]), -X2 + a[6] * X3, -X1 / a[0] + a[7] * X3 + 1)
    return _sys(xp, xm)


_register(FamilyDescriptor(
    "saddle_node_example",
    {"mu": 0, "a1": 1, "a2": Fraction(1, 2), "a3": Fraction(1, 3), "a4": 1, "a5": 2, "a6": -1, "a7": Fraction(3, 2), "a8": 1},
    _saddle_node_example,
    "Xi1_5", "Xi0_1", "mu", "saddle_node", 1.0, "sliding_equilibrium",
    "linear pair with sliding field (mu - x1^2, -x2)",
    stated_sliding=lambda p: (p["mu"] - X1 ** 2, -X2),
))
_register(FamilyDescriptor(
    "saddle_node_swapped", {"lambda": 0},
    lambda p: _sys((-X1 - 1, p["lambda"] - X2 ** 2, C(-1)), (ONE, ZERO, ONE)),
    "Xi1_5", "Xi0_1", "lambda", "saddle_node", 1.0, "sliding_equilibrium",
    "saddle-node with the kernel along x2: sliding field (-x1, lambda - x2^2)",
    stated_sliding=lambda p: (-X1, p["lambda"] - X2 ** 2),
))
_register(FamilyDescriptor(
    "saddle_node_literal", {"lambda": 0},
    lambda p: _sys((-X2, X1 ** 2 - p["lambda"], ZERO), (ONE, ZERO, ONE)),
    "degenerate", "degenerate", "lambda", None, None, "regular",
    "saddle-node normal form with X+ = (-x2, x1^2 - lambda, 0) taken literally",
    "X+ is tangent to M everywhere (X+h = 0), so every point is a degenerate tangency",
))
_register(FamilyDescriptor(
    "saddle_node_nilpotent", {"lambda": 0},
    lambda p: _sys((-X2 - 1, X1 ** 2 - p["lambda"], C(-1)), (ONE, ZERO, ONE)),
    "degenerate", "Xi0_1", "lambda", None, None, "sliding_equilibrium",
    "realizes the stated sliding field (-x2, x1^2 - lambda) exactly",
    "its linear part at 0 is nilpotent, so the origin is not a saddle-node",
    stated_sliding=lambda p: (-X2, X1 ** 2 - p["lambda"]),
))
_register(FamilyDescriptor(
    "hopf_example", {"mu": 0},
    lambda p: _sys(
        (-X2 + X1 * (p["mu"] - 1), X1 + X2 * (p["mu"] - 1), R2 - 1),
        (X1, X2, ONE),
    ),
    "Xi1_6", "Xi0_1", "mu", "hopf", 2.0, "sliding_equilibrium",
    "Hopf pair whose sliding field is the classical Hopf normal form",
    stated_sliding=lambda p: (p["mu"] * X1 - X2 - X1 * R2, X1 + p["mu"] * X2 - X2 * R2),
))
_register(FamilyDescriptor(
    "hopf_normal_form", {"lambda": 0},
    lambda p: _sys(
        (p["lambda"] * X1 - X2 - X1 * R2 - 1, X1 + p["lambda"] * X2 - X2 * R2, C(-1)),
        (ONE, ZERO, ONE),
    ),
    "Xi1_6", "Xi0_1", "lambda", "hopf", 2.0, "sliding_equilibrium",
    "realizes the Hopf sliding normal form with X- = (1, 0, 1)",
    stated_sliding=lambda p: (p["lambda"] * X1 - X2 - X1 * R2, X1 + p["lambda"] * X2 - X2 * R2),
))
_register(FamilyDescriptor(
    "hopf_literal", {"lambda": 0},
    lambda p: _sys(
        (X1 + p["lambda"] * X2 - X2 * R2, -2 * p["lambda"] * X1 + X2 + X1 * R2, ZERO),
        (ONE, ZERO, ONE),
    ),
    "degenerate", "degenerate", "lambda", None, None, "regular",
    "Hopf normal form with the literal X+ (third component 0)",
    "X+h = 0 everywhere, so the sliding reduction does not apply",
    stated_sliding=lambda p: (p["lambda"] * X1 - X2 - X1 * R2, X1 + p["lambda"] * X2 - X2 * R2),
))
_register(FamilyDescriptor(
    "singular_continuum", {"a": -1, "b": 0, "c": -1},
    lambda p: _sys((X2, -2 * X1 - X2, X2 + 3 * X3), (C(p["a"]), C(p["b"]), C(p["c"]))),
    "degenerate", None, None, None, None, "boundary_equilibrium",
    "linear X+ with an isolated focus-saddle; with a = c the sliding field has a line of zeros",
    stated_sliding=lambda p: ((p["c"] - p["a"]) * X2, -2 * p["c"] * X1 - (p["b"] + p["c"]) * X2),
))

# ------------------------------------------------------------------ two-folds
_register(FamilyDescriptor(
    "twofold_quadratic", {"a": -1, "b": -2},
    lambda p: _sys((C(p["a"]), ONE, -X2), (ONE, C(p["b"]), X1)),
    "Xi0_4", None, None, None, None, "two_fold",
    "elliptic two-fold X+ = (a, 1, -x2), X- = (1, b, x1); return map trace 4ab - 2",
    "with a, b > 0 and |4ab - 2| > 2 the invariant lines of the return map leave the crossing region",
))
_register(FamilyDescriptor(
    "twofold_parabolic", {"a": -1, "b": 0},
    lambda p: _sys((C(p["a"]), ONE, -X2), (ONE, C(p["b"]), -X1)),
    "Xi0_4", None, None, None, None, "two_fold",
    "parabolic two-fold X+ = (a, 1, -x2), X- = (1, b, -x1)",
))
_register(FamilyDescriptor(
    "twofold_hyperbolic", {},
    lambda p: _sys((ZERO, ONE, X2), (ONE, ZERO, -X1)),
    "Xi0_4", None, None, None, None, "two_fold",
    "hyperbolic two-fold (both folds visible)",
))

# ------------------------------------------------------ degenerate / generic
_register(FamilyDescriptor(
    "appendix_null_sliding", {},
    lambda p: _sys((C(-1), ONE, C(-1)), (ONE, C(-1), ONE)),
    "degenerate", None, None, None, None, "regular",
    "constant opposite fields: the sliding field vanishes identically",
    stated_sliding=lambda p: (ZERO, ZERO),
))
_register(FamilyDescriptor(
    "crossing", {}, lambda p: _sys((ZERO, ZERO, ONE), (ZERO, ZERO, ONE)),
    "Xi0_1", None, None, None, None, "regular", "constant crossing pair",
))
_register(FamilyDescriptor(
    "sliding_regular", {}, lambda p: _sys((ONE, ZERO, C(-1)), (ZERO, ONE, ONE)),
    "Xi0_1", None, None, None, None, "regular", "stable sliding with nonvanishing sliding field",
))
_register(FamilyDescriptor(
    "fold_regular", {}, lambda p: _sys((ONE, ZERO, X1), (ZERO, ZERO, ONE)),
    "Xi0_2", None, None, None, None, "fold", "visible fold of X+ against a transversal X-",
))
_register(FamilyDescriptor(
    "cusp_regular", {}, lambda p: _sys((ONE, ZERO, X1 ** 2 + X2), (ZERO, ZERO, ONE)),
    "Xi0_3", None, None, None, None, "tangency", "cusp of X+ against a transversal X-",
))


def list_families() -> list[FamilyDescriptor]:
    return list(_REGISTRY.values())


def get_descriptor(name: str) -> FamilyDescriptor:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownFamilyError(f"unknown family {name!r}") from None


def family(name: str, **params) -> PiecewiseSystem:
    return get_descriptor(name).build(**params)


def roundtrip(sys: PiecewiseSystem) -> PiecewiseSystem:
    return system_from_json(system_to_json(sys))


def perturb_system(sys: PiecewiseSystem, rng: np.random.Generator, magnitude: float = 1e-4, max_degree: int = 2) -> PiecewiseSystem:
    """Add uniform(-magnitude, magnitude) to every monomial of degree <= max_degree in X+ and X-."""
    monos = [e for e in ((i, j, k) for i in range(max_degree + 1) for j in range(max_degree + 1) for k in range(max_degree + 1)) if sum(e) <= max_degree]

    def bump(X):
        out = []
        for comp in X:
            delta = Poly({e: float(rng.uniform(-magnitude, magnitude)) for e in monos})
            out.append(comp + delta)
        return tuple(out)

    return PiecewiseSystem(bump(sys.x_plus), bump(sys.x_minus), sys.h, sys.name + "~perturbed", dict(sys.meta))
