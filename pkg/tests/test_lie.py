import numpy as np
import pytest

from helpers import random_field, random_poly
from psvflab import classify as classify_mod
from psvflab.catalog import family
from psvflab.core import lie_derivative
from psvflab.lie import frame_rank, lie_tower, restricted_hessian_signature, tangent_basis
from psvflab.polynomial import X1, X2, X3, Poly

ONE, ZERO = Poly.const(1), Poly()


def test_fold_tower():
    t = lie_tower((ONE, ZERO, X1), X3, (0, 0, 0), 2)
    assert t.values == [0.0, 1.0]
    assert frame_rank(t) == 2


def test_lips_tower_and_hessian():
    t = lie_tower((ONE, ZERO, X1**2 + X2**2), X3, (0, 0, 0), 4)
    assert t.values[:3] == [0.0, 0.0, 2.0]
    assert t.det_frame == 0.0
    assert np.array_equal(t.restricted_hessian, np.diag([2.0, 2.0]))
    assert frame_rank(t) == 2


def test_swallowtail_tower():
    t = lie_tower((ONE, ZERO, X1**3 - X2), X3, (0, 0, 0), 4)
    assert t.values == [0.0, 0.0, 0.0, 6.0]


def test_lips_family_frame_rank_changes_with_lambda():
    s0 = family("lips", **{"lambda": 0})
    s1 = family("lips", **{"lambda": 0.1})
    assert frame_rank(lie_tower(s0.x_plus, s0.h, (0, 0, 0), 2)) == 2
    t1 = lie_tower(s1.x_plus, s1.h, (0, 0, 0), 2)
    assert np.allclose(t1.differentials[1], [0, 0.1, 0])
    assert frame_rank(t1) == 3


def test_hessian_signatures():
    lips = family("lips", **{"lambda": 0})
    beak = family("beak_to_beak", **{"lambda": 0})
    sl = restricted_hessian_signature(lie_tower(lips.x_plus, lips.h, (0, 0, 0), 3))
    sb = restricted_hessian_signature(lie_tower(beak.x_plus, beak.h, (0, 0, 0), 3))
    assert sl["det"] == 4.0 and sl["signature"] == "pos_def"
    assert sb["det"] == -4.0 and sb["signature"] == "indefinite"
    sd = restricted_hessian_signature(lie_tower((ONE, ZERO, X1**2), X3, (0, 0, 0), 3))
    assert sd["det"] == 0.0 and sd["signature"] == "degenerate"
    neg = restricted_hessian_signature(lie_tower((ONE, ZERO, -(X1**2) - X2**2), X3, (0, 0, 0), 3))
    assert neg["signature"] == "neg_def"


def test_restricted_hessian_is_symmetric_on_curved_surfaces():
    rng = np.random.default_rng(21)
    for _ in range(20):
        X = random_field(rng, 3)
        h = X3 - X1**3 - X1 * X2**2 + X1 * X2
        t = lie_tower(X, h, rng.uniform(-0.5, 0.5, 3), 3)
        assert np.array_equal(t.restricted_hessian, t.restricted_hessian.T)


def test_det_frame_flips_sign_when_rows_swap():
    rng = np.random.default_rng(22)
    for _ in range(20):
        t = lie_tower(random_field(rng, 3), X3 + random_poly(rng, 2), rng.uniform(-1, 1, 3), 2)
        swapped = np.vstack([t.differentials[0], t.differentials[2], t.differentials[1]])
        assert np.linalg.det(swapped) == pytest.approx(-t.det_frame, rel=1e-12, abs=1e-12)


def test_tangent_basis_is_orthonormal_and_tangent():
    rng = np.random.default_rng(23)
    for _ in range(50):
        g = rng.normal(size=3)
        B = tangent_basis(g)
        assert np.allclose(B.T @ B, np.eye(2), atol=1e-12)
        assert np.allclose(g @ B, 0, atol=1e-12)
    assert np.array_equal(tangent_basis(np.array([0, 0, 1.0])), np.eye(3)[:, :2])


def _ddx_along(X, f, eps):
    """Richardson-extrapolated central difference of f along the vector X(p)."""

    def g(p):
        v = np.array([c(p) for c in X])
        d1 = (f(p + eps * v) - f(p - eps * v)) / (2 * eps)
        d2 = (f(p + 0.5 * eps * v) - f(p - 0.5 * eps * v)) / eps
        return (4 * d2 - d1) / 3

    return g


def test_tower_values_match_nested_finite_differences():
    rng = np.random.default_rng(24)
    for _ in range(15):
        X = random_field(rng, 2, 0.5)
        h = X3 + random_poly(rng, 2, 0.4)
        p = rng.uniform(-0.5, 0.5, 3)
        t = lie_tower(X, h, p, 4)
        f = h
        for k in range(4):
            f = _ddx_along(X, f, 1e-2)
            exact = t.values[k]
            assert abs(f(p) - exact) <= 1e-6 * max(1.0, abs(exact)), (k, f(p), exact)


def test_tower_values_equal_exact_polynomial_iterates():
    rng = np.random.default_rng(25)
    for _ in range(20):
        X, h = random_field(rng, 3), X3 + random_poly(rng, 3)
        p = rng.uniform(-1, 1, 3)
        t = lie_tower(X, h, p, 4)
        f = h
        for k in range(4):
            f = lie_derivative(X, f)
            assert t.values[k] == pytest.approx(f(p), rel=1e-10, abs=1e-9)


def test_classifier_is_lazy_when_transversal(monkeypatch):
    depths = []
    real = classify_mod.lie_tower

    def spy(X, h, p, depth=4):
        depths.append(depth)
        return real(X, h, p, depth)

    monkeypatch.setattr(classify_mod, "lie_tower", spy)
    rng = np.random.default_rng(26)
    for _ in range(30):
        X = random_field(rng, 2)
        X = (X[0], X[1], X[2] + Poly.const(3))
        p = np.array([*rng.uniform(-0.2, 0.2, 2), 0.0])
        if abs(lie_derivative(X, X3)(p)) < 1e-3:
            continue
        depths.clear()
        classify_mod.classify_tangency(X, X3, p)
        assert depths and max(depths) == 1


def test_depth_errors():
    with pytest.raises(ValueError):
        lie_tower((ONE, ZERO, X1), X3, (0, 0, 0), 5)
    t = lie_tower((ONE, ZERO, X1), X3, (0, 0, 0), 1)
    assert t.det_frame is None
    with pytest.raises(IndexError):
        t.value(2)
