import json

import numpy as np
import pytest

from helpers import random_system
from psvflab.catalog import family
from psvflab.core import (
    DEFAULT_TOL,
    NotOnSurfaceError,
    PiecewiseSystem,
    RegionTag,
    ToleranceConfig,
    load_system,
    on_switching_surface,
    project_to_surface,
    region_of,
    save_system,
    system_from_json,
    system_to_json,
)
from psvflab.polynomial import X1, X2, X3, Poly

ONE, ZERO = Poly.const(1), Poly()


def _sys(xp, xm, h=X3):
    return PiecewiseSystem(tuple(Poly.const(c) if not isinstance(c, Poly) else c for c in xp),
                           tuple(Poly.const(c) if not isinstance(c, Poly) else c for c in xm), h)


def test_region_examples():
    assert region_of(_sys((1, 0, -1), (0, 1, 1)), (0, 0, 0)) == RegionTag.STABLE_SLIDING
    assert region_of(_sys((0, 0, 1), (0, 0, 1)), (0, 0, 0)) == RegionTag.CROSSING_UP
    assert region_of(_sys((ONE, ZERO, X1), (0, 0, 1)), (0, 0, 0)) == RegionTag.TANGENTIAL_PLUS


def test_region_covers_all_sign_patterns():
    assert region_of(_sys((0, 0, -1), (0, 0, -1)), (0, 0, 0)) == RegionTag.CROSSING_DOWN
    assert region_of(_sys((0, 0, 1), (0, 0, -1)), (0, 0, 0)) == RegionTag.UNSTABLE_SLIDING
    assert region_of(_sys((0, 0, 1), (1, 0, 0)), (0, 0, 0)) == RegionTag.TANGENTIAL_MINUS
    assert region_of(_sys((1, 0, 0), (1, 0, 0)), (0, 0, 0)) == RegionTag.TANGENTIAL_BOTH
    tie = _sys((0, 0, 1e-12), (0, 0, 1))
    assert region_of(tie, (0, 0, 0)).is_tangential


def test_region_of_rejects_points_off_the_surface():
    with pytest.raises(NotOnSurfaceError):
        region_of(_sys((0, 0, 1), (0, 0, 1)), (0, 0, 0.5))


def test_region_invariant_under_positive_rescaling():
    rng = np.random.default_rng(11)
    for _ in range(50):
        s = random_system(rng, 2)
        cp, cm = float(rng.uniform(0.1, 10)), float(rng.uniform(0.1, 10))
        scaled = PiecewiseSystem(tuple(cp * c for c in s.x_plus), tuple(cm * c for c in s.x_minus), s.h)
        p = np.array([*rng.uniform(-1, 1, 2), 0.0])
        assert region_of(s, p) == region_of(scaled, p)


def test_on_switching_surface_examples():
    flat = _sys((0, 0, 1), (0, 0, 1))
    assert on_switching_surface(flat, (1, 2, 0))[0]
    ok, proj = on_switching_surface(flat, (0, 0, 0.1), DEFAULT_TOL.with_(zero_eps=1e-9))
    assert not ok and np.allclose(proj, 0)
    curved = _sys((0, 0, 1), (0, 0, 1), X3 - (X1**3 + X1 * X2**2))
    assert on_switching_surface(curved, (0.1, 0.2, 0.1 * (0.01 + 0.04)))[0]


def test_projection_step_is_quadratic():
    curved = _sys((0, 0, 1), (0, 0, 1), X3 - (X1**3 + X1 * X2**2) - X1**2)
    p = np.array([0.3, -0.2, 0.0])
    _, q1 = on_switching_surface(curved, p)
    _, q2 = on_switching_surface(curved, q1)
    e0, e1, e2 = abs(curved.h(p)), abs(curved.h(q1)), abs(curved.h(q2))
    assert e1 < e0 and e2 <= 10 * e1**2


def test_projection_converges_on_curved_catalog_surfaces():
    rng = np.random.default_rng(12)
    for name in ("lips_curved", "beak_curved", "swallowtail_curved"):
        s = family(name)
        done = 0
        while done < 100:
            p = rng.uniform(-1, 1, size=3)
            if abs(s.h(p)) >= 0.1:
                continue
            q = project_to_surface(s, p)
            assert abs(s.h(q)) <= DEFAULT_TOL.newton_tol
            done += 1


def test_vanishing_gradient_is_an_error():
    s = _sys((0, 0, 1), (0, 0, 1), X3**2 + X3)
    with pytest.raises(ValueError, match="gradient"):
        on_switching_surface(s, (0, 0, -0.5))


def test_tolerances_must_be_positive():
    with pytest.raises(ValueError):
        ToleranceConfig(zero_eps=0)
    with pytest.raises(ValueError):
        DEFAULT_TOL.with_(event_tol=-1.0)
    assert DEFAULT_TOL.with_(zero_eps=None) == DEFAULT_TOL


def test_json_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(13)
    s = random_system(rng, 3, curved=True)
    s = PiecewiseSystem(tuple(c + Poly({(1, 0, 0): 0.1}) for c in s.x_plus), s.x_minus, s.h, "float coeffs")
    back = system_from_json(json.loads(json.dumps(system_to_json(s))))
    assert back == s
    path = tmp_path / "sys.json"
    save_system(s, path)
    assert load_system(path) == s


def test_json_missing_keys_are_reported():
    with pytest.raises(ValueError, match="'h'"):
        system_from_json({"x_plus": [[], [], []], "x_minus": [[], [], []]})
    with pytest.raises(ValueError):
        system_from_json({"h": [], "x_plus": [[], []], "x_minus": [[], [], []]})
    with pytest.raises(ValueError):
        system_from_json([1, 2])


def test_constant_switching_function_rejected():
    with pytest.raises(ValueError):
        PiecewiseSystem((ONE, ONE, ONE), (ONE, ONE, ONE), Poly.const(2))
