import csv
import io

import numpy as np
import pytest

from psvflab.bifurcate import (
    eta_boundary_equilibrium,
    eta_hopf,
    eta_lips_beak,
    eta_saddle_node,
    eta_swallowtail,
    fitted_slope,
    locate_organizing_point,
    sweep_to_csv,
    unfold_sweep,
)
from psvflab.catalog import UnknownFamilyError, family, get_descriptor, list_families
from psvflab.core import DEFAULT_TOL

GRID = np.linspace(-0.1, 0.1, 21)
UNFOLDING = [d.name for d in list_families() if d.eta_kind is not None]
# closed-form eta(lambda) along each family, from solving the defining equations by hand
CLOSED_FORM = {
    "lips": lambda l: -2 * l,
    "beak_to_beak": lambda l: -2 * l,
    "swallowtail": lambda l: 2 * l,
    "boundary_equilibrium_real": lambda l: l,
    "boundary_equilibrium_complex": lambda l: l,
    "saddle_node_example": lambda l: l,
    "saddle_node_swapped": lambda l: l,
    "hopf_example": lambda l: 2 * l,
    "hopf_normal_form": lambda l: 2 * l,
}


def test_eta_lips_closed_form():
    for lam in (-0.1, 0.0, 0.07):
        p, eta = eta_lips_beak(family("lips", **{"lambda": lam}))
        assert np.allclose(p, 0.0, atol=1e-12)
        assert eta == pytest.approx(-2 * lam, abs=1e-12)


def test_eta_swallowtail_closed_form():
    p, eta = eta_swallowtail(family("swallowtail", **{"lambda": 0.1}))
    assert eta == pytest.approx(0.2, abs=1e-10)
    # the second branch x1 = -2 lambda / 3 carries the opposite sign
    p2, eta2 = eta_swallowtail(family("swallowtail", **{"lambda": 0.1}), seed=(-0.07, 0.0, 0.0))
    assert p2[0] == pytest.approx(-0.2 / 3, abs=1e-10)
    assert eta2 == pytest.approx(-0.2, abs=1e-10)


def test_eta_boundary_equilibrium_height():
    p, eta = eta_boundary_equilibrium(family("boundary_equilibrium_real", **{"lambda": 0.03}))
    assert np.allclose(p, (0, 0, 0.03), atol=1e-12)
    assert eta == pytest.approx(0.03, abs=1e-12)


def test_eta_saddle_node_both_orientations():
    u, eta = eta_saddle_node(family("saddle_node_example", mu=0.04))
    assert np.allclose(u, 0.0, atol=1e-9)
    assert eta == pytest.approx(0.04, abs=1e-10)
    u, eta = eta_saddle_node(family("saddle_node_swapped", **{"lambda": -0.04}))
    assert eta == pytest.approx(-0.04, abs=1e-10)


def test_eta_hopf_trace():
    u, eta = eta_hopf(family("hopf_example", mu=0.1))
    assert np.allclose(u, 0.0, atol=1e-12)
    assert eta == pytest.approx(0.2, abs=1e-12)


@pytest.mark.parametrize("name", sorted(CLOSED_FORM))
def test_sweeps_match_closed_forms(name):
    recs = unfold_sweep(name, GRID)
    assert len(recs) == 21
    assert all(r.converged for r in recs)
    for r in recs:
        assert r.eta == pytest.approx(CLOSED_FORM[name](r.lam), abs=1e-8)


@pytest.mark.parametrize(
    "name, minus, zero, plus",
    [
        ("lips", "Xi0_3", "Xi1_1", "Xi0_3"),
        ("beak_to_beak", "Xi0_3", "Xi1_2", "Xi0_3"),
        ("swallowtail", "Xi0_3", "Xi1_3", "Xi0_3"),
        ("boundary_equilibrium_real", "Xi0_1", "Xi1_4", "Xi0_1"),
        ("saddle_node_example", "Xi0_1", "Xi1_5", "Xi0_1"),
        ("hopf_example", "Xi0_1", "Xi1_6", "Xi0_1"),
    ],
)
def test_sweep_verdicts(name, minus, zero, plus):
    recs = unfold_sweep(name, GRID)
    names = [r.verdict_name for r in recs]
    assert set(names[:10]) == {minus}
    assert names[10] == zero
    assert set(names[11:]) == {plus}


@pytest.mark.parametrize("name", UNFOLDING)
def test_sign_separation_and_isolated_zero(name):
    recs = unfold_sweep(name, GRID)
    pos = {r.verdict_name for r in recs if r.eta > DEFAULT_TOL.zero_eps}
    neg = {r.verdict_name for r in recs if r.eta < -DEFAULT_TOL.zero_eps}
    assert len(pos) == 1 and len(neg) == 1
    zeros = [i for i, r in enumerate(recs) if abs(r.eta) <= DEFAULT_TOL.zero_eps]
    assert zeros == [int(np.argmin(np.abs(GRID)))]
    assert recs[zeros[0]].verdict_name == get_descriptor(name).expected_verdict_at_zero


@pytest.mark.parametrize("name", UNFOLDING)
def test_finite_difference_slope(name):
    d = get_descriptor(name)
    step = 1e-3
    (r0, r1) = unfold_sweep(name, [-step, step])
    slope = (r1.eta - r0.eta) / (2 * step)
    assert slope == pytest.approx(d.eta_slope, rel=1e-6)
    assert fitted_slope(unfold_sweep(name, GRID)) == pytest.approx(d.eta_slope, rel=1e-6)


@pytest.mark.parametrize("name", UNFOLDING)
def test_organizing_point_continuation(name):
    recs = unfold_sweep(name, GRID)
    dl = GRID[1] - GRID[0]
    for a, b in zip(recs, recs[1:]):
        assert np.linalg.norm(a.organizing_point - b.organizing_point) <= 5 * dl


def test_single_point_grid_has_no_slope():
    recs = unfold_sweep("lips", [0.0])
    assert len(recs) == 1
    assert fitted_slope(recs) is None


def test_sweep_csv_columns_and_determinism():
    a = sweep_to_csv(unfold_sweep("swallowtail", GRID))
    b = sweep_to_csv(unfold_sweep("swallowtail", GRID))
    assert a == b
    rows = list(csv.DictReader(io.StringIO(a)))
    assert list(rows[0]) == ["lambda", "x1", "x2", "x3", "eta", "verdict", "converged"]
    assert len(rows) == 21
    assert rows[10]["verdict"] == "Xi1_3"
    assert float(rows[0]["eta"]) == pytest.approx(-0.2, abs=1e-8)


def test_sweep_errors():
    with pytest.raises(UnknownFamilyError):
        unfold_sweep("no_such_family", GRID)
    with pytest.raises(ValueError):
        unfold_sweep("crossing", GRID)


def test_saddle_node_eta_defined_without_equilibria():
    # for mu < 0 there is no pseudo-equilibrium, yet g = mu - z1^2 still has its critical point
    recs = unfold_sweep("saddle_node_example", [-0.05])
    assert recs[0].converged and not recs[0].message
    assert recs[0].eta == pytest.approx(-0.05, abs=1e-10)
    assert recs[0].verdict_name == "Xi0_1"


def test_locate_organizing_point():
    s = family("lips")
    # double root in x2 at the lips point: Newton converges only linearly there
    assert np.allclose(locate_organizing_point(s, "tangency", (0.01, 0.02, 0.0)), 0.0, atol=1e-5)
    s = family("boundary_equilibrium_real", **{"lambda": 0.02})
    assert np.allclose(locate_organizing_point(s, "boundary_equilibrium"), 0.0, atol=1e-9)
    s = family("twofold_quadratic")
    assert np.allclose(locate_organizing_point(s, "two_fold", (0.01, -0.01, 0.0)), 0.0, atol=1e-9)
    s = family("saddle_node_example", mu=-0.01)
    assert locate_organizing_point(s, "sliding_equilibrium") is None
