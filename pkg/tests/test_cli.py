import csv
import io
import json
import re
import subprocess
import sys

import pytest

from psvflab.catalog import family, list_families
from psvflab.cli import main
from psvflab.core import PiecewiseSystem, save_system
from psvflab.polynomial import Poly


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def slope_from(err):
    m = re.search(r"fitted d\(eta\)/d\(lambda\) = (\S+)", err)
    return float(m.group(1)) if m else None


def test_classify_swallowtail(capsys):
    code, out, _ = run(capsys, "classify", "--family", "swallowtail", "--param", "lambda=0")
    assert code == 0
    assert json.loads(out)["verdict"] == "Xi1_3"


def test_classify_null_sliding_degenerate(capsys):
    code, out, _ = run(capsys, "classify", "--family", "appendix_null_sliding")
    rep = json.loads(out)
    assert code == 0
    assert rep["verdict"] == "degenerate" and rep["degenerate"]
    assert "sliding field identically null" in rep["reason"]


def test_classify_bad_system_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"x_plus": ["1", "0", "0"], "x_minus": ["0", "0", "1"]}))
    code, _, err = run(capsys, "classify", "--system", str(bad))
    assert code == 2
    assert "h" in err


def test_classify_system_file(capsys, tmp_path):
    path = tmp_path / "fold.json"
    save_system(family("fold_regular"), path)
    code, out, _ = run(capsys, "classify", "--system", str(path))
    assert code == 0 and json.loads(out)["verdict"] == "Xi0_2"


@pytest.mark.parametrize(
    "argv",
    [
        ("classify", "--family", "nope"),
        ("classify", "--family", "lips", "--param", "lambda"),
        ("classify", "--family", "lips", "--param", "lambda=abc"),
        ("classify", "--family", "lips", "--system", "x.json"),
        ("classify",),
        ("classify", "--family", "lips", "--point", "0,0,1"),
        ("classify", "--system", "/nonexistent/file.json"),
        ("unfold", "--family", "crossing"),
        ("unfold", "--family", "lips", "--grid", "0:1"),
        ("twofold", "--family", "fold_regular"),
        ("twofold", "--family", "twofold_hyperbolic"),
        ("flow", "--family", "crossing"),
        ("catalog", "export"),
        ("classify", "--family", "lips", "--zero-eps", "-1"),
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_unfold_lips_slope(capsys):
    code, out, err = run(capsys, "unfold", "--family", "lips", "--grid", "-0.1:0.1:21")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 21
    assert slope_from(err) == pytest.approx(-2.0, abs=1e-4)


def test_unfold_hopf_slope(capsys):
    code, out, err = run(capsys, "unfold", "--family", "hopf_example", "--grid", "-0.1:0.1:21")
    assert code == 0
    assert len(out.splitlines()) == 22
    assert slope_from(err) == pytest.approx(2.0, abs=1e-4)


def test_unfold_single_point(capsys):
    code, out, err = run(capsys, "unfold", "--family", "lips", "--grid", "0:0:1")
    assert code == 0
    assert len(out.splitlines()) == 2
    assert "no slope" in err


def test_unfold_json(capsys):
    code, out, _ = run(capsys, "unfold", "--family", "swallowtail", "--grid", "-0.1:0.1:5", "--format", "json")
    rep = json.loads(out)
    assert [r["verdict"] for r in rep["records"]] == ["Xi0_3", "Xi0_3", "Xi1_3", "Xi0_3", "Xi0_3"]
    assert rep["slope"] == pytest.approx(2.0, abs=1e-8)


def _fold_file(tmp_path):
    path = tmp_path / "fold.json"
    save_system(family("fold_regular"), path)
    return str(path)


def _segments(out):
    return sorted({int(r["segment_index"]) for r in csv.DictReader(io.StringIO(out))})


def test_flow_fold_exit_three_segments(capsys, tmp_path):
    code, out, err = run(capsys, "flow", "--system", _fold_file(tmp_path), "--point", "-2,0,0.5", "--tmax", "5")
    assert code == 0
    assert _segments(out) == [0, 1, 2]
    assert "3 segment(s)" in err
    govs = [r["governing"] for r in csv.DictReader(io.StringIO(out))]
    assert govs[0] == "X_plus" and "sliding" in govs and govs[-1] == "X_plus"


def test_flow_crossing_two_segments(capsys):
    code, out, err = run(capsys, "flow", "--family", "crossing", "--point", "0,0,-0.5", "--tmax", "1")
    assert code == 0
    assert _segments(out) == [0, 1]


def test_flow_chattering_exit_1(capsys, tmp_path):
    x3, x1 = Poly.var(2), Poly.var(0)
    centre = (x3, Poly(), -x1)
    path = tmp_path / "centre.json"
    save_system(PiecewiseSystem(centre, centre, x3, "centre"), path)
    code, out, err = run(capsys, "flow", "--system", str(path), "--point", "1,0,0.5", "--tmax", "20", "--max-hits", "3")
    assert code == 1
    assert "chattering" in err
    assert out.startswith("t,x1,x2,x3")


def test_flow_json(capsys):
    code, out, _ = run(capsys, "flow", "--family", "crossing", "--point", "0,0,-0.5", "--tmax", "1", "--format", "json")
    rep = json.loads(out)
    assert rep["status"] == "ok"
    assert [s["governing"] for s in rep["segments"]] == ["X_minus", "X_plus"]


def test_twofold_saddle(capsys):
    code, out, _ = run(capsys, "twofold", "--family", "twofold_quadratic", "--param", "a=1", "--param", "b=2")
    rep = json.loads(out)
    assert code == 0
    assert rep["two_fold"] == "elliptic"
    assert rep["return_map"]["type"] == "saddle"
    assert rep["return_map"]["det"] == pytest.approx(1.0, abs=1e-6)
    assert rep["condition_E"]["flags"]["saddle"]


@pytest.mark.parametrize("b, kind", [("1/2", "elliptic"), ("1", "parabolic_boundary")])
def test_twofold_other_types(capsys, b, kind):
    code, out, _ = run(capsys, "twofold", "--family", "twofold_quadratic", "--param", "a=1", "--param", f"b={b}")
    rep = json.loads(out)
    assert code == 0
    assert rep["return_map"]["type"] == kind
    assert not rep["condition_E"]["passed"]


def test_sliding_text(capsys):
    code, out, _ = run(capsys, "sliding", "--family", "hopf_example", "--param", "mu=0")
    assert code == 0
    assert "X^s_1 =" in out and "planar_2(x1, x2) =" in out


def test_sliding_json(capsys):
    code, out, _ = run(capsys, "sliding", "--family", "appendix_null_sliding", "--format", "json")
    assert json.loads(out)["identically_null"] is True


def test_catalog_list_and_export(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0
    assert len(out.splitlines()) == len(list_families())
    code, out, _ = run(capsys, "catalog", "export", "lips", "--param", "lambda=1/10")
    assert code == 0
    assert json.loads(out)["name"] == "lips"


def test_byte_identical_outputs(capsys, tmp_path):
    for argv in (
        ("unfold", "--family", "swallowtail"),
        ("flow", "--system", _fold_file(tmp_path), "--point", "-2,0,0.5", "--tmax", "5"),
        ("classify", "--family", "hopf_example"),
    ):
        a, b = tmp_path / "a.out", tmp_path / "b.out"
        assert main([*argv, "--out", str(a)]) in (0, 1)
        assert main([*argv, "--out", str(b)]) in (0, 1)
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "psvflab", "catalog", "list"], capture_output=True, text=True, check=True)
    assert "lips\tXi1_1" in res.stdout
