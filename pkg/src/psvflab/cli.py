"""Command-line front end: psvflab {classify,unfold,flow,twofold,sliding,catalog}."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .bifurcate import fitted_slope, sweep_to_csv, unfold_sweep
from .catalog import UnknownFamilyError, get_descriptor, list_families
from .classify import _jsonable, check_E, classify_psvf, classify_two_fold
from .core import DEFAULT_TOL, NotOnSurfaceError, PiecewiseSystem, ToleranceConfig, load_system, system_to_json
from .flow import integrate, trajectory_to_csv
from .sliding import sliding_field
from .twofold import return_linearization

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Malformed command-line input; reported with exit code 2."""


# ----------------------------------------------------------------- parsing
def _parse_param(text: str) -> tuple[str, Fraction]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise InputError(f"--param expects k=v, got {text!r}")
    try:
        return key.strip(), Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"--param {key}: {value!r} is not a rational number") from None


def _parse_point(text: str | None, default=(0.0, 0.0, 0.0)) -> np.ndarray:
    if text is None:
        return np.array(default, dtype=float)
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"--point expects x,y,z, got {text!r}") from None
    if len(vals) != 3:
        raise InputError(f"--point expects three coordinates, got {len(vals)}")
    return np.array(vals)


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"--grid expects a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"--grid expects a:b:n, got {text!r}") from None
    if n < 1:
        raise InputError("--grid needs n >= 1")
    return np.array([a]) if n == 1 else np.linspace(a, b, n)


def _tolerances(args) -> ToleranceConfig:
    try:
        return DEFAULT_TOL.with_(zero_eps=args.zero_eps, event_tol=args.event_tol, max_surface_hits=args.max_hits)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _system(args) -> PiecewiseSystem:
    if (args.family is None) == (args.system is None):
        raise InputError("give exactly one system source: --family NAME or --system FILE")
    if args.system is not None:
        if args.param:
            raise InputError("--param applies only to catalog families")
        try:
            return load_system(args.system)
        except FileNotFoundError:
            raise InputError(f"system file not found: {args.system}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.system}: invalid JSON ({exc})") from None
        except (ValueError, TypeError) as exc:
            raise InputError(f"{args.system}: {exc}") from None
    try:
        return get_descriptor(args.family).build(**dict(_parse_param(p) for p in args.param))
    except UnknownFamilyError as exc:
        raise InputError(str(exc.args[0])) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------- commands
def cmd_classify(args) -> int:
    tol = _tolerances(args)
    sysm = _system(args)
    p = _parse_point(args.point)
    try:
        report = classify_psvf(sysm, p, tol).to_dict()
    except NotOnSurfaceError as exc:
        raise InputError(str(exc)) from None
    _emit(_json(report), args.out)
    return EXIT_OK


def cmd_unfold(args) -> int:
    tol = _tolerances(args)
    if args.family is None:
        raise InputError("unfold needs --family")
    grid = _parse_grid(args.grid)
    params = dict(_parse_param(p) for p in args.param)
    try:
        records = unfold_sweep(args.family, grid, tol, params)
    except UnknownFamilyError as exc:
        raise InputError(str(exc.args[0])) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    slope = fitted_slope(records)
    if args.format == "json":
        rows = [
            {
                "lambda": r.lam,
                "organizing_point": r.organizing_point,
                "eta": r.eta,
                "verdict": r.verdict_name,
                "converged": r.converged,
                "message": r.message,
            }
            for r in records
        ]
        _emit(_json({"family": args.family, "records": rows, "slope": slope}), args.out)
    else:
        _emit(sweep_to_csv(records), args.out)
    if slope is None:
        print(f"{len(records)} row(s); no slope (fewer than two converged rows)", file=sys.stderr)
    else:
        print(f"{len(records)} row(s); fitted d(eta)/d(lambda) = {slope:.10g}", file=sys.stderr)
    return EXIT_OK if all(r.converged for r in records) else EXIT_NUMERIC


def cmd_flow(args) -> int:
    tol = _tolerances(args)
    sysm = _system(args)
    if args.point is None:
        raise InputError("flow needs an initial point --point x,y,z")
    traj = integrate(sysm, _parse_point(args.point), args.tmax, tol)
    if args.format == "json":
        segs = [
            {
                "governing": s.governing,
                "entry_event": s.entry_event,
                "exit_event": s.exit_event,
                "region": s.region,
                "t": [float(s.times[0]), float(s.times[-1])],
                "start": s.states[0],
                "end": s.states[-1],
                "notes": s.notes,
            }
            for s in traj.segments
        ]
        _emit(_json({"status": traj.status, "diagnostic": traj.diagnostic, "segments": segs}), args.out)
    else:
        _emit(trajectory_to_csv(traj), args.out)
    print(traj.summary(), file=sys.stderr)
    return EXIT_OK if traj.status == "ok" else EXIT_NUMERIC


def cmd_twofold(args) -> int:
    tol = _tolerances(args)
    sysm = _system(args)
    p = _parse_point(args.point)
    try:
        kind = classify_two_fold(sysm, p, tol)
    except (ValueError, NotOnSurfaceError) as exc:
        raise InputError(str(exc)) from None
    report: dict = {"two_fold": kind}
    if kind != "elliptic":
        raise InputError(f"the first return map needs an elliptic two-fold, got {kind}")
    try:
        report["return_map"] = return_linearization(sysm, tol, point=p[:2]).to_dict()
        report["condition_E"] = check_E(sysm, tol, p).to_dict()
    except ValueError as exc:
        print(f"numeric diagnostic: {exc}", file=sys.stderr)
        _emit(_json(report), args.out)
        return EXIT_NUMERIC
    _emit(_json(report), args.out)
    return EXIT_OK


def cmd_sliding(args) -> int:
    sysm = _system(args)
    sf = sliding_field(sysm)
    report = {
        "rescaled": bool(sf.rescaled),
        "spatial": [str(c) for c in sf.spatial],
        "planar": None if sf.planar is None else [str(c) for c in sf.planar],
        "identically_null": sf.is_identically_null(),
    }
    if args.format == "json":
        _emit(_json(report), args.out)
    else:
        lines = [f"X^s_{k + 1} = {c}" for k, c in enumerate(report["spatial"])]
        if report["planar"] is not None:
            lines += [f"planar_{k + 1}(x1, x2) = {c}" for k, c in enumerate(report["planar"])]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.action == "list":
        rows = [d.summary() for d in list_families()]
        if args.format == "json":
            _emit(_json(rows), args.out)
        else:
            _emit("".join(f"{r['name']}\t{r['expected_verdict_at_zero']}\t{r['origin']}\n" for r in rows), args.out)
        return EXIT_OK
    if args.name is None:
        raise InputError("catalog export needs a family name")
    try:
        sysm = get_descriptor(args.name).build(**dict(_parse_param(p) for p in args.param))
    except UnknownFamilyError as exc:
        raise InputError(str(exc.args[0])) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(json.dumps(system_to_json(sysm), indent=2) + "\n", args.out)
    return EXIT_OK


# ------------------------------------------------------------------ parser
def _common(p: argparse.ArgumentParser, source=True, fmt=("json",)) -> None:
    if source:
        p.add_argument("--family", help="catalog family name")
        p.add_argument("--system", help="JSON system file (psvf-core schema)")
    p.add_argument("--param", action="append", default=[], metavar="K=V", help="family parameter (repeatable)")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=fmt, default=fmt[0])
    p.add_argument("--zero-eps", type=float, default=None, help=f"default {DEFAULT_TOL.zero_eps}")
    p.add_argument("--event-tol", type=float, default=None, help=f"default {DEFAULT_TOL.event_tol}")
    p.add_argument("--max-hits", type=int, default=None, help=f"chattering guard, default {DEFAULT_TOL.max_surface_hits}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psvflab", description="Analysis of 3D Filippov piecewise smooth vector fields.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a point of the switching surface")
    _common(p)
    p.add_argument("--point", help="x,y,z on M (default origin)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("unfold", help="sweep a family's unfolding parameter")
    _common(p, source=False, fmt=("csv", "json"))
    p.add_argument("--family", required=True)
    p.add_argument("--grid", default="-0.1:0.1:21", help="a:b:n (default -0.1:0.1:21)")
    p.set_defaults(func=cmd_unfold)

    p = sub.add_parser("flow", help="integrate a Filippov trajectory")
    _common(p, fmt=("csv", "json"))
    p.add_argument("--point", help="initial point x,y,z")
    p.add_argument("--tmax", type=float, default=10.0)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("twofold", help="first return map at an elliptic two-fold")
    _common(p)
    p.add_argument("--point", help="two-fold point x,y,z (default origin)")
    p.set_defaults(func=cmd_twofold)

    p = sub.add_parser("sliding", help="print the sliding vector field polynomials")
    _common(p, fmt=("text", "json"))
    p.set_defaults(func=cmd_sliding)

    p = sub.add_parser("catalog", help="list or export catalog families")
    p.add_argument("action", choices=("list", "export"))
    p.add_argument("name", nargs="?")
    _common(p, source=False, fmt=("text", "json"))
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # "--grid -0.1:0.1:21" or "--point -1,0,0" would otherwise be read as an unknown option
    for i in range(len(argv) - 1):
        if argv[i] in ("--grid", "--point"):
            argv[i : i + 2] = [f"{argv[i]}={argv[i + 1]}", ""]
    args = parser.parse_args([a for a in argv if a != ""])
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
