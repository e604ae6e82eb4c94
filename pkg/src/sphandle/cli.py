"""Command-line front end.

Exit codes: 0 success, 1 a mathematical check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import datetime
import json
import logging
import math
import os
import re
import sys

import numpy as np

from . import __version__, spherical, su2
from .correspondence import coloring_to_rep, equivalence_audit
from .errors import SphandleError
from .knots import resolve_knot, wirtinger
from .quandle import FiniteQuandle, check_axioms, dihedral, trivial
from .solver import ColoringClass, SolverConfig, SphericalColoring, classify, enumerate_finite, solve_spherical

log = logging.getLogger("sphandle")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        t = datetime.datetime.fromtimestamp(int(epoch), tz=datetime.timezone.utc)
    else:
        t = datetime.datetime.now(tz=datetime.timezone.utc)
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def manifest(command: str, knot: str | None = None, seed: int | None = None, **params) -> dict:
    return {
        "command": command,
        "knot": knot,
        "parameters": params,
        "version": __version__,
        "seed": seed,
        "timestamp": _timestamp(),
    }


def _dump(obj, out: str | None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _finite_quandle(source: str) -> FiniteQuandle:
    m = re.fullmatch(r"(dihedral|trivial)(\d+)", source)
    if m:
        return (dihedral if m.group(1) == "dihedral" else trivial)(int(m.group(2)))
    return FiniteQuandle.from_json(_load_json(source))


def _radius(args) -> float | None:
    if args.r_deg is not None:
        return math.radians(args.r_deg)
    return args.r


def _knot(args):
    if args.knot is None and args.pd is None:
        raise UsageError("one of --knot or --pd is required")
    return resolve_knot(args.knot, args.pd)


# ---------------------------------------------------------------- commands

def cmd_axioms(args) -> int:
    if args.table:
        q = FiniteQuandle.from_json(_load_json(args.table))
        source = args.table
    elif args.dihedral is not None:
        q, source = dihedral(args.dihedral), f"dihedral{args.dihedral}"
    else:
        q, source = trivial(args.trivial), f"trivial{args.trivial}"
    report = check_axioms(q)
    print(f"quandle {source} (n={q.n}): Q1 {'ok' if report.q1_ok else 'FAIL'}, "
          f"Q2 {'ok' if report.q2_ok else 'FAIL'}, Q3 {'ok' if report.q3_ok else 'FAIL'}")
    for axiom, witness in report.violations[:20]:
        print(f"  {axiom} violated at {witness}")
    return EXIT_OK if report.ok else EXIT_FAIL


def _solve(args, d, r):
    cfg = SolverConfig(starts=args.starts, seed=args.seed, tol_accept=args.tol, max_iters=args.max_iters)
    return cfg, solve_spherical(d, r, cfg)


def _coloring_payload(label, r, colorings, cfg, command):
    return {
        "knot": label,
        "r": r,
        "colorings": [c.to_json() for c in colorings],
        "orbits": len(colorings),
        "manifest": manifest(command, label, cfg.seed, r=r, config=cfg.to_json()),
    }


def cmd_color(args) -> int:
    label, d = _knot(args)
    r = _radius(args)
    if args.finite:
        q = _finite_quandle(args.finite)
        cols = enumerate_finite(d, q)
        payload = {
            "knot": label,
            "quandle": q.to_json(),
            "colorings": [list(c.assignment) for c in cols],
            "count": len(cols),
            "manifest": manifest("color", label, None, finite=args.finite),
        }
        _dump(payload, args.out)
        print(f"{len(cols)} colorings", file=sys.stderr)
        return EXIT_OK
    if r is None:
        raise UsageError("give --finite, --r or --r-deg")
    spherical.check_r(r)
    cfg, cols = _solve(args, d, r)
    _dump(_coloring_payload(label, r, cols, cfg, "color"), args.out)
    n_triv = sum(classify(c) is ColoringClass.TRIVIAL for c in cols)
    print(f"{len(cols)} orbits ({n_triv} TRIVIAL, {len(cols) - n_triv} NONTRIVIAL); "
          "multi-start search, not a completeness proof", file=sys.stderr)
    return EXIT_OK


def cmd_correspond(args) -> int:
    label, d = _knot(args)
    p = wirtinger(d)
    r = _radius(args)
    if args.from_colorings:
        data = _load_json(args.from_colorings)
        try:
            file_r = float(data["r"])
            raw = data["colorings"]
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{args.from_colorings}: not a colorings file ({exc})") from exc
        if r is not None and abs(r - file_r) > 1e-12:
            raise UsageError(f"--r {r} disagrees with r={file_r} in {args.from_colorings}")
        r = file_r
        spherical.check_r(r)
        cols = [SphericalColoring.from_json(c, r) for c in raw]
        seed = args.seed
        config = None
    else:
        if r is None:
            raise UsageError("give --r, --r-deg or --from-colorings")
        spherical.check_r(r)
        cfg, cols = _solve(args, d, r)
        seed, config = cfg.seed, cfg.to_json()

    entries, failed = [], []
    for k, c in enumerate(cols):
        if c.n_arcs != p.n_generators:
            raise UsageError(f"coloring {k} has {c.n_arcs} arcs, knot has {p.n_generators}")
        audit = equivalence_audit(c, p, seed=seed + k)
        rho = coloring_to_rep(c, p, strict=False)
        entries.append({
            "coloring": c.to_json(),
            "representation": rho.to_json(matrix=args.matrix),
            "audit": audit.to_json(),
        })
        for clause in audit.failed:
            failed.append(f"coloring {k}: {clause}")
    payload = {
        "knot": label,
        "r": r,
        "trace_target": 2.0 * math.cos(r),
        "results": entries,
        "ok": not failed,
        "manifest": manifest("correspond", label, seed, r=r, config=config, from_colorings=args.from_colorings),
    }
    _dump(payload, args.out)
    for f in failed:
        print(f"audit failure: {f}", file=sys.stderr)
    print(f"{len(cols)} colorings audited, {len(failed)} clause failures", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_FAIL


ISO_GRID = np.linspace(0.1, np.pi - 0.1, 20)


def cmd_isocheck(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    sign = -spherical.ROTATION_SIGN if args.flip_orientation else spherical.ROTATION_SIGN
    n, seed = args.samples, args.seed
    results = {
        "h_homomorphism": (spherical.h_homomorphism_residual(n, seed), 1e-12),
        "exp_h": (spherical.exp_h_residual(n, seed), 1e-12),
        "clark_saito": (max(spherical.clark_saito_consistency(r, min(n, 1000), seed + i, sign)
                            for i, r in enumerate(ISO_GRID)), 1e-10),
    }
    rot = [spherical.inner_rotation_report(r, min(n, 100), seed + i) for i, r in enumerate(ISO_GRID)]
    results["inner_orthogonal"] = (max(max(x["orthogonality"], x["determinant"], x["linearity"], x["composition"])
                                       for x in rot), 1e-10)
    results["inner_angle"] = (max(x["angle"] for x in rot), 1e-9)
    ok = True
    report = {}
    for name, (res, tol) in results.items():
        passed = bool(res < tol)
        ok &= passed
        report[name] = {"residual": float(res), "tolerance": tol, "ok": passed}
        print(f"{name:18s} {res:.3e} < {tol:.0e}  {'PASS' if passed else 'FAIL'}", file=sys.stderr)
    _dump({"checks": report, "ok": ok,
           "manifest": manifest("isocheck", None, seed, samples=n, flip_orientation=args.flip_orientation)},
          args.out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- parser

def _add_knot_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--knot", help="builtin knot name (unknot, trefoil, figure8, 5_1, 5_2, 6_1)")
    g.add_argument("--pd", help="PD code, e.g. '[[1,4,2,5],[3,6,4,1],[5,2,6,3]]'")


def _add_radius_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--r", type=float, help="radius r in radians, 0 < r < pi")
    g.add_argument("--r-deg", type=float, help="radius r in degrees")


def _add_solver_args(p):
    p.add_argument("--starts", type=int, default=SolverConfig.starts)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=SolverConfig.tol_accept, help="acceptance residual")
    p.add_argument("--max-iters", type=int, default=SolverConfig.max_iters)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sphandle", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("axioms", help="check Q1-Q3 on a finite quandle")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--table", help='JSON file {"n": int, "table": [[int]]}')
    g.add_argument("--dihedral", type=int, metavar="N")
    g.add_argument("--trivial", type=int, metavar="N")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("color", help="colorings of a knot by a finite or spherical quandle")
    _add_knot_args(p)
    p.add_argument("--finite", help="dihedralN, trivialN or a Cayley table JSON file")
    _add_radius_args(p)
    _add_solver_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("correspond", help="map colorings to SU(2) representations and audit")
    _add_knot_args(p)
    _add_radius_args(p)
    p.add_argument("--from-colorings", metavar="FILE")
    _add_solver_args(p)
    p.add_argument("--matrix", action="store_true", help="also emit SU(2) matrices")
    p.add_argument("--out")
    p.set_defaults(func=cmd_correspond)

    p = sub.add_parser("isocheck", help="sample the isomorphisms between spherical quandles")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--flip-orientation", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_isocheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, SphandleError) as exc:
        print(f"sphandle {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
