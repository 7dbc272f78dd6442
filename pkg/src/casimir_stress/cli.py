"""Command-line front end.

Subcommands
-----------
stress     sigma_zz on a z grid, written as CSV or JSON
edge-law   closed-form near-edge stress for a list of distances
compare    numeric stress against the sum of near-edge laws
validate   run the invariant suite and print a JSON pass/fail list

Exit status: 0 success, 1 error, 2 results written but some points did not
converge.  The default worker count is read from ``CASIMIR_WORKERS``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from casimir_stress import __version__
from casimir_stress.analytic import EdgeLaw, edge_law_sum, near_edge_stress
from casimir_stress.profile import DomainError, ValidationError, detect_edges, load_profile
from casimir_stress.stress import RADIAL_SCHEMES, QuadratureParams, stress_profile

UNITS = "hbar = c = 1; z in L; sigma_zz in hbar*c/L^4"
EXIT_OK, EXIT_ERROR, EXIT_FLAGGED = 0, 1, 2


def _num(x: float) -> str:
    """Shortest round-tripping representation; stable across runs."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _grid(args, profile):
    if args.z:
        zs = np.array(args.z, dtype=float)
    else:
        if args.zmin is None or args.zmax is None:
            raise ValueError("give either --z or both --zmin and --zmax")
        if args.points < 1:
            raise ValueError("--points must be positive")
        if not args.zmin < args.zmax and args.points > 1:
            raise ValueError("need zmin < zmax")
        zs = np.linspace(args.zmin, args.zmax, args.points)
    for z in zs:
        profile.domain_check(float(z))
    return zs


def _params(args) -> QuadratureParams:
    return QuadratureParams(
        rtol=args.rtol,
        n_theta=args.n_theta,
        radial=args.radial,
        w_max=math.inf if args.w_max is None else args.w_max,
        max_evaluations=args.max_evaluations,
    )


def _write(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _format(args):
    if args.format:
        return args.format
    if args.out and args.out.lower().endswith(".json"):
        return "json"
    return "csv"


def _csv_text(meta: dict, header, rows) -> str:
    buf = io.StringIO()
    for key, val in meta.items():
        buf.write(f"# {key}: {json.dumps(val, sort_keys=True)}\r\n")
    wr = csv.writer(buf, lineterminator="\r\n")
    wr.writerow(header)
    wr.writerows(rows)
    return buf.getvalue()


def _json_text(meta: dict, header, rows) -> str:
    doc = dict(meta)
    doc["columns"] = list(header)
    doc["rows"] = [dict(zip(header, r)) for r in rows]
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(args, meta, header, rows, json_rows):
    if _format(args) == "json":
        _write(_json_text(meta, header, json_rows), args.out)
    else:
        _write(_csv_text(meta, header, rows), args.out)


def cmd_stress(args) -> int:
    profile = load_profile(args.profile)
    zs = _grid(args, profile)
    res = stress_profile(profile, zs, _params(args), workers=args.workers)
    meta = {**res.metadata, "units": UNITS, "version": __version__}
    header = ("z", "sigma_zz", "err", "converged")
    rows = [
        (_num(z), _num(s), _num(e), "true" if c else "false")
        for z, s, e, c in zip(res.z, res.sigma, res.error, res.converged)
    ]
    json_rows = [
        (float(z), float(s), float(e), bool(c)) for z, s, e, c in zip(res.z, res.sigma, res.error, res.converged)
    ]
    _emit(args, meta, header, rows, json_rows)
    if not res.converged.all():
        print(f"warning: {int((~res.converged).sum())} point(s) did not converge", file=sys.stderr)
        return EXIT_FLAGGED
    return EXIT_OK


def cmd_edge_law(args) -> int:
    header = ("a", "sigma_zz")
    vals = [(a, near_edge_stress(EdgeLaw(a, args.b, args.n0))) for a in args.a]
    meta = {"units": UNITS, "b": args.b, "n0": args.n0}
    _emit(args, meta, header, [(_num(a), _num(s)) for a, s in vals], vals)
    return EXIT_OK


def _windows(a, dev, threshold):
    """Longest contiguous run of grid points with deviation below threshold."""
    best, cur = None, []
    for ai, di in zip(a, dev):
        if math.isfinite(di) and di < threshold:
            cur.append(ai)
            if best is None or len(cur) > len(best):
                best = list(cur)
        else:
            cur = []
    return None if best is None else [min(best), max(best)]


def cmd_compare(args) -> int:
    profile = load_profile(args.profile)
    edges = detect_edges(profile)
    if not edges:
        raise DomainError("profile has no edges; nothing to compare against")
    zs = _grid(args, profile)
    res = stress_profile(profile, zs, _params(args), workers=args.workers)
    laws = np.array([edge_law_sum(profile, float(z)) for z in zs])
    with np.errstate(divide="ignore", invalid="ignore"):
        dev = np.where(laws > 0, np.abs(res.sigma / laws - 1.0), np.nan)
    summary = []
    for e in edges:
        a = (zs - e.z_edge) * e.wall_side
        inside = a > 0
        order = np.argsort(a[inside])
        window = _windows(a[inside][order], dev[inside][order], args.threshold)
        summary.append({"z_edge": e.z_edge, "n0": e.n0, "b": e.b, "window_a": window})
    meta = {
        "units": UNITS,
        "profile_digest": res.metadata["profile_digest"],
        "threshold": args.threshold,
        "edges": summary,
    }
    header = ("z", "sigma_zz", "edge_law", "deviation", "err", "converged")
    rows, json_rows = [], []
    for z, s, law, d, err, c in zip(zs, res.sigma, laws, dev, res.error, res.converged):
        rows.append((_num(z), _num(s), _num(law), _num(d), _num(err), "true" if c else "false"))
        json_rows.append((float(z), float(s), float(law), None if math.isnan(d) else float(d), float(err), bool(c)))
    _emit(args, meta, header, rows, json_rows)
    for item in summary:
        print(f"edge z={item['z_edge']:g}: deviation < {args.threshold:g} for a in {item['window_a']}", file=sys.stderr)
    return EXIT_OK if res.converged.all() else EXIT_FLAGGED


def cmd_validate(args) -> int:
    from casimir_stress.validation import run_suite

    checks = run_suite(golden=args.golden, sweep=args.tolerance_sweep)
    doc = {"passed": all(c.passed for c in checks), "checks": [c.as_dict() for c in checks]}
    _write(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK if doc["passed"] else EXIT_ERROR


def _add_grid(p):
    p.add_argument("--profile", required=True, help="profile configuration (JSON)")
    p.add_argument("--zmin", type=float)
    p.add_argument("--zmax", type=float)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--z", type=float, nargs="+", help="explicit z values (overrides --zmin/--zmax)")
    p.add_argument("--rtol", type=float, default=1e-6)
    p.add_argument("--n-theta", type=int, default=64)
    p.add_argument("--radial", choices=RADIAL_SCHEMES, default="tanh-sinh")
    p.add_argument("--w-max", type=float, default=None)
    p.add_argument("--max-evaluations", type=int, default=400000, help="density evaluations per point")
    p.add_argument("--workers", type=int, default=None, help="default: $CASIMIR_WORKERS or all cores")


def _add_output(p):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="default: from --out suffix, else csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="casimir-stress", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stress", help="compute sigma_zz on a grid")
    _add_grid(p)
    _add_output(p)
    p.set_defaults(func=cmd_stress)

    p = sub.add_parser("edge-law", help="closed-form near-edge stress")
    p.add_argument("--a", type=float, nargs="+", required=True, help="distances from the edge")
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--n0", type=float, default=1.0)
    _add_output(p)
    p.set_defaults(func=cmd_edge_law)

    p = sub.add_parser("compare", help="numeric stress against the sum of edge laws")
    _add_grid(p)
    p.add_argument("--threshold", type=float, default=0.1)
    _add_output(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="run the invariant suite")
    p.add_argument("--golden", help="Bessel golden table (default: shipped table)")
    p.add_argument("--tolerance-sweep", action="store_true", help="rerun a stress invariant at 3 tolerances")
    p.add_argument("--out", help="report file (default: stdout)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DomainError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
