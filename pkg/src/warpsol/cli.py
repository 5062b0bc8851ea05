"""Command-line interface.

Exit codes: 0 all requested checks pass, 1 a residual check fails,
2 usage, input or evaluation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import jsonschema

from . import appendix as ap
from . import constructors as cons
from . import numerics as nm
from . import soliton as so
from .errors import ArityError, CriticalPointError, DomainError, ParseError, WarpsolError
from .specfile import load_spec, residual_csv, residual_svg, spec_to_dict

CHECKS = ("soliton", "weyl", "xi", "lambda-good")


def _pair(text: str) -> tuple[float, float]:
    parts = text.strip().strip("[]").split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _checks(text: str) -> list[str]:
    items = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in items if c not in CHECKS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"unknown check(s) {bad}; choose from {', '.join(CHECKS)}")
    return items


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# construct


def cmd_construct(args) -> int:
    kind = args.kind
    if kind == "one-fiber":
        grid = nm.Grid(*args.interval, args.grid_points)
        spec = cons.one_fiber_soliton(args.h, args.mu, args.n, grid, args.quad_const, args.f_const)
    elif kind == "example":
        spec = cons.example_family(args.dims, args.margin, args.grid_points)
    elif kind == "rigid":
        params = cons.RigidParams(args.n, args.r1, args.slope, args.offset, args.lambda0, args.constant)
        spec = cons.rigid_product(params, nm.Grid(*args.interval, args.grid_points))
    else:
        params = cons.SchoutenParams(args.n, args.slope, args.offset, args.mu, args.tau, args.c1, args.c0)
        spec = cons.schouten_one_fiber(params, nm.Grid(*args.interval, args.grid_points))
    _emit(spec_to_dict(spec), args.out)
    if args.out:
        print(f"wrote {args.out} (n={spec.n}, k={spec.product.k})", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# verify


def run_checks(spec: so.SolitonSpec, checks, tol: float):
    """Run the named checks; returns ``(summaries, reports)``."""
    summaries, reports = {}, {}
    for name in checks:
        try:
            if name == "soliton":
                rep = so.soliton_residuals(spec, tol)
            elif name == "weyl":
                rep = so.harmonic_weyl_residuals(spec, tol)
            elif name == "xi":
                rep = so.xi_quadratic_residuals(spec, tol)
            else:
                rep = so.lambda_good_check(spec, tol)
        except ArityError as exc:
            summaries[name] = {"skipped": str(exc)}
            continue
        except CriticalPointError as exc:
            summaries[name] = {"skipped": str(exc)}
            continue
        reports[name] = rep
        summaries[name] = rep.summary()
    return summaries, reports


def cmd_verify(args) -> int:
    spec, derived = load_spec(args.spec)
    tol = so.default_tolerance(spec) if args.tol is None else args.tol
    summaries, reports = run_checks(spec, args.checks, tol)
    passed = all(r.passed for r in reports.values())
    columns = {}
    for name in CHECKS:
        if name in reports:
            columns.update({k: v.values for k, v in reports[name].residuals.items()})
    if args.csv:
        Path(args.csv).write_text(residual_csv(spec.grid, columns), encoding="utf-8")
    if args.svg:
        title = f"residuals of {Path(args.spec).name}"
        Path(args.svg).write_text(residual_svg(spec.grid, columns, title=title), encoding="utf-8")
    _emit({
        "spec": str(args.spec),
        "n": spec.n,
        "k": spec.product.k,
        "dims": list(spec.product.dims),
        "grid_points": spec.grid.count,
        "tolerance": tol,
        "lambda": "derived" if derived else "given",
        "checks": summaries,
        "passed": passed,
    })
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# coeffs


def cmd_coeffs(args) -> int:
    c = ap.appendix_coeffs(args.n, args.r1, args.c1, args.mu1)
    P = ap.expand_P(c)
    closed = ap.a12_closed_form(args.n, args.r1)
    forms = ap.closed_forms(args.n, args.r1)
    out = {"n": c.n, "r1": c.r1, "r2": c.r2, "C1": str(ap.to_fraction(args.c1)),
           "mu1": str(ap.to_fraction(args.mu1))}
    out.update(c.as_strings())
    out.update(P.as_strings())
    out["a12_closed_form"] = str(closed)
    out["match"] = P.a12 == closed
    out["closed_forms_match"] = all(getattr(c, k) == v for k, v in forms.items())
    out["note"] = "the sign of the square root in u(y) is squared away and does not affect P"
    _emit(out)
    return 0


# ---------------------------------------------------------------------------
# two-fiber probe


def cmd_probe(args) -> int:
    grid = nm.Grid(*args.interval, args.grid_points)
    params = cons.TwoFiberFParams(args.n, args.r1, args.c1, args.c2, args.c3, args.mu1, args.f, args.mu2)
    sitf = cons.sitf_residuals(params.f, params, grid, args.tol)
    wtt = ap.sitf_wtt_residuals(params.f, args.n, args.r1, args.c1, args.mu1, grid, args.tol)
    norms = dict(sitf.norms)
    norms.update({k: v for k, v in wtt.norms.items() if k != "P_fprime"})
    passed = all(v <= args.tol for v in norms.values())
    out = {"f": args.f, "n": args.n, "r1": args.r1, "r2": params.r2, "tolerance": args.tol,
           "norms": norms, "passed": passed}
    if "P_fprime" in wtt.norms:
        out["max_abs_P_fprime"] = wtt.norms["P_fprime"]
    if wtt.notes:
        out["notes"] = list(wtt.notes)
    _emit(out)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpsol",
        description="Construct and verify gradient almost Ricci solitons on multiply warped products.")
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct", help="write a spec file for an explicit construction")
    csub = construct.add_subparsers(dest="kind", required=True)

    def common(p, interval=True):
        if interval:
            p.add_argument("--interval", type=_pair, required=True,
                           help="a,b (use --interval=-1,1 for a negative left end)")
        p.add_argument("--grid-points", type=int, default=nm.DEFAULT_COUNT)
        p.add_argument("--out", help="output path (default: stdout)")

    p = csub.add_parser("one-fiber", help="soliton determined by a single warping function")
    p.add_argument("--h", required=True, help="warping function of s")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--quad-const", type=float, default=0.0)
    p.add_argument("--f-const", type=float, default=0.0)
    common(p)

    p = csub.add_parser("example", help="multi-fiber family with Ricci-flat fibers")
    p.add_argument("--dims", type=_int_list, required=True, help="fiber dimensions, e.g. 1,2,3")
    p.add_argument("--margin", type=float, default=0.9)
    common(p, interval=False)

    p = csub.add_parser("rigid", help="rigid two-fiber product")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r1", type=int, required=True)
    p.add_argument("--slope", type=float, required=True)
    p.add_argument("--offset", type=float, required=True)
    p.add_argument("--lambda0", type=float, required=True)
    p.add_argument("--constant", type=float, default=0.0)
    common(p)

    p = csub.add_parser("schouten", help="one-fiber gradient Schouten soliton")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--slope", type=float, required=True)
    p.add_argument("--offset", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--c1", type=float, default=0.0)
    p.add_argument("--c0", type=float, default=None, help="optional; must equal tau*offset/slope")
    common(p)

    p = sub.add_parser("verify", help="check a spec file")
    p.add_argument("spec")
    p.add_argument("--tol", type=float, default=None,
                   help="default 1e-8 for closed-form specs, 1e-5 otherwise")
    p.add_argument("--checks", type=_checks, default=["soliton"],
                   help=f"comma-separated subset of {','.join(CHECKS)} (default soliton)")
    p.add_argument("--csv")
    p.add_argument("--svg")

    p = sub.add_parser("coeffs", help="exact polynomial coefficients as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r1", type=int, required=True)
    p.add_argument("--c1", default="1", help="rational, e.g. 1/3")
    p.add_argument("--mu1", default="0", help="rational")

    p = sub.add_parser("two-fiber-probe", help="residuals of the ODEs a potential would have to solve")
    p.add_argument("--f", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r1", type=int, required=True)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=0.0)
    p.add_argument("--c3", type=float, default=10.0)
    p.add_argument("--mu1", type=float, default=1.0)
    p.add_argument("--mu2", type=float, default=0.0)
    p.add_argument("--interval", type=_pair, default=(1.0, 2.0))
    p.add_argument("--grid-points", type=int, default=nm.DEFAULT_COUNT)
    p.add_argument("--tol", type=float, default=1e-8)
    return parser


_COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "coeffs": cmd_coeffs,
             "two-fiber-probe": cmd_probe}


def _error(msg: str) -> int:
    print(f"warpsol: error: {msg}", file=sys.stderr)
    return 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        caret = ""
        if exc.text:
            char = len(exc.text.encode("utf-8")[:exc.offset].decode("utf-8", "ignore"))
            caret = f"\n  {exc.text}\n  {' ' * char}^"
        return _error(f"{exc}{caret}")
    except DomainError as exc:
        return _error(f"evaluation failed: {exc}")
    except jsonschema.ValidationError as exc:
        return _error(f"spec file does not match the schema: {exc.message}")
    except json.JSONDecodeError as exc:
        return _error(f"invalid JSON: {exc}")
    except OSError as exc:
        return _error(str(exc))
    except (WarpsolError, ValueError, IndexError) as exc:
        return _error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
