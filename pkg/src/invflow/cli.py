"""Command line entry point: ``invflow evolve|verify|search|simulate``.

Exit codes: 0 success (or MONOTONE), 1 not proven, 2 usage or parse error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import flowsim
from .engine import DegenerateQuantity, certify, evolve
from .exactpoly import NotDivisible, RationalFn
from .exprio import ParseError, dumps_report, fmt_point, format_expr, format_factored, parse
from .positivity import SignCertificate

EXIT_OK, EXIT_NOT_PROVEN, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("invflow")


class UsageError(Exception):
    pass


def _velocity(args) -> RationalFn:
    """Paper convention F (negative for expansion); ``--speed`` gives -F."""
    if args.velocity and args.speed:
        raise UsageError("give either --velocity or --speed, not both")
    if args.velocity:
        return parse(args.velocity, "lambda")
    if args.speed:
        return -parse(args.speed, "lambda")
    raise UsageError("a velocity is required (-F/--velocity or -G/--speed)")


def _quantity(args, required: bool = True) -> Optional[RationalFn]:
    if not args.quantity:
        if required:
            raise UsageError("a quantity is required (-w)")
        return None
    return parse(args.quantity, args.basis)


def _cert_json(name: str, c: SignCertificate) -> dict:
    return {"target": name, "verdict": c.verdict.value, "method": c.method,
            "witness_pos": fmt_point(c.witness_pos), "witness_neg": fmt_point(c.witness_neg)}


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------------


def cmd_evolve(args) -> int:
    F = _velocity(args)
    w = _quantity(args)
    res = evolve(F, w)
    pretty = format_factored if args.layout == "factored" else format_expr
    if args.format == "json":
        text = dumps_report({"velocity": format_expr(F), "candidate": format_expr(w),
                             "C_w": pretty(res.Cw), "G1": pretty(res.G1),
                             "G2": pretty(res.G2)}) + "\n"
    else:
        text = (f"C_w = {pretty(res.Cw)}\n"
                f"G1 = {pretty(res.G1)}\n"
                f"G2 = {pretty(res.G2)}\n")
    _emit(text, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    F = _velocity(args)
    w = _quantity(args)
    rep = certify(evolve(F, w))
    pretty = format_factored if args.layout == "factored" else format_expr
    if args.format == "json":
        text = dumps_report({
            "velocity": format_expr(F), "candidate": format_expr(w),
            "verdict": rep.verdict,
            "C_w": pretty(rep.result.Cw), "G1": pretty(rep.result.G1),
            "certificates": [_cert_json(n, c) for n, c in rep.certificates.items()],
            "witness": None if rep.witness is None else
            {"target": rep.witness[0], "point": fmt_point(rep.witness[1])},
        }) + "\n"
    else:
        lines = [f"verdict: {rep.verdict}",
                 f"C_w = {pretty(rep.result.Cw)}",
                 f"G1 = {pretty(rep.result.G1)}"]
        for n, c in rep.certificates.items():
            lines.append(f"{n:>4}: {c.verdict.value} ({c.method})")
        if rep.witness is not None:
            x, y = fmt_point(rep.witness[1])
            lines.append(f"witness: {rep.witness[0]} > 0 at (l1, l2) = ({x}, {y})")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK if rep.monotone else EXIT_NOT_PROVEN


def cmd_search(args) -> int:
    from .sieve import STAGES, SearchSpace, search

    F = _velocity(args)
    lo, hi = args.coeff_min, args.coeff_max
    space = SearchSpace(F, max_degree=args.max_degree, coeff_range=(lo, hi),
                        require_diagonal_factor=not args.no_diagonal_factor,
                        seed=args.seed, n_samples=args.samples)
    result = search(space, workers=args.workers, keep_rejected=args.all)
    lines = [json.dumps(r.to_dict(F), sort_keys=True) for r in result.reports]
    body = "".join(line + "\n" for line in lines)
    _emit(body, args.output)
    summ = result.summary()
    stages = ", ".join(f"{s}={summ['rejected_by_stage'][s]}" for s in STAGES)
    msg = (f"candidates={summ['candidates']} verified={summ['verified']} "
           f"rejected: {stages}\n")
    (sys.stderr if not args.output else sys.stdout).write(msg)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.velocity or args.speed:
        G = -_velocity(args)
    else:
        raise UsageError("a velocity is required (-F/--velocity or -G/--speed)")
    coeffs = flowsim.parse_cosine_series(args.u0)
    try:
        state = flowsim.make_state(coeffs, args.N, G)
    except flowsim.ConvexityLost:
        raise UsageError("initial surface not strictly convex") from None
    w = _quantity(args, required=False) if args.quantity else None
    max_u = args.max_u if args.max_u is not None else args.growth * float(state.u.max())
    result = flowsim.run(state, max_u=max_u, max_steps=args.max_steps, w=w,
                         samples=args.samples, safety=args.safety)
    if args.format == "json":
        cr = flowsim.convergence_report(result)
        text = json.dumps({
            "steps": result.steps, "stop": result.stop_reason,
            "T_hat": None if math.isinf(result.T_hat) else result.T_hat,
            "convergence": cr.__dict__,
            "series": [dict(zip(flowsim.CSV_COLUMNS, o.row(result.T_hat)))
                       for o in result.series],
        }, indent=1) + "\n"
    elif args.format == "text":
        cr = flowsim.convergence_report(result)
        last = result.series[-1]
        text = (f"steps {result.steps}, stop {result.stop_reason}, t {last.t:.6g}\n"
                f"estimated T {result.T_hat:.6g}\n"
                f"pinch {result.series[0].pinch:.6g} -> {last.pinch:.6g}\n"
                f"radius slope {cr.radius_slope:.4g}, gap slope {cr.gap_slope:.4g}\n")
    else:
        text = result.to_csv()
    _emit(text, args.output)
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, quantity: bool = True):
    p.add_argument("-F", "--velocity", help="normal velocity F(l1, l2); negative for expansion")
    p.add_argument("-G", "--speed", help="expansion speed G = -F (positive)")
    if quantity:
        p.add_argument("-w", "--quantity", help="candidate quantity w")
        p.add_argument("--basis", choices=("auto", "lambda", "HA"), default="auto",
                       help="variables used in -w (default: detect)")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("-o", "--output", help="write the result to this file")
    p.add_argument("--config", help="JSON file with default values for these options")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="invflow",
                                 description="Monotone quantities for expanding curvature flows.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="evolution coefficients C_w, G1, G2")
    _common(p)
    p.add_argument("--layout", choices=("factored", "expanded"), default="factored")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("verify", help="certify C_w <= 0 and G1 <= 0")
    _common(p)
    p.add_argument("--layout", choices=("factored", "expanded"), default="factored")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="sieve for monotone quantities")
    _common(p, quantity=False)
    p.add_argument("--max-degree", type=int, default=6)
    p.add_argument("--coeff-min", type=int, default=1)
    p.add_argument("--coeff-max", type=int, default=4)
    p.add_argument("--no-diagonal-factor", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=64, help="random points per candidate")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $INVFLOW_WORKERS or CPU count)")
    p.add_argument("--all", action="store_true", help="also report rejected candidates")
    p.set_defaults(func=cmd_search, format="json")

    p = sub.add_parser("simulate", help="axisymmetric flow of a convex surface")
    _common(p)
    p.add_argument("--u0", default="1", help="support function as a polynomial in cos(theta)")
    p.add_argument("-N", type=int, default=64)
    p.add_argument("--max-u", type=float, default=None)
    p.add_argument("--growth", type=float, default=10.0, help="stop at max u = growth * initial")
    p.add_argument("--max-steps", type=int, default=2_000_000)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--safety", type=float, default=0.2)
    p.add_argument("--track-w", dest="quantity", help="quantity whose maximum is recorded")
    p.set_defaults(func=cmd_simulate, format="csv")
    return ap


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(k.replace("-", "_") for k in cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
        args = parser.parse_args(argv)        # flags override the file
    return args


_EXPR_OPTIONS = {"-F": "--velocity", "--velocity": "--velocity", "-G": "--speed",
                 "--speed": "--speed", "-w": "--quantity", "--quantity": "--quantity",
                 "--track-w": "--track-w", "--u0": "--u0"}


def _glue_expressions(argv: list[str]) -> list[str]:
    """Attach expression values to their flag so a leading '-' is not an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _EXPR_OPTIONS and i + 1 < len(argv):
            out.append(f"{_EXPR_OPTIONS[tok]}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = _glue_expressions(list(sys.argv[1:] if argv is None else argv))
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:          # argparse usage errors
        return EXIT_USAGE if exc.code else EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}\n{exc.pointer()}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateQuantity as exc:
        print(f"error: degenerate quantity: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, NotDivisible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (flowsim.ConvexityLost, flowsim.NumericFailure, ArithmeticError,
            FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
