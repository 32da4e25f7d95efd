"""Command line entry point: ``operant {analyze,gcd,lift,kernel-check}``.

Exit codes: 0 success, 1 parse or validation error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from typing import Optional, Sequence

from . import __version__
from .bezout import gcd_pair
from .bezout.lift import DegenerateRootError, LiftError, bezout_lift
from .coeff import CoeffError, parse_rational
from .modalg import decompose, flat_output, sample_points, verdict_check
from .network import NetworkSpec, NetworkValidationError, assemble_presentation, reduce_example
from .timedomain import KernelError, QuadratureError, sample_kernel, series_residuals, transform_grid
from .trigring import TagMismatch, TrigElement, is_unit

SCHEMA_VERSION = "1.0"
DEFAULT_SEED = 20240607

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2

log = logging.getLogger("operant")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _setup_logging() -> None:
    level = os.environ.get("OPERANT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _read_element(path: str) -> TrigElement:
    data = _read_json(path)
    try:
        return TrigElement.from_json(data)
    except (CoeffError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed ring element: {exc}") from None


def _emit(report: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True)
    else:
        text = _text(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _text(report: dict, indent: str = "") -> str:
    lines = []
    for key, val in report.items():
        if isinstance(val, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_text(val, indent + "  "))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{indent}{key}:")
            for item in val:
                lines.append(indent + "  - " + ", ".join(f"{k}={v}" for k, v in item.items()))
        else:
            lines.append(f"{indent}{key}: {val}")
    return "\n".join(lines)


def _base_report(command: str, args) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "tool_version": __version__, "seed": args.seed}


# -- analyze ------------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    spec = NetworkSpec.from_json(_read_json(args.input))
    pres = assemble_presentation(spec, args.xi)
    red = reduce_example(pres)
    dec = decompose(red.P)
    check = verdict_check(red.P, dec, samples=args.samples, seed=args.seed, tol=args.tol)
    report = _base_report("analyze", args)
    torsion_free = dec.torsion_free
    report["verdict"] = {
        "decomposition": dec.verdict,
        "torsion_free": torsion_free,
        "free": torsion_free,
        "spectrally_controllable": not check.rank_drop,
        "trajectory_controllable": torsion_free,
        "behaviorally_controllable": torsion_free,
    }
    report["presentation"] = pres.to_json()
    report["reduced"] = red.to_json()
    report["decomposition"] = dec.to_json()
    report["spectral"] = check.to_json()
    report["rank_drop_points"] = [
        [z.real, z.imag] for z, r in zip(check.probes, check.probe_ranks) if r is not None and r < dec.generic_rank
    ]
    failed = not check.consistent
    residuals = {}
    if torsion_free:
        flat = flat_output(red.P, dec)
        if flat is None:
            failed = True
            report["flat_output"] = None
        else:
            report["flat_output"] = flat.to_json()
            report["flat_output"]["generators"] = red.labels
            residuals.update(flat.residuals(red.P, sample_points(args.samples, args.seed, box=3.0)))
            if flat.lift is not None:
                residuals.update(
                    {"lift_" + k: v for k, v in flat.lift.check(args.samples, args.seed, args.tol).items()}
                )
                failed |= not flat.lift.residual_report["passed"]
            failed |= any(v >= args.tol for k, v in residuals.items() if k in ("basis_roundtrip", "reconstruction_modulo_rows"))
    else:
        report["flat_output"] = None
        report["flat_output_note"] = "module has torsion; no basis exists"
    report["residuals"] = residuals
    report["status"] = "FAILED" if failed else "OK"
    report["timing"] = {"seconds": round(time.perf_counter() - t0, 3)}
    _emit(report, args)
    return EXIT_NUMERIC if failed else EXIT_OK


# -- gcd / lift ------------------------------------------------------------------------------


def cmd_gcd(args) -> int:
    p, q = _read_element(args.p), _read_element(args.q)
    cert = gcd_pair(p, q)
    ok = cert.verify()
    report = _base_report("gcd", args)
    report["certificate"] = cert.to_json()
    report["verified"] = ok
    report["gcd_repr"] = repr(cert.g)
    report["status"] = "OK" if ok else "FAILED"
    _emit(report, args)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_lift(args) -> int:
    p, q = _read_element(args.p), _read_element(args.q)
    report = _base_report("lift", args)
    base = gcd_pair(p, q)
    if not is_unit(base.g):
        report["coprime"] = False
        report["gcd"] = base.g.to_json()
        report["gcd_repr"] = repr(base.g)
        report["note"] = "inputs share a non-unit factor; no lift attempted"
        report["status"] = "OK"
        _emit(report, args)
        return EXIT_OK
    lift = bezout_lift(p, q, tol=args.tol)
    res = lift.check(samples=args.samples, seed=args.seed, tol=args.tol)
    report["certificate"] = lift.to_json()
    report["coprime"] = lift.coprime
    report["status"] = "OK" if res["passed"] else "FAILED"
    _emit(report, args)
    return EXIT_OK if res["passed"] else EXIT_NUMERIC


# -- kernel check --------------------------------------------------------------------------


def cmd_kernel_check(args) -> int:
    report = _base_report("kernel-check", args)
    a, b, c = (parse_rational(v) for v in (args.a, args.b, args.c))
    failed = False
    if a == 0:
        rows = series_residuals(args.x, b, c, orders=range(0, args.order + 1))
        report["mode"] = "series"
        report["table"] = [{"order": r.order, "residual": r.residual} for r in rows]
        res = [r.residual for r in rows]
        # past roundoff the residual may wobble; monotone down to that floor
        failed = any(r2 > r1 + 1e-15 for r1, r2 in zip(res, res[1:])) or res[-1] >= args.tol
    else:
        tol = args.tol
        rows = transform_grid(a, b, c, tol=tol, nodes=args.nodes)
        report["mode"] = "kernel"
        report["table"] = [
            {"x": r.x, "s0": str(r.s0), "error": r.error, "result": "PASS" if r.passed else "FAIL"} for r in rows
        ]
        sample = sample_kernel(args.x, a, b, c, points=args.points)
        report["support_violations"] = sample.support_violations()
        failed = any(not r.passed for r in rows) or report["support_violations"] > 0
        if args.csv:
            with open(args.csv, "w", newline="", encoding="utf-8") as fh:
                sample.write_csv(fh)
            report["csv"] = args.csv
    report["status"] = "FAIL" if failed else "PASS"
    _emit(report, args)
    return EXIT_NUMERIC if failed else EXIT_OK


# -- parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)

    parser = _Parser(prog="operant", description="Controllability analysis over trigonometric operator rings.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    an = sub.add_parser("analyze", parents=[common], help="analyze a network spec")
    an.add_argument("--input", required=True)
    an.add_argument("--xi", choices=("left", "right"), default="right")
    an.set_defaults(func=cmd_analyze, tol_default=1e-8, samples_default=40)

    g = sub.add_parser("gcd", parents=[common], help="gcd with Bezout certificate of two ring elements")
    g.add_argument("p")
    g.add_argument("q")
    g.set_defaults(func=cmd_gcd, tol_default=1e-8, samples_default=20)

    li = sub.add_parser("lift", parents=[common], help="Bezout identity in the operator ring")
    li.add_argument("p")
    li.add_argument("q")
    li.set_defaults(func=cmd_lift, tol_default=1e-8, samples_default=20)

    k = sub.add_parser("kernel-check", parents=[common], help="time-domain kernel against the Laplace domain")
    k.add_argument("--a", default="1")
    k.add_argument("--b", default="0")
    k.add_argument("--c", default="0")
    k.add_argument("--x", type=float, default=1.0)
    k.add_argument("--nodes", type=int, default=None, help="fixed Gauss-Legendre rule instead of adaptive quadrature")
    k.add_argument("--points", type=int, default=10_000)
    k.add_argument("--order", type=int, default=6)
    k.add_argument("--csv")
    k.set_defaults(func=cmd_kernel_check, tol_default=1e-4, samples_default=20)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is None:
        args.tol = args.tol_default
    if args.samples is None:
        args.samples = args.samples_default
    log.info("seed %d, samples %d, tol %g", args.seed, args.samples, args.tol)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"operant: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NetworkValidationError as exc:
        for e in exc.errors:
            print(f"operant: invalid spec: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (TagMismatch, CoeffError, KernelError) as exc:
        print(f"operant: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DegenerateRootError, LiftError, QuadratureError, ArithmeticError) as exc:
        print(f"operant: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
