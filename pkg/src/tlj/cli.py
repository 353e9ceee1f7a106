"""Command line entry point: ``tlj certificate | cpai | gram | eval | jw``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import annular, expr, report
from .diagram import element_to_json, markov_trace
from .errors import DomainError, ExprError, ResourceCapError, TLJError
from .jones_wenzl import jones_wenzl, verify_jw
from .scalar import NumericParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text)


def cmd_certificate(args) -> int:
    t_grid = report.parse_t_grid(args.t_grid) if args.t_grid else None
    seed = args.seed if args.seed is not None else random.SystemRandom().randrange(2**31)
    params = report.CertificateParams.default(args.delta, seed=seed, n_max=args.n_max, t_grid=t_grid)
    # progress goes to stderr when the certificate itself is written to stdout
    log = sys.stderr if args.out == "-" else sys.stdout
    print(f"seed {seed}", file=log)

    def progress(check: report.Check) -> None:
        status = "PASS" if check.passed else ("CAP " if check.cap_breach else "FAIL")
        extra = f"  {check.error}" if check.error else ""
        print(f"{status} {check.name} ({check.seconds:.2f}s){extra}", file=log, flush=True)

    cert = report.certificate(params, progress)
    _write(json.dumps(cert.to_json(), indent=2, default=str), args.out)
    print("certificate:", "PASS" if cert.passed else "FAIL", file=log)
    return cert.exit_code


def cmd_cpai(args) -> int:
    params = NumericParams(args.delta, args.t)
    rows = report.cpai_table(params, args.n_max)
    if args.format == "json":
        _write(json.dumps({"schema": report.SCHEMA, "rows": [r.to_json() for r in rows]}, indent=2), args.out)
    else:
        buf = io.StringIO()
        fields = ["n", "delta", "t", "c_formula", "c_diagram", "abs_gap"]
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in r.to_json().items()})
        _write(buf.getvalue(), args.out)
    gaps = [r.abs_gap for r in rows if r.abs_gap is not None]
    return EXIT_OK if all(g <= report.GAP_TOL for g in gaps) else EXIT_FAIL


def cmd_gram(args) -> int:
    if args.symbolic or args.t is None:
        payload = annular.gram_to_json(args.n)
    else:
        params = NumericParams(args.delta, args.t)
        matrix = annular.gram_numeric(args.n, params.delta, params.t)
        eig = np.linalg.eigvalsh(matrix)
        payload = {
            "schema": 1,
            "n": args.n,
            "delta": params.delta,
            "t": params.t,
            "basis": [d.to_json() for d in annular.enumerate_annular_basis(args.n)],
            "entries": matrix.tolist(),
            "min_eig": float(eig[0]),
            "max_eig": float(eig[-1]),
        }
    if not args.check_psd:
        _write(json.dumps(payload), args.out)
        return EXIT_OK
    if args.n > annular.DEFAULT_MAX_WEIGHT:
        raise ResourceCapError(f"weight {args.n} exceeds the Gram cap {annular.DEFAULT_MAX_WEIGHT}")
    ts = [args.t] if args.t is not None else [args.delta * k / 20 for k in range(1, 21)]
    rows = annular.spectrum_rows([args.n], args.delta, ts)
    _write(annular.spectrum_csv(rows), args.out)
    return EXIT_OK if all(r["min_eig"] >= report.PSD_TOL for r in rows) else EXIT_FAIL


def cmd_eval(args) -> int:
    params = None
    if args.delta is not None or args.t is not None:
        params = NumericParams(args.delta if args.delta is not None else 2.0, args.t)
    value = expr.evaluate(expr.parse(args.expression), params)
    print(expr.format_value(value))
    return EXIT_OK


def cmd_jw(args) -> int:
    p = jones_wenzl(args.m)
    if args.json:
        _write(json.dumps(element_to_json(p)), args.out)
    else:
        print(f"p_{args.m}: {len(p)} terms, trace {markov_trace(p)}")
    if args.verify:
        v = verify_jw(p)
        print(f"idempotent {v.idempotent}, kills e_i {v.kills_e}, self-adjoint {v.self_adjoint}")
        return EXIT_OK if v.ok else EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tlj", description="Temperley-Lieb-Jones kernel and CPAI report")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certificate", help="run every check suite and write a JSON certificate")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--t-grid", help="a:b:steps (default: 10 points inside (0, delta))")
    p.add_argument("--n-max", type=int, default=60)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output path, or - for stdout")
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("cpai", help="table of c_t(n)")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cpai)

    p = sub.add_parser("gram", help="Gram matrix of V(t)_n")
    p.add_argument("--n", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--t", type=float)
    mode.add_argument("--symbolic", action="store_true")
    p.add_argument("--delta", type=float, default=2.5)
    p.add_argument("--check-psd", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("eval", help="evaluate an expression")
    p.add_argument("expression")
    p.add_argument("--delta", type=float)
    p.add_argument("--t", type=float)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("jw", help="Jones-Wenzl idempotent p_m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_jw)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ResourceCapError as exc:
        print(f"tlj: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (DomainError, ExprError) as exc:
        print(f"tlj: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TLJError as exc:
        print(f"tlj: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
