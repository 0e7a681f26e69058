"""Batch command-line driver.

Commands:
  linear-split   split a linear instance (or a seeded corpus) and verify
  normalize      run the iteration on a deformation file
  hopf-verify    run the symbolic example suite
  mc-check       report the integrability residual of a deformation
  prop-test      run one seeded property suite

Exit codes: 0 success, 1 verification failure, 2 precondition failure,
3 parse error, 4 non-convergence (normalize only).  Identical inputs
and seeds produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from fractions import Fraction

from . import hopf
from . import serialize as ser
from .errors import PreconditionError
from .jets import mc_residual, majorant_norm
from .linear_gca import random_split_instance, split_linear_brane, verify_splitting
from .normalizer import NormalizationParams, run_normalization
from .propsuite import SUITES, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PRECONDITION = 2
EXIT_PARSE = 3
EXIT_NO_CONVERGENCE = 4

LINEAR_CORPUS_DIMS = (4, 6, 8, 10, 12)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return ser.frac_str(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return "inf" if x == float("inf") else repr(x)
    return repr(x)


def _emit(doc, output):
    text = ser.dump_json(_jsonable(doc))
    if output:
        _write_text(output, text)
    else:
        sys.stdout.write(text)


def _write_text(path, text):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _frac_matrix(rows):
    return [[ser.frac_str(x) for x in row] for row in rows]


def _split_one(gc, brane):
    spl = split_linear_brane(gc, brane)
    rep = verify_splitting(gc, brane, spl)
    return {
        "n": gc.m,
        "dim_S": len(brane.S_rows),
        "splitting": {
            "U_rows": _frac_matrix(spl.U_rows),
            "I": _frac_matrix(spl.I),
            "P": _frac_matrix(spl.P),
            "B": _frac_matrix(spl.B),
            "gauge_op": _frac_matrix(spl.gauge_op),
        },
        "verify": rep,
        "ok": rep["ok"],
    }


def cmd_linear_split(args):
    if args.input:
        gc, brane = ser.linear_from_json(ser.load_json_file(args.input))
        doc = _split_one(gc, brane)
    elif args.seed is not None:
        rng = random.Random(args.seed)
        count = args.count if args.count is not None else 100
        cases = []
        for i in range(count):
            n_real = LINEAR_CORPUS_DIMS[i % len(LINEAR_CORPUS_DIMS)]
            gc, brane = random_split_instance(rng, n_real)
            one = _split_one(gc, brane)
            cases.append({"case": i, "n": one["n"], "dim_S": one["dim_S"],
                          "verify": one["verify"], "ok": one["ok"]})
        doc = {"seed": args.seed, "count": count,
               "passed": sum(1 for c in cases if c["ok"]),
               "cases": cases,
               "ok": all(c["ok"] for c in cases)}
    else:
        raise PreconditionError("linear-split needs --input or --seed")
    _emit(doc, args.output)
    return EXIT_OK if doc["ok"] else EXIT_FAIL


def cmd_normalize(args):
    if not args.input:
        raise PreconditionError("normalize needs --input")
    eps = ser.deformation_from_json(ser.load_json_file(args.input))
    if args.params:
        params = ser.params_from_json(ser.load_json_file(args.params))
    else:
        params = NormalizationParams(
            max_iterations=12,
            target_order=max(1, eps.ctx.max_degree - 2),
        )
    if args.target_order is not None:
        params = NormalizationParams(
            max_iterations=params.max_iterations,
            target_order=args.target_order,
            delta_schedule=params.delta_schedule,
        )
    result = run_normalization(eps, params)
    outdir = args.output or "."
    os.makedirs(outdir, exist_ok=True)
    _write_text(os.path.join(outdir, "report.csv"),
                ser.normalization_csv(result["rows"]))
    _write_text(os.path.join(outdir, "eps_final.json"),
                ser.dump_json(ser.deformation_to_json(result["eps"])))
    _write_text(os.path.join(outdir, "flow.json"),
                ser.dump_json(ser.flow_to_json(result["flow"])))
    if not result["converged"]:
        sys.stderr.write(
            f"did not reach order {params.target_order} within "
            f"{params.max_iterations} iterations\n")
        return EXIT_NO_CONVERGENCE
    preserved = all(row["S_preserved"] and row["tau_preserved"]
                    for row in result["rows"])
    return EXIT_OK if preserved else EXIT_FAIL


def cmd_hopf_verify(args):
    doc = hopf.verify_all()
    if args.input:
        mut = ser.load_json_file(args.input)
        if not isinstance(mut, dict):
            raise ser.FormatError("mutation file must be an object")
        unknown = set(mut) - {"flip_b_sign"}
        if unknown:
            raise ser.FormatError(f"unknown mutation keys: {sorted(unknown)}")
        if mut.get("flip_b_sign"):
            doc["reports"]["w_gauge"] = hopf.verify_w_gauge(
                b_form=-hopf.build_B())
            doc["ok"] = all(r["ok"] for r in doc["reports"].values())
    _emit(doc, args.output)
    return EXIT_OK if doc["ok"] else EXIT_FAIL


def cmd_mc_check(args):
    if not args.input:
        raise PreconditionError("mc-check needs --input")
    eps = ser.deformation_from_json(ser.load_json_file(args.input))
    mc = mc_residual(eps)
    r = eps.ctx.r
    doc = {
        "n": eps.ctx.n, "k": eps.ctx.k, "N": eps.ctx.max_degree,
        "r": ser.frac_str(r),
        "residual_norms": {
            "30": majorant_norm(mc.p30, r),
            "21": majorant_norm(mc.p21, r),
            "12": majorant_norm(mc.p12, r),
            "03": majorant_norm(mc.p03, r),
        },
        "integrable": mc.is_zero(),
    }
    _emit(doc, args.output)
    return EXIT_OK if doc["integrable"] else EXIT_FAIL


def cmd_prop_test(args):
    seed = args.seed if args.seed is not None else 0
    count = args.count if args.count is not None else 100
    doc = run_suite(args.suite, seed, count)
    if not doc["ok"]:
        if doc["failures"]:
            doc["first_counterexample"] = doc["failures"][0]
        else:
            doc["first_counterexample"] = {
                "negative_control": doc.get("negative_control"),
                "detail": "control found no violation",
            }
    _emit(doc, args.output)
    return EXIT_OK if doc["ok"] else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(
        prog="gcb",
        description="Exact-arithmetic toolkit driver.  The GCB_MAX_DEGREE "
                    "environment variable overrides the default jet "
                    "truncation degree (8).",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, output=True):
        if output:
            sp.add_argument("--output", help="output file or directory")

    sp = sub.add_parser("linear-split",
                        help="split a linear instance and verify it")
    sp.add_argument("--input", help="instance JSON")
    sp.add_argument("--seed", type=int, help="seeded corpus instead of a file")
    sp.add_argument("--count", type=int, help="corpus size (default 100)")
    common(sp)
    sp.set_defaults(func=cmd_linear_split)

    sp = sub.add_parser("normalize", help="run the normalization iteration")
    sp.add_argument("--input", help="deformation JSON")
    sp.add_argument("--params", help="parameters JSON")
    sp.add_argument("--target-order", type=int, dest="target_order",
                    help="override the target vanishing order")
    sp.add_argument("--output", help="output directory (default .)")
    sp.set_defaults(func=cmd_normalize)

    sp = sub.add_parser("hopf-verify", help="run the symbolic example suite")
    sp.add_argument("--input", help="optional fault-injection JSON "
                                    '(e.g. {"flip_b_sign": true})')
    common(sp)
    sp.set_defaults(func=cmd_hopf_verify)

    sp = sub.add_parser("mc-check", help="integrability residual report")
    sp.add_argument("--input", help="deformation JSON")
    common(sp)
    sp.set_defaults(func=cmd_mc_check)

    sp = sub.add_parser("prop-test", help="run one seeded property suite")
    sp.add_argument("--suite", required=True, choices=sorted(SUITES))
    sp.add_argument("--seed", type=int, help="RNG seed (default 0)")
    sp.add_argument("--count", type=int, help="cases to run (default 100)")
    common(sp)
    sp.set_defaults(func=cmd_prop_test)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ser.FormatError as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except PreconditionError as e:
        sys.stderr.write(f"precondition failed: {e}\n")
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
