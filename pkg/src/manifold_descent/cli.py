"""Command-line front end.

Three subcommands: ``run`` executes one scenario (or a smallest
eigenvalue computation for a matrix file), ``corpus`` runs the full
scenario-by-method comparison, and ``trace`` emits one run's iterates
as CSV for external plotting.

Exit codes: 0 for a completed run (divergence is a valid outcome), 2
for configuration errors, 3 for internal numerical failures.
"""

import argparse
import json
import sys

import numpy as np

from .bench import (
    UnknownMethod,
    UnknownScenario,
    corpus,
    run_scenario,
    smallest_eigenvalue,
)
from .linalg import NonFinite, SymMatrix

TABLE_DIGITS = "%.8g"
EXACT_DIGITS = "%.17g"


def _fmt(value, pattern):
    if not np.isfinite(value):
        return "nan" if np.isnan(value) else ("inf" if value > 0 else "-inf")
    return pattern % value


def _json_float(value):
    # The report schema renders non-finite values as null.
    if not np.isfinite(value):
        return "null"
    return EXACT_DIGITS % value


def _result_json(r):
    d = r.to_dict()
    point = ", ".join(_json_float(c) for c in d["final_point"])
    flags = ", ".join(json.dumps(f) for f in d["flags"])
    return (
        "{"
        '"scenario_id": %s, ' % json.dumps(d["scenario_id"])
        + '"method": %s, ' % json.dumps(d["method"])
        + '"final_point": [%s], ' % point
        + '"final_value": %s, ' % _json_float(d["final_value"])
        + '"steps": %d, ' % d["steps"]
        + '"termination": %s, ' % json.dumps(d["termination"])
        + '"flags": [%s]' % flags
        + "}"
    )


def _report_json(results):
    return "[\n" + ",\n".join("  " + _result_json(r) for r in results) + "\n]"


def _report_csv(results):
    lines = ["scenario_id,method,steps,termination,flags,final_value,final_point"]
    for r in results:
        d = r.to_dict()
        point = " ".join(_fmt(c, EXACT_DIGITS) for c in d["final_point"])
        lines.append(
            "%s,%s,%d,%s,%s,%s,%s"
            % (
                d["scenario_id"],
                d["method"],
                d["steps"],
                d["termination"],
                "|".join(d["flags"]),
                _fmt(d["final_value"], EXACT_DIGITS),
                point,
            )
        )
    return "\n".join(lines)


def _report_table(results):
    header = ("scenario", "method", "steps", "final_value", "termination",
              "flags", "final_point")
    rows = [header]
    for r in results:
        d = r.to_dict()
        point = "(" + ", ".join(_fmt(c, TABLE_DIGITS) for c in d["final_point"]) + ")"
        rows.append(
            (
                d["scenario_id"],
                d["method"],
                str(d["steps"]),
                _fmt(d["final_value"], TABLE_DIGITS),
                d["termination"],
                "|".join(d["flags"]) or "-",
                point,
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _emit_report(results, fmt):
    if fmt == "json":
        print(_report_json(results))
    elif fmt == "csv":
        print(_report_csv(results))
    else:
        print(_report_table(results))


def _load_matrix(path):
    with open(path) as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or "dim" not in payload or "rows" not in payload:
        raise ValueError('matrix file must be {"dim": m, "rows": [[...], ...]}')
    dim = payload["dim"]
    rows = np.asarray(payload["rows"], dtype=float)
    if rows.shape != (dim, dim):
        raise ValueError("rows shape %s does not match dim %d" % (rows.shape, dim))
    return SymMatrix(rows)


def _add_overrides(p):
    p.add_argument("--retraction", choices=("projective", "geodesic"),
                   default="projective")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--delta0", type=float, default=None)
    p.add_argument("--exponent-a", type=float, default=None)
    p.add_argument("--deltas", type=str, default=None,
                   help="comma-separated regularizer coefficients, e.g. 0,1")
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--grad-tol", type=float, default=1e-10)
    p.add_argument("--random-deltas", action="store_true")


def _build_params(args):
    from .optim import BacktrackingParams, NewQNewtonParams

    bt_params = None
    if any(v is not None for v in (args.alpha, args.beta, args.delta0)):
        bt_params = BacktrackingParams(
            alpha=args.alpha if args.alpha is not None else 0.5,
            beta=args.beta if args.beta is not None else 0.7,
            delta0=args.delta0 if args.delta0 is not None else 1.0,
        )
    nq_params = None
    if args.exponent_a is not None or args.deltas is not None:
        deltas = (0.0, 1.0)
        if args.deltas is not None:
            deltas = tuple(float(tok) for tok in args.deltas.split(","))
        nq_params = NewQNewtonParams(
            exponent_a=args.exponent_a if args.exponent_a is not None else 2.0,
            deltas=deltas,
        )
    return bt_params, nq_params


def _parser():
    parser = argparse.ArgumentParser(
        prog="manifold-descent",
        description="Descent methods under locally defined retractions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario or matrix problem")
    target = p_run.add_mutually_exclusive_group(required=True)
    target.add_argument("--scenario", type=str)
    target.add_argument("--matrix", type=str, help="path to a matrix JSON file")
    p_run.add_argument("--method", type=str, default=None)
    p_run.add_argument("--iters", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--format", choices=("table", "json", "csv"), default="table")
    _add_overrides(p_run)

    p_corpus = sub.add_parser("corpus", help="run every scenario-method cell")
    p_corpus.add_argument("--seed", type=int, default=42)
    p_corpus.add_argument("--format", choices=("table", "json", "csv"),
                          default="table")
    p_corpus.add_argument("--retraction", choices=("projective", "geodesic"),
                          default="projective")

    p_trace = sub.add_parser("trace", help="emit per-iteration CSV for one run")
    p_trace.add_argument("--scenario", type=str, required=True)
    p_trace.add_argument("--method", type=str, required=True)
    p_trace.add_argument("--iters", type=int, default=None)
    p_trace.add_argument("--seed", type=int, default=0)
    _add_overrides(p_trace)

    return parser


def _cmd_run(args):
    bt_params, nq_params = _build_params(args)
    if args.matrix is not None:
        A = _load_matrix(args.matrix)
        method = args.method or "r_new_q_newton"
        lam, vec = smallest_eigenvalue(
            A,
            method=method,
            iters=args.iters if args.iters is not None else 100,
            seed=args.seed,
            retraction=args.retraction,
        )
        if args.format == "json":
            coords = ", ".join(_json_float(c) for c in vec)
            print('{"lambda1": %s, "vector": [%s]}' % (_json_float(lam), coords))
        elif args.format == "csv":
            print("lambda1," + ",".join("x%d" % i for i in range(len(vec))))
            print(",".join([_fmt(lam, EXACT_DIGITS)]
                           + [_fmt(c, EXACT_DIGITS) for c in vec]))
        else:
            print("lambda1 = %s" % _fmt(lam, TABLE_DIGITS))
            print("vector  = (%s)" % ", ".join(_fmt(c, TABLE_DIGITS) for c in vec))
        return 0
    if args.method is None:
        print("run: --method is required with --scenario", file=sys.stderr)
        return 2
    result = run_scenario(
        args.scenario,
        args.method,
        iters=args.iters,
        seed=args.seed,
        retraction=args.retraction,
        bt_params=bt_params,
        nq_params=nq_params,
        lr=args.lr,
        grad_tol=args.grad_tol,
        random_deltas=args.random_deltas,
    )
    _emit_report([result], args.format)
    return 0


def _cmd_corpus(args):
    results = corpus(seed=args.seed, retraction=args.retraction)
    _emit_report(results, args.format)
    return 0


def _cmd_trace(args):
    bt_params, nq_params = _build_params(args)
    _, trace = run_scenario(
        args.scenario,
        args.method,
        iters=args.iters,
        seed=args.seed,
        retraction=args.retraction,
        bt_params=bt_params,
        nq_params=nq_params,
        lr=args.lr,
        grad_tol=args.grad_tol,
        random_deltas=args.random_deltas,
        return_trace=True,
    )
    m = len(trace.records[0].point)
    print("iter,f,grad_norm,step_size," + ",".join("x%d" % i for i in range(m)))
    for rec in trace.records:
        cols = [str(rec.iter), _fmt(rec.f_value, EXACT_DIGITS),
                _fmt(rec.rgrad_norm, EXACT_DIGITS),
                _fmt(rec.step_size, EXACT_DIGITS)]
        cols.extend(_fmt(c, EXACT_DIGITS) for c in rec.point)
        print(",".join(cols))
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "corpus":
            return _cmd_corpus(args)
        return _cmd_trace(args)
    except NonFinite as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 3
    except (UnknownScenario, UnknownMethod) as exc:
        print("unknown scenario or method: %s" % exc, file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
