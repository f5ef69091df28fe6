"""qbsearch command line.

    qbsearch search --oracle f.json [--a 3.71] [--kmax K] [--format json|csv|text]
    qbsearch scan --oracle f.json
    qbsearch theorems --n-lo 1 --n-hi 500 [--format csv|json|text]
    qbsearch complexity (--n N --tuf T | --oracle f.json [--run])
    qbsearch differential --n 3 [--mode exhaustive|random --samples 500 --seed 0]

Exit codes: 0 success / solution found, 1 no solution (or a disagreement in
the differential harness), 2 internal inconsistency, 64 usage/input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from .accounting import CostModel, total_cost
from .amplifier import AmplifierConfig, AmplifierError, theorem_csv, theorem_report
from .differential import run_differential
from .oracle import OracleError, classical_scan, load_oracle
from .qsim import SimulationError
from .search import run_search

EXIT_OK, EXIT_NONE, EXIT_INCONSISTENT, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with reals at 17 significant digits and stable layout."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"cannot serialise {obj!r}")
        text = f"{obj:.17g}"
        return text if any(c in text for c in ".e") else text + ".0"
    return json.dumps(obj)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config(args) -> AmplifierConfig:
    return AmplifierConfig(a=args.a, k_max=args.kmax)


def _load(args):
    if not args.oracle:
        raise UsageError("--oracle is required")
    try:
        return load_oracle(args.oracle, args.backend)
    except OSError as exc:
        raise UsageError(f"cannot read oracle: {exc}") from None


def cmd_search(args) -> int:
    spec = _load(args)
    report = run_search(spec, _config(args), t_uf=args.tuf)
    if args.trajectories:
        outdir = Path(args.trajectories)
        outdir.mkdir(parents=True, exist_ok=True)
        for st in report.stages:
            (outdir / f"stage_{st.i:03d}.csv").write_text(st.trace.to_csv(), encoding="utf-8")

    if args.format == "json":
        _emit(args, dumps(report.to_dict()) + "\n")
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "prefix", "p", "k", "steps", "epsilon"])
        for st in report.stages:
            d = st.to_dict()
            w.writerow([d["i"], d["prefix"], f"{st.p:.17g}", "" if d["k"] is None else d["k"],
                        d["steps"], d["epsilon"]])
        _emit(args, buf.getvalue())
    else:
        lines = [f"n={report.n} a={report.a} k_max={report.k_max}"]
        for st in report.stages:
            lines.append(f"stage {st.i}: prefix={''.join(map(str, st.prefix)) or '-'} "
                         f"p={st.p:.6g} k={st.trace.k} eps={st.epsilon}")
        lines.append(f"bits={report.bits} candidate={report.candidate} {report.existence}"
                     + (" (final check)" if report.final_check_performed else ""))
        _emit(args, "\n".join(lines) + "\n")

    if not report.consistent:
        print("internal inconsistency: candidate fails f", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK if report.found else EXIT_NONE


def cmd_scan(args) -> int:
    spec = _load(args)
    result = classical_scan(spec)
    if args.format == "text":
        verdict = f"Found x={result.x} ({result.found})" if result.found else "Reject"
        _emit(args, f"{verdict} after {result.calls} calls\n")
    else:
        _emit(args, dumps(result.to_dict()) + "\n")
    return EXIT_OK if result.found is not None else EXIT_NONE


def cmd_theorems(args) -> int:
    rows = theorem_report(args.n_lo, args.n_hi, args.a)
    fmt = args.format or "csv"
    if fmt == "csv":
        _emit(args, theorem_csv(rows))
    elif fmt == "json":
        _emit(args, dumps({"a": args.a, "rows": [r.as_dict() for r in rows]}) + "\n")
    else:
        failing = [r.n for r in rows if not r.thm1_holds]
        stated = sum(r.eq7_as_stated_holds for r in rows)
        upper = sum(r.eq7_as_upper_holds for r in rows)
        _emit(args, f"n={args.n_lo}..{args.n_hi} a={args.a}\n"
                    f"crossing within 2n: {len(rows) - len(failing)}/{len(rows)}\n"
                    f"crossing-time lower bound as stated: {stated}/{len(rows)}\n"
                    f"growth upper bound: {upper}/{len(rows)}\n")
    return EXIT_OK


def cmd_complexity(args) -> int:
    report = None
    if args.oracle:
        spec = _load(args)
        n = spec.n
        t_uf = args.tuf if args.tuf is not None else spec.t_uf
        if t_uf is None:
            raise UsageError("--tuf is required for oracles without a compiled circuit")
        if args.run:
            report = run_search(spec, _config(args), t_uf=t_uf)
    else:
        if args.n is None or args.tuf is None:
            raise UsageError("complexity needs --n and --tuf, or --oracle")
        n, t_uf = args.n, args.tuf
    formula = total_cost(CostModel(n, t_uf))
    doc = {"formula": formula.to_dict()}
    if report is not None:
        doc = report.complexity.to_dict()
    if args.format == "text":
        f = doc["formula"]
        text = (f"n={f['n']} t_uf={f['t_uf']} gate_sum={f['gate_sum']} "
                f"channel_bound={f['channel_bound']} total_T={f['total_T']}\n")
        if "measured" in doc:
            text += "measured: " + " ".join(f"{k}={v}" for k, v in doc["measured"].items()) + "\n"
        _emit(args, text)
    else:
        _emit(args, dumps(doc) + "\n")
    if report is not None and not report.complexity.ok:
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_differential(args) -> int:
    mode = args.mode or ("exhaustive" if args.n <= 3 else "random")
    if mode == "exhaustive" and args.n > 4:
        raise UsageError("exhaustive mode supports n <= 4")
    summary = run_differential(args.n, mode, args.samples, args.seed, _config(args))
    if args.format == "text":
        _emit(args, f"n={summary.n} {mode}: {summary.agree}/{summary.total} agree\n")
    else:
        _emit(args, dumps(summary.to_dict()) + "\n")
    return EXIT_OK if summary.disagreements == 0 else EXIT_NONE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--oracle", help="oracle JSON file")
    common.add_argument("--backend", choices=("table", "expression", "compiled"),
                        help="oracle backend (expressions default to compiled)")
    common.add_argument("--a", type=float, default=3.71, help="logistic map parameter")
    common.add_argument("--kmax", type=int, help="amplifier iteration budget (default 2n)")
    common.add_argument("--tuf", type=int, help="cost charged per oracle call")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"))

    parser = _Parser(prog="qbsearch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search", parents=[common], help="run the quantum binary search")
    p.add_argument("--trajectories", help="directory for per-stage k,x CSV files")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("scan", parents=[common], help="classical linear scan")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("theorems", parents=[common], help="crossing-time sweep")
    p.add_argument("--n-lo", type=int, default=1)
    p.add_argument("--n-hi", type=int, default=20)
    p.set_defaults(func=cmd_theorems)

    p = sub.add_parser("complexity", parents=[common], help="gate-count formulas")
    p.add_argument("--n", type=int)
    p.add_argument("--run", action="store_true", help="also run the search and reconcile")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("differential", parents=[common], help="quantum vs classical agreement")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "random"))
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_differential)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None and args.command != "theorems":
        args.format = "json"
    if args.format == "csv" and args.command not in ("search", "theorems"):
        print(f"qbsearch: --format csv is not available for {args.command}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, OracleError, AmplifierError, SimulationError, OSError) as exc:
        print(f"qbsearch: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
