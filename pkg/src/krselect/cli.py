"""``krselect`` command-line front-end.

Every subcommand prints one JSON report: sorted keys, floats rounded to 12
significant digits, sha256 digests of input files. Exit status is 0 on
success, 2 on input errors and 1 on numerical failures.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .classify import complexity_descriptor
from .errors import InputError, KRError, NumericError
from .ingest import encode_calls, parse_gen, parse_labeled_csv, read_phenotype
from .kr_closed import METHODS, w1
from .kr_exact import verify_optimality, w1_exact
from .measures import align, read_measure_csv
from .metrics import Discrete, Line, Product, cost_matrix, load_metric, metric_to_dict
from .selfcheck import run_selfcheck
from .select import STRATEGIES, Criterion, SelectionProblem, run_strategy
from .trend import (
    SCORE_PRESETS,
    catt,
    cochran_decompose,
    generalized_stats,
    kr_chi2_bounds,
    parse_scores,
    pearson_chi2,
    read_tables,
    table_measures,
)

SIG_DIGITS = 12


def _round(obj):
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunReport:
    command: dict
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    wall_time: float | None = None

    def to_dict(self) -> dict:
        d = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "warnings": self.warnings,
            "version": __version__,
        }
        if self.wall_time is not None:
            d["wall_time"] = self.wall_time
        return _round(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_human(self) -> str:
        lines = []

        def walk(prefix, obj):
            if isinstance(obj, dict):
                for k in sorted(obj):
                    walk(f"{prefix}.{k}" if prefix else k, obj[k])
            elif isinstance(obj, list) and obj and isinstance(obj[0], dict):
                for i, v in enumerate(obj):
                    walk(f"{prefix}[{i}]", v)
            else:
                lines.append(f"{prefix}: {json.dumps(obj)}")

        walk("", self.to_dict())
        return "\n".join(lines)


# --- input helpers -----------------------------------------------------------------


def _digest(report: RunReport, *paths) -> None:
    for p in paths:
        if p is not None:
            report.inputs[str(p)] = sha256_file(p)


def _coords_for(metric: Product, r: int):
    if len(metric.coords) == r:
        return metric.coords
    if len(metric.coords) == 1:
        return metric.coords * r
    raise InputError(f"metric has {len(metric.coords)} coordinates, data has {r}")


def _encoding_atom(args):
    return Discrete(args.k_metric) if args.encoding == "discrete" else Line()


def _load_sample(args, report: RunReport):
    """(points with NaN for missing, labels, coordinate atoms)."""
    if args.sample:
        if args.gen or args.phenotype:
            raise InputError("use either --sample or --gen/--phenotype")
        if not args.metric:
            raise InputError("--metric is required with --sample")
        _digest(report, args.sample, args.metric)
        s = parse_labeled_csv(args.sample)
        coords = _coords_for(load_metric(args.metric), s.points.shape[1])
        return s.points, s.labels, coords
    if not (args.gen and args.phenotype):
        raise InputError("give --sample, or both --gen and --phenotype")
    _digest(report, args.gen, args.phenotype)
    ds = parse_gen(args.gen, args.threshold)
    y = read_phenotype(args.phenotype)
    report.results["call_rate"] = ds.call_rate
    report.results["snp_ids"] = [m.snp_id for m in ds.snp_meta]
    if len(y) != ds.n_individuals:
        raise InputError(f"{len(y)} phenotypes for {ds.n_individuals} individuals")
    return encode_calls(ds), y, (_encoding_atom(args),) * ds.n_snps


# --- subcommands -------------------------------------------------------------------


def cmd_w1(args, report: RunReport) -> None:
    _digest(report, args.measure1, args.measure2, args.metric)
    m1 = read_measure_csv(args.measure1)
    m2 = read_measure_csv(args.measure2)
    d = load_metric(args.metric)
    report.results["w1"] = w1(m1, m2, d, args.method)
    if args.certify:
        a, b = align(m1, m2)
        sol = w1_exact(a, b, d)
        C = cost_matrix(d, a.support)
        cert = verify_optimality(sol, C, a, b, args.tol, args.tol, max(args.tol, 1e-7))
        report.results["certificate"] = {
            "ok": cert.ok,
            "marginal_violation": cert.marginal_violation,
            "lipschitz_violation": cert.lipschitz_violation,
            "slackness_violation": cert.slackness_violation,
            "duality_gap": cert.duality_gap,
            "lp_cost": sol.cost,
        }
        if not cert.ok:
            raise NumericError(f"optimality certificate failed (max violation {cert.max_violation:.3g})")


def cmd_trend(args, report: RunReport) -> None:
    _digest(report, args.tables)
    c = parse_scores(args.scores)
    report.results["scores"] = list(c)
    rows = []
    for i, t in enumerate(read_tables(args.tables)):
        entry: dict = {"index": i}
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                if t.dropped:
                    warnings.warn(f"dropped empty categories {list(t.dropped)}")
                entry["pearson"] = pearson_chi2(t)
                t_ca, t_fit = cochran_decompose(t, c)
                entry["catt"] = catt(t, c)
                entry["t_ca"], entry["t_fit"] = t_ca, t_fit
                mr, ms = table_measures(t)
                g_ca, g_chi = generalized_stats(mr, ms, t.scores(c))
                entry["generalized"] = {"catt": g_ca, "pearson": g_chi}
                b = kr_chi2_bounds(mr, ms)
                entry["bounds"] = {"lower": b.lower, "stat": b.stat, "upper": b.upper, "w1_discrete": b.w1_reference}
            for w in caught:
                report.warnings.append(f"table {i}: {w.message}")
        except KRError as exc:
            entry = {"index": i, "error": f"{type(exc).__name__}: {exc}"}
            report.warnings.append(f"table {i}: {type(exc).__name__}: {exc}")
        rows.append(entry)
    report.results["tables"] = rows


def cmd_complexity(args, report: RunReport) -> None:
    X, y, coords = _load_sample(args, report)
    ok = ~np.isnan(X).any(axis=1)
    if not ok.all():
        report.warnings.append(f"dropped {int((~ok).sum())} rows with missing coordinates")
    metric = Product(tuple(coords), "l1")
    rep = complexity_descriptor(X[ok], y[ok], metric, args.rho)
    report.results.update(
        W=rep.W, Delta=rep.Delta, ratio=rep.ratio, risk_bound=rep.risk_bound, n_pos=rep.n_pos, n_neg=rep.n_neg,
        metric=metric_to_dict(metric),
    )


def cmd_select(args, report: RunReport) -> None:
    X, y, coords = _load_sample(args, report)
    problem = SelectionProblem(X, y, tuple(coords), args.k, args.mode)
    res = run_strategy(problem, args.strategy, Criterion(problem))
    report.results.update(
        subset=list(res.subset),
        j_value=res.j_value,
        nodes_evaluated=res.nodes_evaluated,
        nodes_pruned=res.nodes_pruned,
        strategy=res.strategy,
    )
    if "snp_ids" in report.results:
        report.results["selected_snps"] = [report.results["snp_ids"][i] for i in res.subset]


def cmd_verify(args, report: RunReport) -> None:
    summary = run_selfcheck(args.instances, args.seed, args.tol)
    report.results.update(summary)
    if not summary["ok"]:
        failed = [k for k, v in summary["checks"].items() if not v["ok"]]
        report.warnings.append(f"failed checks: {failed}")


# --- entry point -------------------------------------------------------------------


def _sample_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sample", help="labeled CSV: label,c1,...,cr")
    p.add_argument("--gen", help="genotype probability file")
    p.add_argument("--phenotype", help="one +1/-1 label per individual")
    p.add_argument("--metric", help="metric JSON (required with --sample)")
    p.add_argument("--encoding", choices=("discrete", "line"), default="discrete")
    p.add_argument("--k-metric", type=float, default=1.0, help="discrete encoding scale")
    p.add_argument("--threshold", type=float, default=0.9, help="genotype calling threshold")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="krselect", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--human", action="store_true", help="key: value lines instead of JSON")
    common.add_argument("--timing", action="store_true", help="include wall time (breaks byte identity)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("w1", parents=[common], help="W1 between two measures")
    p.add_argument("measure1")
    p.add_argument("measure2")
    p.add_argument("metric")
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--certify", action="store_true")
    p.set_defaults(func=cmd_w1)

    p = sub.add_parser("trend", parents=[common], help="trend statistics per 2x3 table")
    p.add_argument("tables")
    p.add_argument("--scores", default="additive", help=f"{'|'.join(SCORE_PRESETS)} or c0,c1,c2")
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("complexity", parents=[common], help="class-separation descriptor")
    _sample_args(p)
    p.add_argument("--rho", type=float, default=0.0)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("select", parents=[common], help="feature subset selection")
    _sample_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--strategy", choices=STRATEGIES, default="bb")
    p.add_argument("--mode", choices=("empirical", "product"), default="empirical")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("verify", parents=[common], help="randomized self-verification sweep")
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return ap


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "human", "timing")}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report = RunReport(command=_echo(args))
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            args.func(args, report)
        report.warnings.extend(str(w.message) for w in caught)
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.timing:
        report.wall_time = time.perf_counter() - t0
    print(report.to_human() if args.human else report.to_json())
    if args.command == "verify" and not report.results.get("ok", False):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
