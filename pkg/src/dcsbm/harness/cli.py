"""Command line entry point: ``dcsbm <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..criteria import Criterion, evaluate
from ..graph import block_stats, load_edge_list, load_gml_subset
from ..metrics import adjusted_rand, nmi
from ..models import ParameterError, parse_params, sample_network
from ..optim import TabuConfig, spectral_bisect, tabu_search
from ..population import (brute_force_population_max, check_erm_condition,
                          check_ngm_condition)
from .counterexample import run_counterexample
from .experiment import PRESETS, default_output_dir, parse_spec, preset, run_experiment, write_csv
from .io import format_labels, read_labels
from .polblogs import run_polblogs

CRITERIA = [c.value for c in Criterion]


def _out_path(name: str | None, default: str) -> Path:
    path = Path(name if name else default)
    if not path.is_absolute() and name is None:
        path = Path(default_output_dir()) / path
    return path


def _add_tabu_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tenure", type=int, help="iterations a moved node stays tabu")
    p.add_argument("--max-iters", type=int, help="move budget per restart")
    p.add_argument("--max-stall", type=int, help="stop after this many moves without improvement")
    p.add_argument("--restarts", type=int, default=20)


def _tabu_config(args) -> TabuConfig:
    return TabuConfig(args.tenure, args.max_iters, args.max_stall, args.restarts, args.seed)


def _read_graph(path: str, gml: bool, n: int | None = None):
    data = Path(path).read_bytes()
    if gml or path.endswith(".gml"):
        return load_gml_subset(data)[0]
    return load_edge_list(data, n=n)


def cmd_generate(args) -> int:
    params, extras = parse_params(Path(args.params).read_text(), n=args.n)
    n = extras.get("n")
    if n is None:
        raise ParameterError("node count missing: pass --n or put 'n = ...' in the parameter file")
    net = sample_network(params, int(n), args.seed)
    prefix = _out_path(args.out, "network")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.edges").write_text(net.graph.to_edge_list())
    Path(f"{prefix}.labels").write_text(format_labels(net.labels))
    Path(f"{prefix}.theta").write_text("".join(f"{t!r}\n" for t in net.theta))
    print(f"n={net.graph.n} L={net.graph.total_degree} mean degree={net.graph.degree.mean():.3f}"
          f" clamped={net.clamped}")
    print(f"wrote {prefix}.edges, {prefix}.labels, {prefix}.theta (read back with --n {net.graph.n})")
    return 0


def cmd_detect(args) -> int:
    g = _read_graph(args.graph, args.gml, args.n)
    if args.method == "spectral":
        if args.K != 2:
            raise SystemExit("--method spectral needs --K 2")
        res = spectral_bisect(g, args.criterion, seed=args.seed)
        labels = res.labels
        if not res.converged:
            print("warning: power iteration did not converge", file=sys.stderr)
    else:
        labels = tabu_search(g, args.K, args.criterion, _tabu_config(args)).labels
    score = evaluate(args.criterion, block_stats(g, labels, args.K))
    out = _out_path(args.out, "detected.labels")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(format_labels(labels))
    print(f"{args.criterion} score {score!r}; labels written to {out}")
    return 0


def cmd_evaluate(args) -> int:
    a = read_labels(Path(args.labels1).read_text())
    b = read_labels(Path(args.labels2).read_text())
    print(f"ari {adjusted_rand(a, b)!r}")
    print(f"nmi {nmi(a, b)!r}")
    return 0


def cmd_conditions(args) -> int:
    params, _ = parse_params(Path(args.params).read_text(), n=args.n)
    ngm = check_ngm_condition(params)
    print(f"NGM condition (E~ diag > 0, off-diag < 0): {'pass' if ngm.passed else 'fail'}")
    print("E~ =\n" + np.array2string(ngm.E_tilde, precision=6))
    try:
        erm = check_erm_condition(params)
        print(f"ERM condition (P_aa > P0 > P_ab): {'pass' if erm.passed else 'fail'}  P0 = {erm.P0!r}")
    except ParameterError as exc:
        print(f"ERM condition: not applicable ({exc})")
    print("BM, DCBM: no parameter condition required")
    return 0


def cmd_popmax(args) -> int:
    params, _ = parse_params(Path(args.params).read_text(), n=args.n)
    res = brute_force_population_max(args.criterion, params, args.grid, K=args.K)
    print(f"{args.criterion}: grid points {res.grid_points}")
    print(f"argmax value {res.value!r}; value at true partition {res.value_at_diagonal!r}")
    print(f"argmax is the true partition: {res.is_diagonal}")
    print("argmax S[k, a, u] =\n" + np.array2string(res.S.S, precision=4))
    return 0


def cmd_experiment(args) -> int:
    if args.spec in PRESETS:
        spec = preset(args.spec, full=args.full)
    elif Path(args.spec).exists():
        spec = parse_spec(Path(args.spec).read_text()).scaled(args.full)
    else:
        raise SystemExit(f"unknown preset or spec file {args.spec!r}; presets: {', '.join(sorted(PRESETS))}")
    from dataclasses import replace
    if args.reps is not None:
        spec = replace(spec, replications=args.reps)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    rows = run_experiment(spec, workers=args.workers)
    out = _out_path(args.out, f"{spec.name}.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(rows, out)
    for r in rows:
        if r["replication"] == "median":
            print(f"{r['sweep_param']}={float(r['sweep_value']):g} {r['criterion']:<4} median {r['metric']} {float(r['value']):.3f}")
    print(f"wrote {out}")
    return 0


def cmd_counterexample(args) -> int:
    rep = run_counterexample(grid=args.grid, n=args.n, seeds=args.seeds,
                             finite=not args.no_finite, seed=args.seed)
    print("\n".join(rep.lines()))
    return 0 if rep.passed else 1


def cmd_polblogs(args) -> int:
    rep = run_polblogs(args.path, args.labels, _tabu_config(args), seed=args.seed)
    print("\n".join(rep.lines()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dcsbm", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a network from a parameter file")
    p.add_argument("params")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output prefix (default $DCSBM_OUTPUT_DIR/network)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("detect", help="find communities in an edge list or GML file")
    p.add_argument("graph")
    p.add_argument("--gml", action="store_true")
    p.add_argument("--n", type=int, help="node ids are integers 0..n-1 (as written by generate)")
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--criterion", choices=CRITERIA, default="dcbm")
    p.add_argument("--method", choices=["tabu", "spectral"], default="tabu")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_tabu_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", help="ARI and NMI between two label files")
    p.add_argument("labels1")
    p.add_argument("labels2")
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for uniformity")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("conditions", help="check the modularity consistency conditions")
    p.add_argument("params")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for uniformity")
    p.set_defaults(func=cmd_conditions)

    p = sub.add_parser("popmax", help="grid search of a population criterion")
    p.add_argument("params")
    p.add_argument("--criterion", choices=CRITERIA, default="erm")
    p.add_argument("--grid", type=int, default=10)
    p.add_argument("--K", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for uniformity")
    p.set_defaults(func=cmd_popmax)

    p = sub.add_parser("experiment", help="run a preset or spec-file simulation sweep")
    p.add_argument("spec", help=f"preset name ({', '.join(sorted(PRESETS))}) or spec file")
    p.add_argument("--full", action="store_true", help="full scale: n=1000, 100 replications")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("counterexample", help="degree-heterogeneity counterexample for ERM and BM")
    p.add_argument("--grid", type=int, default=10)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--no-finite", action="store_true", help="population checks only")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("polblogs", help="analyse a local copy of the political blogs network")
    p.add_argument("path", nargs="?", help="polblogs.gml (default $DCSBM_POLBLOGS)")
    p.add_argument("--labels", help="label file when PATH is an edge list")
    p.add_argument("--seed", type=int, default=0)
    _add_tabu_flags(p)
    p.set_defaults(func=cmd_polblogs)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParameterError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
