"""Replicated simulation sweeps: sample, detect, score against the truth, write CSV."""

from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..criteria import Criterion
from ..metrics import adjusted_rand, nmi
from ..models import (DcbmParams, ParameterError, ThetaSpec, rho_for_expected_degree,
                      sample_network, validate)
from ..optim import TabuConfig, spectral_bisect, tabu_search

__all__ = [
    "ExperimentSpec",
    "CSV_COLUMNS",
    "PRESETS",
    "preset",
    "parse_spec",
    "run_experiment",
    "write_csv",
    "rows_to_csv",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("sweep_param", "sweep_value", "criterion", "method", "replication",
               "metric", "value", "seed")
SWEEP_PARAMS = ("m", "alpha", "pi", "lambda")
METRICS = {"ari": adjusted_rand, "nmi": nmi}


@dataclass(frozen=True)
class ExperimentSpec:
    """One simulation design: a base model plus a one-parameter sweep.

    ``pi`` is the probability of community 1 when ``K == 2``; otherwise
    ``pi_vector`` holds the full vector. ``theta`` is ``constant-one``,
    ``two-point`` or ``mixture``.
    """

    name: str = "custom"
    n: int = 300
    K: int = 2
    P: tuple = ((4.0, 1.0), (1.0, 4.0))
    pi: float = 0.5
    pi_vector: tuple | None = None
    theta: str = "two-point"
    m: float = 1.0
    alpha: float = 0.0
    lam: float = 40.0
    sweep_param: str = "m"
    sweep_values: tuple = (1.0,)
    criteria: tuple = ("erm", "ngm", "bm", "dcbm")
    method: str = "tabu"
    tabu: TabuConfig = field(default_factory=lambda: TabuConfig(restarts=10))
    replications: int = 20
    metric: str = "ari"
    seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.sweep_values:
            raise ValueError("sweep_values must be non-empty")
        if self.sweep_param not in SWEEP_PARAMS:
            raise ValueError(f"sweep_param must be one of {SWEEP_PARAMS}")
        if self.sweep_param == "pi" and self.K != 2:
            raise ValueError("pi sweeps are defined for K = 2")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {tuple(METRICS)}")
        if self.method not in ("tabu", "spectral"):
            raise ValueError("method must be 'tabu' or 'spectral'")
        crits = tuple(Criterion.parse(c).value for c in self.criteria)
        object.__setattr__(self, "criteria", crits)
        if self.method == "spectral" and (self.K != 2 or not set(crits) <= {"erm", "ngm"}):
            raise ValueError("spectral method needs K = 2 and criteria among erm, ngm")

    def params_at(self, value: float) -> DcbmParams:
        """Validated model parameters at one sweep point."""
        settings = {"m": self.m, "alpha": self.alpha, "pi": self.pi, "lambda": self.lam}
        settings[self.sweep_param] = float(value)
        if self.pi_vector is not None and self.sweep_param != "pi":
            pi = np.asarray(self.pi_vector, dtype=float)
        else:
            pi = np.array([settings["pi"], 1.0 - settings["pi"]])
        if self.theta == "constant-one":
            theta = ThetaSpec.constant()
        elif self.theta == "two-point":
            theta = ThetaSpec.two_point(settings["m"])
        else:
            theta = ThetaSpec.mixture(settings["m"], settings["alpha"])
        if settings["lambda"] <= 0:
            raise ParameterError("expected degree must be positive")
        P = np.asarray(self.P, dtype=float)
        rho = rho_for_expected_degree(settings["lambda"], self.n, pi, P, theta)
        return validate(DcbmParams(pi=pi, P=P, rho=rho, theta=theta))

    def scaled(self, full: bool) -> "ExperimentSpec":
        """Full scale (n = 1000, 100 replications) when ``full``."""
        return replace(self, n=1000, replications=100) if full else self


def _replication_seed(base: int, point: int, rep: int) -> int:
    ss = np.random.SeedSequence(base, spawn_key=(point, rep))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _fmt(x) -> str:
    return repr(float(x))


def _detect(spec: ExperimentSpec, graph, kind: str, seed: int) -> np.ndarray:
    if spec.method == "spectral":
        return spectral_bisect(graph, kind, seed=seed).labels
    cfg = replace(spec.tabu, seed=seed)
    return tabu_search(graph, spec.K, kind, cfg).labels


def _run_replication(spec: ExperimentSpec, point: int, value: float, rep: int) -> list[dict]:
    seed = _replication_seed(spec.seed, point, rep)
    base = dict(sweep_param=spec.sweep_param, sweep_value=_fmt(value), method=spec.method,
                metric=spec.metric, seed=str(seed))
    try:
        params = spec.params_at(value)
    except ParameterError as exc:
        if rep == 0:
            log.warning("%s=%s: %s", spec.sweep_param, value, exc)
        return [dict(base, criterion=c, replication="error", value="nan") for c in spec.criteria]
    net = sample_network(params, spec.n, seed)
    score = METRICS[spec.metric]
    rows = []
    for kind in spec.criteria:
        row = dict(base, criterion=kind, replication=str(rep))
        if net.graph.total_degree == 0:
            rows.append(dict(row, replication="error", value="nan"))
            continue
        labels = _detect(spec, net.graph, kind, seed)
        rows.append(dict(row, value=_fmt(score(labels, net.labels))))
    return rows


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[dict]:
    """Run every (sweep value, replication) and return CSV rows.

    Replication rows come first for each sweep value, ordered by criterion
    then replication, followed by one median row per criterion. A sweep
    point whose parameters are infeasible yields one ``error`` row per
    criterion and the run continues.
    """
    tasks = [(p, v, r) for p, v in enumerate(spec.sweep_values) for r in range(spec.replications)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_replication, *zip(*[(spec, p, v, r) for p, v, r in tasks])))
    else:
        results = [_run_replication(spec, p, v, r) for p, v, r in tasks]

    rows: list[dict] = []
    for p, value in enumerate(spec.sweep_values):
        point_rows = [row for (tp, _, _), res in zip(tasks, results) if tp == p for row in res]
        if all(r["replication"] == "error" for r in point_rows):
            # infeasible point: one error row per criterion is enough
            seen = set()
            for r in point_rows:
                if r["criterion"] not in seen:
                    seen.add(r["criterion"])
                    rows.append(r)
            continue
        for kind in spec.criteria:
            mine = [r for r in point_rows if r["criterion"] == kind]
            mine.sort(key=lambda r: (r["replication"] == "error", int(r["replication"]) if r["replication"].isdigit() else 0))
            rows.extend(mine)
            vals = [float(r["value"]) for r in mine if r["replication"] != "error"]
            if vals:
                rows.append(dict(sweep_param=spec.sweep_param, sweep_value=_fmt(value),
                                 criterion=kind, method=spec.method, replication="median",
                                 metric=spec.metric, value=_fmt(np.median(vals)),
                                 seed=str(spec.seed)))
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


def medians(rows: list[dict]) -> dict[tuple[float, str], float]:
    """``{(sweep_value, criterion): median}`` from the summary rows."""
    return {(float(r["sweep_value"]), r["criterion"]): float(r["value"])
            for r in rows if r["replication"] == "median"}


# -- presets ----------------------------------------------------------------------

_M_SWEEP = tuple(float(m) for m in range(1, 11))
_PI_SWEEP = (0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5)
_ALPHA_SWEEP = tuple(round(0.1 * k, 1) for k in range(11))
# dense and sparse settings, with 40 as a middle value
LAMBDAS = (12, 40, 125)


def _build_presets() -> dict[str, ExperimentSpec]:
    out = {}
    for lam in LAMBDAS:
        out[f"degree-ratio-lam{lam}"] = ExperimentSpec(
            name=f"degree-ratio-lam{lam}", lam=lam, theta="two-point", pi=0.5,
            sweep_param="m", sweep_values=_M_SWEEP)
        out[f"community-size-lam{lam}"] = ExperimentSpec(
            name=f"community-size-lam{lam}", lam=lam, theta="two-point", m=1.0,
            sweep_param="pi", sweep_values=_PI_SWEEP)
        out[f"degree-ratio-unbalanced-lam{lam}"] = ExperimentSpec(
            name=f"degree-ratio-unbalanced-lam{lam}", lam=lam, theta="two-point", pi=0.3,
            sweep_param="m", sweep_values=_M_SWEEP)
        out[f"mixture-lam{lam}"] = ExperimentSpec(
            name=f"mixture-lam{lam}", lam=lam, theta="mixture", m=10.0, pi=0.5,
            sweep_param="alpha", sweep_values=_ALPHA_SWEEP)
    return out


PRESETS = _build_presets()


def preset(name: str, full: bool = False) -> ExperimentSpec:
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
    return spec.scaled(full)


# -- spec files -----------------------------------------------------------------------
#
# Flat "key = value" text. Keys mirror ExperimentSpec fields; lists are
# whitespace separated; P is row-major; tabu settings use tenure, restarts,
# max_iters, max_stall; "lambda" is accepted for lam.


def parse_spec(text: str) -> ExperimentSpec:
    kv: dict[str, str] = {}
    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        k, v = line.split("=", 1)
        kv[k.strip().lower()] = v.strip()

    def nums(s):
        return tuple(float(t) for t in s.replace(",", " ").split())

    fields: dict = {}
    if "name" in kv:
        fields["name"] = kv.pop("name")
    for key in ("n", "k", "replications", "seed"):
        if key in kv:
            fields[key.upper() if key == "k" else key] = int(kv.pop(key))
    for key in ("m", "alpha"):
        if key in kv:
            fields[key] = float(kv.pop(key))
    if "lambda" in kv or "lam" in kv:
        fields["lam"] = float(kv.pop("lambda", kv.pop("lam", None)))
    if "pi" in kv:
        vals = nums(kv.pop("pi"))
        if len(vals) == 1:
            fields["pi"] = vals[0]
        else:
            fields["pi_vector"] = vals
            fields["pi"] = vals[0]
    K = fields.get("K", 2)
    if "p" in kv:
        flat = nums(kv.pop("p"))
        if len(flat) != K * K:
            raise ValueError(f"P needs {K * K} entries")
        fields["P"] = tuple(tuple(flat[i * K:(i + 1) * K]) for i in range(K))
    for key in ("theta", "sweep_param", "method", "metric"):
        if key in kv:
            fields[key] = kv.pop(key)
    if "sweep_values" in kv:
        fields["sweep_values"] = nums(kv.pop("sweep_values"))
    if "criteria" in kv:
        fields["criteria"] = tuple(kv.pop("criteria").replace(",", " ").split())
    tabu = {}
    for key in ("tenure", "restarts", "max_iters", "max_stall"):
        if key in kv:
            tabu[key] = int(kv.pop(key))
    if tabu:
        fields["tabu"] = TabuConfig(**{"restarts": 10, **tabu})
    if kv:
        raise ValueError(f"unknown spec keys: {', '.join(sorted(kv))}")
    return ExperimentSpec(**fields)


def default_output_dir() -> str:
    return os.environ.get("DCSBM_OUTPUT_DIR", ".")
