"""Degree heterogeneity defeating the Erdos-Renyi modularity.

Two balanced communities with ``P = [[0.1, 0.05], [0.05, 0.1]]``, ``rho = 1``
and degree parameters 1.6 / 0.4 (each w.p. 1/2) independent of the labels.
Population ERM prefers grouping nodes by degree parameter (0.0135) over the
true partition (0.0125).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..metrics import adjusted_rand
from ..models import DcbmParams, ThetaSpec, sample_network, validate
from ..optim import TabuConfig, tabu_search
from ..population import (brute_force_population_max, diagonal_assignment,
                          population_criterion, theta_grouped_assignment)

__all__ = ["counterexample_params", "run_counterexample", "CounterexampleReport",
           "EXPECTED_ERM_TRUE", "EXPECTED_ERM_GROUPED"]

EXPECTED_ERM_TRUE = 0.0125
EXPECTED_ERM_GROUPED = 0.0135


def counterexample_params() -> DcbmParams:
    # two-point with m = 4 puts mass 1/2 on 2/5 and 8/5
    return validate(DcbmParams(pi=[0.5, 0.5], P=[[0.1, 0.05], [0.05, 0.1]], rho=1.0,
                               theta=ThetaSpec.two_point(4)))


@dataclass
class CounterexampleReport:
    population: dict = field(default_factory=dict)   # (criterion, "true"|"grouped") -> value
    grid: dict = field(default_factory=dict)         # criterion -> GridMaxResult
    finite: dict = field(default_factory=dict)       # criterion -> list of (ari_true, ari_grouped)
    checks: dict = field(default_factory=dict)       # name -> bool

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        out = []
        for (kind, which), v in sorted(self.population.items()):
            out.append(f"population {kind:<4} at {which:<7} partition: {v:.12g}")
        for kind, res in sorted(self.grid.items()):
            out.append(f"grid argmax {kind:<4}: value {res.value:.6g}, diagonal={res.is_diagonal}")
        for kind, pairs in sorted(self.finite.items()):
            a = np.array(pairs)
            out.append(f"finite {kind:<4}: median ARI vs truth {np.median(a[:, 0]):.3f}, "
                       f"vs degree grouping {np.median(a[:, 1]):.3f}")
        for name, ok in self.checks.items():
            out.append(f"[{'PASS' if ok else 'FAIL'}] {name}")
        return out


def run_counterexample(grid: int = 10, n: int = 2000, seeds: int = 10,
                       tabu: TabuConfig | None = None, finite: bool = True,
                       seed: int = 0) -> CounterexampleReport:
    params = counterexample_params()
    rep = CounterexampleReport()
    D = diagonal_assignment(params)
    G = theta_grouped_assignment(params)
    for kind in ("erm", "ngm", "bm", "dcbm"):
        rep.population[kind, "true"] = population_criterion(kind, D, params)
        rep.population[kind, "grouped"] = population_criterion(kind, G, params)

    rep.checks["population ERM at true partition = 0.0125"] = (
        abs(rep.population["erm", "true"] - EXPECTED_ERM_TRUE) <= 1e-12)
    rep.checks["population ERM at degree grouping = 0.0135"] = (
        abs(rep.population["erm", "grouped"] - EXPECTED_ERM_GROUPED) <= 1e-12)
    rep.checks["population NGM prefers the true partition"] = (
        rep.population["ngm", "true"] > rep.population["ngm", "grouped"])

    for kind in ("erm", "ngm", "dcbm"):
        rep.grid[kind] = brute_force_population_max(kind, params, grid)
    rep.checks["ERM grid argmax is not the true partition"] = not rep.grid["erm"].is_diagonal
    rep.checks["NGM grid argmax is the true partition"] = rep.grid["ngm"].is_diagonal
    rep.checks["DCBM grid argmax is the true partition"] = rep.grid["dcbm"].is_diagonal

    if finite:
        cfg = tabu or TabuConfig(restarts=3, max_stall=n)
        ss = np.random.SeedSequence(seed).spawn(seeds)
        for kind in ("erm", "bm"):
            rep.finite[kind] = []
        for s in ss:
            s_int = int(s.generate_state(1)[0])
            net = sample_network(params, n, s_int)
            grouping = (net.theta > 1).astype(np.int64)
            for kind in ("erm", "bm"):
                labels = tabu_search(net.graph, 2, kind, TabuConfig(
                    cfg.tenure, cfg.max_iters, cfg.max_stall, cfg.restarts, s_int)).labels
                rep.finite[kind].append((adjusted_rand(labels, net.labels),
                                         adjusted_rand(labels, grouping)))
        erm = np.array(rep.finite["erm"])
        bm = np.array(rep.finite["bm"])
        rep.checks["finite ERM closer to degree grouping in >= 80% of seeds"] = (
            np.mean(erm[:, 1] > erm[:, 0]) >= 0.8)
        rep.checks["finite BM median ARI vs truth <= 0.1"] = float(np.median(bm[:, 0])) <= 0.1
    return rep
