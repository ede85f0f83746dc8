# A small replication sweep, written to CSV.
#
# Sweeps the degree ratio m at reduced size so it runs in under a minute.
# Sweep points whose parameters are infeasible appear as error rows.
# The full presets live in dcsbm.harness.experiment.PRESETS and run from
# the command line with `dcsbm experiment degree-ratio-lam40`.

from dataclasses import replace
from pathlib import Path

from dcsbm.harness.experiment import medians, preset, run_experiment, write_csv
from dcsbm.optim import TabuConfig

spec = replace(preset("degree-ratio-lam12"), n=150, sweep_values=(1.0, 4.0, 8.0),
               replications=5, tabu=TabuConfig(restarts=3))
rows = run_experiment(spec)

out = Path("sweep_demo.csv")
write_csv(rows, out)
print(f"{len(rows)} rows written to {out}")

med = medians(rows)
print("m    " + "  ".join(f"{k:>5}" for k in spec.criteria))
for m in spec.sweep_values:
    print(f"{m:<4g} " + "  ".join(f"{med.get((m, k), float('nan')):5.2f}" for k in spec.criteria))
