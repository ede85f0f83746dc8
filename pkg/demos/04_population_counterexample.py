# Why the Erdos-Renyi modularity fails under degree heterogeneity.
#
# Population versions of the criteria replace edge counts by their
# expectations. For this model, grouping nodes by their degree parameter
# beats the true partition under ERM, while NGM and DCBM still prefer the
# truth. A grid search over all fractional assignments confirms it.

from dcsbm.harness.counterexample import counterexample_params
from dcsbm.population import (brute_force_population_max, check_ngm_condition, diagonal_assignment,
                              population_criterion, theta_grouped_assignment)

params = counterexample_params()
truth = diagonal_assignment(params)
grouped = theta_grouped_assignment(params)

for kind in ("erm", "ngm", "dcbm"):
    print(f"{kind:>4}: truth {population_criterion(kind, truth, params):.6f}"
          f"   degree grouping {population_criterion(kind, grouped, params):.6f}")

print("NGM condition holds:", check_ngm_condition(params).passed)

for kind in ("erm", "ngm", "dcbm"):
    res = brute_force_population_max(kind, params, grid=10)
    print(f"grid maximum {kind:>4}: {res.value:.6f} (truth {res.value_at_diagonal:.6f}),"
          f" at the truth: {res.is_diagonal}")
