"""
Checking entropy formulas with packing oracles
==============================================

A greedy strictly-separated packing lower-bounds the covering number, so
its logarithm must stay below every entropy formula. The same grids give
Monte Carlo Rademacher averages to hold against the chaining bound.
"""

import math

import numpy as np

from hybridbound import bounds, checks, empirical, hybrid
from hybridbound.bounds import BoundParams

rng = np.random.default_rng(1)

# unit disk in R^2
disk = empirical.MetricSpaceSample(hybrid.sample_ball(3000, 2, 1.0, rng))
for eps in (0.05, 0.1, 0.3, 0.8):
    pack = empirical.greedy_packing_number(disk, eps)
    print(f"disk eps {eps}: log packing {math.log(pack):6.3f} <= {bounds.entropy_l2_ball(2, 1.0, eps):6.3f}")

# 10^4 two-qubit unitaries under the spectral norm
grid = empirical.MetricSpaceSample(checks.unitary_grid(10), "spectral")
for eps in (0.1, 0.5, 1.0):
    pack = empirical.greedy_packing_number(grid, eps)
    print(f"unitaries eps {eps}: log packing {math.log(pack):6.3f} <= "
          f"{bounds.entropy_two_qubit_unitary(eps):7.3f}")

# a sandwich: packing <= cover on the interval
line = empirical.MetricSpaceSample(np.linspace(-1, 1, 401))
print("interval, eps 0.5: packing", empirical.greedy_packing_number(line, 0.5),
      " cover", empirical.greedy_cover_number(line, 0.5))

###############################################################################
# Rademacher averages. Two constant hypotheses +1 and -1 on two points give
# exactly 1/2. A 200-model hybrid grid sits far below the chaining bound.

print("two constants:", empirical.rademacher_from_values([[1, 1], [-1, -1]], exhaustive=True).mean)

models = checks.hybrid_grid_models()
X = hybrid.sample_ball(32, 2, np.pi, rng)
est = empirical.monte_carlo_rademacher(models, X, draws=2000, seed=0)
bound = bounds.rademacher_bound_hybrid(BoundParams(T=1, k=1, m=1, n=2, N=32)).total
print(f"hybrid grid: {est.mean:.4f} +- {est.stderr:.4f}  vs bound {bound:.3f}")
