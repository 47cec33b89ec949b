"""
Metric entropies and the hybrid generalization bound
=====================================================

Evaluates the closed-form covering-number entropies, the Dudley integral
and the resulting bound for a small hybrid model, then shows how the
classical and quantum contributions scale.
"""

import math

import numpy as np

from hybridbound import bounds
from hybridbound.bounds import BoundParams

# one gate, one 1x1 layer: the textbook example
p = BoundParams(T=1, k=1, m=1, n=1)
print("entropy_hybrid(eps=1) =", round(bounds.entropy_hybrid(p, 1.0), 4),
      "=", "32 log 24 + log 6 =", round(32 * math.log(24) + math.log(6), 4))

# entropy falls as the resolution coarsens
for eps in np.geomspace(1e-3, 4, 6):
    q, c = bounds.entropy_hybrid_parts(p, eps)
    print(f"eps {eps:8.4f}: unitary part {q:8.3f}, network part {c:7.3f}")

###############################################################################
# The Dudley integral has a closed form through the upper incomplete gamma
# function at 3/2.

print("J(6, 6) =", round(bounds.dudley_J(6.0, 6.0), 5), "  sqrt(pi)/2 * 6 =", round(3 * math.sqrt(math.pi), 5))

###############################################################################
# Full breakdown for a two-layer network behind a four-gate circuit.

p = BoundParams(T=4, k=2, m=3, n=3, N=400, L_loss=4.0, M_loss=4.0)
g = bounds.generalization_bound_hybrid(p)
print(f"classical {g.classical_term:.3f}  quantum {g.quantum_term:.3f}  "
      f"confidence {g.confidence_term:.3f}  total {g.total:.3f}")

# with a single layer the classical part stays below the quantum part as T grows
for T in (4, 8, 16, 32, 64):
    r = bounds.rademacher_bound_hybrid(BoundParams(T=T, k=1, m=1, n=3, N=100))
    print(f"T = {T:3d}: classical / quantum = {r.classical_term / r.quantum_term:.3f}")

# for comparison, the purely quantum bound and its sample-size requirement
qb = bounds.generalization_bound_qmlm(10, 1, 1000, 0.01)
print("QMLM bound (T=10, N=1000):", round(qb.value, 4), " N for eps=0.1:", round(qb.required_N(0.1), 1))
