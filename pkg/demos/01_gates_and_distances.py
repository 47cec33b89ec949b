"""
Two-qubit gates, circuits and channel distances
================================================

Gates are exponentials of the 15 two-qubit Pauli products. This script
builds a few, runs a small circuit, and compares the exact diamond distance
of two gates with the telescoping bound that the generalization analysis
uses.
"""

import numpy as np

from hybridbound import qcore

# a single generator gives a plain rotation: exp(-i t XI) = cos t I - i sin t XI
u = qcore.build_unitary(qcore.theta_for(XI=0.4))
print("XI rotation, diagonal:", np.round(np.diag(u), 4))

# a random three-qubit circuit with four gates on neighbouring pairs
rng = np.random.default_rng(0)
circuit = qcore.random_circuit(3, 4, rng)
print("layout:", circuit.layout, " T =", circuit.T, " beta =", circuit.beta)

# angle-encode a batch of inputs and read out Pauli-Z on every qubit
X = rng.uniform(-np.pi, np.pi, size=(4, 3))
print("z(x):\n", np.round(qcore.quantum_features(circuit, X), 4))

# the density-matrix path gives the same numbers
rho = qcore.run_circuit(circuit, qcore.encode(X[0], 3))
print("density path, first row:", np.round(qcore.measure_vector(circuit, rho), 4))

###############################################################################
# Perturb every gate and compare distances. The exact diamond distance of
# the full circuits never exceeds twice the summed spectral-norm gaps.

for scale in (1e-3, 1e-2, 1e-1, 1.0):
    other = circuit.with_theta(circuit.theta + scale * rng.standard_normal(circuit.theta.shape))
    exact = qcore.diamond_distance_unitary_oracle(qcore.circuit_unitary(circuit),
                                                  qcore.circuit_unitary(other))
    tele = qcore.telescope_bound(circuit.gate_unitaries(), other.gate_unitaries())
    print(f"scale {scale:6.0e}: diamond {exact:.4f} <= telescope {tele:.4f}")
