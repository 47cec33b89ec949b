"""Generalization bounds for hybrid quantum-classical models.

Submodules
----------
qcore
    Two-qubit gate synthesis, circuit simulation and diamond distances.
classical_net
    Norm-bounded feed-forward networks.
hybrid
    Circuit-then-network models, losses and training.
bounds
    Metric entropies, Dudley integrals and the resulting bounds.
empirical
    Packing/cover oracles, Rademacher estimates and the gap experiment.
checks
    Verification suites comparing closed forms against oracles.
config, cli
    Experiment configuration and the ``hybridbound`` command.
"""

__version__ = "0.1.0"

from . import bounds, classical_net, empirical, hybrid, qcore  # noqa: E402
from .bounds import (  # noqa: E402
    BoundBreakdown,
    BoundParams,
    dudley_J,
    entropy_hybrid,
    generalization_bound_hybrid,
    rademacher_bound_hybrid,
)
from .classical_net import NetworkStack, random_network  # noqa: E402
from .hybrid import HybridModel, random_model  # noqa: E402
from .qcore import CircuitSpec, random_circuit  # noqa: E402
