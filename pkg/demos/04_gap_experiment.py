"""
Teacher-student generalization gap
==================================

A random hybrid teacher labels inputs with Gaussian noise; a student of the
same architecture is trained on N samples and its test-minus-train risk is
compared with the bound. Pass ``--full`` for the 10-seed, four-N protocol.
"""

import sys
from pathlib import Path

from hybridbound import config, empirical

cfg = config.load_config(Path(__file__).parent / "configs" / "gap_experiment.toml")
if "--full" not in sys.argv:
    import dataclasses
    cfg = dataclasses.replace(cfg, seeds=(0, 1, 2))

records = empirical.run_gap_experiment(cfg)
print(f"{'seed':>4} {'N':>4} {'train':>8} {'test':>8} {'gap':>9} {'bound':>9}")
for r in records:
    print(f"{r.seed:4d} {r.N:4d} {r.train_risk:8.4f} {r.test_risk:8.4f} {r.gap:9.5f} {r.bound.total:9.2f}")

medians = empirical.median_gaps(records)
print("median gap per N:", {N: round(g, 5) for N, g in medians.items()})
print("ratio N=400 / N=100:", round(medians[400] / medians[100], 3))
