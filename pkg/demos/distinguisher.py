"""Train a small distinguisher from feature vectors.

Builds a corpus of reduced-round keystreams and OS-style uniform strings,
maps each one to the 280-value feature vector, then fits the MLP and a
logistic baseline on a stratified split.  Everything lands in a run folder
that ``nsc report`` can re-render.

    python3 demos/distinguisher.py [out_dir]
"""
import sys

from nsc.experiments import ExperimentConfig, emit_reports, run_task
from nsc.neural import TrainConfig

out = sys.argv[1] if len(sys.argv) > 1 else "runs/demo-rounds"

cfg = ExperimentConfig.preset(
    "desk", "rounds",
    sequences_per_class=200,
    n_bits=1 << 12,
    rounds_list=(2, 4, 20),
    train=TrainConfig(epochs=60),
)
result = run_task(cfg, out)
emit_reports(result, out)

for row in result.table.rows:
    print(f"{row.condition:<6} {row.model:<9} acc={row.accuracy:.3f} auc={row.auc:.3f} adv={row.advantage:.3f}")
print(f"\nreports in {out}/reports")
