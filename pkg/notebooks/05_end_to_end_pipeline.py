"""End-to-end pipeline run through the library API.

Equivalent to `bandgapopt pipeline --config config.json --out out/`, but
driven from Python so the intermediate artifacts can be inspected.  Uses
a reduced sampling schedule to keep the runtime short; drop the custom
config for the full default protocol.

Run from the repository root:

    python3 notebooks/05_end_to_end_pipeline.py
"""
import json
import os

from bandgapopt.pipeline import config_from_dict, run_pipeline

OUT = os.path.join(os.path.dirname(__file__), "output", "pipeline")

cfg = config_from_dict({
    "sampling": {"schedule": [10, 20, 30]},
    "slp": {"max_iters": 60},
})
summary = run_pipeline(cfg, out=OUT)

print(f"N* = {summary['n_star']}"
      + ("  (stability warning)" if summary["sample_size_warning"] else ""))
print(f"p* = {summary['p_star']}")
for entry in summary["entries"]:
    print(f"  {entry['mode']:>6}: best = {entry['best_value']:.6f}, "
          f"evals/gradient = {entry['evals_per_gradient']}, "
          f"cost ratio = {entry['cost_ratio']:.3f}")

print("\nartifacts:")
for name in sorted(os.listdir(OUT)):
    print(f"  {os.path.join(OUT, name)}")
