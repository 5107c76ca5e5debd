"""
Sweeping a parameter
====================

Run a small beacon-power sweep through the sweep harness and write the
CSV that the command line tool would produce.
"""

import sys

from wpirsa import ScenarioConfig
from wpirsa.sweep import SweepSpec, format_csv, load_preset, preset_names, run_sweep

base = ScenarioConfig(charge_efficiency=36000.0, frames=1000, runs=2, seed=3)
spec = SweepSpec("pb_power_w", (1.0, 4.0, 8.0), base, schemes=("qlearning", "crdsa"))
rows = run_sweep(spec)
sys.stdout.write(format_csv(rows))

# %%
# Bundled presets describe full-size experiments.
for name in preset_names():
    p = load_preset(name)
    print(f"{name}: {p.param} over {list(p.values)}, {len(p.points())} points, "
          f"{p.base.runs} runs x {p.base.frames} frames")
