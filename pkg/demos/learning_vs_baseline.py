"""
Learning when to repeat
=======================

Users learn how many replicas to send from their battery level alone.
Compare against the fixed two-replica baseline on a calibrated scenario.
"""

import numpy as np

from wpirsa import ScenarioConfig, aggregate, run, run_many

# charge_efficiency scales the harvest to about 2.5 packets per frame.
cfg = ScenarioConfig(antennas=8, charge_efficiency=36000.0, frames=3000, runs=3, seed=7)

for scheme in ("qlearning", "crdsa"):
    agg = aggregate(run_many(cfg.replace(scheme=scheme)))
    print(f"{scheme:9s}: {agg.mean_success:.3f} +/- {agg.sem_success:.3f} users/frame")

# %%
# Convergence: average success over consecutive blocks of 500 frames.
summary = run(cfg)
blocks = summary.success_series.reshape(-1, 500).mean(axis=1)
print("block means:", np.round(blocks, 3))

# %%
# What the first user ended up doing: replica-count frequencies and its
# greedy action per battery level.
print("replica PMF of user 0:", np.round(summary.pmfs[0].probabilities, 3))
q = summary.q_tables[0]
print("greedy extra replicas per level:", [q.greedy(s) for s in range(q.values.shape[0])])
