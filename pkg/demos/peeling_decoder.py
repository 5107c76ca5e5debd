"""
Peeling a frame
===============

Build a frame by hand, decode it with successive interference
cancellation, then estimate throughput for a few replica patterns.
"""

import itertools

import numpy as np

from wpirsa import FrameAlloc, select_slots, sic_decode

# Three users over three slots. Only user 2 reaches the last slot, so it is
# decoded first and its removal frees the others.
frame = FrameAlloc.from_slots(3, {1: [0, 1], 2: [0, 1, 2], 3: [1]})
print("slot loads:", frame.slot_loads())
res = sic_decode(frame)
print("decoded in order:", list(res.per_iteration_decodes))

# %%
# Two users who both sent everything into the same slots never resolve.
print(sic_decode(FrameAlloc.from_slots(2, {0: [0, 1], 1: [0, 1]})).decoded_users)

# %%
# Monte Carlo throughput for four users in five slots.
rng = np.random.default_rng(1)
for pattern in [(1, 1, 1, 1), (2, 2, 2, 2), (2, 2, 2, 1), (3, 2, 2, 1)]:
    total = 0
    for _ in range(20_000):
        picks = [select_slots(n, 5, rng) for n in pattern]
        total += sic_decode(FrameAlloc.from_slots(5, picks)).count
    print(pattern, f"{total / 20_000:.3f} users/frame")

# every two-slot choice for two users, counted exactly
pairs = list(itertools.combinations(range(5), 2))
ok = sum(sic_decode(FrameAlloc.from_slots(5, [p, q])).count for p in pairs for q in pairs)
print("two users, two replicas each:", ok / len(pairs) ** 2)
