"""
Stage amplitudes in a three-party run
=====================================

Each node of the outcome tree stores the trace of the dyad conditioned on the
outcomes so far. Siblings share that value and each parent is the sum of its
children, so every leaf holds <s1|s2>/D.
"""

# %%
import numpy as np

from loccdist import check_stage_cascade, random_state_pair, run_locc
from loccdist.locc import orders_agree

s1, s2 = random_state_pair([2, 3, 2], seed=4)
t = run_locc(s1, s2, order=(2, 0, 1))
print("overlap:", t.overlap)
for history, node in sorted(t.nodes.items(), key=lambda kv: (len(kv[0]), kv[0]))[:6]:
    print(history, node.party, np.round(node.stage_amplitude, 12))

# %%
print(check_stage_cascade(t))

# %%
# The order in which the parties measure does not matter.
for order, d in orders_agree(s1, s2).items():
    print(order, d)
