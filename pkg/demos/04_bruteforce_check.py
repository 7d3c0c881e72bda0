"""
Checking optimality by brute force
==================================

A hill climber over unitary bases, sharing no code with the construction,
finds the same maximum distance arccos|<s1|s2>|. Random POVMs never exceed it.
"""

# %%
from loccdist import SearchConfig, global_distance, optimize_global_measurement, sample_bound_check
from loccdist.statekit import random_state_pair

for seed in range(4):
    s1, s2 = random_state_pair([2, 2], seed)
    best, _ = optimize_global_measurement(s1, s2, SearchConfig(seed=seed))
    print(f"seed {seed}: search {best:.12f}  bound {global_distance(s1, s2):.12f}")

# %%
# Largest value of |<s1|s2>| - sum_i |<phi_i|s2><s1|phi_i>| over random draws;
# negative means the bound held every time.
for dim in (2, 4, 8):
    print(dim, sample_bound_check(dim, 1000, seed=dim))
