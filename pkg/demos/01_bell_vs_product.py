"""
Telling |00> from a Bell state with local measurements
======================================================

Two parties share either |00> or (|00> + |11>)/sqrt(2). The best global
measurement separates the two by an angle of pi/4. This script runs the
adaptive one-way protocol and shows that it reaches the same angle.
"""

# %%
import numpy as np

from loccdist import PureState, global_distance, locc_distance, run_locc

s1 = PureState.basis([2, 2], (0, 0))
s2 = PureState([2, 2], np.array([1, 0, 0, 1]) / np.sqrt(2))
print("global distance:", global_distance(s1, s2), " pi/4 =", np.pi / 4)

# %%
# The first party measures in a basis that equalizes the diagonal of the
# reduced dyad (1/sqrt(2))|0><0|, which is the +-45 degree basis.
t = run_locc(s1, s2)
print(np.round(t.nodes[()].basis, 6))

# %%
# Every leaf carries the same amplitude <s1|s2>/4, so the sum of their
# magnitudes equals |<s1|s2>| and nothing is lost to the local restriction.
for leaf in t.leaves:
    print(leaf.label, np.round(leaf.amplitude, 9), round(leaf.p1, 6), round(leaf.p2, 6))
print("protocol distance:", locc_distance(t))
