"""
Mixed states: where the dyad trick stops working
================================================

For density matrices the optimal measurement reaches the Bures angle. The
natural analogue of the dyad, W1 W2^dagger with principal square roots, can
still be equi-diagonalized, but that basis usually falls short.
"""

# %%
import numpy as np

from loccdist import bures_angle, transition_equidiag_gap
from loccdist.mixed import MixedState, random_density_pair

gaps = [transition_equidiag_gap(*random_density_pair(2, s)) for s in range(10)]
for s, g in enumerate(gaps):
    print(f"seed {s}: bures {g.d_bures:.6f}  equi-diagonal {g.d_equidiag:.6f}  gap {g.gap:.2e}")

# %%
# A commuting pair shows the failure plainly: W1 W2^dagger = diag(1, 0)/sqrt(2),
# any basis with an equal diagonal splits |0> evenly, and the two states then
# produce identical statistics.
r1, r2 = MixedState(np.diag([1.0, 0.0])), MixedState(np.eye(2) / 2)
print(bures_angle(r1, r2), transition_equidiag_gap(r1, r2))
