"""
Equalizing the diagonal of a matrix
===================================

Any square matrix is unitarily similar to one whose diagonal entries are all
equal to trace/n. The construction rotates pairs of basis vectors, using the
fact that the numerical range of a 2x2 block is an elliptical disk.
"""

# %%
import numpy as np

from loccdist import equi_diagonalize, numerical_range_contains
from loccdist.rand import ginibre, make_rng

m = ginibre(make_rng(0), 5)
res = equi_diagonalize(m)
print("tau =", res.tau)
print("diagonal after rotation:")
print(np.round(np.diagonal(res.transformed(m)), 12))
print("residual:", res.residual)

# %%
# The 2x2 numerical range: a segment for normal matrices, a disk for the
# nilpotent Jordan block.
print(numerical_range_contains(np.diag([1.0, 0.0]), 0.5))
print(numerical_range_contains(np.diag([1.0, 0.0]), 0.5 + 0.1j))
print(numerical_range_contains(np.array([[0, 1], [0, 0]]), 0.4j))

# %%
# A traceless matrix gets a zero diagonal. The cube roots of unity need a
# three-way rotation since no pair of them brackets zero.
roots = np.diag(np.exp(2j * np.pi * np.arange(3) / 3))
print(np.round(np.diagonal(equi_diagonalize(roots).transformed(roots)), 14))
