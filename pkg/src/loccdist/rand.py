"""Seeded random objects.

All randomness flows through :func:`make_rng`, a Philox4x64-10 counter-based
generator keyed by ``(seed, stream)``. Complex Gaussians are produced from its
uniform doubles with the polar (Box-Muller) transform, so every draw below is
reproducible from the seed alone.
"""

import numpy as np

GENERATOR_ID = "philox4x64-10/box-muller/v1"

_MASK64 = (1 << 64) - 1


def make_rng(seed, stream=0):
    """Return a generator keyed by a 64-bit ``seed`` and a 64-bit ``stream``."""
    key = (int(seed) & _MASK64) | ((int(stream) & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def complex_gaussian(rng, shape):
    """Standard complex Gaussians (real and imaginary parts each N(0, 1))."""
    u1 = rng.random(shape)
    u2 = rng.random(shape)
    # 1 - u1 lies in (0, 1], so the log is finite
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    return radius * np.exp(2j * np.pi * u2)


def haar_vector(rng, dim):
    """Haar-distributed unit vector in C^dim."""
    v = complex_gaussian(rng, dim)
    return v / np.linalg.norm(v)


def haar_unitary(rng, dim):
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    z = complex_gaussian(rng, (dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_isometry(rng, rows, cols):
    """A ``rows x cols`` matrix with orthonormal columns (``rows >= cols``)."""
    z = complex_gaussian(rng, (rows, cols))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def ginibre(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return complex_gaussian(rng, (rows, cols))


def random_rank1_povm_elements(rng, dim, count):
    """Rows of a Haar isometry: ``count`` vectors resolving the identity on C^dim."""
    v = haar_isometry(rng, count, dim)
    # phi_i = conj(V[i]) gives sum_i |phi_i><phi_i| = V^dagger V = I
    return v.conj()
