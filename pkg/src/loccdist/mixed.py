"""Density matrices: Bures angle and the transition-operator measurement.

For mixed states the analogue of the dyad ``|s2><s1|`` is the transition
operator ``W1 W2^dagger`` with ``rho_k = W_k W_k^dagger``. Here ``W_k`` is fixed
to the principal square root. Measuring in a basis that equi-diagonalizes this
operator is optimal for pure inputs but generally falls short of the Bures
angle for mixed ones; :func:`transition_equidiag_gap` measures by how much.
"""

from dataclasses import dataclass

import numpy as np

from .equidiag import equi_diagonalize, format_matrix, parse_matrix
from .errors import DimensionError, ParseError, UsageError
from .measure import Povm, ProbDist, bhattacharyya_angle
from .rand import ginibre, make_rng

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
_RANK_EPS = 10 * np.finfo(float).eps


def eigh_canonical(m):
    """Hermitian eigendecomposition with ascending eigenvalues and fixed phases.

    Each eigenvector is rephased so its largest-magnitude component is real and
    positive (the first such component on ties).
    """
    w, v = np.linalg.eigh(m)
    idx = np.argmax(np.abs(v) - 1e-12 * np.arange(v.shape[0])[:, None], axis=0)
    lead = v[idx, np.arange(v.shape[1])]
    return w, v * (np.abs(lead) / lead)


def _hermiticity_defect(m):
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


@dataclass(frozen=True, eq=False)
class MixedState:
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionError(f"density matrix must be square, got {rho.shape}")
        defect = _hermiticity_defect(rho)
        if defect > HERMITIAN_TOL:
            raise UsageError(f"density matrix not Hermitian (defect {defect:.3e})")
        rho = (rho + rho.conj().T) / 2
        tr = np.trace(rho).real
        if abs(tr - 1) > TRACE_TOL:
            raise UsageError(f"density matrix trace {tr!r} != 1")
        low = np.linalg.eigvalsh(rho)[0]
        if low < -PSD_TOL:
            raise UsageError(f"density matrix has negative eigenvalue {low:.3e}")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_pure(cls, state):
        v = np.asarray(state.amps if hasattr(state, "amps") else state, dtype=complex)
        return cls(np.outer(v, v.conj()))

    @property
    def dim(self):
        return self.rho.shape[0]


def random_density_matrix(dim, seed, rank=None, stream=0):
    """Normalized ``G G^dagger`` with a ``dim x rank`` Ginibre ``G`` (full rank by default)."""
    rng = make_rng(seed, stream)
    g = ginibre(rng, dim, dim if rank is None else rank)
    rho = g @ g.conj().T
    return MixedState(rho / np.trace(rho).real)


def random_density_pair(dim, seed):
    rng = make_rng(seed)
    out = []
    for _ in range(2):
        g = ginibre(rng, dim)
        rho = g @ g.conj().T
        out.append(MixedState(rho / np.trace(rho).real))
    return tuple(out)


def principal_sqrt(m):
    """Positive semidefinite square root of a Hermitian PSD matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got {m.shape}")
    if _hermiticity_defect(m) > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(m)))):
        raise UsageError("principal_sqrt needs a Hermitian matrix")
    w, v = eigh_canonical((m + m.conj().T) / 2)
    # eigenvalues at rounding level are exact zeros in disguise
    floor = _RANK_EPS * m.shape[0] * max(float(np.max(np.abs(w))), 0.0)
    w = np.where(w > floor, w, 0.0)
    root = (v * np.sqrt(w)) @ v.conj().T
    return (root + root.conj().T) / 2


def _rho(x):
    return x.rho if isinstance(x, MixedState) else np.asarray(x, dtype=complex)


def root_fidelity(r1, r2):
    """``trace sqrt(sqrt(rho1) rho2 sqrt(rho1))``.

    Evaluated as the sum of singular values of ``sqrt(rho1) sqrt(rho2)``, which
    is the same number without taking a second square root of small eigenvalues.
    """
    a, b = _rho(r1), _rho(r2)
    if a.shape != b.shape:
        raise DimensionError(f"dims differ: {a.shape[0]} vs {b.shape[0]}")
    return float(np.sum(np.linalg.svd(principal_sqrt(a) @ principal_sqrt(b), compute_uv=False)))


def bures_angle(r1, r2):
    """``arccos`` of the root fidelity, clamped to [0, 1]."""
    return float(np.arccos(np.clip(root_fidelity(r1, r2), 0.0, 1.0)))


def mixed_outcome_distribution(r, povm):
    el = povm.elements
    q = np.einsum("ij,jk,ik->i", el.conj(), _rho(r), el).real
    return ProbDist(q)


def mixed_measurement_distance(r1, r2, povm):
    """Bhattacharyya angle of ``<phi_i|rho_k|phi_i>`` for k = 1, 2."""
    if _rho(r1).shape != _rho(r2).shape:
        raise DimensionError("density matrices differ in dimension")
    if povm.dim != _rho(r1).shape[0]:
        raise DimensionError(f"POVM dim {povm.dim} != state dim {_rho(r1).shape[0]}")
    return bhattacharyya_angle(mixed_outcome_distribution(r1, povm),
                               mixed_outcome_distribution(r2, povm))


@dataclass(frozen=True, eq=False)
class TransitionOperator:
    matrix: np.ndarray
    w1: np.ndarray
    w2: np.ndarray

    @classmethod
    def from_states(cls, r1, r2):
        w1 = principal_sqrt(_rho(r1))
        w2 = principal_sqrt(_rho(r2))
        t = w1 @ w2.conj().T
        if abs(np.trace(t)) > 1 + 1e-10:
            raise UsageError(f"|trace(W1 W2^dagger)| = {abs(np.trace(t))!r} exceeds 1")
        return cls(t, w1, w2)


@dataclass(frozen=True)
class GapResult:
    d_equidiag: float
    d_bures: float
    gap: float


def transition_equidiag_gap(r1, r2):
    """Bures angle minus the distance reached by the equi-diagonal basis of ``W1 W2^dagger``.

    When the transition operator vanishes (orthogonal supports) the
    equi-diagonal basis is the identity and carries no information about the
    states, so the gap can be large there.
    """
    if _rho(r1).shape != _rho(r2).shape:
        raise DimensionError("density matrices differ in dimension")
    if _rho(r1).shape[0] > 16:
        raise UsageError("transition_equidiag_gap supports dim <= 16")
    t = TransitionOperator.from_states(r1, r2)
    basis = equi_diagonalize(t.matrix).basis
    d_eq = mixed_measurement_distance(r1, r2, Povm.from_basis(basis))
    d_b = bures_angle(r1, r2)
    return GapResult(d_eq, d_b, d_b - d_eq)


# -- plain-text density-matrix files --------------------------------------

def format_density_matrix(r):
    return format_matrix(_rho(r))


def parse_density_matrix(text):
    m = parse_matrix(text)
    try:
        return MixedState(m)
    except UsageError as exc:
        raise ParseError(f"invalid density matrix: {exc}", 1) from None


def read_density_file(path):
    with open(path) as fh:
        return parse_density_matrix(fh.read())


def write_density_file(path, r):
    with open(path, "w") as fh:
        fh.write(format_density_matrix(r))
