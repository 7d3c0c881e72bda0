"""Rank-1 measurements and the distances they induce.

Angles are evaluated through the Hellinger form
``d = 2 asin(sqrt(sum_i (sqrt p_i - sqrt q_i)^2 / 4))``, which equals
``arccos(sum_i sqrt(p_i q_i))`` for normalized distributions but stays
well-conditioned when the distributions nearly coincide.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NormalizationError, UsageError
from .statekit import PureState, inner_product

COMPLETENESS_TOL = 1e-10
PROB_TOL = 1e-10
_NEG_CLAMP = 1e-14


def _completeness_defect(elements):
    d = elements.shape[1]
    resolution = elements.T @ elements.conj()
    return float(np.max(np.abs(resolution - np.eye(d))))


@dataclass(frozen=True, eq=False)
class Povm:
    """Rank-1 POVM; row ``i`` of ``elements`` is the (unnormalized) vector phi_i."""

    elements: np.ndarray

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=complex)
        if el.ndim != 2 or el.shape[0] == 0:
            raise DimensionError("POVM needs a nonempty (N, D) array of element vectors")
        defect = _completeness_defect(el)
        if defect > COMPLETENESS_TOL:
            raise UsageError(f"POVM elements do not resolve the identity (defect {defect:.3e})")
        el.flags.writeable = False
        object.__setattr__(self, "elements", el)

    @classmethod
    def from_basis(cls, unitary):
        """Orthonormal measurement whose outcomes are the columns of ``unitary``."""
        return cls(np.asarray(unitary, dtype=complex).T)

    @property
    def n_outcomes(self):
        return self.elements.shape[0]

    @property
    def dim(self):
        return self.elements.shape[1]

    def amplitudes(self, state):
        """``<phi_i|state>`` for every outcome."""
        vec = np.asarray(state.amps if isinstance(state, PureState) else state, dtype=complex)
        if vec.shape[-1] != self.dim:
            raise DimensionError(f"state dim {vec.shape[-1]} != POVM dim {self.dim}")
        return self.elements.conj() @ vec


def validate_povm(elements):
    """Max-entry deviation of ``sum_i |phi_i><phi_i|`` from the identity."""
    if isinstance(elements, Povm):
        elements = elements.elements
    if isinstance(elements, np.ndarray):
        el = elements.astype(complex)
        if el.ndim != 2:
            raise DimensionError("expected an (N, D) array of element vectors")
    else:
        vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in elements]
        if not vecs:
            raise DimensionError("empty element list")
        if len({v.shape[0] for v in vecs}) != 1:
            raise DimensionError("POVM elements have ragged lengths")
        el = np.vstack(vecs)
    return _completeness_defect(el)


@dataclass(frozen=True, eq=False)
class ProbDist:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if np.any(p < -_NEG_CLAMP):
            raise NormalizationError(f"negative probability {p.min()!r}")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if abs(total - 1.0) > PROB_TOL:
            raise NormalizationError(f"probabilities sum to {total!r}")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return self.probs.shape[0]


def outcome_distribution(state, povm):
    """Outcome probabilities ``|<phi_j|state>|^2``."""
    amps = povm.amplitudes(state)
    return ProbDist(np.abs(amps) ** 2)


def hellinger_angle(p, q):
    """Bhattacharyya angle from raw probability arrays (no validation)."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    q = np.clip(np.asarray(q, dtype=float), 0.0, None)
    h = np.sqrt(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2) / 4.0)
    return float(min(2.0 * np.arcsin(min(h, 1.0)), np.pi / 2))


def bhattacharyya_angle(p, q):
    """Classical statistical angle ``arccos sum_i sqrt(p_i q_i)`` in [0, pi/2]."""
    pp = p.probs if isinstance(p, ProbDist) else np.asarray(p, dtype=float)
    qq = q.probs if isinstance(q, ProbDist) else np.asarray(q, dtype=float)
    if pp.shape != qq.shape:
        raise DimensionError(f"distribution lengths differ: {pp.shape[0]} vs {qq.shape[0]}")
    return hellinger_angle(pp, qq)


def measurement_overlap(s1, s2, povm):
    """``sum_i |<phi_i|s2><s1|phi_i>|``, the cosine of the measurement distance."""
    _check_pair(s1, s2)
    a1 = povm.amplitudes(s1)
    a2 = povm.amplitudes(s2)
    return float(np.sum(np.abs(a2 * a1.conj())))


def measurement_distance(s1, s2, povm):
    """Statistical angle between the outcome distributions of ``s1`` and ``s2``."""
    _check_pair(s1, s2)
    p1 = np.abs(povm.amplitudes(s1)) ** 2
    p2 = np.abs(povm.amplitudes(s2)) ** 2
    return hellinger_angle(p1, p2)


def global_distance(s1, s2):
    """Hilbert-space angle ``arccos |<s1|s2>|`` between two pure states."""
    if s1.layout != s2.layout:
        raise DimensionError(f"layouts differ: {s1.layout.dims} vs {s2.layout.dims}")
    overlap = inner_product(s1, s2)
    # sine from the component of s2 orthogonal to s1; accurate near 0 and pi/2
    perp = np.linalg.norm(s2.amps - overlap * s1.amps)
    return float(np.arctan2(perp, abs(overlap)))


def _check_pair(s1, s2):
    n1 = s1.dim if isinstance(s1, PureState) else np.asarray(s1).shape[-1]
    n2 = s2.dim if isinstance(s2, PureState) else np.asarray(s2).shape[-1]
    if n1 != n2:
        raise DimensionError(f"state dims differ: {n1} vs {n2}")
