"""Sequential one-way LOCC measurement built from local equi-diagonalizations.

Parties measure in a fixed order. At each node of the outcome tree the acting
party takes the dyad ``|s2><s1|``, conditioned on every earlier outcome, traces
out the parties still waiting, and measures in a basis that equi-diagonalizes
what is left. Each child's stage amplitude (the conditioned dyad's remaining
trace) is then the parent's amplitude divided by the acting party's dimension,
so every leaf ends up with the same amplitude ``<s1|s2>/D``.
"""

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .equidiag import equi_diagonalize
from .errors import ConvergenceError, DimensionError, UsageError
from .statekit import Dyad, condition_dyad, inner_product, partial_trace_dyad

PROTOCOL_TOL = 1e-9
MAX_LEAVES = 4096


@dataclass(frozen=True, eq=False)
class ProtocolNode:
    """One node of the outcome tree.

    ``history`` lists outcome indices in measurement order. ``party`` is the
    party that measures at this node (``None`` at leaves) and ``basis`` its
    measurement, as columns of a unitary. ``stage_amplitude`` is the trace of
    the dyad conditioned on ``history``.
    """

    history: tuple
    party: object
    basis: object
    stage_amplitude: complex

    @property
    def depth(self):
        return len(self.history)


@dataclass(frozen=True, eq=False)
class Leaf:
    outcome: tuple
    amplitude: complex
    vector: np.ndarray
    p1: float
    p2: float

    @property
    def label(self):
        return "-".join(str(k) for k in self.outcome)


@dataclass(frozen=True, eq=False)
class Transcript:
    layout: object
    order: tuple
    overlap: complex
    nodes: dict
    leaves: list = field(default_factory=list)

    @property
    def total_dim(self):
        return self.layout.total_dim

    def leaf_amplitudes(self):
        return np.array([leaf.amplitude for leaf in self.leaves])


def _check_order(n_parties, order):
    if order is None:
        return tuple(range(n_parties))
    order = tuple(int(p) for p in order)
    if sorted(order) != list(range(n_parties)):
        raise UsageError(f"order {order} is not a permutation of {n_parties} parties")
    return order


def run_locc(s1, s2, order=None, tol=None):
    """Run the protocol on ``s1``, ``s2`` and record the full outcome tree.

    ``order`` is a permutation of party indices (default: layout order). ``tol``
    is passed to :func:`equi_diagonalize` at every node.
    """
    if s1.layout != s2.layout:
        raise DimensionError(f"layouts differ: {s1.layout.dims} vs {s2.layout.dims}")
    layout = s1.layout
    order = _check_order(layout.n_parties, order)
    if layout.total_dim > MAX_LEAVES:
        raise UsageError(f"total dimension {layout.total_dim} exceeds the leaf cap {MAX_LEAVES}")
    root = Dyad.from_states(s1, s2)
    nodes = {}
    leaves = []

    def visit(dyad, remaining, history, outcome_vecs, amplitude):
        # remaining: original party labels still to measure, in the dyad's axis order
        if not remaining:
            nodes[history] = ProtocolNode(history, None, None, amplitude)
            vec = _product_vector(layout, outcome_vecs)
            p1 = float(abs(np.vdot(vec, s1.amps)) ** 2)
            p2 = float(abs(np.vdot(vec, s2.amps)) ** 2)
            leaves.append(Leaf(history, amplitude, vec, p1, p2))
            return
        party = order[len(history)]
        axis = remaining.index(party)
        reduced = partial_trace_dyad(dyad, [axis])
        try:
            basis = equi_diagonalize(reduced, tol).basis
        except ConvergenceError as exc:
            exc.path = history
            raise
        nodes[history] = ProtocolNode(history, party, basis, amplitude)
        rest = remaining[:axis] + remaining[axis + 1:]
        for k in range(basis.shape[1]):
            outcome = basis[:, k]
            child_vecs = {**outcome_vecs, party: outcome}
            if rest:
                child = condition_dyad(dyad, axis, outcome)
                visit(child, rest, history + (k,), child_vecs, child.trace())
            else:
                amp = complex(np.vdot(outcome, reduced @ outcome))
                visit(None, rest, history + (k,), child_vecs, amp)

    visit(root, tuple(range(layout.n_parties)), (), {}, root.trace())
    return Transcript(layout, order, inner_product(s1, s2), nodes, leaves)


def _product_vector(layout, outcome_vecs):
    vec = np.ones(1, dtype=complex)
    for p in range(layout.n_parties):
        vec = np.kron(vec, outcome_vecs[p])
    return vec


def leaf_overlap_sum(t):
    """``sum_i |B_i|``, the cosine of the protocol's statistical angle."""
    return float(np.sum(np.abs(t.leaf_amplitudes())))


def locc_distance(t):
    """Statistical angle achieved by the protocol's outcome distributions."""
    p1 = np.array([leaf.p1 for leaf in t.leaves])
    p2 = np.array([leaf.p2 for leaf in t.leaves])
    h = np.sqrt(np.sum((np.sqrt(p1) - np.sqrt(p2)) ** 2) / 4.0)
    return float(min(2.0 * np.arcsin(min(h, 1.0)), np.pi / 2))


@dataclass(frozen=True)
class CascadeReport:
    sibling: float
    parent: float
    telescope: float

    def worst(self):
        return max(self.sibling, self.parent, self.telescope)


def check_stage_cascade(t):
    """Largest violations of the stage-amplitude identities in a transcript.

    * ``sibling``: spread of stage amplitudes among children of one node;
    * ``parent``: ``|D_party * child - parent|`` over all edges;
    * ``telescope``: ``|root - <s1|s2>|`` and ``|D * leaf - <s1|s2>|``.
    """
    amp = {h: node.stage_amplitude for h, node in t.nodes.items()}
    for leaf in t.leaves:
        amp[leaf.outcome] = leaf.amplitude
    dims = t.layout.dims
    sibling = parent = 0.0
    for h, node in t.nodes.items():
        if node.party is None:
            continue
        d = dims[node.party]
        kids = np.array([amp[h + (k,)] for k in range(d)])
        sibling = max(sibling, float(np.max(np.abs(kids - kids[0]))))
        parent = max(parent, float(np.max(np.abs(d * kids - amp[h]))))
    total = t.layout.total_dim
    telescope = abs(amp[()] - t.overlap)
    for leaf in t.leaves:
        telescope = max(telescope, abs(total * leaf.amplitude - t.overlap))
    return CascadeReport(sibling, parent, float(telescope))


def completeness_defect(t):
    vecs = np.array([leaf.vector for leaf in t.leaves])
    return float(np.max(np.abs(vecs.T @ vecs.conj() - np.eye(t.total_dim))))


def orders_agree(s1, s2, orders=None):
    """Protocol distance for each party order; returns ``{order: distance}``."""
    n = s1.layout.n_parties
    orders = list(permutations(range(n))) if orders is None else orders
    return {tuple(o): locc_distance(run_locc(s1, s2, o)) for o in orders}


ORTHOGONALITY_TOL = 1e-10
UNREACHABLE_PROB = 1e-18


@dataclass(frozen=True, eq=False)
class Discrimination:
    transcript: Transcript
    verdicts: dict

    def max_ambiguity(self):
        return max(min(leaf.p1, leaf.p2) for leaf in self.transcript.leaves)


def discriminate_orthogonal(s1, s2, order=None):
    """Map each leaf to the state it identifies: 1, 2 or ``"either"`` if unreachable."""
    overlap = inner_product(s1, s2)
    if abs(overlap) > ORTHOGONALITY_TOL:
        raise UsageError(f"states are not orthogonal: |<s1|s2>| = {abs(overlap):.3e}")
    t = run_locc(s1, s2, order)
    verdicts = {}
    for leaf in t.leaves:
        if max(leaf.p1, leaf.p2) <= UNREACHABLE_PROB:
            verdicts[leaf.label] = "either"
        else:
            verdicts[leaf.label] = 1 if leaf.p1 >= leaf.p2 else 2
    return Discrimination(t, verdicts)

