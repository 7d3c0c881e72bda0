"""Multipartite pure states and dyads.

Amplitudes are stored flat in row-major mixed-radix order: party 0 is the most
significant digit of the flattened index. A dyad ``|ket><bra|`` is kept as the
pair of vectors and only materialized as a matrix by :func:`partial_trace_dyad`.
"""

from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import DimensionError, NormalizationError, ParseError, UsageError
from .rand import haar_vector, make_rng

NORM_TOL = 1e-10
DYAD_MATRIX_CAP = 64


@dataclass(frozen=True)
class PartyLayout:
    """Local Hilbert-space dimensions ``(D_a, D_b, ...)``."""

    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise UsageError("layout needs at least one party")
        if any(d < 1 for d in dims):
            raise UsageError(f"party dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n_parties(self):
        return len(self.dims)

    @property
    def total_dim(self):
        return prod(self.dims)

    def flatten(self, digits):
        """Mixed-radix digits (one per party) to a flat index."""
        if len(digits) != len(self.dims):
            raise DimensionError("need one digit per party")
        index = 0
        for digit, dim in zip(digits, self.dims):
            if not 0 <= digit < dim:
                raise DimensionError(f"digit {digit} out of range for dim {dim}")
            index = index * dim + digit
        return index

    def unflatten(self, index):
        if not 0 <= index < self.total_dim:
            raise DimensionError(f"index {index} out of range")
        digits = []
        for dim in reversed(self.dims):
            index, digit = divmod(index, dim)
            digits.append(digit)
        return tuple(reversed(digits))

    def drop(self, party):
        return PartyLayout(self.dims[:party] + self.dims[party + 1:])

    def sub(self, parties):
        return PartyLayout(tuple(self.dims[p] for p in parties))


def as_layout(layout):
    if isinstance(layout, PartyLayout):
        return layout
    if isinstance(layout, int):
        return PartyLayout((layout,))
    return PartyLayout(tuple(layout))


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector on a multipartite layout.

    Vectors within ``1e-10`` of unit norm are renormalized silently; anything
    further off raises :class:`NormalizationError`.
    """

    layout: PartyLayout
    amps: np.ndarray

    def __post_init__(self):
        layout = as_layout(self.layout)
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape[0] != layout.total_dim:
            raise DimensionError(
                f"{amps.shape[0]} amplitudes for layout {layout.dims} "
                f"(expected {layout.total_dim})")
        if not np.all(np.isfinite(amps)):
            raise UsageError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f"state norm {norm!r} differs from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amps", _frozen(amps / norm))

    @classmethod
    def from_vector(cls, vec, layout=None, normalize=False):
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(as_layout(layout if layout is not None else len(vec)), vec)

    @classmethod
    def basis(cls, layout, digits):
        layout = as_layout(layout)
        vec = np.zeros(layout.total_dim, dtype=complex)
        vec[layout.flatten(tuple(digits))] = 1.0
        return cls(layout, vec)

    @property
    def dim(self):
        return self.layout.total_dim

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amps, dtype=dtype)


def _vec(x):
    if isinstance(x, PureState):
        return x.amps
    return np.asarray(x, dtype=complex).reshape(-1)


def inner_product(a, b):
    """``<a|b>`` for states or plain vectors."""
    va, vb = _vec(a), _vec(b)
    if va.shape != vb.shape:
        raise DimensionError(f"length mismatch: {va.shape[0]} vs {vb.shape[0]}")
    return complex(np.vdot(va, vb))


@dataclass(frozen=True, eq=False)
class Dyad:
    """The operator ``|ket><bra|`` on ``layout``; vectors need not be normalized."""

    ket: np.ndarray
    bra: np.ndarray
    layout: PartyLayout

    def __post_init__(self):
        layout = as_layout(self.layout)
        ket = np.asarray(self.ket, dtype=complex).reshape(-1)
        bra = np.asarray(self.bra, dtype=complex).reshape(-1)
        if ket.shape != (layout.total_dim,) or bra.shape != (layout.total_dim,):
            raise DimensionError(
                f"dyad vectors of length {ket.shape[0]}, {bra.shape[0]} "
                f"do not match layout {layout.dims}")
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "ket", _frozen(ket))
        object.__setattr__(self, "bra", _frozen(bra))

    @classmethod
    def from_states(cls, s1, s2):
        """The dyad ``|s2><s1|``."""
        if s1.layout != s2.layout:
            raise DimensionError(f"layouts differ: {s1.layout.dims} vs {s2.layout.dims}")
        return cls(s2.amps, s1.amps, s1.layout)

    def trace(self):
        return complex(np.vdot(self.bra, self.ket))

    def matrix(self):
        """Dense ``D x D`` matrix of the dyad, for ``D <= DYAD_MATRIX_CAP`` only."""
        if self.ket.shape[0] > DYAD_MATRIX_CAP:
            raise UsageError(f"dense dyad limited to D <= {DYAD_MATRIX_CAP}, got {self.ket.shape[0]}")
        return np.outer(self.ket, self.bra.conj())


def _check_parties(layout, parties):
    for p in parties:
        if not 0 <= p < layout.n_parties:
            raise UsageError(f"party index {p} out of range for {layout.n_parties} parties")


def partial_trace_dyad(d, keep):
    """Reduce ``|ket><bra|`` onto the parties in ``keep``.

    The kept parties appear in ascending order in the output index. Entry
    ``[r, c]`` is ``sum_t ket[(r, t)] * conj(bra[(c, t)])`` over the traced
    parties ``t``.
    """
    keep = sorted(set(int(p) for p in keep))
    if not keep:
        raise UsageError("keep set must be nonempty")
    _check_parties(d.layout, keep)
    dims = d.layout.dims
    traced = [p for p in range(len(dims)) if p not in keep]
    perm = keep + traced
    kept_dim = prod(dims[p] for p in keep)
    ket = d.ket.reshape(dims).transpose(perm).reshape(kept_dim, -1)
    bra = d.bra.reshape(dims).transpose(perm).reshape(kept_dim, -1)
    return ket @ bra.conj().T


def condition_dyad(d, party, outcome):
    """Attach outcome ``|e>`` on ``party``: both sides become ``(<e| x I)``."""
    layout = d.layout
    if layout.n_parties < 2:
        raise UsageError("cannot condition a single-party dyad; contract it to a scalar instead")
    _check_parties(layout, [party])
    outcome = np.asarray(outcome, dtype=complex).reshape(-1)
    if outcome.shape[0] != layout.dims[party]:
        raise DimensionError(
            f"outcome length {outcome.shape[0]} != dim {layout.dims[party]} of party {party}")
    dims = layout.dims
    ket = np.tensordot(outcome.conj(), d.ket.reshape(dims), axes=([0], [party]))
    bra = np.tensordot(outcome.conj(), d.bra.reshape(dims), axes=([0], [party]))
    return Dyad(ket.reshape(-1), bra.reshape(-1), layout.drop(party))


def random_pure_state(layout, seed, stream=0):
    """Haar-random state, reproducible from ``(seed, stream)``."""
    layout = as_layout(layout)
    return PureState(layout, haar_vector(make_rng(seed, stream), layout.total_dim))


def random_state_pair(layout, seed):
    """Two independent Haar-random states drawn from one seeded stream."""
    layout = as_layout(layout)
    rng = make_rng(seed)
    s1 = PureState(layout, haar_vector(rng, layout.total_dim))
    s2 = PureState(layout, haar_vector(rng, layout.total_dim))
    return s1, s2


def random_orthogonal_pair(layout, seed):
    """A random pair with the second state Gram-Schmidt orthogonalized to the first."""
    s1, s2 = random_state_pair(layout, seed)
    v = s2.amps - np.vdot(s1.amps, s2.amps) * s1.amps
    v = v - np.vdot(s1.amps, v) * s1.amps
    return s1, PureState(s1.layout, v / np.linalg.norm(v))


# -- plain-text state files ------------------------------------------------

def format_states(states):
    """Serialize one or two states; blocks are separated by a blank line."""
    blocks = []
    for s in states:
        lines = ["dims " + " ".join(str(d) for d in s.layout.dims)]
        lines += [f"{float(a.real)!r} {float(a.imag)!r}" for a in s.amps]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def write_state_file(path, states):
    if isinstance(states, PureState):
        states = [states]
    with open(path, "w") as fh:
        fh.write(format_states(states))


def _parse_complex(line, lineno):
    parts = line.split()
    if len(parts) != 2:
        raise ParseError(f"expected 're im', got {line!r}", lineno)
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise ParseError(f"non-numeric amplitude {line!r}", lineno) from None


def parse_states(text):
    """Parse the text of a state file into a list of one or two states."""
    lines = text.splitlines()
    states = []
    i = 0
    n = len(lines)
    while i < n:
        if not lines[i].strip():
            i += 1
            continue
        header = lines[i].split()
        header_lineno = i + 1
        if not header or header[0] != "dims" or len(header) < 2:
            raise ParseError(f"expected 'dims d1 ... dn', got {lines[i]!r}", header_lineno)
        try:
            layout = PartyLayout(tuple(int(x) for x in header[1:]))
        except (ValueError, UsageError) as exc:
            raise ParseError(f"bad dims header: {exc}", header_lineno) from None
        amps = []
        i += 1
        while i < n and lines[i].strip():
            if len(amps) == layout.total_dim:
                raise ParseError(
                    f"more than {layout.total_dim} amplitudes for dims {layout.dims}", i + 1)
            amps.append(_parse_complex(lines[i], i + 1))
            i += 1
        if len(amps) != layout.total_dim:
            raise ParseError(
                f"expected {layout.total_dim} amplitudes, found {len(amps)}", i + 1)
        try:
            states.append(PureState(layout, np.array(amps)))
        except NormalizationError as exc:
            raise ParseError(str(exc), header_lineno) from None
        if len(states) > 2:
            raise ParseError("at most two states per file", header_lineno)
    if not states:
        raise ParseError("no state found", 1)
    return states


def read_state_file(path):
    with open(path) as fh:
        return parse_states(fh.read())
