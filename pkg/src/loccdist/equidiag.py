"""Unitary similarity to a constant diagonal.

Every square matrix ``M`` is unitarily similar to one whose diagonal entries all
equal ``trace(M) / n``. :func:`equi_diagonalize` builds such a basis with a
deflation loop on ``B = M - tau*I``: each pass zeroes one diagonal entry of ``B``
with at most two plane rotations and freezes it.

The plane-rotation kernel (:func:`solve_pair_rotation`) is closed form. A unit
vector ``u = cos t e_i + exp(i phi) sin t e_j`` maps to the Bloch vector
``x = (sin 2t cos phi, sin 2t sin phi, cos 2t)`` and ``u^H B u`` is affine in
``x``, so hitting a target is a pair of linear equations intersected with the
unit sphere.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ConvergenceError, DimensionError, InfeasibleTargetError, ParseError, UsageError

DEFAULT_TOL = 1e-10
_RANGE_SLACK = 1e-12
_MAX_PASSES = 4


@dataclass(frozen=True, eq=False)
class EquiDiagResult:
    basis: np.ndarray
    tau: complex
    residual: float

    def transformed(self, m):
        return self.basis.conj().T @ np.asarray(m) @ self.basis


def matrix_scale(m):
    m = np.asarray(m)
    return max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0


def _ellipse_inside(a, b, c, d, z, slack):
    """Vectorized membership of ``z`` in the numerical range of [[a, b], [c, d]]."""
    mean = 0.5 * (a + d)
    root = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    lam1, lam2 = mean + root, mean - root
    frob = np.abs(a) ** 2 + np.abs(b) ** 2 + np.abs(c) ** 2 + np.abs(d) ** 2
    minor_sq = np.maximum(frob - np.abs(lam1) ** 2 - np.abs(lam2) ** 2, 0.0) / 4.0
    major = np.sqrt(minor_sq + np.abs(lam1 - lam2) ** 2 / 4.0)
    return np.abs(z - lam1) + np.abs(z - lam2) <= 2.0 * major + slack


def numerical_range_contains(b2, z):
    """Whether ``z`` lies in the field of values of the 2x2 matrix ``b2``.

    For a 2x2 matrix the field of values is the elliptical disk with foci at the
    eigenvalues and minor axis ``sqrt(||B||_F^2 - |l1|^2 - |l2|^2)``.
    """
    b2 = np.asarray(b2, dtype=complex)
    if b2.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 matrix, got shape {b2.shape}")
    return bool(_ellipse_inside(b2[0, 0], b2[0, 1], b2[1, 0], b2[1, 1], complex(z), _RANGE_SLACK))


def _null_direction(null_basis):
    """Deterministic unit vector in the null space, closest to e1, then e2, then e3."""
    # rows of null_basis are orthonormal and span the null space
    for axis in range(3):
        proj = null_basis.T @ null_basis[:, axis]
        norm = np.linalg.norm(proj)
        if norm > 1e-8:
            return proj / norm
    return null_basis[0] / np.linalg.norm(null_basis[0])


def _bloch_solution(a, b, c, d, scale):
    """Bloch vector x with ``u(x)^H [[a, b], [c, d]] u(x) = 0``, or the nearest miss."""
    v = np.array([(b + c) / 2, 1j * (b - c) / 2, (a - d) / 2])
    c0 = (a + d) / 2
    lin = np.vstack([v.real, v.imag])
    rhs = -np.array([c0.real, c0.imag])
    _, sing, vt = np.linalg.svd(lin)
    rank = int(np.sum(sing > 1e-14 * scale))
    x0 = np.zeros(3)
    for k in range(rank):
        x0 += (vt[k] @ lin.T @ rhs) / sing[k] ** 2 * vt[k]
    norm0 = np.linalg.norm(x0)
    if norm0 >= 1.0:
        return x0 / norm0
    null_basis = vt[rank:]
    if null_basis.shape[0] == 0:
        return x0 / norm0
    n = _null_direction(null_basis)
    return x0 + np.sqrt((1.0 - norm0) * (1.0 + norm0)) * n


def _angles_from_bloch(x):
    # atan2 keeps full precision near the poles, where arccos(x3) would not
    t = 0.5 * np.arctan2(np.hypot(x[0], x[1]), x[2])
    phi = float(np.arctan2(x[1], x[0])) % (2 * np.pi)
    # at the poles phi is irrelevant; report 0
    if abs(np.sin(2 * t)) < 1e-15:
        phi = 0.0
    return float(t), phi


def pair_rotation_angles(b, i, j, target, tol=DEFAULT_TOL):
    """Angles ``(t, phi)`` solving ``u^H b u = target`` in the plane of ``e_i, e_j``."""
    b = np.asarray(b, dtype=complex)
    target = complex(target)
    a_ = b[i, i] - target
    d_ = b[j, j] - target
    bij, bji = b[i, j], b[j, i]
    scale = max(1.0, abs(a_), abs(d_), abs(bij), abs(bji))
    x = _bloch_solution(a_, bij, bji, d_, scale)
    t, phi = _angles_from_bloch(x)
    ct, st = np.cos(t), np.sin(t)
    e = np.exp(1j * phi)
    value = ct * ct * b[i, i] + st * st * b[j, j] + ct * st * (e * bij + bji / e)
    residual = abs(value - target)
    if residual > tol:
        raise InfeasibleTargetError(
            f"target {target} not reachable in plane ({i}, {j}); residual {residual:.3e}",
            residual)
    return t, phi


def solve_pair_rotation(b, i, j, target, tol=DEFAULT_TOL):
    """Unit vector ``u`` in span{e_i, e_j} with ``|u^H b u - target| <= tol``.

    ``u = cos t e_i + exp(i phi) sin t e_j`` with ``t`` in [0, pi/2] and ``phi``
    in [0, 2 pi). Raises :class:`InfeasibleTargetError` when the target lies
    outside the numerical range of the 2x2 principal block.
    """
    b = np.asarray(b, dtype=complex)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {b.shape}")
    if i == j or not (0 <= i < b.shape[0] and 0 <= j < b.shape[0]):
        raise UsageError(f"need two distinct valid indices, got ({i}, {j})")
    t, phi = pair_rotation_angles(b, i, j, target, tol)
    u = np.zeros(b.shape[0], dtype=complex)
    u[i] = np.cos(t)
    u[j] = np.exp(1j * phi) * np.sin(t)
    return u


def caratheodory_triple(deviations, eps=1e-12):
    """Smallest ``(i, j, k)`` whose convex hull contains 0, with its weights.

    Returns ``(i, j, k, alpha, beta, gamma)`` with nonnegative weights summing to
    one and ``alpha d_i + beta d_j + gamma d_k = 0``. Collinear triples take the
    minimum-norm weights, which splits ties evenly.
    """
    dev = np.asarray(deviations, dtype=complex)
    n = dev.shape[0]
    if n < 3:
        raise UsageError("need at least three deviations")
    for i, j, k in combinations(range(n), 3):
        w = _barycentric(dev[i], dev[j], dev[k])
        if w is not None and np.all(w >= -eps):
            w = np.clip(w, 0.0, None)
            w = w / w.sum()
            return i, j, k, float(w[0]), float(w[1]), float(w[2])
    raise UsageError("0 is not in the convex hull of the deviations")


def _barycentric(di, dj, dk):
    lhs = np.array([[di.real, dj.real, dk.real],
                    [di.imag, dj.imag, dk.imag],
                    [1.0, 1.0, 1.0]])
    rhs = np.array([0.0, 0.0, 1.0])
    w, *_ = np.linalg.lstsq(lhs, rhs, rcond=1e-13)
    scale = max(abs(di), abs(dj), abs(dk), 1e-300)
    if np.max(np.abs(lhs @ w - rhs) * np.array([1 / scale, 1 / scale, 1.0])) > 1e-9:
        return None
    return w


def _triple_candidates(dev, eps=1e-12):
    """Vectorized scan for the first nondegenerate triple with 0 in its triangle."""
    n = dev.shape[0]
    idx = np.array(list(combinations(range(n), 3)))
    p, q, r = dev[idx[:, 0]], dev[idx[:, 1]], dev[idx[:, 2]]
    # signed doubled areas; barycentric weights of the origin
    def cross(u, v):
        return u.real * v.imag - u.imag * v.real
    area = cross(q - p, r - p)
    wa = cross(q, r)
    wb = cross(r, p)
    wc = cross(p, q)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.stack([wa, wb, wc], axis=1) / area[:, None]
    scale = np.maximum.reduce([np.abs(p), np.abs(q), np.abs(r)]) ** 2
    ok = (np.abs(area) > 1e-12 * scale) & np.all(w >= -eps, axis=1)
    hits = np.nonzero(ok)[0]
    if hits.size == 0:
        return None
    h = hits[0]
    return tuple(int(x) for x in idx[h]), w[h]


def _rotate(c, u_basis, i, j, t, phi):
    ct, st = np.cos(t), np.sin(t)
    e = np.exp(1j * phi)
    g = np.array([[ct, -st / e], [e * st, ct]])
    cols = [i, j]
    u_basis[:, cols] = u_basis[:, cols] @ g
    c[:, cols] = c[:, cols] @ g
    c[cols, :] = g.conj().T @ c[cols, :]


def _pair_with_zero(c, active, pivot, slack):
    """First active pair whose 2x2 block has 0 in its numerical range.

    Pairs containing ``pivot`` are tried first; the pivot is returned first so
    that it is the entry being zeroed.
    """
    act = np.asarray(active)
    others = act[act != pivot]
    if others.size:
        inside = _ellipse_inside(c[pivot, pivot], c[pivot, others], c[others, pivot],
                                 c[others, others], 0.0, slack)
        hit = np.nonzero(inside)[0]
        if hit.size:
            return pivot, int(others[hit[0]])
    pairs = np.array(list(combinations(act, 2)))
    if pairs.size == 0:
        return None
    p, q = pairs[:, 0], pairs[:, 1]
    inside = _ellipse_inside(c[p, p], c[p, q], c[q, p], c[q, q], 0.0, slack)
    hit = np.nonzero(inside)[0]
    if hit.size:
        first, second = pairs[hit[0]]
        if abs(c[second, second]) > abs(c[first, first]):
            first, second = second, first
        return int(first), int(second)
    return None


def _deflation_pass(c, u_basis, tol, scale):
    """Zero the diagonal of the traceless ``c`` in place, one index at a time."""
    n = c.shape[0]
    active = list(range(n))
    slack = _RANGE_SLACK * scale
    while len(active) > 1:
        diag = np.diagonal(c)[active]
        if np.max(np.abs(diag)) <= tol:
            return
        pivot = active[int(np.argmax(np.abs(diag)))]
        pair = _pair_with_zero(c, active, pivot, slack)
        if pair is not None:
            i, j = pair
            t, phi = pair_rotation_angles(c, i, j, 0.0, tol=np.inf)
            _rotate(c, u_basis, i, j, t, phi)
        else:
            dev = np.diagonal(c)[active].copy()
            found = _triple_candidates(dev)
            if found is None:
                a_, b_, c_, *w = caratheodory_triple(dev)
                found = (a_, b_, c_), np.array(w)
            (a_, b_, c_), w = found
            i, j, k = active[a_], active[b_], active[c_]
            alpha, beta = w[0], w[1]
            target = (alpha * c[i, i] + beta * c[j, j]) / (alpha + beta)
            t, phi = pair_rotation_angles(c, i, j, target, tol=np.inf)
            _rotate(c, u_basis, i, j, t, phi)
            t, phi = pair_rotation_angles(c, i, k, 0.0, tol=np.inf)
            _rotate(c, u_basis, i, k, t, phi)
        active.remove(i)


def equi_diagonalize(m, tol=None):
    """Orthonormal basis in which ``m`` has constant diagonal ``trace(m)/n``.

    ``tol`` defaults to ``1e-10 * max(1, max|m_ij|)`` and bounds the returned
    residual ``max_i |<phi_i|m|phi_i> - tau|``. The basis is returned as the
    columns of a unitary matrix. Raises :class:`ConvergenceError` if the
    residual cannot be brought under ``tol``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n < 1:
        raise DimensionError("empty matrix")
    if not np.all(np.isfinite(m)):
        raise UsageError("matrix entries must be finite")
    scale = matrix_scale(m)
    if tol is None:
        tol = DEFAULT_TOL * scale
    if tol <= 0:
        raise UsageError("tol must be positive")
    tau = complex(np.trace(m) / n)
    basis = np.eye(n, dtype=complex)
    if n == 1:
        return EquiDiagResult(basis, tau, 0.0)
    shifted = m - tau * np.eye(n)
    best = (np.inf, basis)
    for _ in range(_MAX_PASSES):
        c = basis.conj().T @ shifted @ basis
        residual = float(np.max(np.abs(np.diagonal(c))))
        if residual < best[0]:
            best = (residual, basis.copy())
        if residual <= tol:
            break
        _deflation_pass(c, basis, tol * 1e-3, scale)
        # re-orthonormalize so rounding does not accumulate across passes
        q, r = np.linalg.qr(basis)
        basis = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    else:
        c = basis.conj().T @ shifted @ basis
        residual = float(np.max(np.abs(np.diagonal(c))))
        if residual < best[0]:
            best = (residual, basis.copy())
    residual, basis = best
    if residual > tol:
        raise ConvergenceError(
            f"equi-diagonalization stalled at residual {residual:.3e} > tol {tol:.3e}", residual)
    basis.flags.writeable = False
    return EquiDiagResult(basis, tau, residual)


# -- plain-text matrix files ----------------------------------------------

def format_matrix(m):
    m = np.asarray(m, dtype=complex)
    lines = [f"dim {m.shape[0]}"]
    lines += [f"{float(z.real)!r} {float(z.imag)!r}" for z in m.reshape(-1)]
    return "\n".join(lines) + "\n"


def parse_matrix(text):
    """Parse ``dim n`` followed by ``n*n`` lines of ``re im`` (row-major)."""
    lines = [(k + 1, ln) for k, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise ParseError("empty matrix file", 1)
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != "dim":
        raise ParseError(f"expected 'dim n', got {header!r}", lineno)
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError(f"bad dimension {parts[1]!r}", lineno) from None
    if n < 1:
        raise ParseError("dimension must be positive", lineno)
    body = lines[1:]
    if len(body) != n * n:
        where = body[n * n][0] if len(body) > n * n else (body[-1][0] + 1 if body else lineno + 1)
        raise ParseError(f"expected {n * n} entries, found {len(body)}", where)
    vals = []
    for k, ln in body:
        bits = ln.split()
        if len(bits) != 2:
            raise ParseError(f"expected 're im', got {ln!r}", k)
        try:
            vals.append(complex(float(bits[0]), float(bits[1])))
        except ValueError:
            raise ParseError(f"non-numeric entry {ln!r}", k) from None
    return np.array(vals, dtype=complex).reshape(n, n)


def read_matrix_file(path):
    with open(path) as fh:
        return parse_matrix(fh.read())


def write_matrix_file(path, m):
    with open(path, "w") as fh:
        fh.write(format_matrix(m))
