"""Brute-force search over measurements, independent of the constructive modules.

Nothing here calls the equi-diagonalization or LOCC code: the optimizer climbs
over orthonormal bases with random unitary kicks, and the bound check draws
random rank-1 POVMs.
"""

from dataclasses import dataclass
from math import asin, factorial, sqrt

import numpy as np

from .errors import UsageError
from .rand import complex_gaussian, haar_unitary, haar_vector, make_rng, random_rank1_povm_elements

TAYLOR_TERMS = 12
_TAYLOR_NORM = 0.25
_MIN_STEP = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 8
    steps: int = 400
    step_size: float = 0.5
    seed: int = 0
    dim_cap: int = 8

    def __post_init__(self):
        if self.restarts < 1 or self.steps < 1:
            raise UsageError("restarts and steps must be >= 1")
        if not 0 < self.step_size <= 1:
            raise UsageError("step size must lie in (0, 1]")


def _taylor_blocks():
    # coefficient of a^(4m + r) is 1/(4m + r)!, grouped for Paterson-Stockmeyer
    coef = np.zeros((4, 4))
    for j in range(TAYLOR_TERMS + 1):
        coef[j // 4, j % 4] = 1.0 / factorial(j)
    return coef


_PS_COEF = _taylor_blocks()


def expm_skew(k):
    """Matrix exponential by scaling and squaring a 12-term Taylor series.

    The argument is scaled by a power of two until its 1-norm is at most 1/4,
    where the truncation error is below 1e-17. The polynomial is evaluated in
    Paterson-Stockmeyer form (blocks of four powers), which needs six matrix
    products instead of twelve.
    """
    k = np.asarray(k, dtype=complex)
    n = k.shape[0]
    norm = np.abs(k).sum(axis=0).max() if k.size else 0.0
    squarings = max(0, int(np.ceil(np.log2(norm / _TAYLOR_NORM)))) if norm > 0 else 0
    a = k / 2.0 ** squarings
    powers = np.empty((4, n, n), dtype=complex)
    powers[0] = np.eye(n)
    powers[1] = a
    np.matmul(a, a, out=powers[2])
    np.matmul(powers[2], a, out=powers[3])
    a4 = powers[2] @ powers[2]
    blocks = (_PS_COEF @ powers.reshape(4, -1)).reshape(4, n, n)
    result = blocks[3]
    for m in (2, 1, 0):
        result = blocks[m] + a4 @ result
    for _ in range(squarings):
        result = result @ result
    return result


def _reunitarize(u):
    q, r = np.linalg.qr(u)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _random_skew(rng, dim, scale):
    g = complex_gaussian(rng, (dim, dim))
    return scale * (g - g.conj().T) / 2.0


def climb(objective, dim, cfg):
    """Maximize ``objective(unitary)`` by random-restart hill climbing.

    Each restart starts from a Haar unitary. A step draws a random unit
    skew-Hermitian direction ``K`` and evaluates ``U exp(+-hK)`` plus the vertex
    of the parabola through the three values; the best point is kept if it
    improves. The step ``h`` grows by 1.5 on success and halves otherwise.
    Restart ``r`` draws from stream ``r`` of the seed, so restarts are
    independent. Returns ``(best_value, best_unitary)``; ties go to the lower
    restart index.
    """
    best_val, best_u = -np.inf, None
    for r in range(cfg.restarts):
        rng = make_rng(cfg.seed, r)
        u = haar_unitary(rng, dim)
        val = objective(u)
        step = cfg.step_size
        for _ in range(cfg.steps):
            k = _random_skew(rng, dim, 1.0)
            k /= np.linalg.norm(k)
            e = expm_skew(step * k)
            up, um = u @ e, u @ e.conj().T
            fp, fm = objective(up), objective(um)
            cand_val, cand = (fp, up) if fp >= fm else (fm, um)
            curvature = fp + fm - 2.0 * val
            if curvature < 0:
                s = np.clip(0.5 * step * (fp - fm) / -curvature, -2.0 * step, 2.0 * step)
                uq = u @ expm_skew(s * k)
                fq = objective(uq)
                if fq > cand_val:
                    cand_val, cand = fq, uq
            if cand_val > val:
                u, val = _reunitarize(cand), cand_val
                step = min(1.5 * step, cfg.step_size)
            else:
                step *= 0.5
                if step < _MIN_STEP:
                    break
        val = objective(u)
        if val > best_val:
            best_val, best_u = val, u
    return best_val, best_u


def _basis_distance(c1, c2, u):
    # c = conj(state), so (c @ u)_i = conj(<u_i|state>)
    diff = np.abs(c1 @ u) - np.abs(c2 @ u)
    h = sqrt(diff @ diff / 4.0)
    return 2.0 * asin(min(h, 1.0))


def optimize_global_measurement(s1, s2, cfg=None):
    """Largest measurement distance found over orthonormal bases.

    Returns ``(distance, basis)`` with the basis as columns of a unitary.
    """
    cfg = SearchConfig() if cfg is None else cfg
    c1, c2 = np.conj(s1.amps), np.conj(s2.amps)
    dim = c1.shape[0]
    if dim > cfg.dim_cap:
        raise UsageError(f"dimension {dim} exceeds the search cap {cfg.dim_cap}")
    return climb(lambda u: _basis_distance(c1, c2, u), dim, cfg)


def sample_bound_check(dim, trials, seed, povm="random"):
    """Worst ``|<s1|s2>| - sum_i |<phi_i|s2><s1|phi_i>|`` over random draws.

    With ``povm="random"`` each trial draws a state pair and a rank-1 POVM with
    ``dim`` or ``2*dim`` elements; the result is the largest bound violation and
    should never be positive beyond rounding. ``povm`` may instead be a callable
    ``(s1_vec, s2_vec) -> elements`` supplying the measurement for each trial,
    in which case the result is the largest ``|sum - |<s1|s2>||``.
    """
    if dim > 16:
        raise UsageError("sample_bound_check supports dim <= 16")
    rng = make_rng(seed)
    worst = -np.inf
    for _ in range(trials):
        a1 = haar_vector(rng, dim)
        a2 = haar_vector(rng, dim)
        overlap = abs(np.vdot(a1, a2))
        if povm == "random":
            count = dim if rng.random() < 0.5 else 2 * dim
            el = random_rank1_povm_elements(rng, dim, count)
        else:
            el = np.asarray(povm(a1, a2))
        terms = (el.conj() @ a2) * (el.conj() @ a1).conj()
        total = float(np.sum(np.abs(terms)))
        gap = overlap - total if povm == "random" else abs(total - overlap)
        worst = max(worst, gap)
    return float(worst)
