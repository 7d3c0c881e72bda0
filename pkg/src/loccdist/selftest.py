"""A quick invariant sweep used by ``loccdist selftest``.

Each check returns ``(value, tolerance)`` and passes when ``value <= tolerance``.
Sizes are kept small so the sweep runs in a few seconds; the full-size runs live
in the test suite.
"""

import numpy as np

from .equidiag import equi_diagonalize, matrix_scale
from .locc import check_stage_cascade, completeness_defect, discriminate_orthogonal, locc_distance, run_locc
from .measure import Povm, global_distance, measurement_distance
from .mixed import (MixedState, bures_angle, mixed_measurement_distance, random_density_pair,
                    transition_equidiag_gap)
from .oracle import SearchConfig, optimize_global_measurement, sample_bound_check
from .rand import ginibre, make_rng, random_rank1_povm_elements
from .statekit import PureState, random_orthogonal_pair, random_state_pair


def _worked_example():
    s1 = PureState.basis([2, 2], (0, 0))
    s2 = PureState([2, 2], np.array([1, 0, 0, 1]) / np.sqrt(2))
    t = run_locc(s1, s2)
    amp_err = np.max(np.abs(t.leaf_amplitudes() - 1 / (4 * np.sqrt(2))))
    d_err = max(abs(locc_distance(t) - np.pi / 4), abs(global_distance(s1, s2) - np.pi / 4))
    return max(amp_err, d_err), 1e-9


def _leaf_constancy():
    worst = 0.0
    for layout in ([2, 2], [2, 3], [2, 2, 2]):
        for seed in range(10):
            s1, s2 = random_state_pair(layout, seed)
            t = run_locc(s1, s2)
            amps = t.leaf_amplitudes()
            worst = max(worst,
                        abs(np.sum(np.abs(amps)) - abs(t.overlap)),
                        np.max(np.abs(amps - t.overlap / t.total_dim)))
    return worst, 1e-9


def _cascade():
    worst = 0.0
    for seed in range(10):
        s1, s2 = random_state_pair([2, 3, 2], seed)
        t = run_locc(s1, s2)
        worst = max(worst, check_stage_cascade(t).worst(), completeness_defect(t))
    return worst, 1e-9


def _order_invariance():
    worst = 0.0
    for seed in range(3):
        s1, s2 = random_state_pair([2, 3, 2], seed)
        ds = [locc_distance(run_locc(s1, s2, o))
              for o in [(0, 1, 2), (2, 1, 0), (1, 2, 0)]]
        worst = max(worst, max(ds) - min(ds))
    return worst, 1e-9


def _equidiag():
    worst = 0.0
    for seed in range(30):
        n = 2 + seed % 15
        m = ginibre(make_rng(seed, 7), n)
        res = equi_diagonalize(m)
        diag = np.diagonal(res.basis.conj().T @ m @ res.basis)
        worst = max(worst, np.max(np.abs(diag - np.trace(m) / n)) / matrix_scale(m))
    return worst, 1e-10


def _bound():
    return max(sample_bound_check(d, 200, 1) for d in (2, 3, 4)), 1e-12


def _equidiag_tight():
    worst = 0.0
    for seed in range(20):
        s1, s2 = random_state_pair([4], seed)
        basis = equi_diagonalize(np.outer(s2.amps, s1.amps.conj())).basis
        worst = max(worst, abs(measurement_distance(s1, s2, Povm.from_basis(basis))
                               - global_distance(s1, s2)))
    return worst, 1e-9


def _oracle():
    worst = 0.0
    for seed in range(3):
        s1, s2 = random_state_pair([3], seed)
        best, _ = optimize_global_measurement(s1, s2, SearchConfig(seed=seed))
        worst = max(worst, abs(global_distance(s1, s2) - best))
    return worst, 1e-6


def _orthogonal():
    worst = 0.0
    for layout in ([2, 2], [3, 3]):
        for seed in range(5):
            s1, s2 = random_orthogonal_pair(layout, seed)
            worst = max(worst, discriminate_orthogonal(s1, s2).max_ambiguity())
    return worst, 1e-18


def _bures_pure():
    worst = 0.0
    for seed in range(10):
        s1, s2 = random_state_pair([3], seed)
        d = bures_angle(MixedState.from_pure(s1), MixedState.from_pure(s2))
        worst = max(worst, abs(d - global_distance(s1, s2)))
    return worst, 1e-10


def _bures_ceiling():
    r1, r2 = random_density_pair(2, 0)
    ceiling = bures_angle(r1, r2)
    rng = make_rng(0, 1)
    worst = -np.inf
    for _ in range(500):
        count = 2 if rng.random() < 0.5 else 4
        povm = Povm(random_rank1_povm_elements(rng, 2, count))
        worst = max(worst, mixed_measurement_distance(r1, r2, povm) - ceiling)
    return worst, 1e-9


def _gap_witness():
    best = max(transition_equidiag_gap(*random_density_pair(2, s)).gap for s in range(10))
    # pass when some seed shows a gap of at least 1e-3
    return 1e-3 - best, 0.0


CHECKS = [
    ("worked example |00> vs Bell", _worked_example),
    ("leaf amplitudes all equal <s1|s2>/D", _leaf_constancy),
    ("stage cascade and completeness", _cascade),
    ("party-order invariance", _order_invariance),
    ("equi-diagonal residual", _equidiag),
    ("measurement bound on random POVMs", _bound),
    ("equi-diagonal basis reaches the bound", _equidiag_tight),
    ("brute-force optimizer reaches the bound", _oracle),
    ("orthogonal pairs perfectly discriminated", _orthogonal),
    ("Bures angle on pure states", _bures_pure),
    ("mixed measurements under the Bures angle", _bures_ceiling),
    ("transition-operator basis suboptimal", _gap_witness),
]


def run_checks():
    """Run every check; returns a list of ``(name, value, tol, passed)``."""
    results = []
    for name, fn in CHECKS:
        value, tol = fn()
        value = float(value)
        results.append((name, value, tol, bool(value <= tol)))
    return results
