import dataclasses
from itertools import permutations

import numpy as np
import pytest

from loccdist import locc as locc_mod
from loccdist.equidiag import equi_diagonalize
from loccdist.errors import ConvergenceError, DimensionError, UsageError
from loccdist.locc import (UNREACHABLE_PROB, check_stage_cascade, completeness_defect,
                           discriminate_orthogonal, leaf_overlap_sum, locc_distance, orders_agree,
                           run_locc)
from loccdist.measure import global_distance, outcome_distribution, Povm
from loccdist.statekit import PureState, inner_product, random_orthogonal_pair, random_state_pair

from conftest import SQRT_HALF


def perturb_leaf(t, index, delta):
    leaves = list(t.leaves)
    leaves[index] = dataclasses.replace(leaves[index], amplitude=leaves[index].amplitude + delta)
    return dataclasses.replace(t, leaves=leaves)


class TestWorkedExample:
    def test_leaves(self, ket00, bell):
        t = run_locc(ket00, bell)
        assert len(t.leaves) == 4
        assert np.max(np.abs(t.leaf_amplitudes() - 0.17677669529663687)) < 1e-15
        assert [leaf.label for leaf in t.leaves] == ["0-0", "0-1", "1-0", "1-1"]

    def test_root_basis_is_diagonal_split(self, ket00, bell):
        root = run_locc(ket00, bell).nodes[()]
        assert root.party == 0
        assert np.allclose(np.abs(root.basis), SQRT_HALF, atol=1e-12)
        reduced = SQRT_HALF * np.diag([1.0, 0.0])
        diag = np.diagonal(root.basis.conj().T @ reduced @ root.basis)
        assert np.allclose(diag, SQRT_HALF / 2, atol=1e-15)

    def test_distance(self, ket00, bell):
        t = run_locc(ket00, bell)
        assert abs(locc_distance(t) - np.pi / 4) < 1e-12
        assert abs(leaf_overlap_sum(t) - SQRT_HALF) < 1e-15

    def test_identical_states(self):
        s, _ = random_state_pair([2, 3], 4)
        t = run_locc(s, s)
        assert np.max(np.abs(t.leaf_amplitudes() - 1 / 6)) < 1e-12
        p1 = np.array([leaf.p1 for leaf in t.leaves])
        p2 = np.array([leaf.p2 for leaf in t.leaves])
        assert np.max(np.abs(p1 - 1 / 6)) < 1e-12 and np.array_equal(p1, p2)
        assert locc_distance(t) < 1e-7

    def test_orthogonal_states(self):
        t = run_locc(*random_orthogonal_pair([2, 2], 1))
        assert abs(locc_distance(t) - np.pi / 2) < 1e-9
        assert np.max(np.abs(t.leaf_amplitudes())) < 1e-12


class TestProtocolInvariants:
    @pytest.mark.parametrize("layout", [[2, 2], [2, 3], [3, 2], [2, 3, 2], [2, 2, 2, 2], [4, 3]])
    def test_optimality_and_constancy(self, layout):
        for seed in range(10):
            s1, s2 = random_state_pair(layout, seed)
            t = run_locc(s1, s2)
            o = inner_product(s1, s2)
            assert abs(leaf_overlap_sum(t) - abs(o)) <= 1e-9
            assert np.max(np.abs(t.leaf_amplitudes() - o / t.total_dim)) <= 1e-9
            assert abs(locc_distance(t) - global_distance(s1, s2)) <= 1e-9
            assert check_stage_cascade(t).worst() <= 1e-9
            assert completeness_defect(t) <= 1e-9
            assert abs(sum(leaf.p1 for leaf in t.leaves) - 1) <= 1e-9
            assert abs(sum(leaf.p2 for leaf in t.leaves) - 1) <= 1e-9

    @pytest.mark.parametrize("order", [(0, 1, 2), (2, 0, 1)])
    def test_three_party_orders(self, order):
        s1, s2 = random_state_pair([2, 3, 2], 17)
        t = run_locc(s1, s2, order)
        assert t.order == order
        assert abs(leaf_overlap_sum(t) - abs(inner_product(s1, s2))) <= 1e-9

    def test_all_orders_agree(self):
        s1, s2 = random_state_pair([2, 3, 2], 3)
        ds = orders_agree(s1, s2)
        assert set(ds) == set(permutations(range(3)))
        assert max(ds.values()) - min(ds.values()) <= 1e-9

    def test_leaf_probabilities_recomputed(self):
        s1, s2 = random_state_pair([3, 2], 8)
        t = run_locc(s1, s2, (1, 0))
        for leaf in t.leaves:
            assert abs(leaf.p1 - abs(np.vdot(leaf.vector, s1.amps)) ** 2) < 1e-15
        # product vectors are in layout order: party 0's factor comes first
        vecs = np.array([leaf.vector for leaf in t.leaves])
        assert abs(np.linalg.det(vecs)) == pytest.approx(1.0, abs=1e-12)

    def test_single_party(self):
        s1, s2 = random_state_pair([5], 2)
        t = run_locc(s1, s2)
        assert len(t.leaves) == 5
        assert abs(locc_distance(t) - global_distance(s1, s2)) <= 1e-9


class TestCascade:
    def test_fault_injection(self):
        s1, s2 = random_state_pair([2, 3], 6)
        t = run_locc(s1, s2)
        assert check_stage_cascade(t).worst() <= 1e-9
        bad = perturb_leaf(t, 2, 1e-3)
        assert check_stage_cascade(bad).worst() >= 9e-4

    def test_three_party_telescope(self):
        s1, s2 = random_state_pair([2, 2, 3], 9)
        t = run_locc(s1, s2)
        o = np.vdot(s1.amps, s2.amps)
        for leaf in t.leaves:
            assert abs(2 * 2 * 3 * leaf.amplitude - o) <= 1e-9
        for h, node in t.nodes.items():
            if len(h) == 1:
                assert abs(2 * node.stage_amplitude - o) <= 1e-9

    def test_root_amplitude(self):
        s1, s2 = random_state_pair([3, 3], 1)
        t = run_locc(s1, s2)
        assert t.nodes[()].stage_amplitude == pytest.approx(np.vdot(s1.amps, s2.amps), abs=1e-14)


class TestDiscrimination:
    def test_product_orthogonal(self):
        s1, s2 = PureState.basis([2, 2], (0, 0)), PureState.basis([2, 2], (1, 1))
        d = discriminate_orthogonal(s1, s2)
        assert d.max_ambiguity() <= UNREACHABLE_PROB
        for leaf in d.transcript.leaves:
            v = d.verdicts[leaf.label]
            if v == "either":
                assert leaf.p1 <= UNREACHABLE_PROB and leaf.p2 <= UNREACHABLE_PROB
            else:
                assert {1: leaf.p1, 2: leaf.p2}[v] > 0

    def test_bell_pair(self):
        phi_plus = PureState([2, 2], np.array([1, 0, 0, 1]) * SQRT_HALF)
        phi_minus = PureState([2, 2], np.array([1, 0, 0, -1]) * SQRT_HALF)
        d = discriminate_orthogonal(phi_plus, phi_minus)
        assert np.max(np.abs(d.transcript.leaf_amplitudes())) < 1e-15
        assert d.max_ambiguity() <= UNREACHABLE_PROB
        # the root basis zero-diagonalizes the traceless reduced dyad
        reduced = np.diag([0.5, -0.5])
        root = d.transcript.nodes[()].basis
        assert np.max(np.abs(np.diagonal(root.conj().T @ reduced @ root))) < 1e-15

    @pytest.mark.parametrize("layout", [[2, 2], [3, 3], [2, 3, 2]])
    def test_random_orthogonal(self, layout):
        for seed in range(10):
            s1, s2 = random_orthogonal_pair(layout, seed)
            d = discriminate_orthogonal(s1, s2)
            assert d.max_ambiguity() <= UNREACHABLE_PROB
            # recompute leaf probabilities from the product basis independently
            povm = Povm(np.array([leaf.vector for leaf in d.transcript.leaves]))
            q1 = outcome_distribution(s1, povm).probs
            q2 = outcome_distribution(s2, povm).probs
            assert np.max(np.minimum(q1, q2)) <= UNREACHABLE_PROB

    def test_non_orthogonal(self, ket00, bell):
        with pytest.raises(UsageError, match="7.071e-01"):
            discriminate_orthogonal(ket00, bell)


class TestErrors:
    def test_layout_mismatch(self, bell):
        with pytest.raises(DimensionError):
            run_locc(bell, PureState([4], bell.amps))

    @pytest.mark.parametrize("order", [(0, 0), (0,), (1, 2)])
    def test_bad_order(self, bell, order):
        with pytest.raises(UsageError):
            run_locc(bell, bell, order)

    def test_leaf_cap(self):
        s = PureState.basis([65, 64], (0, 0))
        with pytest.raises(UsageError):
            run_locc(s, s)

    def test_convergence_error_carries_path(self, monkeypatch):
        s1, s2 = random_state_pair([2, 2], 0)
        calls = []

        def failing(m, tol=None):
            calls.append(m.shape)
            if len(calls) > 1:
                raise ConvergenceError("stalled", 1.0)
            return equi_diagonalize(m, tol)

        monkeypatch.setattr(locc_mod, "equi_diagonalize", failing)
        with pytest.raises(ConvergenceError) as err:
            run_locc(s1, s2)
        assert err.value.path == (0,)
        assert "(0,)" in str(err.value)
