import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loccdist.errors import DimensionError, NormalizationError, ParseError, UsageError
from loccdist.statekit import (Dyad, PartyLayout, PureState, condition_dyad, format_states,
                               inner_product, parse_states, partial_trace_dyad, random_pure_state,
                               random_state_pair, read_state_file, write_state_file)

from conftest import SQRT_HALF

layouts = st.lists(st.integers(1, 4), min_size=1, max_size=3)


def naive_inner(a, b):
    total = 0j
    for i in reversed(range(len(a))):
        total += np.conj(a[i]) * b[i]
    return total


def dense_partial_trace(ket, bra, layout, keep):
    """Index-summation partial trace over every flat index pair."""
    keep = sorted(keep)
    traced = [p for p in range(layout.n_parties) if p not in keep]
    kept_layout = layout.sub(keep)
    out = np.zeros((kept_layout.total_dim, kept_layout.total_dim), dtype=complex)
    for i in range(layout.total_dim):
        di = layout.unflatten(i)
        for j in range(layout.total_dim):
            dj = layout.unflatten(j)
            if all(di[p] == dj[p] for p in traced):
                r = kept_layout.flatten(tuple(di[p] for p in keep))
                c = kept_layout.flatten(tuple(dj[p] for p in keep))
                out[r, c] += ket[i] * np.conj(bra[j])
    return out


class TestLayout:
    def test_total_dim(self):
        assert PartyLayout((2, 3, 4)).total_dim == 24

    def test_rejects_bad_dims(self):
        with pytest.raises(UsageError):
            PartyLayout(())
        with pytest.raises(UsageError):
            PartyLayout((2, 0))

    def test_party_zero_most_significant(self):
        layout = PartyLayout((2, 3))
        assert layout.flatten((1, 0)) == 3
        assert layout.unflatten(5) == (1, 2)

    @given(layouts)
    def test_round_trip(self, dims):
        layout = PartyLayout(tuple(dims))
        for i in range(layout.total_dim):
            assert layout.flatten(layout.unflatten(i)) == i


class TestPureState:
    def test_renormalizes_small_defect(self):
        s = PureState([2], [1 + 5e-11, 0])
        assert s.amps[0] == 1.0

    def test_rejects_large_defect(self):
        with pytest.raises(NormalizationError):
            PureState([2], [1.001, 0])

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            PureState([2, 2], [1, 0])

    def test_immutable(self, bell):
        with pytest.raises(ValueError):
            bell.amps[0] = 0


class TestInnerProduct:
    def test_self_overlap(self, bell):
        assert abs(inner_product(bell, bell) - 1) < 1e-15

    def test_basis_against_bell(self, ket00, bell):
        assert abs(inner_product(ket00, bell) - SQRT_HALF) < 1e-15

    def test_against_reverse_loop(self):
        for seed in range(20):
            a, b = random_state_pair([3, 4], seed)
            assert abs(inner_product(a, b) - naive_inner(a.amps, b.amps)) <= 1e-14

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            inner_product([1, 0], [1, 0, 0])


class TestPartialTrace:
    def test_bell_dyad(self, ket00, bell):
        m = partial_trace_dyad(Dyad.from_states(ket00, bell), {0})
        expected = np.array([[SQRT_HALF, 0], [0, 0]])
        assert np.max(np.abs(m - expected)) < 1e-15
        assert np.max(np.abs(m - dense_partial_trace(bell.amps, ket00.amps, bell.layout, [0]))) < 1e-15

    def test_product_dyad_factorizes(self):
        rng = np.random.default_rng(3)
        u, up = rng.normal(size=2) + 1j * rng.normal(size=2), rng.normal(size=2) + 0j
        v, vp = rng.normal(size=3) + 1j * rng.normal(size=3), rng.normal(size=3) - 1j
        d = Dyad(np.kron(u, v), np.kron(up, vp), PartyLayout((2, 3)))
        expected = np.vdot(vp, v) * np.outer(u, up.conj())
        assert np.max(np.abs(partial_trace_dyad(d, {0}) - expected)) < 1e-13

    @pytest.mark.parametrize("keep", [{0}, {1}, {2}, {0, 2}, {1, 2}, {0, 1, 2}])
    def test_matches_dense_oracle(self, keep):
        a, b = random_state_pair([2, 3, 2], 11)
        d = Dyad.from_states(a, b)
        dense = dense_partial_trace(d.ket, d.bra, d.layout, keep)
        assert np.max(np.abs(partial_trace_dyad(d, keep) - dense)) < 1e-14

    def test_trace_identity(self):
        for seed in range(50):
            dims = [[2, 2], [2, 3], [3, 2, 2], [4]][seed % 4]
            a, b = random_state_pair(dims, seed)
            d = Dyad.from_states(a, b)
            for keep in range(len(dims)):
                m = partial_trace_dyad(d, {keep})
                assert abs(np.trace(m) - inner_product(a, b)) <= 1e-12

    def test_bad_keep(self, bell):
        d = Dyad.from_states(bell, bell)
        with pytest.raises(UsageError):
            partial_trace_dyad(d, set())
        with pytest.raises(UsageError):
            partial_trace_dyad(d, {2})


class TestConditionDyad:
    def test_bell_plus_outcome(self, ket00, bell):
        plus = np.array([1, 1]) * SQRT_HALF
        c = condition_dyad(Dyad.from_states(ket00, bell), 0, plus)
        assert np.max(np.abs(c.ket - np.array([0.5, 0.5]))) < 1e-15
        assert np.max(np.abs(c.bra - np.array([SQRT_HALF, 0]))) < 1e-15
        assert c.layout.dims == (2,)

    def test_orthogonal_outcome_kills_ket(self):
        ket = PureState([2, 2], [0, 0, 1, 0])
        c = condition_dyad(Dyad.from_states(ket, ket), 0, [1, 0])
        assert np.all(c.ket == 0)

    def test_sequential_basis_conditioning_gives_entries(self):
        a, b = random_state_pair([2, 3, 2], 5)
        d = Dyad.from_states(a, b)
        full = d.matrix()
        layout = d.layout
        for i in range(layout.total_dim):
            di = layout.unflatten(i)
            cur = d
            for p in range(2):
                e = np.eye(layout.dims[p])[di[p]]
                cur = condition_dyad(cur, 0, e)
            e = np.eye(layout.dims[2])[di[2]]
            value = np.vdot(e, cur.matrix() @ e)
            assert abs(value - full[i, i]) < 1e-15

    def test_completeness_over_basis(self):
        a, b = random_state_pair([3, 2, 2], 2)
        d = Dyad.from_states(a, b)
        basis = np.linalg.qr(np.arange(9).reshape(3, 3) + 1j * np.eye(3))[0]
        total = sum(partial_trace_dyad(condition_dyad(d, 0, basis[:, k]), {0})
                    for k in range(3))
        assert np.max(np.abs(total - partial_trace_dyad(d, {1}))) <= 1e-12

    def test_single_party_rejected(self):
        s = PureState([2], [1, 0])
        with pytest.raises(UsageError):
            condition_dyad(Dyad.from_states(s, s), 0, [1, 0])

    def test_outcome_length(self, bell):
        with pytest.raises(DimensionError):
            condition_dyad(Dyad.from_states(bell, bell), 0, [1, 0, 0])


class TestRandomState:
    def test_deterministic(self):
        a = random_pure_state([2, 3], 42)
        b = random_pure_state([2, 3], 42)
        assert np.array_equal(a.amps, b.amps)

    def test_norm(self):
        for seed in range(20):
            assert abs(np.linalg.norm(random_pure_state([5], seed).amps) - 1) < 1e-12

    def test_haar_second_moment(self):
        # E|a_0|^2 = 1/D for Haar-random states
        vals = [abs(random_pure_state([4], seed).amps[0]) ** 2 for seed in range(10_000)]
        assert abs(np.mean(vals) - 0.25) < 0.01

    def test_frozen_draw(self):
        amps = random_pure_state([2], 0).amps
        assert np.allclose(np.abs(amps) ** 2, [0.04031338877369368, 0.9596866112263064], atol=1e-12)


class TestStateFile:
    def test_single_ket(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("dims 2\n1 0\n0 0\n")
        (s,) = read_state_file(p)
        assert np.array_equal(s.amps, [1, 0])

    def test_count_mismatch_line(self):
        with pytest.raises(ParseError) as err:
            parse_states("dims 2\n1 0\n0 0\n0 0\n")
        assert err.value.lineno == 4

    def test_too_few(self):
        with pytest.raises(ParseError):
            parse_states("dims 2 2\n1 0\n0 0\n")

    def test_bad_header(self):
        with pytest.raises(ParseError) as err:
            parse_states("dim 2\n1 0\n0 0\n")
        assert err.value.lineno == 1

    def test_norm_defect(self):
        with pytest.raises(ParseError):
            parse_states("dims 2\n1 0\n1 0\n")

    def test_round_trip_exact(self, tmp_path):
        a, b = random_state_pair([2, 3], 9)
        p = tmp_path / "pair.txt"
        write_state_file(p, [a, b])
        a2, b2 = read_state_file(p)
        assert np.array_equal(a.amps, a2.amps) and np.array_equal(b.amps, b2.amps)
        assert a2.layout.dims == (2, 3)

    def test_two_blocks(self, ket00, bell):
        s1, s2 = parse_states(format_states([ket00, bell]))
        assert abs(inner_product(s1, s2) - SQRT_HALF) < 1e-15


def test_dense_dyad_cap():
    s = PureState.basis([65], (0,))
    with pytest.raises(UsageError):
        Dyad.from_states(s, s).matrix()
