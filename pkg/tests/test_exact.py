import math

import numpy as np
import pytest

from concopt.exact import (
    FockBasis,
    apply_annihilation,
    apply_creation,
    many_body_ground_state,
    oracle_concurrence,
    oracle_correlators,
    sample_oracle_case,
    wick_oracle_deviation,
)
from concopt.fermion import assemble_hamiltonian
from concopt.lattice import Lattice, build_ring


class TestFockBasis:
    def test_counts_and_order(self):
        basis = FockBasis.build(6, 3)
        assert basis.dim == math.comb(6, 3)
        states = list(basis.states)
        assert states == sorted(states)
        assert all(s.bit_count() == 3 for s in states)

    def test_site_limit(self):
        with pytest.raises(ValueError):
            FockBasis.build(17, 2)


def _operator_matrix(n_sites, site, create):
    """Dense matrix of c+_site or c_site on the full 2^n Fock space."""
    dim = 1 << n_sites
    m = np.zeros((dim, dim))
    for s in range(dim):
        s2, sign = (apply_creation if create else apply_annihilation)(s, site)
        if sign:
            m[s2, s] = sign
    return m


class TestSignConvention:
    def test_anticommutators(self):
        n = 4
        eye = np.eye(1 << n)
        for i in range(n):
            ci = _operator_matrix(n, i, create=False)
            for j in range(n):
                cj_dag = _operator_matrix(n, j, create=True)
                anti = ci @ cj_dag + cj_dag @ ci
                assert np.allclose(anti, eye if i == j else 0.0, atol=1e-14)
            cj = _operator_matrix(n, i, create=False)
            assert np.allclose(ci @ cj + cj @ ci, 0.0, atol=1e-14)

    def test_pair_anticommutation(self):
        n = 3
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                ci = _operator_matrix(n, i, create=False)
                cj = _operator_matrix(n, j, create=False)
                assert np.allclose(ci @ cj, -(cj @ ci), atol=1e-14)


class TestGroundState:
    def test_dimer(self):
        lat = Lattice("dimer", 2, [(0, 1)])
        gs = many_body_ground_state(lat, [-1.0], 1)
        assert abs(gs.energy + 1.0) < 1e-12
        assert list(gs.basis.states) == [0b01, 0b10]
        assert np.allclose(gs.amplitudes, [1 / math.sqrt(2)] * 2, atol=1e-12)

    def test_ring4_w_state(self):
        gs = many_body_ground_state(build_ring(4), [-1.0] * 4, 1)
        assert np.allclose(gs.amplitudes, 0.5, atol=1e-12)
        assert abs(oracle_concurrence(gs, 0, 1) - 0.5) < 1e-12

    def test_ring6_free_fermion_energy(self):
        gs = many_body_ground_state(build_ring(6), [-1.0] * 6, 3)
        assert abs(gs.energy + 4.0) < 1e-10

    def test_free_fermion_additivity_random(self):
        rng = np.random.default_rng(2)
        lat = build_ring(8)
        for _ in range(5):
            t = rng.uniform(-5, -0.1, 8)
            evals = np.linalg.eigvalsh(assemble_hamiltonian(lat, t))
            for n in (0, 1, 3, 8):
                gs = many_body_ground_state(lat, t, n)
                assert abs(gs.energy - evals[:n].sum()) < 1e-10

    def test_degenerate_flagged(self):
        lat = build_ring(4)
        with pytest.warns(UserWarning):
            gs = many_body_ground_state(lat, [-1.0] * 4, 2)
        assert gs.degenerate


class TestOracleCorrelators:
    def test_decoupled_site_has_zero_coherence(self):
        # hopping 0 onto site 2: <n_2> = 0 in the 1-electron ground state,
        # and z vanishes against every other site
        lat = Lattice("path", 3, [(0, 1), (1, 2)])
        gs = many_body_ground_state(lat, [-1.0, 0.0], 1)
        for j in (0, 1):
            v, y, z = oracle_correlators(gs, 2, j)
            assert abs(z) < 1e-12
            assert abs(y) < 1e-12

    def test_pair_density_bounds(self):
        rng = np.random.default_rng(4)
        lat = build_ring(6)
        for _ in range(10):
            t = rng.uniform(-5, -0.1, 6)
            n = int(rng.integers(0, 7))
            gs = many_body_ground_state(lat, t, n)
            for i in range(6):
                ni = sum(
                    a * a * ((s >> i) & 1)
                    for a, s in zip(gs.amplitudes, gs.basis.states)
                )
                for j in range(6):
                    if i == j:
                        continue
                    nj = sum(
                        a * a * ((s >> j) & 1)
                        for a, s in zip(gs.amplitudes, gs.basis.states)
                    )
                    _, y, _ = oracle_correlators(gs, i, j)
                    assert -1e-12 <= y <= min(ni, nj) + 1e-12


class TestWickEquivalence:
    def test_ring8_random_hoppings_all_fillings(self):
        rng = np.random.default_rng(6)
        lat = build_ring(8)
        from concopt.fermion import ground_state_density_matrix

        checked = 0
        for _ in range(10):
            t = rng.uniform(-5, -0.1, 8)
            for n in range(9):
                dm = ground_state_density_matrix(assemble_hamiltonian(lat, t), n)
                if dm.degenerate:
                    continue
                assert wick_oracle_deviation(lat, t, n) < 1e-10
                checked += 1
        assert checked > 30

    def test_sampler_avoids_degeneracy(self):
        rng = np.random.default_rng(8)
        from concopt.fermion import ground_state_density_matrix

        for _ in range(10):
            lat, t, n = sample_oracle_case(rng)
            assert lat.n_sites <= 10
            dm = ground_state_density_matrix(assemble_hamiltonian(lat, t), n)
            assert not dm.degenerate
