import math

import numpy as np
import pytest

from concopt.dimerized import (
    concurrence_derivatives,
    dimerized_concurrences,
    dimerized_point,
    energy_derivatives,
    energy_derivatives_from_bond_orders,
    locate_weak_bond_vanishing,
    ssh_bond_orders,
    ssh_energy_per_site,
)
from concopt.exact import many_body_ground_state
from concopt.fermion import assemble_hamiltonian, ground_state_density_matrix
from concopt.lattice import build_ring

M = 4096


def flipped_dimerized_ring(n_cells, alpha):
    """Hoppings of a 2*n_cells ring matching the half-integer momentum grid:
    -(1+a) on strong bonds, -(1-a) on weak bonds, wrap bond sign-flipped."""
    n = 2 * n_cells
    lat = build_ring(n)
    index = lat.edge_index()
    t = np.empty(lat.n_edges)
    for i in range(n):
        j = (i + 1) % n
        val = -(1.0 + alpha) if i % 2 == 0 else -(1.0 - alpha)
        if i == n - 1:
            val = -val
        t[index[tuple(sorted((i, j)))]] = val
    return lat, t


class TestBondOrders:
    def test_uniform_limit_is_one_over_pi(self):
        gs, gw = ssh_bond_orders(0.0, M)
        assert abs(gs - 0.318310) < 1e-4
        assert abs(gw - 0.318310) < 1e-4
        assert abs(gs - 1 / math.pi) < 1e-6

    def test_full_dimerization_exact(self):
        gs, gw = ssh_bond_orders(1.0, M)
        assert gs == 0.5
        assert gw == 0.0

    @pytest.mark.parametrize("alpha", [0.0, 0.25, 0.7])
    @pytest.mark.parametrize("n_cells", [8, 17])
    def test_matches_real_space_ring(self, alpha, n_cells):
        lat, t = flipped_dimerized_ring(n_cells, alpha)
        dm = ground_state_density_matrix(assemble_hamiltonian(lat, t), n_cells)
        if alpha > 0 or n_cells % 2 == 0:
            # odd cell counts close the gap at alpha = 0 (flagged); the zero
            # modes alternate sites and do not touch averaged bond orders
            assert not dm.degenerate
        strong, weak = [], []
        n = 2 * n_cells
        for i in range(n):
            j = (i + 1) % n
            g = dm.gamma[i, j]
            if i == n - 1:
                g = -g  # undo the gauge flip on the wrap bond
            (strong if i % 2 == 0 else weak).append(g)
        gs, gw = ssh_bond_orders(alpha, n_cells)
        assert abs(np.mean(strong) - gs) < 1e-10
        assert abs(np.mean(weak) - gw) < 1e-10

    def test_ranges(self):
        for alpha in np.linspace(0, 1, 21):
            gs, gw = ssh_bond_orders(float(alpha), 512)
            assert 1 / math.pi - 1e-3 <= gs <= 0.5 + 1e-12
            assert -1e-12 <= gw <= 1 / math.pi + 1e-3

    def test_continuity_on_grid(self):
        # |dgamma/dalpha| stays below ~3 for m = 4096 (log-rounded slope),
        # so K = 4 bounds the increments comfortably
        alphas = np.linspace(0, 1, 101)
        vals = [ssh_bond_orders(float(a), M) for a in alphas]
        for k in range(100):
            da = alphas[k + 1] - alphas[k]
            assert abs(vals[k + 1][0] - vals[k][0]) <= 4 * da
            assert abs(vals[k + 1][1] - vals[k][1]) <= 4 * da

    def test_richardson_doubling(self):
        # alpha = 0: the integrand has a kink at k = pi, so doubling the grid
        # shrinks the error by ~4x; away from 0 the integrand is smooth and
        # periodic and the sum is already converged to roundoff at m = 256
        ref = ssh_bond_orders(0.0, 65536)[0]
        e1 = abs(ssh_bond_orders(0.0, 256)[0] - ref)
        e2 = abs(ssh_bond_orders(0.0, 512)[0] - ref)
        assert 2.0 < e1 / e2 < 8.0
        assert abs(ssh_bond_orders(0.3, 256)[0] - ssh_bond_orders(0.3, 8192)[0]) < 1e-12

    def test_alpha_out_of_range(self):
        with pytest.raises(ValueError):
            ssh_bond_orders(1.5, 64)


class TestConcurrences:
    def test_uniform_chain_value(self):
        cs, cw = dimerized_concurrences(0.0, M)
        expected = 2 * (1 / math.pi + 1 / math.pi**2 - 0.25)
        assert abs(cs - expected) < 1e-6
        assert abs(cs - 0.3393) < 1e-4
        assert cs == cw

    def test_bell_limit(self):
        cs, cw = dimerized_concurrences(1.0, M)
        assert cs == 1.0
        assert cw == 0.0

    def test_weak_vanishes_beyond_alpha_star(self):
        astar = locate_weak_bond_vanishing(M)
        for alpha in np.linspace(astar + 1e-3, 1.0, 9):
            assert dimerized_concurrences(float(alpha), M)[1] == 0.0

    def test_strong_monotone_nondecreasing(self):
        values = [dimerized_concurrences(float(a), M)[0] for a in np.linspace(0, 1, 51)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


class TestDerivatives:
    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    def test_finite_difference_vs_chain_rule(self, alpha):
        h = 1e-4
        fd = concurrence_derivatives(alpha, M, h)
        cr = concurrence_derivatives(alpha, M, h, chain_rule=True)
        assert abs(fd[0] - cr[0]) < 10 * h * h
        assert abs(fd[1] - cr[1]) < 10 * h * h

    def test_strong_derivative_grows_toward_zero(self):
        vals = [abs(concurrence_derivatives(a, M)[0]) for a in (1e-2, 1e-3, 1e-4)]
        assert vals[0] < vals[1] < vals[2]

    def test_weak_derivative_zero_beyond_kink(self):
        astar = locate_weak_bond_vanishing(M)
        h = 1e-4
        for alpha in (astar + 2 * h, astar + 0.1, 0.9):
            assert concurrence_derivatives(alpha, M, h)[1] == 0.0

    def test_invalid_step(self):
        with pytest.raises(ValueError):
            concurrence_derivatives(0.5, M, 0.1)


class TestEnergy:
    def test_uniform_value_per_site(self):
        e = ssh_energy_per_site(0.0, M)
        assert abs(e - (-2 / math.pi)) < 1e-6

    def test_uniform_value_against_many_body(self):
        # 12-site flipped ring at alpha=0, half filling
        lat, t = flipped_dimerized_ring(6, 0.0)
        gs = many_body_ground_state(lat, t, 6)
        assert abs(gs.energy / 12 - ssh_energy_per_site(0.0, 6)) < 1e-10

    def test_closed_form_identity(self):
        for alpha in (0.0, 0.1, 0.6, 1.0):
            p = dimerized_point(alpha, M)
            assert abs(p.e_gs - ssh_energy_per_site(alpha, M)) < 1e-10
            assert abs(
                p.e_gs - (-(1 + alpha) * p.gamma_strong - (1 - alpha) * p.gamma_weak)
            ) < 1e-12

    def test_derivative_zero_at_origin(self):
        _, de, _ = energy_derivatives(0.0, M)
        assert abs(de) < 1e-6

    def test_second_derivative_grows_toward_zero(self):
        vals = [abs(energy_derivatives(a, M)[2]) for a in (1e-2, 1e-3, 1e-4)]
        assert vals[0] < vals[1] < vals[2]

    def test_energy_decreasing_in_alpha(self):
        values = [ssh_energy_per_site(float(a), M) for a in np.linspace(0, 1, 21)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.9])
    def test_two_derivative_routes_agree(self, alpha):
        e1, de1, d2e1 = energy_derivatives(alpha, M)
        e2, de2, d2e2 = energy_derivatives_from_bond_orders(alpha, M)
        assert abs(e1 - e2) < 1e-10
        assert abs(de1 - de2) < 1e-5
        assert abs(d2e1 - d2e2) < 1e-3


class TestWeakBondVanishing:
    def test_location(self):
        astar = locate_weak_bond_vanishing(M, tol=1e-6)
        assert abs(astar - 0.138) < 0.002

    def test_bond_order_at_root(self):
        astar = locate_weak_bond_vanishing(M, tol=1e-6)
        gw = ssh_bond_orders(astar, M)[1]
        assert abs(gw - (math.sqrt(2) - 1) / 2) < 1e-4

    def test_value_continuous_derivative_kinked(self):
        # the max{0, .} argument crosses zero continuously: the concurrence
        # value does not jump, only its derivative does
        astar = locate_weak_bond_vanishing(M, tol=1e-6)
        assert dimerized_concurrences(astar - 1e-4, M)[1] < 1e-3
        assert dimerized_concurrences(astar + 1e-4, M)[1] == 0.0
        left = concurrence_derivatives(astar - 5e-4, M, 1e-4)[1]
        right = concurrence_derivatives(astar + 5e-4, M, 1e-4)[1]
        assert left < -0.5
        assert right == 0.0

    def test_tolerance_validated(self):
        with pytest.raises(ValueError):
            locate_weak_bond_vanishing(M, tol=1e-9)
