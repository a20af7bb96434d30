"""Brute-force many-body ground states for small lattices.

This module realizes the creation/annihilation operators literally on the
occupation-number (Fock) basis, with exact fermionic signs, and serves as
the independent cross-check for everything the Wick-theorem fast path in
:mod:`concopt.fermion` computes.  It is a correctness oracle, not a
production path: dense diagonalization only, refused above 16 sites.

Conventions
-----------
A basis state is a bitmask; bit ``i`` set means site ``i`` occupied.  The
state is the ordered product c+_{i1} c+_{i2} ... |vac> with i1 < i2 < ...,
so annihilating or creating at site ``i`` picks up the parity of the
occupied sites below ``i``.  The identities {c_i, c+_j} = delta_ij are
exercised in the test suite.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .lattice import Lattice
from .validation import check_filling, check_hoppings

__all__ = [
    "MAX_ORACLE_SITES",
    "FockBasis",
    "GroundState",
    "apply_annihilation",
    "apply_creation",
    "many_body_ground_state",
    "oracle_correlators",
    "oracle_concurrence",
    "wick_oracle_deviation",
    "sample_oracle_case",
]

MAX_ORACLE_SITES = 16


@dataclass(frozen=True)
class FockBasis:
    """All bitmasks with ``n_particles`` bits set, strictly increasing."""

    n_sites: int
    n_particles: int
    states: tuple[int, ...]

    @classmethod
    def build(cls, n_sites: int, n_particles: int) -> "FockBasis":
        if n_sites > MAX_ORACLE_SITES:
            raise ValueError(
                f"oracle is limited to {MAX_ORACLE_SITES} sites, got {n_sites}"
            )
        n = check_filling(n_particles, n_sites)
        masks = sorted(
            sum(1 << i for i in occ)
            for occ in itertools.combinations(range(n_sites), n)
        )
        return cls(n_sites=n_sites, n_particles=n, states=tuple(masks))

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self) -> dict[int, int]:
        return {s: k for k, s in enumerate(self.states)}


def _parity_below(state: int, site: int) -> int:
    return -1 if (state & ((1 << site) - 1)).bit_count() & 1 else 1


def apply_annihilation(state: int, site: int) -> tuple[int, int]:
    """c_site |state> -> (new_state, sign); sign 0 if the site is empty."""
    if not (state >> site) & 1:
        return state, 0
    return state ^ (1 << site), _parity_below(state, site)


def apply_creation(state: int, site: int) -> tuple[int, int]:
    """c+_site |state> -> (new_state, sign); sign 0 if already occupied."""
    if (state >> site) & 1:
        return state, 0
    return state | (1 << site), _parity_below(state, site)


@dataclass(frozen=True)
class GroundState:
    """Lowest eigenstate of the many-body hopping Hamiltonian."""

    energy: float
    amplitudes: np.ndarray
    basis: FockBasis
    degenerate: bool


def _many_body_matrix(lattice: Lattice, hoppings: np.ndarray, basis: FockBasis) -> np.ndarray:
    index = basis.index()
    h = np.zeros((basis.dim, basis.dim))
    for col, state in enumerate(basis.states):
        for (i, j), t in zip(lattice.edges, hoppings):
            if t == 0.0:
                continue
            for a, b in ((int(i), int(j)), (int(j), int(i))):
                # t * c+_a c_b acting on |state>
                s1, sign1 = apply_annihilation(state, b)
                if sign1 == 0:
                    continue
                s2, sign2 = apply_creation(s1, a)
                if sign2 == 0:
                    continue
                h[index[s2], col] += t * sign1 * sign2
    return h


def many_body_ground_state(lattice: Lattice, hoppings, n: int) -> GroundState:
    """Exact n-electron ground state by dense diagonalization.

    Emits a warning (and sets the flag) when the many-body ground level is
    degenerate; the returned eigenvector is then only one member of the
    ground manifold.
    """
    t = check_hoppings(lattice, hoppings)
    basis = FockBasis.build(lattice.n_sites, n)
    h = _many_body_matrix(lattice, t, basis)
    evals, evecs = np.linalg.eigh(h)
    vec = evecs[:, 0]
    k = int(np.argmax(np.abs(vec) > 1e-12 * max(1.0, float(np.abs(vec).max()))))
    if vec[k] < 0:
        vec = -vec
    scale = max(1.0, float(np.abs(evals).max()))
    degenerate = basis.dim > 1 and float(evals[1] - evals[0]) < 1e-10 * scale
    if degenerate:
        warnings.warn(
            f"degenerate many-body ground state on {lattice.name} at n={n}",
            stacklevel=2,
        )
    return GroundState(
        energy=float(evals[0]), amplitudes=vec, basis=basis, degenerate=degenerate
    )


def oracle_correlators(state: GroundState, i: int, j: int) -> tuple[float, float, float]:
    """(v, y, z) as literal expectation values in the Fock basis.

    v = <(1 - n_i)(1 - n_j)>, y = <n_i n_j>, z = <c+_j c_i> with exact
    fermionic signs.
    """
    if i == j:
        raise ValueError(f"correlators need two distinct sites, got i = j = {i}")
    amp = state.amplitudes
    index = state.basis.index()
    v = y = z = 0.0
    for k, s in enumerate(state.basis.states):
        a = float(amp[k])
        if a == 0.0:
            continue
        bi = (s >> i) & 1
        bj = (s >> j) & 1
        y += a * a * bi * bj
        v += a * a * (1 - bi) * (1 - bj)
        s1, sign1 = apply_annihilation(s, i)
        if sign1 == 0:
            continue
        s2, sign2 = apply_creation(s1, j)
        if sign2 == 0:
            continue
        z += float(amp[index[s2]]) * sign1 * sign2 * a
    return v, y, z


def oracle_concurrence(state: GroundState, i: int, j: int) -> float:
    """Concurrence from the exact correlators."""
    v, y, z = oracle_correlators(state, i, j)
    return 2.0 * max(0.0, abs(z) - math.sqrt(max(v, 0.0) * max(y, 0.0)))


def wick_oracle_deviation(lattice: Lattice, hoppings, filling: int) -> float:
    """Largest |Wick - exact| over (v, y, z, C) for every site pair.

    Meaningful only when the Fermi level is non-degenerate (otherwise the
    two routes may legitimately pick different ground states).
    """
    from .fermion import (
        assemble_hamiltonian,
        concurrence,
        correlators,
        ground_state_density_matrix,
    )

    dm = ground_state_density_matrix(assemble_hamiltonian(lattice, hoppings), filling)
    gs = many_body_ground_state(lattice, hoppings, filling)
    worst = 0.0
    for i in range(lattice.n_sites):
        for j in range(i + 1, lattice.n_sites):
            wick = (*correlators(dm, i, j), concurrence(dm, i, j))
            ref = (*oracle_correlators(gs, i, j), oracle_concurrence(gs, i, j))
            worst = max(worst, max(abs(a - b) for a, b in zip(wick, ref)))
    return worst


def sample_oracle_case(rng: np.random.Generator, max_sites: int = 10):
    """Random (lattice, hoppings, filling) with a non-degenerate Fermi level.

    Lattices are drawn from small rings and open squares (<= ``max_sites``
    sites), hoppings uniformly from [-5, -0.1]; degenerate draws are
    rejected and resampled.
    """
    from .fermion import assemble_hamiltonian, ground_state_density_matrix
    from .lattice import build_ring, build_square

    pool = [build_ring(n) for n in range(3, max_sites + 1)]
    pool += [
        build_square(lx, ly, periodic=False)
        for lx in range(2, 4)
        for ly in range(2, 4)
        if lx * ly <= max_sites
    ]
    while True:
        lattice = pool[int(rng.integers(len(pool)))]
        hoppings = rng.uniform(-5.0, -0.1, size=lattice.n_edges)
        filling = int(rng.integers(0, lattice.n_sites + 1))
        dm = ground_state_density_matrix(
            assemble_hamiltonian(lattice, hoppings), filling
        )
        if not dm.degenerate:
            return lattice, hoppings, filling
