"""Structured seed chromosomes: disjoint bond-motif covers of a lattice.

The optimizer's best structures break lattices into small strongly-bonded
units (dimers, square plaquettes, triangles) separated by near-zero bonds.
:func:`seed_motif` builds such a chromosome directly: it covers every site
with disjoint units of the requested kind, puts ``strong_t`` on all bonds
inside the units and ``weak_t`` everywhere else.

Unit kinds
----------
dimer_tiling     perfect matching (2-site units)
plaquette_tiling disjoint 4-cycles covering all sites
triangle_tiling  disjoint 3-cycles covering all sites
diamond_tiling   edge-sharing triangle pairs (4-site rhombi)

The cover is found by a deterministic depth-first exact-cover search
(lowest uncovered site first, candidate units in lexicographic order), so
the same lattice always yields the same chromosome.
"""

from __future__ import annotations

import numpy as np

from .lattice import Lattice

__all__ = ["MOTIF_KINDS", "MotifInfeasibleError", "enumerate_motif_units", "seed_motif"]

MOTIF_KINDS = ("dimer_tiling", "plaquette_tiling", "triangle_tiling", "diamond_tiling")


class MotifInfeasibleError(ValueError):
    """The lattice admits no disjoint cover by the requested motif."""


def _four_cycles(lattice: Lattice) -> list[tuple[int, ...]]:
    adj = [set(a) for a in lattice.neighbors()]
    cycles = set()
    for i in range(lattice.n_sites):
        nbrs = sorted(adj[i])
        for a_pos in range(len(nbrs)):
            for b_pos in range(a_pos + 1, len(nbrs)):
                j, l = nbrs[a_pos], nbrs[b_pos]
                for k in adj[j] & adj[l]:
                    if k != i and k > i and j > i and l > i:
                        cycles.add(tuple(sorted((i, j, k, l))))
    return sorted(cycles)


def _diamonds(lattice: Lattice) -> list[tuple[int, ...]]:
    # two triangles sharing exactly one edge -> 4 distinct sites
    tris = lattice.triangles()
    units = set()
    for a in range(len(tris)):
        for b in range(a + 1, len(tris)):
            shared = set(tris[a]) & set(tris[b])
            if len(shared) == 2:
                units.add(tuple(sorted(set(tris[a]) | set(tris[b]))))
    return sorted(units)


def enumerate_motif_units(lattice: Lattice, motif_kind: str) -> list[tuple[int, ...]]:
    """All candidate units of a kind, as sorted site tuples in lexicographic order."""
    if motif_kind == "dimer_tiling":
        return [tuple(int(v) for v in e) for e in lattice.edges]
    if motif_kind == "triangle_tiling":
        return lattice.triangles()
    if motif_kind == "plaquette_tiling":
        return _four_cycles(lattice)
    if motif_kind == "diamond_tiling":
        return _diamonds(lattice)
    raise ValueError(f"unknown motif kind {motif_kind!r}; expected one of {MOTIF_KINDS}")


def _disjoint_cover(units: list[tuple[int, ...]], n_sites: int) -> list[tuple[int, ...]] | None:
    """Exact cover of all sites by disjoint units, or None.

    Deterministic DFS: branch on the lowest uncovered site, try its units
    in enumeration order.
    """
    units_by_site: list[list[tuple[int, ...]]] = [[] for _ in range(n_sites)]
    for unit in units:
        for s in unit:
            units_by_site[s].append(unit)
    covered = [False] * n_sites
    chosen: list[tuple[int, ...]] = []

    def search(start: int) -> bool:
        site = start
        while site < n_sites and covered[site]:
            site += 1
        if site == n_sites:
            return True
        for unit in units_by_site[site]:
            if any(covered[s] for s in unit):
                continue
            for s in unit:
                covered[s] = True
            chosen.append(unit)
            if search(site + 1):
                return True
            chosen.pop()
            for s in unit:
                covered[s] = False
        return False

    return chosen if search(0) else None


def seed_motif(
    lattice: Lattice,
    motif_kind: str,
    strong_t: float = -5.0,
    weak_t: float = 0.0,
) -> np.ndarray:
    """Chromosome with ``strong_t`` on a disjoint motif cover, ``weak_t`` elsewhere.

    All lattice bonds internal to a chosen unit are strong (3 per triangle,
    4 per plaquette, 5 per diamond).  Raises
    :class:`MotifInfeasibleError` when no disjoint cover exists, e.g.
    triangles on a square ring or dimers on an odd ring.
    """
    units = enumerate_motif_units(lattice, motif_kind)
    cover = _disjoint_cover(units, lattice.n_sites)
    if cover is None:
        raise MotifInfeasibleError(
            f"{lattice.name} admits no disjoint {motif_kind} cover"
        )
    chrom = np.full(lattice.n_edges, float(weak_t))
    index = lattice.edge_index()
    for unit in cover:
        for a_pos in range(len(unit)):
            for b_pos in range(a_pos + 1, len(unit)):
                k = index.get((unit[a_pos], unit[b_pos]))
                if k is not None:
                    chrom[k] = float(strong_t)
    return chrom
