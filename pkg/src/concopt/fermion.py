"""Free spinless fermions on a lattice: ground state and pair concurrence.

The Hamiltonian is the hopping matrix H with H_ij = t_e on every lattice
edge e = (i, j) and zeros elsewhere.  Its n-electron ground state is the
Slater determinant of the n lowest orbitals, fully described by the
one-particle density matrix (bond-order matrix)

    gamma_ij = <c+_j c_i> = sum_{k occupied} phi_k(i) phi_k(j),

a real symmetric projector of rank n.  For such states Wick's theorem
factorizes the pair correlator <n_i n_j> = gamma_ii gamma_jj - gamma_ij^2,
so the two-site concurrence

    C_ij = 2 max{0, |z| - sqrt(v y)},
    z = gamma_ij,  y = <n_i n_j>,  v = 1 - <n_i> - <n_j> + y,

is a closed-form function of gamma.  The average over nearest-neighbor
pairs, C_NN, is the figure of merit maximized by the genetic optimizer.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .lattice import Lattice
from .validation import check_filling, check_hoppings

__all__ = [
    "DensityMatrix",
    "ConcurrenceReport",
    "DEGENERACY_RTOL",
    "assemble_hamiltonian",
    "ground_state_density_matrix",
    "correlators",
    "concurrence",
    "half_filling_concurrence",
    "nn_concurrence",
    "bond_class",
    "BOND_CLASSES",
]

# Fermi level is flagged degenerate when the gap is below this fraction of
# max(1, ||H||).
DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """One-particle ground-state density matrix at fixed filling.

    Attributes
    ----------
    gamma : (N, N) ndarray
        Bond-order matrix gamma_ij = <c+_j c_i>; symmetric projector with
        trace equal to ``filling``.
    filling : int
        Electron count n.
    degenerate : bool
        True when the Fermi level is degenerate (the occupied subspace is
        then a deterministic but physically arbitrary choice).
    fermi_gap : float
        Single-particle gap between the first empty and the last filled
        level; ``inf`` for the empty and the completely filled band.
    orbitals : (N, N) ndarray, optional
        All eigenvectors (columns, ascending energy; the first ``filling``
        are occupied).  Kept so pair correlators can be evaluated in a
        cancellation-free form; ``gamma`` alone is a valid fallback.
    """

    gamma: np.ndarray
    filling: int
    degenerate: bool
    fermi_gap: float
    orbitals: np.ndarray | None = None

    @property
    def n_sites(self) -> int:
        return self.gamma.shape[0]


@dataclass(frozen=True)
class ConcurrenceReport:
    """Per-bond concurrences and their nearest-neighbor average."""

    per_bond: dict[tuple[int, int], float]
    c_nn: float
    filling_fraction: float


def assemble_hamiltonian(lattice: Lattice, hoppings) -> np.ndarray:
    """Dense symmetric hopping matrix for one chromosome.

    Parameters
    ----------
    lattice : Lattice
    hoppings : array_like of shape (n_edges,)
        One finite hopping integral per canonical edge, gene k on edge k.

    Returns
    -------
    (N, N) ndarray with H_ij = H_ji = t_e on edges, zero diagonal.
    """
    t = check_hoppings(lattice, hoppings)
    h = np.zeros((lattice.n_sites, lattice.n_sites))
    ei, ej = lattice.edges[:, 0], lattice.edges[:, 1]
    h[ei, ej] = t
    h[ej, ei] = t
    return h


def _fix_eigenvector_signs(vecs: np.ndarray) -> np.ndarray:
    """Make the first nonzero component of each column positive.

    Resolves the per-orbital sign ambiguity so eigenvector output is
    reproducible; gamma is unaffected.
    """
    col_scale = np.abs(vecs).max(axis=0)
    col_scale[col_scale == 0.0] = 1.0
    significant = np.abs(vecs) > 1e-12 * col_scale
    first = significant.argmax(axis=0)
    signs = np.sign(vecs[first, np.arange(vecs.shape[1])])
    signs[signs == 0.0] = 1.0
    return vecs * signs


def ground_state_density_matrix(h: np.ndarray, filling: int) -> DensityMatrix:
    """Fill the ``filling`` lowest orbitals of a symmetric hopping matrix.

    Eigenvalues come out of the symmetric eigensolver in ascending order;
    exact ties keep the solver's (deterministic) order, and each orbital's
    sign is fixed so its first nonzero component is positive.  A degenerate
    Fermi level is flagged, never averaged over: fitness evaluation must be
    deterministic, so the physically arbitrary choice is reported instead
    of hidden.

    Raises
    ------
    ValueError
        If ``h`` is not symmetric or ``filling`` is out of ``0..N``.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"hamiltonian must be square, got shape {h.shape}")
    scale = np.abs(h).max()
    if not np.allclose(h, h.T, atol=1e-12 * max(1.0, scale), rtol=0.0):
        raise ValueError("hamiltonian must be symmetric")
    n_sites = h.shape[0]
    n = check_filling(filling, n_sites)
    evals, evecs = np.linalg.eigh(h)
    evecs = _fix_eigenvector_signs(evecs)
    occ = evecs[:, :n]
    gamma = occ @ occ.T
    norm = float(np.abs(evals).max()) if n_sites else 0.0
    if 0 < n < n_sites:
        gap = float(evals[n] - evals[n - 1])
        degenerate = gap < DEGENERACY_RTOL * max(1.0, norm)
    else:
        gap = math.inf
        degenerate = False
    return DensityMatrix(
        gamma=gamma, filling=n, degenerate=degenerate, fermi_gap=gap, orbitals=evecs
    )


def _gram2(a: np.ndarray, b: np.ndarray) -> float:
    """|a|^2 |b|^2 - (a.b)^2 without cancellation.

    Evaluated as |a|^2 * |b - proj_a(b)|^2, which stays O(eps^2) instead of
    O(eps) when a and b are (nearly) parallel - exactly the regime of
    maximally entangled bonds, where the naive difference would put an
    O(sqrt(eps)) error under the concurrence square root.
    """
    aa = float(a @ a)
    bb = float(b @ b)
    if aa == 0.0 or bb == 0.0:
        return 0.0
    if bb < aa:  # project the smaller vector for symmetry of the bound
        a, b = b, a
        aa, bb = bb, aa
    perp = b - ((a @ b) / aa) * a
    return aa * float(perp @ perp)


def correlators(dm: DensityMatrix, i: int, j: int) -> tuple[float, float, float]:
    """Pair correlators (v, y, z) for sites ``i != j``.

    z = <c+_j c_i> = gamma_ij, y = <n_i n_j> via Wick's theorem
    (gamma_ii gamma_jj - gamma_ij^2), v = 1 - <n_i> - <n_j> + y.  With the
    orbitals at hand, y and v are the Gram determinants of the occupied /
    empty orbital rows at the two sites and are evaluated in that
    cancellation-free form; both are clamped to [0, 1] so roundoff cannot
    leak a negative value under the square root in the concurrence.
    """
    if i == j:
        raise ValueError(f"correlators need two distinct sites, got i = j = {i}")
    if dm.orbitals is not None:
        occ = dm.orbitals[:, : dm.filling]
        emp = dm.orbitals[:, dm.filling :]
        z = float(occ[i] @ occ[j])
        y = _gram2(occ[i], occ[j])
        v = _gram2(emp[i], emp[j])
    else:
        g = dm.gamma
        z = float(g[i, j])
        ni, nj = float(g[i, i]), float(g[j, j])
        y = ni * nj - z * z
        v = 1.0 - ni - nj + y
    return min(max(v, 0.0), 1.0), min(max(y, 0.0), 1.0), z


def concurrence(dm: DensityMatrix, i: int, j: int) -> float:
    """Two-site concurrence C_ij = 2 max{0, |z| - sqrt(v y)}."""
    v, y, z = correlators(dm, i, j)
    return 2.0 * max(0.0, abs(z) - math.sqrt(v * y))


def half_filling_concurrence(gamma_bond: float) -> float:
    """Closed form 2 max{0, |gamma| + gamma^2 - 1/4}.

    Valid at half filling for particle-hole symmetric structures, where
    <n_i> = 1/2 on every site and the general expression collapses to a
    function of the bond order alone.
    """
    g = abs(float(gamma_bond))
    return 2.0 * max(0.0, g + g * g - 0.25)


def nn_concurrence(lattice: Lattice, dm: DensityMatrix) -> ConcurrenceReport:
    """Average nearest-neighbor concurrence.

    C_NN = (sum over ordered NN pairs of C_ij) / (sum of degrees), which
    reduces to the plain mean over edges (each undirected bond counts both
    orderings) and to the 1/(zN) normalization on z-regular lattices.
    """
    if dm.n_sites != lattice.n_sites:
        raise ValueError(
            f"density matrix is {dm.n_sites}x{dm.n_sites} but lattice has "
            f"{lattice.n_sites} sites"
        )
    per_bond = {
        (int(i), int(j)): concurrence(dm, int(i), int(j)) for i, j in lattice.edges
    }
    c_nn = float(np.mean(list(per_bond.values()))) if per_bond else 0.0
    return ConcurrenceReport(
        per_bond=per_bond,
        c_nn=c_nn,
        filling_fraction=dm.filling / lattice.n_sites,
    )


BOND_CLASSES = ("weak", "medium", "strong")


def bond_class(t: float) -> str:
    """Classify a hopping by magnitude: weak |t|<1, medium 1<=|t|<3, strong 3<=|t|<=5.

    Values beyond 5 are clamped to "strong" with a warning; the optimizer
    never produces them but hand-written chromosomes might.
    """
    a = abs(float(t))
    if not math.isfinite(a):
        raise ValueError(f"hopping must be finite, got {t}")
    if a < 1.0:
        return "weak"
    if a < 3.0:
        return "medium"
    if a > 5.0:
        warnings.warn(f"|t| = {a} exceeds 5; classified as strong", stacklevel=2)
    return "strong"
