"""Nearest-neighbor entanglement of tight-binding lattices, and structures
that maximize it.

The package computes the two-site concurrence of free spinless fermions on
arbitrary lattice graphs (fast Wick-theorem path plus an exact many-body
oracle for small systems), analyzes the half-filled dimerized chain, and
evolves hopping structures that maximize the average nearest-neighbor
concurrence with a seeded, reproducible genetic algorithm.
"""

from .dimerized import (
    DimerizedPoint,
    concurrence_derivatives,
    dimerized_concurrences,
    dimerized_point,
    energy_derivatives,
    energy_derivatives_from_bond_orders,
    locate_weak_bond_vanishing,
    ssh_bond_orders,
    ssh_energy_per_site,
)
from .exact import (
    FockBasis,
    GroundState,
    many_body_ground_state,
    oracle_concurrence,
    oracle_correlators,
    sample_oracle_case,
    wick_oracle_deviation,
)
from .fermion import (
    ConcurrenceReport,
    DensityMatrix,
    assemble_hamiltonian,
    bond_class,
    concurrence,
    correlators,
    ground_state_density_matrix,
    half_filling_concurrence,
    nn_concurrence,
)
from .ga import (
    ConcurrenceGA,
    GaRunRecord,
    evaluate_fitness,
    init_population,
    load_ga_config,
    load_run_json,
    mutate,
    one_point_crossover,
    roulette_select,
    run_ga,
    write_run_json,
)
from .lattice import (
    DuplicateEdgeError,
    InvalidSizeError,
    Lattice,
    LatticeError,
    LatticeFormatError,
    SelfLoopError,
    SiteIndexError,
    build_betts,
    build_kagome,
    build_ring,
    build_square,
    build_triangular,
    load_lattice,
    save_lattice,
)
from .motifs import MOTIF_KINDS, MotifInfeasibleError, seed_motif
from .render import render_structure_svg, structure_svg
from .sweep import (
    SweepResult,
    SweepRow,
    combine_sweeps,
    load_sweep_csv,
    sweep_band_filling,
    write_sweep_csv,
)

__version__ = "0.1.0"
