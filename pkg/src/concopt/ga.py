"""Genetic maximization of the average nearest-neighbor concurrence.

One chromosome is one real hopping integral per lattice edge (gene k on
canonical edge k).  Each generation is scored by decoding every chromosome
into a hopping matrix, filling the n lowest orbitals and averaging the
nearest-neighbor concurrence; fitter individuals are roulette-selected,
recombined by one-point crossover and mutated by per-gene uniform resets.
The best individual ever evaluated is archived (and optionally reinjected).

The :class:`ConcurrenceGA` estimator follows the scikit-learn convention:
hyperparameters in ``__init__`` (so ``get_params`` / ``set_params`` /
``clone`` compose with the wider ecosystem), data-dependent state on
``fit(lattice, filling)`` in trailing-underscore attributes.

Determinism: all stochastic decisions consume one serial PCG64 stream
seeded by ``random_state``.  Fitness evaluation is pure, so evaluating
population chunks on ``n_jobs`` threads cannot perturb the stream; serial
and parallel runs with the same seed produce identical records.
"""

from __future__ import annotations

import json
import numbers
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .fermion import DEGENERACY_RTOL
from .lattice import Lattice
from .validation import check_filling, check_hoppings, check_probability, make_rng

__all__ = [
    "ConcurrenceGA",
    "GaRunRecord",
    "init_population",
    "evaluate_fitness",
    "roulette_select",
    "one_point_crossover",
    "mutate",
    "run_ga",
    "write_run_json",
    "load_run_json",
    "load_ga_config",
]

DEFAULT_GENE_RANGE = (-5.0, 0.0)


# ---------------------------------------------------------------------------
# Population operators
# ---------------------------------------------------------------------------

def init_population(
    lattice: Lattice,
    population_size: int,
    rng: np.random.Generator,
    *,
    gene_range: tuple[float, float] = DEFAULT_GENE_RANGE,
    seed_count_zero: int = 0,
    seed_count_full: int = 0,
    seed_motif=None,
    seed_motif_count: int | None = None,
) -> np.ndarray:
    """Initial population, shape (population_size, n_edges).

    Layout (in order): ``seed_count_zero`` all-zero individuals,
    ``seed_count_full`` individuals at the lower gene bound, then copies of
    ``seed_motif`` (all remaining slots when ``seed_motif_count`` is None,
    mirroring runs that start every non-seeded individual from a proposed
    structure), then uniform random chromosomes in ``gene_range``.
    """
    lo, hi = float(gene_range[0]), float(gene_range[1])
    n_genes = lattice.n_edges
    n_motif = 0
    if seed_motif is not None:
        seed_motif = check_hoppings(lattice, seed_motif)
        n_motif = (
            population_size - seed_count_zero - seed_count_full
            if seed_motif_count is None
            else int(seed_motif_count)
        )
    n_random = population_size - seed_count_zero - seed_count_full - n_motif
    if min(seed_count_zero, seed_count_full, n_motif, n_random) < 0:
        raise ValueError(
            f"seed counts ({seed_count_zero} zero + {seed_count_full} full + "
            f"{n_motif} motif) exceed population size {population_size}"
        )
    blocks = [
        np.zeros((seed_count_zero, n_genes)),
        np.full((seed_count_full, n_genes), lo),
    ]
    if n_motif:
        blocks.append(np.tile(seed_motif, (n_motif, 1)))
    blocks.append(rng.uniform(lo, hi, size=(n_random, n_genes)))
    return np.concatenate(blocks, axis=0)


def _resolve_n_jobs(n_jobs) -> int:
    if n_jobs is None:
        return 1
    n = int(n_jobs)
    if n == -1:
        return os.cpu_count() or 1
    if n < 1:
        raise ValueError(f"n_jobs must be a positive integer or -1, got {n_jobs}")
    return n


def _gram2_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|a|^2 |b|^2 - (a.b)^2 along the last axis, cancellation-free.

    Same stabilized evaluation as the scalar pair correlators: project the
    smaller row onto the larger one, so (nearly) parallel rows - maximally
    entangled bonds - keep O(eps^2) accuracy under the square root.
    """
    aa = np.einsum("...k,...k->...", a, a)
    bb = np.einsum("...k,...k->...", b, b)
    swap = (bb < aa)[..., None]
    small = np.where(swap, b, a)
    big = np.where(swap, a, b)
    saa = np.minimum(aa, bb)
    s = np.einsum("...k,...k->...", small, big)
    denom = np.where(saa == 0.0, 1.0, saa)
    perp = big - (s / denom)[..., None] * small
    out = saa * np.einsum("...k,...k->...", perp, perp)
    return np.where(saa == 0.0, 0.0, out)


def _batch_eval(pop: np.ndarray, ei: np.ndarray, ej: np.ndarray, n_sites: int, filling: int):
    """Fitness + Fermi-degeneracy flags for a chromosome block (vectorized)."""
    b = pop.shape[0]
    h = np.zeros((b, n_sites, n_sites))
    h[:, ei, ej] = pop
    h[:, ej, ei] = pop
    evals, evecs = np.linalg.eigh(h)
    occ = evecs[:, :, :filling]
    emp = evecs[:, :, filling:]
    z = np.einsum("bek,bek->be", occ[:, ei, :], occ[:, ej, :])
    y = np.clip(_gram2_batch(occ[:, ei, :], occ[:, ej, :]), 0.0, 1.0)
    v = np.clip(_gram2_batch(emp[:, ei, :], emp[:, ej, :]), 0.0, 1.0)
    c = 2.0 * np.maximum(0.0, np.abs(z) - np.sqrt(v * y))
    fitness = c.mean(axis=1)
    if 0 < filling < n_sites:
        norm = np.maximum(1.0, np.abs(evals).max(axis=1))
        degenerate = (evals[:, filling] - evals[:, filling - 1]) < DEGENERACY_RTOL * norm
    else:
        degenerate = np.zeros(b, dtype=bool)
    return fitness, degenerate


def evaluate_fitness(
    population,
    lattice: Lattice,
    filling: int,
    *,
    n_jobs: int | None = 1,
    return_degenerate: bool = False,
):
    """C_NN fitness of every chromosome in a (P, n_edges) population.

    Each chromosome is evaluated independently (pure function of its genes),
    in index order; with ``n_jobs > 1`` the population is split into
    contiguous blocks scored on worker threads and reassembled in order, so
    the result does not depend on the degree of parallelism.
    """
    pop = np.asarray(population, dtype=float)
    if pop.ndim != 2 or pop.shape[1] != lattice.n_edges:
        raise ValueError(
            f"population must have shape (P, {lattice.n_edges}), got {pop.shape}"
        )
    if not np.isfinite(pop).all():
        raise ValueError("population contains non-finite genes")
    n = check_filling(filling, lattice.n_sites)
    ei, ej = lattice.edges[:, 0], lattice.edges[:, 1]
    jobs = _resolve_n_jobs(n_jobs)
    if jobs == 1 or pop.shape[0] < 2 * jobs:
        fitness, degenerate = _batch_eval(pop, ei, ej, lattice.n_sites, n)
    else:
        chunks = np.array_split(pop, jobs)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(
                pool.map(lambda c: _batch_eval(c, ei, ej, lattice.n_sites, n), chunks)
            )
        fitness = np.concatenate([p[0] for p in parts])
        degenerate = np.concatenate([p[1] for p in parts])
    if return_degenerate:
        return fitness, degenerate
    return fitness


def roulette_select(fitness, rng: np.random.Generator, n_draws: int) -> np.ndarray:
    """Indices of ``n_draws`` parents, probability proportional to fitness.

    All-zero fitness falls back to a uniform draw (no division error).
    Negative fitness is rejected.
    """
    f = np.asarray(fitness, dtype=float)
    if (f < 0).any():
        raise ValueError("roulette selection needs nonnegative fitness values")
    total = f.sum()
    p = None if total <= 0.0 else f / total
    return rng.choice(f.size, size=n_draws, replace=True, p=p)


def one_point_crossover(
    parent_a: np.ndarray,
    parent_b: np.ndarray,
    rng: np.random.Generator,
    prob: float,
) -> tuple[np.ndarray, np.ndarray]:
    """With probability ``prob``, swap tails at a uniform cut in 1..L-1."""
    if parent_a.shape != parent_b.shape:
        raise ValueError(
            f"parents must have equal length, got {parent_a.shape} and {parent_b.shape}"
        )
    length = parent_a.shape[0]
    if length >= 2 and rng.random() < prob:
        cut = int(rng.integers(1, length))
        child_a = np.concatenate([parent_a[:cut], parent_b[cut:]])
        child_b = np.concatenate([parent_b[:cut], parent_a[cut:]])
        return child_a, child_b
    return parent_a.copy(), parent_b.copy()


def mutate(
    chromosome: np.ndarray,
    rng: np.random.Generator,
    rate: float,
    gene_range: tuple[float, float] = DEFAULT_GENE_RANGE,
) -> np.ndarray:
    """Reset each gene independently with probability ``rate`` to a uniform
    value in ``gene_range``.  Consumes a fixed amount of randomness per call
    regardless of how many genes mutate."""
    length = chromosome.shape[0]
    mask = rng.random(length) < rate
    values = rng.uniform(float(gene_range[0]), float(gene_range[1]), size=length)
    return np.where(mask, values, chromosome)


# ---------------------------------------------------------------------------
# Run record
# ---------------------------------------------------------------------------

@dataclass
class GaRunRecord:
    """Everything needed to reproduce and audit one optimization run.

    Execution-only settings (thread count) are deliberately excluded so the
    record is identical however the run was parallelized.  The chromosome
    and histories are stored as plain lists at full decimal precision.
    """

    lattice_name: str
    n_sites: int
    n_edges: int
    filling: int
    seed: int
    config: dict
    history_best: list[float]
    history_mean: list[float]
    best_chromosome: list[float]
    best_fitness: float
    best_generation: int
    evaluations: int
    degenerate_best: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GaRunRecord":
        return cls(**json.loads(text))


def write_run_json(record: GaRunRecord, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(record.to_json())
    except OSError as exc:
        raise OSError(f"cannot write run record to {path}: {exc}") from exc


def load_run_json(path) -> GaRunRecord:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return GaRunRecord.from_json(fh.read())
    except OSError as exc:
        raise OSError(f"cannot read run record from {path}: {exc}") from exc


def load_ga_config(path) -> dict:
    """Read estimator parameters from a JSON file ({param: value})."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read GA config from {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"GA config in {path} must be a JSON object")
    valid = set(ConcurrenceGA().get_params())
    unknown = doc.keys() - valid
    if unknown:
        raise ValueError(f"unknown GA config keys in {path}: {sorted(unknown)}")
    if "gene_range" in doc and isinstance(doc["gene_range"], list):
        doc["gene_range"] = tuple(doc["gene_range"])
    return doc


# ---------------------------------------------------------------------------
# Estimator
# ---------------------------------------------------------------------------

class ConcurrenceGA(BaseEstimator):
    """Evolve hopping chromosomes that maximize C_NN at fixed band filling.

    Parameters
    ----------
    population_size : int, default=500
        Chromosomes per generation (>= 2).
    generations : int, default=4000
        Evolution steps.  Every generation is scored once; ``generations=0``
        still scores the initial population so a best individual exists.
    gene_range : (float, float), default=(-5.0, 0.0)
        Closed interval every gene lives in, at all times.
    crossover_prob : float, default=0.8
        Probability that a parent pair exchanges tails at one uniform cut.
    mutation_rate : float or None, default=None
        Per-gene uniform-reset probability; None means 1/n_edges (one
        expected mutation per chromosome, independent of lattice size).
    seed_count_zero, seed_count_full : int, default=0
        Individuals initialized to all-0.0 / all-(lower bound); short and
        long bonds then spread through the population via crossover.
    seed_motif : array_like or None, default=None
        Structured chromosome (e.g. from :func:`concopt.motifs.seed_motif`)
        copied into the initial population.
    seed_motif_count : int or None, default=None
        Copies of the motif; None fills every non-seeded slot.
    reinject_best : bool, default=True
        Reinject the archived best as the first selected parent each
        generation.  Without it the late-stage search stalls with
        mid-magnitude bonds that never sharpen into the strong/weak
        structure; set False to keep the best archived only.
    n_jobs : int, default=1
        Threads for fitness evaluation (-1 = all cores).  Never affects
        results, only wall time.
    random_state : int, default=0
        Seed of the single serial random stream.

    Attributes
    ----------
    best_chromosome_ : ndarray of shape (n_edges,)
    best_fitness_ : float
    best_generation_ : int
        Generation at which the archived best was found.
    degenerate_best_ : bool
        Fermi-level degeneracy flag of the best individual.
    history_best_ : ndarray
        Running best fitness after each scored generation (nondecreasing).
    history_mean_ : ndarray
        Mean fitness of each scored generation.
    n_evaluations_ : int
    record_ : GaRunRecord
    """

    def __init__(
        self,
        population_size: int = 500,
        generations: int = 4000,
        gene_range: tuple[float, float] = DEFAULT_GENE_RANGE,
        crossover_prob: float = 0.8,
        mutation_rate: float | None = None,
        seed_count_zero: int = 0,
        seed_count_full: int = 0,
        seed_motif=None,
        seed_motif_count: int | None = None,
        reinject_best: bool = True,
        n_jobs: int = 1,
        random_state: int = 0,
    ):
        self.population_size = population_size
        self.generations = generations
        self.gene_range = gene_range
        self.crossover_prob = crossover_prob
        self.mutation_rate = mutation_rate
        self.seed_count_zero = seed_count_zero
        self.seed_count_full = seed_count_full
        self.seed_motif = seed_motif
        self.seed_motif_count = seed_motif_count
        self.reinject_best = reinject_best
        self.n_jobs = n_jobs
        self.random_state = random_state

    # -- validation -------------------------------------------------------

    def _validated(self, lattice: Lattice):
        if not isinstance(lattice, Lattice):
            raise TypeError(f"expected a Lattice, got {type(lattice).__name__}")
        if not isinstance(self.population_size, numbers.Integral) or self.population_size < 2:
            raise ValueError(f"population_size must be an integer >= 2, got {self.population_size}")
        if not isinstance(self.generations, numbers.Integral) or self.generations < 0:
            raise ValueError(f"generations must be a nonnegative integer, got {self.generations}")
        lo, hi = (float(self.gene_range[0]), float(self.gene_range[1]))
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError(f"gene_range must be a finite (low, high) interval, got {self.gene_range}")
        check_probability(self.crossover_prob, "crossover_prob")
        if self.mutation_rate is not None:
            check_probability(self.mutation_rate, "mutation_rate")
        for name in ("seed_count_zero", "seed_count_full"):
            v = getattr(self, name)
            if not isinstance(v, numbers.Integral) or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v}")
        if self.seed_count_zero + self.seed_count_full > self.population_size:
            raise ValueError(
                f"seed counts {self.seed_count_zero}+{self.seed_count_full} exceed "
                f"population size {self.population_size}"
            )
        if self.seed_motif is not None:
            motif = check_hoppings(lattice, self.seed_motif)
            if (motif < lo).any() or (motif > hi).any():
                raise ValueError("seed_motif genes must lie within gene_range")
        if self.seed_count_zero and not lo <= 0.0 <= hi:
            raise ValueError("seed_count_zero requires 0.0 inside gene_range")
        return lo, hi

    # -- main loop --------------------------------------------------------

    def fit(self, lattice: Lattice, filling: int) -> "ConcurrenceGA":
        """Run the evolution loop; returns self with ``*_`` attributes set."""
        lo, hi = self._validated(lattice)
        n = check_filling(filling, lattice.n_sites)
        rng = make_rng(self.random_state)
        pop_size = int(self.population_size)
        n_genes = lattice.n_edges
        rate = 1.0 / n_genes if self.mutation_rate is None else float(self.mutation_rate)

        pop = init_population(
            lattice,
            pop_size,
            rng,
            gene_range=(lo, hi),
            seed_count_zero=int(self.seed_count_zero),
            seed_count_full=int(self.seed_count_full),
            seed_motif=self.seed_motif,
            seed_motif_count=self.seed_motif_count,
        )

        best_chrom = None
        best_fit = -1.0
        best_gen = 0
        best_degen = False
        history_best: list[float] = []
        history_mean: list[float] = []
        evaluations = 0
        n_passes = max(1, int(self.generations))
        evolve = int(self.generations) > 0

        for gen in range(n_passes):
            fitness, degenerate = evaluate_fitness(
                pop, lattice, n, n_jobs=self.n_jobs, return_degenerate=True
            )
            evaluations += pop_size
            if not np.isfinite(fitness).all():
                raise RuntimeError(
                    f"non-finite fitness in generation {gen} on {lattice.name}"
                )
            top = int(np.argmax(fitness))
            if fitness[top] > best_fit:
                best_fit = float(fitness[top])
                best_chrom = pop[top].copy()
                best_gen = gen
                best_degen = bool(degenerate[top])
            history_best.append(best_fit)
            history_mean.append(float(fitness.mean()))
            if not evolve:
                break

            parents = pop[roulette_select(fitness, rng, pop_size)]
            if self.reinject_best:
                parents[0] = best_chrom
            children = np.empty_like(parents)
            for k in range(0, pop_size - 1, 2):
                children[k], children[k + 1] = one_point_crossover(
                    parents[k], parents[k + 1], rng, float(self.crossover_prob)
                )
            if pop_size % 2:
                children[-1] = parents[-1].copy()
            for k in range(pop_size):
                children[k] = mutate(children[k], rng, rate, (lo, hi))
            pop = children

        self.n_genes_ = n_genes
        self.best_chromosome_ = best_chrom
        self.best_fitness_ = best_fit
        self.best_generation_ = best_gen
        self.degenerate_best_ = best_degen
        self.history_best_ = np.asarray(history_best)
        self.history_mean_ = np.asarray(history_mean)
        self.n_evaluations_ = evaluations
        self.record_ = self._make_record(lattice, n)
        return self

    def _make_record(self, lattice: Lattice, filling: int) -> GaRunRecord:
        config = self.get_params()
        # execution detail, not part of the result
        config.pop("n_jobs")
        config.pop("random_state")
        if config["seed_motif"] is not None:
            config["seed_motif"] = [float(t) for t in np.asarray(config["seed_motif"])]
        config["gene_range"] = [float(config["gene_range"][0]), float(config["gene_range"][1])]
        return GaRunRecord(
            lattice_name=lattice.name,
            n_sites=lattice.n_sites,
            n_edges=lattice.n_edges,
            filling=filling,
            seed=int(self.random_state),
            config=config,
            history_best=[float(v) for v in self.history_best_],
            history_mean=[float(v) for v in self.history_mean_],
            best_chromosome=[float(t) for t in self.best_chromosome_],
            best_fitness=float(self.best_fitness_),
            best_generation=int(self.best_generation_),
            evaluations=int(self.n_evaluations_),
            degenerate_best=bool(self.degenerate_best_),
        )


def run_ga(lattice: Lattice, filling: int, **params) -> GaRunRecord:
    """One-call form of :class:`ConcurrenceGA`: fit and return the record."""
    return ConcurrenceGA(**params).fit(lattice, filling).record_
