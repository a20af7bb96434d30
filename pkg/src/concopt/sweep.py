"""Band-filling sweeps: one optimization per filling plus an ordered reference.

For every requested electron count n the sweep records the C_NN of the
uniform (all hoppings -1) lattice and, unless disabled, the best fitness of
an independent genetic run seeded with ``base_seed XOR n``.  Rows are
emitted in filling order and can be streamed to CSV as they complete, so an
interrupted sweep leaves the finished prefix on disk.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import clone

from .fermion import assemble_hamiltonian, ground_state_density_matrix, nn_concurrence
from .ga import ConcurrenceGA
from .lattice import Lattice
from .validation import check_filling

__all__ = [
    "SweepRow",
    "SweepResult",
    "ordered_reference",
    "sweep_band_filling",
    "combine_sweeps",
    "write_sweep_csv",
    "load_sweep_csv",
    "CSV_HEADER",
]

# filling, filling fraction, uniform-lattice C_NN, optimized C_NN,
# generation where the best individual appeared, Fermi-degeneracy flag of
# the row's primary result (GA best; ordered reference when not optimizing)
CSV_HEADER = ("filling", "x", "c_nn_ordered", "c_nn_optimized", "best_generation", "degenerate")


@dataclass(frozen=True)
class SweepRow:
    filling: int
    x: float
    c_nn_ordered: float
    c_nn_optimized: float
    best_generation: int
    degenerate: bool


@dataclass
class SweepResult:
    lattice_name: str
    n_sites: int
    base_seed: int
    config: dict
    rows: list[SweepRow] = field(default_factory=list)


def ordered_reference(lattice: Lattice, fillings) -> list[tuple[float, bool]]:
    """(C_NN, degenerate) of the uniform t=-1 lattice at each filling."""
    h = assemble_hamiltonian(lattice, np.full(lattice.n_edges, -1.0))
    out = []
    for n in fillings:
        dm = ground_state_density_matrix(h, n)
        out.append((nn_concurrence(lattice, dm).c_nn, dm.degenerate))
    return out


def sweep_band_filling(
    lattice: Lattice,
    estimator: ConcurrenceGA | None = None,
    fillings=None,
    *,
    optimize: bool = True,
    csv_path=None,
    parallel: int = 1,
) -> SweepResult:
    """Run the sweep; returns all rows (and optionally streams them to CSV).

    Parameters
    ----------
    lattice : Lattice
    estimator : ConcurrenceGA, optional
        Template whose parameters every per-filling run copies; its
        ``random_state`` is the base seed, each filling runs with
        ``base_seed XOR filling``.  Defaults to ``ConcurrenceGA()``.
    fillings : iterable of int, optional
        Subset of 0..N to sweep (default: every filling).
    optimize : bool
        When False only the ordered reference column is computed (the
        optimized column is NaN) - useful for quick reference curves.
    csv_path : path, optional
        Stream rows here as they complete.
    parallel : int
        Fillings evaluated concurrently (threads); never changes results.
    """
    if estimator is None:
        estimator = ConcurrenceGA()
    if fillings is None:
        fillings = range(lattice.n_sites + 1)
    fillings = [check_filling(n, lattice.n_sites) for n in fillings]
    if sorted(set(fillings)) != fillings:
        raise ValueError("fillings must be strictly increasing and unique")
    base_seed = int(estimator.random_state)

    reference = ordered_reference(lattice, fillings)

    def run_one(n: int) -> tuple[float, int, bool]:
        run = clone(estimator)
        run.set_params(random_state=base_seed ^ n)
        run.fit(lattice, n)
        return run.best_fitness_, run.best_generation_, run.degenerate_best_

    config = estimator.get_params()
    config.pop("n_jobs")
    config.pop("random_state")
    if config.get("seed_motif") is not None:
        config["seed_motif"] = [float(t) for t in np.asarray(config["seed_motif"])]
    result = SweepResult(
        lattice_name=lattice.name,
        n_sites=lattice.n_sites,
        base_seed=base_seed,
        config=config,
    )

    if optimize:
        if parallel > 1:
            with ThreadPoolExecutor(max_workers=parallel) as pool:
                optimized = pool.map(run_one, fillings)
                ga_results = list(optimized)
        else:
            ga_results = [run_one(n) for n in fillings]
    else:
        ga_results = [(float("nan"), -1, deg) for _, deg in reference]

    writer = None
    fh = None
    try:
        if csv_path is not None:
            fh = open(csv_path, "w", encoding="utf-8", newline="")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
        for n, (c_ord, _), (c_opt, gen, degen) in zip(fillings, reference, ga_results):
            row = SweepRow(
                filling=n,
                x=n / lattice.n_sites,
                c_nn_ordered=c_ord,
                c_nn_optimized=c_opt,
                best_generation=gen,
                degenerate=degen,
            )
            result.rows.append(row)
            if writer is not None:
                writer.writerow(_format_row(row))
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
    return result


def combine_sweeps(results: list[SweepResult]) -> SweepResult:
    """Pointwise best of several sweeps over the same lattice and fillings.

    The optimized column of each row is the maximum across the inputs (the
    other fields follow the winning run); used to merge runs seeded with
    different proposed structures into one envelope curve.
    """
    if not results:
        raise ValueError("need at least one sweep to combine")
    first = results[0]
    for other in results[1:]:
        if other.lattice_name != first.lattice_name or len(other.rows) != len(first.rows):
            raise ValueError("sweeps to combine must cover the same lattice and fillings")
        if [r.filling for r in other.rows] != [r.filling for r in first.rows]:
            raise ValueError("sweeps to combine must cover the same fillings")
    combined = SweepResult(
        lattice_name=first.lattice_name,
        n_sites=first.n_sites,
        base_seed=first.base_seed,
        config={"combined_from": len(results)},
    )
    for k in range(len(first.rows)):
        candidates = [res.rows[k] for res in results]
        best = max(candidates, key=lambda r: r.c_nn_optimized)
        combined.rows.append(best)
    return combined


def _format_row(row: SweepRow) -> list[str]:
    return [
        str(row.filling),
        repr(row.x),
        repr(row.c_nn_ordered),
        repr(row.c_nn_optimized),
        str(row.best_generation),
        str(int(row.degenerate)),
    ]


def write_sweep_csv(result: SweepResult, path) -> None:
    """Lossless CSV of the sweep rows (shortest round-trip decimals)."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in result.rows:
                writer.writerow(_format_row(row))
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV to {path}: {exc}") from exc


def load_sweep_csv(path) -> list[SweepRow]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            if header != CSV_HEADER:
                raise ValueError(f"unexpected sweep CSV header in {path}: {header}")
            return [
                SweepRow(
                    filling=int(r[0]),
                    x=float(r[1]),
                    c_nn_ordered=float(r[2]),
                    c_nn_optimized=float(r[3]),
                    best_generation=int(r[4]),
                    degenerate=bool(int(r[5])),
                )
                for r in reader
            ]
    except OSError as exc:
        raise OSError(f"cannot read sweep CSV from {path}: {exc}") from exc
