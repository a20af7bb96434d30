"""Command-line driver: sweeps, single optimizations, chain analytics,
motif seeds, SVG drawings and oracle self-checks.

All outputs are plain text (CSV / JSON) plus SVG, written without
timestamps so identical flags and seed reproduce identical bytes.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import dimerized
from .exact import sample_oracle_case, wick_oracle_deviation
from .fermion import assemble_hamiltonian, ground_state_density_matrix, nn_concurrence
from .ga import ConcurrenceGA, load_ga_config, write_run_json
from .lattice import (
    Lattice,
    build_betts,
    build_kagome,
    build_ring,
    build_square,
    build_triangular,
    load_lattice,
)
from .motifs import MOTIF_KINDS, seed_motif
from .render import render_structure_svg
from .sweep import sweep_band_filling
from .validation import make_rng

BUILTIN_FAMILIES = ("ring", "square", "kagome", "betts", "triangular")


def _parse_pair(size: str, family: str) -> tuple[int, int]:
    parts = size.lower().split("x")
    if len(parts) != 2:
        raise click.BadParameter(f"{family} size must look like AxB, got {size!r}")
    return int(parts[0]), int(parts[1])


def _build_lattice(lattice: str, size: str | None, open_boundary: bool) -> Lattice:
    if open_boundary and lattice != "square":
        raise click.BadParameter("--open is only supported for the square family")
    if lattice not in BUILTIN_FAMILIES:
        path = Path(lattice)
        if not path.exists():
            raise click.BadParameter(
                f"--lattice must be one of {BUILTIN_FAMILIES} or a lattice file, got {lattice!r}"
            )
        return load_lattice(path.read_text(encoding="utf-8"))
    if size is None:
        raise click.BadParameter(f"--size is required for the builtin {lattice!r}")
    if lattice == "ring":
        return build_ring(int(size))
    if lattice == "square":
        lx, ly = _parse_pair(size, "square")
        return build_square(lx, ly, periodic=not open_boundary)
    if lattice == "kagome":
        cx, cy = _parse_pair(size, "kagome")
        return build_kagome(cx, cy)
    if lattice == "betts":
        return build_betts(int(size))
    lx, ly = _parse_pair(size, "triangular")
    return build_triangular(lx, ly)


def _lattice_options(fn):
    fn = click.option(
        "--lattice",
        required=True,
        help=f"Builtin family ({', '.join(BUILTIN_FAMILIES)}) or path to a lattice JSON file.",
    )(fn)
    fn = click.option("--size", default=None, help="Family size: N, AxB or unit-cell count.")(fn)
    fn = click.option(
        "--open", "open_boundary", is_flag=True, help="Open boundaries (square only)."
    )(fn)
    return fn


def _make_estimator(pop, gens, seed, config, motif_chromosome, seed_zero, seed_full, n_jobs):
    # explicit flags override config-file values, which override defaults
    params = load_ga_config(config) if config else {}
    if pop is not None:
        params["population_size"] = pop
    if gens is not None:
        params["generations"] = gens
    if seed_zero is not None:
        params["seed_count_zero"] = seed_zero
    if seed_full is not None:
        params["seed_count_full"] = seed_full
    if motif_chromosome is not None:
        params["seed_motif"] = motif_chromosome
    if seed is not None:
        params["random_state"] = seed
    params.setdefault("random_state", 0)
    if n_jobs is not None:
        params["n_jobs"] = n_jobs
    return ConcurrenceGA(**params)


@click.group()
def main():
    """Nearest-neighbor concurrence toolkit for tight-binding lattices."""


@main.command()
@_lattice_options
@click.option("--filling", type=int, required=True, help="Electron count n.")
@click.option("--pop", type=int, default=None, help="Population size.")
@click.option("--gens", type=int, default=None, help="Generations to evolve.")
@click.option("--seed", type=int, default=None, help="RNG seed (default 0).")
@click.option("--motif", type=click.Choice(MOTIF_KINDS), default=None,
              help="Seed the population with this motif structure.")
@click.option("--seed-zero", type=int, default=None, help="Individuals initialized to 0.0.")
@click.option("--seed-full", type=int, default=None,
              help="Individuals initialized to the lower gene bound.")
@click.option("--config", type=click.Path(exists=True), default=None,
              help="JSON file with estimator parameters (flags override).")
@click.option("--n-jobs", type=int, default=None,
              help="Threads for fitness evaluation (does not change results).")
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def optimize(lattice, size, open_boundary, filling, pop, gens, seed, motif,
             seed_zero, seed_full, config, n_jobs, out):
    """Run one genetic optimization and write run.json."""
    lat = _build_lattice(lattice, size, open_boundary)
    motif_chromosome = seed_motif(lat, motif) if motif else None
    est = _make_estimator(pop, gens, seed, config, motif_chromosome, seed_zero, seed_full, n_jobs)
    est.fit(lat, filling)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "run.json"
    write_run_json(est.record_, path)
    click.echo(f"best C_NN = {est.best_fitness_!r} (generation {est.best_generation_})")
    click.echo(f"wrote {path}")


@main.command()
@_lattice_options
@click.option("--fillings", default="all", show_default=True,
              help='Fillings to sweep: "all", "a,b,c" or "start:stop:step" (stop inclusive).')
@click.option("--pop", type=int, default=None, help="Population size.")
@click.option("--gens", type=int, default=None, help="Generations to evolve.")
@click.option("--seed", type=int, default=None,
              help="Base seed (default 0); filling n runs with seed XOR n.")
@click.option("--motif", type=click.Choice(MOTIF_KINDS), default=None,
              help="Seed every run with this motif structure.")
@click.option("--seed-zero", type=int, default=None, help="Individuals initialized to 0.0.")
@click.option("--seed-full", type=int, default=None,
              help="Individuals initialized to the lower gene bound.")
@click.option("--config", type=click.Path(exists=True), default=None,
              help="JSON file with estimator parameters (flags override).")
@click.option("--ordered-only", is_flag=True,
              help="Skip optimization; compute only the uniform reference curve.")
@click.option("--parallel", type=int, default=1, show_default=True,
              help="Fillings evaluated concurrently.")
@click.option("--n-jobs", type=int, default=None,
              help="Threads per fitness evaluation.")
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def sweep(lattice, size, open_boundary, fillings, pop, gens, seed, motif, seed_zero,
          seed_full, config, ordered_only, parallel, n_jobs, out):
    """Band-filling sweep; writes sweep.csv row by row."""
    lat = _build_lattice(lattice, size, open_boundary)
    if fillings == "all":
        wanted = None
    elif ":" in fillings:
        start, stop, step = (int(v) for v in fillings.split(":"))
        wanted = list(range(start, stop + 1, step))
    else:
        wanted = [int(v) for v in fillings.split(",")]
    motif_chromosome = seed_motif(lat, motif) if motif else None
    est = _make_estimator(pop, gens, seed, config, motif_chromosome, seed_zero, seed_full, n_jobs)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "sweep.csv"
    sweep_band_filling(
        lat, est, wanted, optimize=not ordered_only, csv_path=path, parallel=parallel
    )
    click.echo(f"wrote {path}")


@main.command("ssh-sweep")
@click.option("--alpha-min", type=float, default=0.0, show_default=True)
@click.option("--alpha-max", type=float, default=1.0, show_default=True)
@click.option("--steps", type=int, default=101, show_default=True,
              help="Number of alpha samples (inclusive endpoints).")
@click.option("--n-cells", type=int, default=dimerized.DEFAULT_N_CELLS, show_default=True,
              help="Momentum-grid points (thermodynamic-limit proxy).")
@click.option("--step-h", type=float, default=dimerized.DEFAULT_STEP, show_default=True,
              help="Finite-difference step for the derivative columns.")
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def ssh_sweep(alpha_min, alpha_max, steps, n_cells, step_h, out):
    """Dimerized-chain sweep: bond orders, concurrences, derivatives, energy."""
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "ssh_sweep.csv"
    header = (
        "alpha", "gamma_strong", "gamma_weak", "c_strong", "c_weak",
        "dc_strong", "dc_weak", "e_gs", "de_gs", "d2e_gs",
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for alpha in np.linspace(alpha_min, alpha_max, steps):
            point = dimerized.dimerized_point(float(alpha), n_cells)
            dcs, dcw = dimerized.concurrence_derivatives(float(alpha), n_cells, step_h)
            _, de, d2e = dimerized.energy_derivatives(float(alpha), n_cells, step_h)
            writer.writerow([
                repr(point.alpha), repr(point.gamma_strong), repr(point.gamma_weak),
                repr(point.c_strong), repr(point.c_weak), repr(dcs), repr(dcw),
                repr(point.e_gs), repr(de), repr(d2e),
            ])
            fh.flush()
    click.echo(f"wrote {path}")


@main.command()
@_lattice_options
@click.option("--motif", "kind", type=click.Choice(MOTIF_KINDS), required=True)
@click.option("--strong", type=float, default=-5.0, show_default=True, help="Motif bond hopping.")
@click.option("--weak", type=float, default=0.0, show_default=True, help="Background hopping.")
@click.option("--filling", type=int, default=None,
              help="Also report C_NN of the motif at this electron count.")
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def motif(lattice, size, open_boundary, kind, strong, weak, filling, out):
    """Build a motif chromosome and write motif.json."""
    lat = _build_lattice(lattice, size, open_boundary)
    chromosome = seed_motif(lat, kind, strong, weak)
    doc = {
        "lattice": lat.name,
        "n_sites": lat.n_sites,
        "kind": kind,
        "strong_t": strong,
        "weak_t": weak,
        "chromosome": [float(t) for t in chromosome],
    }
    if filling is not None:
        dm = ground_state_density_matrix(assemble_hamiltonian(lat, chromosome), filling)
        doc["filling"] = filling
        doc["c_nn"] = nn_concurrence(lat, dm).c_nn
        click.echo(f"motif C_NN at n={filling}: {doc['c_nn']!r}")
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "motif.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    click.echo(f"wrote {path}")


@main.command()
@_lattice_options
@click.option("--hoppings", "hoppings_file", type=click.Path(exists=True), required=True,
              help="run.json or motif.json holding the chromosome to draw.")
@click.option("--out", type=click.Path(), required=True, help="Output SVG file.")
def render(lattice, size, open_boundary, hoppings_file, out):
    """Draw a structure with bonds shaded by hopping class."""
    lat = _build_lattice(lattice, size, open_boundary)
    doc = json.loads(Path(hoppings_file).read_text(encoding="utf-8"))
    chromosome = doc.get("best_chromosome", doc.get("chromosome"))
    if chromosome is None:
        raise click.BadParameter(
            f"{hoppings_file} has neither a best_chromosome nor a chromosome field"
        )
    out_path = Path(out)
    if out_path.parent != Path("."):
        out_path.parent.mkdir(parents=True, exist_ok=True)
    render_structure_svg(lat, chromosome, out_path)
    click.echo(f"wrote {out_path}")


@main.command("oracle-check")
@click.option("--trials", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-sites", type=int, default=10, show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
def oracle_check(trials, seed, max_sites, tol):
    """Cross-check the Wick fast path against exact diagonalization."""
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(trials):
        lat, hoppings, filling = sample_oracle_case(rng, max_sites)
        worst = max(worst, wick_oracle_deviation(lat, hoppings, filling))
    click.echo(f"max |Wick - exact| over {trials} trials: {worst:.3e}")
    if worst > tol:
        click.echo(f"FAIL: exceeds tolerance {tol:.1e}", err=True)
        sys.exit(1)
    click.echo("OK")


if __name__ == "__main__":
    main()
