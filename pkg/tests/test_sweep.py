import numpy as np
import pytest

from concopt.ga import ConcurrenceGA, run_ga
from concopt.lattice import build_kagome, build_ring
from concopt.motifs import seed_motif
from concopt.sweep import (
    combine_sweeps,
    load_sweep_csv,
    ordered_reference,
    sweep_band_filling,
    write_sweep_csv,
)

TINY = dict(population_size=16, generations=8, random_state=5)


class TestSweep:
    def test_all_fillings_by_default(self):
        lat = build_ring(6)
        res = sweep_band_filling(lat, ConcurrenceGA(**TINY))
        assert [r.filling for r in res.rows] == list(range(7))
        xs = [r.x for r in res.rows]
        assert all(b > a for a, b in zip(xs, xs[1:]))
        assert all(0.0 <= r.c_nn_optimized <= 1.0 for r in res.rows)

    def test_empty_and_full_band_rows_are_zero(self):
        lat = build_ring(6)
        res = sweep_band_filling(lat, ConcurrenceGA(**TINY), [0, 6])
        for row in res.rows:
            assert abs(row.c_nn_ordered) < 1e-12
            assert abs(row.c_nn_optimized) < 1e-12

    def test_derived_seeds_match_independent_runs(self):
        lat = build_ring(6)
        res = sweep_band_filling(lat, ConcurrenceGA(**TINY), [2, 3])
        for row in res.rows:
            rec = run_ga(lat, row.filling, **{**TINY, "random_state": 5 ^ row.filling})
            assert rec.best_fitness == row.c_nn_optimized

    def test_parallel_fillings_identical(self):
        lat = build_ring(6)
        a = sweep_band_filling(lat, ConcurrenceGA(**TINY), [1, 2, 3])
        b = sweep_band_filling(lat, ConcurrenceGA(**TINY), [1, 2, 3], parallel=3)
        assert a.rows == b.rows

    def test_ordered_only_symmetric_on_bipartite_ring(self):
        lat = build_ring(16)
        res = sweep_band_filling(lat, ConcurrenceGA(**TINY), optimize=False)
        c = {r.filling: r for r in res.rows}
        for n in range(17):
            if c[n].degenerate or c[16 - n].degenerate:
                continue
            assert abs(c[n].c_nn_ordered - c[16 - n].c_nn_ordered) < 1e-10

    def test_kagome48_ordered_peak_near_third(self):
        lat = build_kagome(4, 4)
        vals = [v for v, _ in ordered_reference(lat, range(49))]
        peak = int(np.argmax(vals))
        assert abs(peak / 48 - 1 / 3) < 0.05
        asym = max(abs(vals[n] - vals[48 - n]) for n in range(49))
        assert asym > 0.01

    def test_motif_seeded_rows_never_below_motif(self):
        from concopt.ga import evaluate_fitness

        lat = build_ring(8)
        motif = seed_motif(lat, "dimer_tiling")
        est = ConcurrenceGA(population_size=12, generations=3, seed_motif=motif,
                            random_state=1)
        res = sweep_band_filling(lat, est, [2, 4])
        for row in res.rows:
            base = evaluate_fitness(motif[None, :], lat, row.filling)[0]
            assert row.c_nn_optimized >= base - 1e-15

    def test_bad_fillings(self):
        with pytest.raises(ValueError):
            sweep_band_filling(build_ring(6), ConcurrenceGA(**TINY), [3, 2])
        with pytest.raises(ValueError):
            sweep_band_filling(build_ring(6), ConcurrenceGA(**TINY), [7])


class TestCsv:
    def test_roundtrip(self, tmp_path):
        lat = build_ring(6)
        res = sweep_band_filling(lat, ConcurrenceGA(**TINY), [1, 2, 3])
        path = tmp_path / "sweep.csv"
        write_sweep_csv(res, path)
        assert load_sweep_csv(path) == res.rows

    def test_row_count_and_header(self, tmp_path):
        lat = build_ring(6)
        path = tmp_path / "sweep.csv"
        sweep_band_filling(lat, ConcurrenceGA(**TINY), [1, 2, 4], csv_path=path)
        lines = path.read_text().splitlines()
        assert len(lines) == 4
        assert lines[0] == "filling,x,c_nn_ordered,c_nn_optimized,best_generation,degenerate"

    def test_streaming_equals_batch_write(self, tmp_path):
        lat = build_ring(6)
        streamed = tmp_path / "streamed.csv"
        res = sweep_band_filling(lat, ConcurrenceGA(**TINY), [1, 2], csv_path=streamed)
        batch = tmp_path / "batch.csv"
        write_sweep_csv(res, batch)
        assert streamed.read_bytes() == batch.read_bytes()

    def test_locale_independent_decimal_point(self, tmp_path):
        lat = build_ring(6)
        res = sweep_band_filling(lat, ConcurrenceGA(**TINY), [3])
        path = tmp_path / "sweep.csv"
        write_sweep_csv(res, path)
        body = path.read_text().splitlines()[1]
        assert "." in body and "," in body
        assert ";" not in body


class TestCombine:
    def test_pointwise_maximum(self):
        lat = build_ring(6)
        a = sweep_band_filling(lat, ConcurrenceGA(**TINY), [2, 3])
        b = sweep_band_filling(
            lat, ConcurrenceGA(population_size=16, generations=8, random_state=77), [2, 3]
        )
        combined = combine_sweeps([a, b])
        for ra, rb, rc in zip(a.rows, b.rows, combined.rows):
            assert rc.c_nn_optimized == max(ra.c_nn_optimized, rb.c_nn_optimized)

    def test_mismatched_fillings_rejected(self):
        lat = build_ring(6)
        a = sweep_band_filling(lat, ConcurrenceGA(**TINY), [2])
        b = sweep_band_filling(lat, ConcurrenceGA(**TINY), [3])
        with pytest.raises(ValueError):
            combine_sweeps([a, b])
