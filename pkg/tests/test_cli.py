import json

from click.testing import CliRunner

from concopt.cli import main
from concopt.lattice import build_kagome, save_lattice


def run_cli(*args):
    runner = CliRunner()
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestOptimize:
    def test_writes_record(self, tmp_path):
        out = tmp_path / "run"
        run_cli(
            "optimize", "--lattice", "ring", "--size", "8", "--filling", "4",
            "--pop", "16", "--gens", "5", "--seed", "3", "--out", str(out),
        )
        doc = json.loads((out / "run.json").read_text())
        assert doc["lattice_name"] == "ring-8"
        assert doc["filling"] == 4
        assert len(doc["best_chromosome"]) == 8

    def test_byte_identical_reruns_and_parallel(self, tmp_path):
        outs = []
        for k, jobs in enumerate(("1", "1", "2")):
            out = tmp_path / f"run{k}"
            run_cli(
                "optimize", "--lattice", "ring", "--size", "12", "--filling", "6",
                "--pop", "30", "--gens", "12", "--seed", "9", "--n-jobs", jobs,
                "--out", str(out),
            )
            outs.append((out / "run.json").read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "ga.json"
        cfg.write_text(json.dumps({"population_size": 10, "generations": 99}))
        out = tmp_path / "run"
        run_cli(
            "optimize", "--lattice", "ring", "--size", "6", "--filling", "3",
            "--gens", "4", "--seed", "1", "--config", str(cfg), "--out", str(out),
        )
        doc = json.loads((out / "run.json").read_text())
        assert doc["config"]["population_size"] == 10
        assert doc["config"]["generations"] == 4

    def test_motif_seeding(self, tmp_path):
        out = tmp_path / "run"
        run_cli(
            "optimize", "--lattice", "ring", "--size", "8", "--filling", "4",
            "--pop", "12", "--gens", "3", "--seed", "2", "--motif", "dimer_tiling",
            "--out", str(out),
        )
        doc = json.loads((out / "run.json").read_text())
        assert doc["best_fitness"] >= 0.5 - 1e-12


class TestSweepCommand:
    def test_subsampled_fillings(self, tmp_path):
        out = tmp_path / "sw"
        run_cli(
            "sweep", "--lattice", "ring", "--size", "6", "--fillings", "0:6:2",
            "--pop", "10", "--gens", "3", "--seed", "4", "--out", str(out),
        )
        lines = (out / "sweep.csv").read_text().splitlines()
        assert len(lines) == 5  # header + fillings 0,2,4,6

    def test_ordered_only(self, tmp_path):
        out = tmp_path / "sw"
        run_cli(
            "sweep", "--lattice", "ring", "--size", "8", "--ordered-only",
            "--out", str(out),
        )
        lines = (out / "sweep.csv").read_text().splitlines()
        assert len(lines) == 10
        assert all(line.split(",")[3] == "nan" for line in lines[1:])

    def test_byte_identical_reruns(self, tmp_path):
        payloads = []
        for k in range(2):
            out = tmp_path / f"sw{k}"
            run_cli(
                "sweep", "--lattice", "ring", "--size", "6", "--fillings", "2,3",
                "--pop", "12", "--gens", "4", "--seed", "6", "--out", str(out),
            )
            payloads.append((out / "sweep.csv").read_bytes())
        assert payloads[0] == payloads[1]

    def test_motif_seeded_sweep(self, tmp_path):
        out = tmp_path / "sw"
        run_cli(
            "sweep", "--lattice", "ring", "--size", "8", "--fillings", "4",
            "--pop", "12", "--gens", "3", "--seed", "2", "--motif", "dimer_tiling",
            "--out", str(out),
        )
        row = (out / "sweep.csv").read_text().splitlines()[1].split(",")
        assert float(row[3]) >= 0.5 - 1e-12


class TestSshSweepCommand:
    def test_csv_layout(self, tmp_path):
        out = tmp_path / "ssh"
        run_cli(
            "ssh-sweep", "--alpha-min", "0", "--alpha-max", "1", "--steps", "5",
            "--n-cells", "256", "--out", str(out),
        )
        lines = (out / "ssh_sweep.csv").read_text().splitlines()
        assert len(lines) == 6
        header = lines[0].split(",")
        assert header[:3] == ["alpha", "gamma_strong", "gamma_weak"]
        last = lines[-1].split(",")
        assert float(last[1]) == 0.5  # full dimerization
        assert float(last[0]) == 1.0


class TestMotifAndRender:
    def test_motif_then_render(self, tmp_path):
        out = tmp_path / "m"
        result = run_cli(
            "motif", "--lattice", "kagome", "--size", "4x4", "--motif",
            "triangle_tiling", "--filling", "16", "--out", str(out),
        )
        assert "0.3333333333333" in result.output
        doc = json.loads((out / "motif.json").read_text())
        assert abs(doc["c_nn"] - 1 / 3) < 1e-12
        svg_path = tmp_path / "m" / "structure.svg"
        run_cli(
            "render", "--lattice", "kagome", "--size", "4x4",
            "--hoppings", str(out / "motif.json"), "--out", str(svg_path),
        )
        svg = svg_path.read_text()
        assert svg.count('stroke="#000000"') == 48
        assert svg.count('stroke="#cccccc"') == 48

    def test_render_from_run_json(self, tmp_path):
        out = tmp_path / "r"
        run_cli(
            "optimize", "--lattice", "ring", "--size", "6", "--filling", "3",
            "--pop", "10", "--gens", "2", "--seed", "0", "--out", str(out),
        )
        svg_path = tmp_path / "ring.svg"
        run_cli(
            "render", "--lattice", "ring", "--size", "6",
            "--hoppings", str(out / "run.json"), "--out", str(svg_path),
        )
        assert svg_path.read_text().count("<circle") == 6


class TestLatticeFileInput:
    def test_custom_lattice_document(self, tmp_path):
        doc = save_lattice(build_kagome(2, 2))
        path = tmp_path / "lat.json"
        path.write_text(doc)
        out = tmp_path / "run"
        run_cli(
            "optimize", "--lattice", str(path), "--filling", "4",
            "--pop", "10", "--gens", "2", "--seed", "1", "--out", str(out),
        )
        rec = json.loads((out / "run.json").read_text())
        assert rec["n_sites"] == 12

    def test_unknown_builtin_rejected(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["optimize", "--lattice", "pyrochlore", "--size", "4", "--filling", "1",
             "--out", str(tmp_path)],
        )
        assert result.exit_code != 0


class TestOracleCheck:
    def test_passes(self):
        result = run_cli("oracle-check", "--trials", "5", "--seed", "1")
        assert "OK" in result.output
