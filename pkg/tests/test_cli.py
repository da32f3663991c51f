"""Command-line pipelines, output formats, and manifest completeness."""

import json
from pathlib import Path

import numpy as np

from romeq import storage
from romeq.cli import main


def _read_csv(path):
    lines = Path(path).read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestPipeline:
    def test_snapshots_train_eval(self, tmp_path):
        snaps = tmp_path / "snaps"
        model = tmp_path / "model"
        out = tmp_path / "eval"
        assert main(["snapshots", "--family", "pale-ct", "--n", "8",
                     "--train-count", "20", "--seed", "1",
                     "--out", str(snaps)]) == 0
        assert main(["train", "--snapshots", str(snaps), "--r", "4",
                     "--out", str(model)]) == 0
        assert main(["eval", "--model", str(model), "--test-count", "15",
                     "--seed", "2", "--reference", "--out", str(out)]) == 0

        header, rows = _read_csv(out / "results.csv")
        assert header == ["mu_1", "rel_error", "rom_iterations", "converged"]
        assert len(rows) == 15
        assert all(row[3] == "true" for row in rows)

        timing = json.loads((out / "timing.json").read_text())
        assert timing["T_tot"] == timing["T_off"] + timing["T_on"]
        assert timing["T_avg"] == timing["T_on"] / 15
        assert timing["reference_avg"] == timing["reference_total"] / 15
        assert all(v >= 0 for k, v in timing.items())

        for directory in (snaps, model, out):
            manifest = json.loads((directory / "manifest.json").read_text())
            assert manifest["problem_hash"]
            assert manifest["tool_version"]
            assert manifest["seeds"]
            assert manifest["tolerances"]

        snap_manifest = json.loads((snaps / "manifest.json").read_text())
        assert all(res <= 1e-9 for res in snap_manifest["residual_norms"])

        # figures rendered alongside the delimited output
        assert (out / "errors.png").stat().st_size > 0
        assert (model / "singular_values.png").stat().st_size > 0

    def test_energy_mode_training(self, tmp_path):
        snaps = tmp_path / "snaps"
        model = tmp_path / "model"
        main(["snapshots", "--family", "pale-ct", "--n", "8",
              "--train-count", "15", "--out", str(snaps)])
        assert main(["train", "--snapshots", str(snaps), "--energy", "1e-12",
                     "--out", str(model)]) == 0
        manifest = json.loads((model / "manifest.json").read_text())
        assert 1 <= manifest["r"] <= 15

    def test_explicit_training_parameters(self, tmp_path):
        snaps = tmp_path / "snaps"
        main(["snapshots", "--family", "pale-ct", "--n", "8",
              "--train-params", "0.5;1.0;1.5", "--out", str(snaps)])
        manifest = json.loads((snaps / "manifest.json").read_text())
        assert manifest["parameters"] == [[0.5], [1.0], [1.5]]


class TestBench:
    def test_smoke_run_and_summary(self, tmp_path):
        out = tmp_path / "bench"
        assert main(["bench", "--family", "pale-ct", "--n", "6",
                     "--train-count", "15", "--test-count", "10",
                     "--r", "3", "--seed", "3", "--out", str(out)]) == 0
        header, rows = _read_csv(out / "summary.csv")
        assert header == ["metric", "r=3", "reference"]
        assert [row[0] for row in rows] == \
            ["er_avg", "T_off", "T_on", "T_tot", "T_avg"]
        er = float(rows[0][1])
        assert np.isfinite(er)

    def test_determinism_byte_identical_csv(self, tmp_path):
        args = ["bench", "--family", "pale-ct", "--n", "8", "--train-count",
                "15", "--test-count", "12", "--r", "3,4", "--seed", "7",
                "--no-figures"]
        main(args + ["--out", str(tmp_path / "a")])
        main(args + ["--out", str(tmp_path / "b")])
        for rel in ("r3/results.csv", "r4/results.csv"):
            a = (tmp_path / "a" / rel).read_bytes()
            b = (tmp_path / "b" / rel).read_bytes()
            assert a == b

    def test_test_set_disjoint_from_training(self, tmp_path):
        out = tmp_path / "bench"
        main(["bench", "--family", "pale-ct", "--n", "6", "--train-count",
              "10", "--test-count", "10", "--r", "3", "--seed", "0",
              "--no-figures", "--out", str(out)])
        snaps_manifest = json.loads((out / "snapshots/manifest.json").read_text())
        train_set = {tuple(row) for row in snaps_manifest["parameters"]}
        _, rows = _read_csv(out / "r3/results.csv")
        test_set = {(float(row[0]),) for row in rows}
        assert not train_set & test_set


class TestSweep:
    def test_nested_sizes(self, tmp_path):
        out = tmp_path / "sweep"
        assert main(["sweep", "--family", "pale-ct", "--n", "6", "--sizes",
                     "5,10", "--r", "3", "--test-count", "8", "--seed", "4",
                     "--no-figures", "--out", str(out)]) == 0
        header, rows = _read_csv(out / "sweep.csv")
        assert header[:2] == ["size", "er_avg"]
        assert [int(row[0]) for row in rows] == [5, 10]
        manifest = json.loads((out / "manifest.json").read_text())
        full = [tuple(row) for row in manifest["nested_parameters"]]
        assert len(full) == 10

    def test_prefix_nesting_property(self):
        import numpy as np
        from romeq.sampling import nested_prefixes
        sets = nested_prefixes(((0.1, 2.0),), [5, 10, 20],
                               np.random.default_rng(0))
        for small, large in zip(sets, sets[1:]):
            np.testing.assert_array_equal(small, large[:len(small)])


class TestCompareIntrusive:
    def test_columns_and_figure(self, tmp_path):
        out = tmp_path / "cmp"
        assert main(["compare-intrusive", "--family", "pale-coupled", "--n",
                     "6", "--train-count", "25", "--r", "5", "--test-count",
                     "10", "--seed", "5", "--out", str(out)]) == 0
        header, rows = _read_csv(out / "comparison.csv")
        assert header == ["mu_1", "rel_error_opinf", "rel_error_intrusive",
                          "converged_opinf", "converged_intrusive"]
        assert len(rows) == 10
        errs_o = [float(r[1]) for r in rows]
        errs_i = [float(r[2]) for r in rows]
        assert np.mean(errs_o) <= 10 * np.mean(errs_i)
        assert (out / "comparison.png").stat().st_size > 0


class TestProblemFileInput:
    def test_cli_accepts_problem_json(self, tmp_path):
        from romeq.benchmarks import benchmark_problem
        pfile = tmp_path / "problem.json"
        storage.save_problem(pfile, benchmark_problem("pale-ct", n=6))
        snaps = tmp_path / "snaps"
        assert main(["snapshots", "--problem", str(pfile), "--train-count",
                     "8", "--train-sampling", "log", "--out", str(snaps)]) == 0
        manifest = json.loads((snaps / "manifest.json").read_text())
        assert manifest["k"] == 8


class TestWorkerEnv:
    def test_opinf_threads_caps_workers(self, monkeypatch):
        from romeq.util import worker_count
        monkeypatch.setenv("OPINF_THREADS", "1")
        assert worker_count() == 1
        monkeypatch.setenv("OPINF_THREADS", "not-a-number")
        assert worker_count() >= 1
        monkeypatch.delenv("OPINF_THREADS")
        assert worker_count() >= 1
