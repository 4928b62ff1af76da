"""Harness module: configs, replicate batches, emission, CLI surface."""

import csv
import io
import json
import math
import os

import numpy as np
import pytest

from betacoal import ExperimentConfig, ReplicateBatch, emit, run_experiment
from betacoal.cli import main
from betacoal.harness import EXPERIMENT_IDS, WORKERS_ENV_VAR


def _config(**overrides):
    base = dict(experiment="fig1", alpha=1.5, n=50, replicates=8, master_seed=5)
    base.update(overrides)
    return ExperimentConfig(**base)


class TestExperimentConfig:
    def test_known_ids(self):
        assert set(EXPERIMENT_IDS) == {
            "theorem1", "theorem2", "theorem3", "lemma1",
            "lemma2", "fig1", "fig2", "ratio",
        }

    def test_unknown_experiment_rejected(self):
        with pytest.raises(ValueError):
            _config(experiment="theorem9")

    def test_exactly_one_size_source(self):
        with pytest.raises(ValueError):
            _config(n=50, n_grid=(10, 20))
        with pytest.raises(ValueError):
            _config(n=None)

    def test_replicate_count_validated(self):
        with pytest.raises(ValueError):
            _config(replicates=0)

    def test_fig2_constraints(self):
        cfg = _config(experiment="fig2", n=100, replicates=1)
        assert cfg.levels == (100,)
        with pytest.raises(ValueError):
            _config(experiment="fig2", n=100, replicates=2)
        with pytest.raises(ValueError):
            _config(experiment="fig2", n=None, n_grid=(100, 200), replicates=1)

    def test_normalized_experiments_need_two_lineages(self):
        with pytest.raises(ValueError):
            _config(experiment="theorem1", n=1)
        assert _config(experiment="fig1", n=1).levels == (1,)

    def test_trajectory_experiments_refuse_summary_storage(self):
        with pytest.raises(ValueError):
            _config(experiment="theorem3", n=100, storage_policy="summary")
        with pytest.raises(ValueError):
            _config(storage_policy="bogus")

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            _config(n=None, n_grid=())

    def test_workers_validated(self):
        with pytest.raises(ValueError):
            _config(workers=0)

    def test_echo_contents(self):
        echo = _config(n=None, n_grid=(10, 20), workers=3).echo()
        assert echo["experiment"] == "fig1"
        assert echo["n_grid"] == [10, 20]
        assert "workers" not in echo
        assert "output_path" not in echo
        assert echo["master_seed"] == 5


class TestRunExperiment:
    def test_fig1_record_schema(self):
        batch = run_experiment(_config(replicates=6))
        assert len(batch.records) == 6
        first = batch.records[0]
        assert set(first) >= {"replicate", "seed", "n", "tau", "L", "ell", "tau_pow"}
        assert [r["replicate"] for r in batch.records] == list(range(6))
        assert set(batch.aggregates) == {"ell", "L", "tau_pow"}

    def test_single_lineage_fig1(self):
        batch = run_experiment(_config(n=1, replicates=3))
        for record in batch.records:
            assert record["tau"] == 0
            assert record["L"] == 0.0 and record["ell"] == 0.0

    def test_ratio_statistic(self):
        batch = run_experiment(_config(experiment="ratio", n=100, replicates=10))
        for record in batch.records:
            assert 0.0 < record["ratio"] <= 1.0
            assert record["ratio"] == pytest.approx(record["ell"] / record["L"])
        assert "ratio" in batch.aggregates

    def test_lemma1_adds_reference_comparison(self):
        batch = run_experiment(_config(experiment="lemma1", n=200, replicates=60,
                                       master_seed=17))
        assert "tau_norm" in batch.records[0]
        (name, result), = batch.ks.items()
        assert name == "tau_norm_vs_reference"
        assert 0.0 <= result["d"] <= 1.0
        assert 0.0 <= result["p_value"] <= 1.0
        assert result["reference_count"] == 60

    def test_theorem2_regime_tag(self):
        low = run_experiment(_config(experiment="theorem2", n=100, replicates=20,
                                     alpha=1.2))
        assert low.regime == "power_rescaled"
        assert "L_norm_vs_reference" in low.ks
        high = run_experiment(_config(experiment="theorem2", n=100, replicates=20,
                                      alpha=1.8))
        assert high.regime == "centered_only"
        assert high.ks == {}

    def test_theorem3_deviation_fields(self):
        batch = run_experiment(_config(experiment="theorem3", n=80, replicates=12))
        for record in batch.records:
            assert 0.0 <= record["dev_x"] <= 1.0 + 1e-12
            assert 0.0 <= record["dev_y"] <= 1.0 + 1e-12
        assert set(batch.aggregates) == {"dev_x", "dev_y"}

    def test_lemma2_residual_fields(self):
        batch = run_experiment(_config(experiment="lemma2", n=120, replicates=10))
        record = batch.records[0]
        a = 1.5
        predicted = a * math.gamma(a) * (a - 1.0) ** (a - 1.0) * record["tau"] ** (2.0 - a)
        assert record["residual"] == pytest.approx(record["ell"] - predicted)
        assert "residual_scaled" in record
        assert "residual_scaled_abs" in batch.aggregates

    def test_grid_levels_are_independent(self):
        grid = run_experiment(_config(experiment="lemma1", n=None,
                                      n_grid=(40, 80), replicates=30))
        single = run_experiment(_config(experiment="lemma1", n=40, replicates=30))
        grid_40 = [r for r in grid.records if r["n"] == 40]
        assert len(grid.records) == 60
        assert "tau_norm_vs_reference@n=40" in grid.ks
        assert "tau_norm_vs_reference@n=80" in grid.ks
        for got, want in zip(grid_40, single.records):
            assert got["tau"] == want["tau"]
            assert got["ell"] == want["ell"]

    def test_fig2_table(self):
        batch = run_experiment(_config(experiment="fig2", n=60, replicates=1))
        assert batch.table["columns"] == ["j", "x", "y", "ref_curve"]
        rows = batch.table["rows"]
        tau = batch.records[0]["tau"]
        assert len(rows) == tau + 1
        assert rows[0][0] == 0 and rows[-1][0] == tau
        assert rows[-1][1] == 60
        assert rows[0][1] == 1
        assert rows[-1][3] == pytest.approx(60.0)
        x_col = [row[1] for row in rows]
        assert all(b < a for a, b in zip(x_col[1:], x_col))


class TestDeterminism:
    def test_worker_counts_agree_bytes(self):
        for fmt in ("csv", "json"):
            serial = emit(run_experiment(_config(replicates=12, workers=1)), fmt)
            threaded = emit(run_experiment(_config(replicates=12, workers=3)), fmt)
            assert serial == threaded

    def test_storage_policies_agree_on_statistics(self):
        stored = run_experiment(_config(experiment="ratio", n=150, replicates=8,
                                        storage_policy="stored"))
        summary = run_experiment(_config(experiment="ratio", n=150, replicates=8,
                                         storage_policy="summary"))
        assert stored.records == summary.records

    def test_repeat_run_identical(self):
        cfg = _config(experiment="theorem1", n=60, replicates=25)
        assert emit(run_experiment(cfg), "json") == emit(run_experiment(cfg), "json")

    def test_env_override_is_cosmetic(self, monkeypatch):
        cfg = _config(replicates=10)
        before = emit(run_experiment(cfg), "csv")
        monkeypatch.setenv(WORKERS_ENV_VAR, "4")
        after = emit(run_experiment(cfg), "csv")
        assert before == after


class TestEmit:
    def test_csv_round_trips_floats(self):
        batch = run_experiment(_config(replicates=5))
        text = emit(batch, "csv")
        assert text.count("\r\n") == text.count("\n")
        rows = list(csv.reader(io.StringIO(text)))
        header, data = rows[0], rows[1:]
        assert header[:4] == ["replicate", "seed", "n", "tau"]
        assert len(data) == 5
        ell_idx = header.index("ell")
        for row, record in zip(data, batch.records):
            assert float(row[ell_idx]) == record["ell"]

    def test_json_shape(self):
        batch = run_experiment(_config(experiment="lemma1", n=80, replicates=20))
        doc = json.loads(emit(batch, "json"))
        assert set(doc) == {"config", "records", "aggregates", "ks"}
        assert doc["config"]["experiment"] == "lemma1"
        assert len(doc["records"]) == 20
        assert doc["aggregates"]["tau_norm"]["count"] == 20
        assert emit(batch, "json").endswith("\n")

    def test_fig2_csv_is_the_table(self):
        batch = run_experiment(_config(experiment="fig2", n=40, replicates=1))
        rows = list(csv.reader(io.StringIO(emit(batch, "csv"))))
        assert rows[0] == ["j", "x", "y", "ref_curve"]
        assert len(rows) == len(batch.table["rows"]) + 1

    def test_writes_file(self, tmp_path):
        target = tmp_path / "out.csv"
        batch = run_experiment(_config(replicates=3))
        text = emit(batch, "csv", str(target))
        assert target.read_bytes().decode() == text

    def test_unwritable_path_raises(self):
        batch = run_experiment(_config(replicates=3))
        bad = "/nonexistent-dir/out.csv"
        with pytest.raises(OSError) as err:
            emit(batch, "csv", bad)
        assert bad in str(err.value)

    def test_unknown_format_rejected(self):
        batch = run_experiment(_config(replicates=3))
        with pytest.raises(ValueError):
            emit(batch, "xml")


class TestCli:
    def test_invalid_alpha_exits_nonzero(self, capsys):
        code = main(["simulate", "--n", "10", "--alpha", "2.5", "--seed", "1"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_simulate_emits_json_record(self, capsys):
        code = main(["simulate", "--n", "20", "--alpha", "1.5", "--seed", "3"])
        assert code == 0
        record = json.loads(capsys.readouterr().out)
        assert record["n"] == 20
        assert record["tau"] >= 1
        assert record["ell"] <= record["L"]

    def test_simulate_store_trajectory(self, capsys):
        main(["simulate", "--n", "15", "--alpha", "1.5", "--seed", "3",
              "--store-trajectory"])
        record = json.loads(capsys.readouterr().out)
        assert len(record["x"]) == record["tau"] + 1
        assert len(record["u"]) == record["tau"]
        assert len(record["dt"]) == record["tau"]

    def test_rates_table_header_and_roundtrip(self, capsys):
        from betacoal import lambda_bk, merger_rate_table

        code = main(["rates", "table", "--alpha", "1.5", "--b", "6"])
        assert code == 0
        out = capsys.readouterr().out
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["k", "lambda_bk", "binom_weight", "pmf"]
        assert [row[0] for row in rows[1:]] == ["2", "3", "4", "5", "6"]
        table = merger_rate_table(6, 1.5)
        for row in rows[1:]:
            k = int(row[0])
            assert float(row[1]) == lambda_bk(6, k, 1.5)
            assert int(row[2]) == math.comb(6, k)
            assert float(row[3]) == table.pmf(k)

    def test_constants_json(self, capsys):
        code = main(["constants", "--alpha", "1.5"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["gamma"] == 2.0
        assert set(doc) == {"c1", "c2", "c1_prime", "c2_prime", "gamma", "alpha0"}

    def test_oracle_csv_schema(self, capsys):
        code = main(["oracle", "--n", "8", "--alpha", "1.5", "--reps", "4",
                     "--seed", "2"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rows[0] == ["replicate", "seed", "n", "tau", "L", "ell"]
        assert len(rows) == 5

    def test_oracle_store_history(self, tmp_path, capsys):
        target = tmp_path / "history.json"
        code = main(["oracle", "--n", "5", "--alpha", "1.5", "--reps", "2",
                     "--seed", "2", "--store-history", str(target)])
        assert code == 0
        doc = json.loads(target.read_text())
        assert doc["n"] == 5
        assert len(doc["replicates"]) == 2
        states = doc["replicates"][0]["states"]
        assert states[0]["blocks"] == [[1], [2], [3], [4], [5]]

    def test_stable_sample_lines(self, capsys):
        code = main(["stable", "sample", "--alpha", "1.5", "--count", "4",
                     "--seed", "9"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 4
        float(lines[0])

    def test_experiment_to_file(self, tmp_path, capsys):
        target = tmp_path / "batch.csv"
        code = main(["experiment", "ratio", "--alpha", "1.5", "--n", "100",
                     "--reps", "5", "--seed", "11", "--out", str(target)])
        assert code == 0
        assert capsys.readouterr().out == ""
        rows = list(csv.reader(io.StringIO(target.read_text())))
        assert len(rows) == 6

    def test_experiment_stdout_json(self, capsys):
        code = main(["experiment", "fig1", "--alpha", "1.5", "--n", "30",
                     "--reps", "3", "--seed", "11", "--format", "json"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["config"]["n"] == 30

    def test_experiment_grid_flag(self, capsys):
        code = main(["experiment", "lemma1", "--alpha", "1.5",
                     "--n-grid", "40,80", "--reps", "6", "--seed", "11",
                     "--format", "json"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["config"]["n_grid"] == [40, 80]

    def test_experiment_rejects_missing_n(self, capsys):
        code = main(["experiment", "fig1", "--alpha", "1.5", "--reps", "3",
                     "--seed", "1"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_workers_env_default(self, capsys, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV_VAR, "2")
        code = main(["experiment", "ratio", "--alpha", "1.5", "--n", "60",
                     "--reps", "4", "--seed", "3"])
        assert code == 0
        monkeypatch.delenv(WORKERS_ENV_VAR)
        first = capsys.readouterr().out
        code = main(["experiment", "ratio", "--alpha", "1.5", "--n", "60",
                     "--reps", "4", "--seed", "3"])
        assert code == 0
        assert capsys.readouterr().out == first
