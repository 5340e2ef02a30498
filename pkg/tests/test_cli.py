import csv
import json
from pathlib import Path

import numpy as np
import pytest

from grover_coherence import engine as engine_mod
from grover_coherence.cli import CSV_COLUMNS, main
from grover_coherence.verify import run_checks


def read_csv(path):
    with Path(path).open() as fh:
        return list(csv.DictReader(fh))


class TestSimulate:
    def test_small_run_success_column(self, tmp_path):
        rc = main(
            ["simulate", "--n", "3", "--targets", "5", "--kmax", "1",
             "--alpha", "2.0", "--out", str(tmp_path)]
        )
        assert rc == 0
        rows = read_csv(tmp_path / "run_series.csv")
        assert set(rows[0]) == set(CSV_COLUMNS)
        psi1 = [r for r in rows if r["stage"] == "psi_k" and r["k"] == "1"]
        assert len(psi1) == 1
        assert float(psi1[0]["P_k"]) == pytest.approx(0.78125, abs=1e-12)

    def test_example1_row_counts(self, tmp_path):
        rc = main(["simulate", "--preset", "example1", "--out", str(tmp_path)])
        assert rc == 0
        rows = read_csv(tmp_path / "example1_series.csv")
        for alpha in ("2.0", "1.5"):
            psi_rows = [r for r in rows if r["stage"] == "psi_k" and r["alpha"] == alpha]
            assert len(psi_rows) == 143  # optimal count 142, plus the start
        meta = json.loads((tmp_path / "example1_series.meta.json").read_text())
        assert meta["config"] == {"n": 16, "targets": {"pattern": "0" * 15 + "*"}}
        assert meta["k_max"] == 142

    def test_deterministic_output(self, tmp_path):
        args = ["simulate", "--n", "4", "--targets", "3,9", "--alpha", "1.5"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert (a / "run_series.csv").read_bytes() == (b / "run_series.csv").read_bytes()

    def test_json_format(self, tmp_path):
        rc = main(
            ["simulate", "--n", "3", "--pattern", "101", "--kmax", "2",
             "--alpha", "0.5", "--format", "json", "--out", str(tmp_path)]
        )
        assert rc == 0
        rows = json.loads((tmp_path / "run_series.json").read_text())
        assert all(set(r) == set(CSV_COLUMNS) for r in rows)

    def test_exact_column_matches_closed_form(self, tmp_path):
        main(
            ["simulate", "--n", "6", "--targets", "0,1", "--kmax", "4",
             "--alpha", "2.0", "--out", str(tmp_path)]
        )
        rows = read_csv(tmp_path / "run_series.csv")
        from grover_coherence import c_alpha_psi_k_exact
        for r in rows:
            if r["stage"] == "psi_k":
                expected = c_alpha_psi_k_exact(64, 2, float(r["P_k"]), 2.0).value
                assert float(r["C_exact"]) == pytest.approx(expected, abs=1e-10)

    def test_example2_presets_resolve(self, tmp_path):
        for preset, targets in (
            ("example2-product", {"pattern": "0" * 16 + "**"}),
            ("example2-entangled", {"indices": [0, 3, 5, 6]}),
        ):
            rc = main(
                ["simulate", "--preset", preset, "--kmax", "2", "--alpha", "2.0",
                 "--out", str(tmp_path / preset)]
            )
            assert rc == 0
            meta = json.loads(
                (tmp_path / preset / f"{preset}_series.meta.json").read_text()
            )
            assert meta["config"]["n"] == 18
            assert meta["config"]["targets"] == targets

    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GROVER_COHERENCE_OUT", str(tmp_path / "from_env"))
        rc = main(["simulate", "--n", "3", "--targets", "1", "--kmax", "1", "--alpha", "2.0"])
        assert rc == 0
        assert (tmp_path / "from_env" / "run_series.csv").exists()


class TestInvalidInput:
    def test_out_of_range_target(self, tmp_path, capsys):
        rc = main(["simulate", "--n", "3", "--targets", "9", "--out", str(tmp_path)])
        assert rc == 2
        assert "error" in capsys.readouterr().err

    def test_missing_target_spec(self, tmp_path):
        assert main(["simulate", "--n", "3", "--out", str(tmp_path)]) == 2

    def test_both_target_specs(self, tmp_path):
        rc = main(
            ["simulate", "--n", "3", "--targets", "1", "--pattern", "0**",
             "--out", str(tmp_path)]
        )
        assert rc == 2

    def test_kmax_cap_requires_force(self, tmp_path):
        base = ["simulate", "--n", "4", "--targets", "0", "--out", str(tmp_path)]
        assert main(base + ["--kmax", "100"]) == 2
        assert main(base + ["--kmax", "100", "--force-kmax"]) == 0


class TestDynamics:
    def test_example1_summary(self, tmp_path):
        rc = main(
            ["dynamics", "--preset", "example1", "--alpha", "2.0", "--out", str(tmp_path)]
        )
        assert rc == 0
        summary = json.loads((tmp_path / "example1_summary.json").read_text())
        tp = summary["turning_points"]["2.0"]
        assert tp["k_formula"] == 86
        assert tp["k_empirical"] == 86
        assert abs(tp["hp_within_start"] - 1.0) < 0.05
        assert abs(tp["hp_within_end"] + 0.5) < 0.05
        assert summary["gamma"] == 0.5

        tags = read_csv(tmp_path / "example1_classification.csv")
        for row in tags:
            if row["operator"] in ("O", "P"):
                assert row["tag"] == "unchanged"

        deltas = read_csv(tmp_path / "example1_deltas.csv")
        assert {r["stage"] for r in deltas} == {
            "G", "HO_between", "HP_between", "HO_within", "HP_within"
        }
        scaled_g = [r for r in deltas if r["stage"] == "G" and r["units"] == "probability_units"]
        assert len(scaled_g) == 142
        # iteration deltas are negative while the success probability climbs
        assert all(float(r["C_exact"]) < 0 for r in scaled_g[1:-1])

        residuals = read_csv(tmp_path / "example1_residuals.csv")
        ident = [
            float(r["C_exact"]) for r in residuals if r["stage"] == "G_minus_shifted_HP"
        ]
        assert max(abs(v) for v in ident) == 0.0

    def test_low_alpha_rows_are_raw_only(self, tmp_path):
        rc = main(
            ["dynamics", "--n", "8", "--targets", "0", "--alpha", "0.5",
             "--kmax", "6", "--out", str(tmp_path)]
        )
        assert rc == 0
        rows = read_csv(tmp_path / "run_deltas.csv")
        assert rows and all(r["units"] == "raw" for r in rows)
        summary = json.loads((tmp_path / "run_summary.json").read_text())
        assert summary["turning_points"] == {}


class TestSpectrum:
    def test_pair_histogram(self, tmp_path, capsys):
        rc = main(["spectrum", "--n", "2", "--targets", "0,1", "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert report["histogram"] == {"0": 2, "2": 1}
        assert report["parseval"]["ok"] is True
        assert report["gamma_tabulated"] == 0.5
        assert report["structure"] == "subcube"
        assert (tmp_path / "run_spectrum.json").exists()

    def test_single_target(self, capsys):
        rc = main(["spectrum", "--n", "4", "--targets", "7"])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert set(report["histogram"]) <= {"-1", "1"}
        assert report["gamma_effective_rms"] == pytest.approx(1.0)
        assert report["gamma_tabulated"] == 1.0


class TestVerify:
    def test_fast_level_passes(self, tmp_path, capsys):
        rc = main(["verify", "--level", "fast", "--out", str(tmp_path)])
        out = capsys.readouterr().out
        report = json.loads(out)
        assert rc == 0
        assert report["passed"] is True
        assert report["seconds"] < 60
        assert {c["name"] for c in report["checks"]} >= {
            "fwht_dense_reference",
            "norm_preservation",
            "oracle_phase_invariance",
            "closed_form_match",
            "minimizer_optimality",
        }
        assert (tmp_path / "verify_report.json").exists()

    def test_mutated_oracle_is_caught(self, monkeypatch):
        def corrupted(state, targets):
            idx = targets.indices if hasattr(targets, "indices") else tuple(targets)
            out = np.array(state, dtype=float)
            out[list(idx)] *= -1.0000001  # breaks probability preservation
            return out

        monkeypatch.setattr(engine_mod, "apply_oracle", corrupted)
        report = run_checks("fast", only=["oracle_phase_invariance"])
        assert report["passed"] is False
        failed = report["checks"][0]
        assert failed["counterexamples"]
