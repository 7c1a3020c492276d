"""Tests for the wgm-lab command line."""

import json

import numpy as np
import pytest

from src.cli.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, build_parser, main, run_fit

STRICT_CONFIG = """
schema_version: 1
name: strict
ion:
  transition_wavelength: 605.977 nm
  dipole_moment: 1.5911e-32
  t1: 187 us
  t2: 68 us
resonator:
  radius: 1.95 mm
  refractive_index: 1.8
  quality_factor: 1.8e6
  coupling_efficiency: 0.206
acceptance:
  cavity_rates.kappa_over_2pi: {target: 1.0, abs_tol: 0.5}
"""


class TestParser:
    """Tests for argument parsing."""

    def test_shortcut_accepts_common_flags(self):
        """Test that every subcommand takes --config, --out, --seed and --format."""
        args = build_parser().parse_args(
            ["cqed", "--config", "erYSO", "--out", "runs", "--seed", "4", "--format", "text"]
        )

        assert (args.command, args.config, args.out, args.seed) == ("cqed", "erYSO", "runs", 4)
        assert args.format == "text"

    def test_unknown_scenario_is_a_usage_error(self):
        """Test that argparse rejects scenarios outside the registry."""
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["run", "table2"])
        assert exc.value.code == EXIT_USAGE


class TestScenarioCommands:
    """Tests for the scenario subcommands."""

    def test_cqed_writes_report_and_prints_json(self, tmp_path, capsys):
        """Test that cqed exits 0, writes report.json and prints the same report."""
        status = main(["cqed", "--config", "prysoA", "--out", str(tmp_path), "--format", "json"])

        assert status == EXIT_OK
        printed = capsys.readouterr().out
        assert printed == (tmp_path / "report.json").read_text()
        assert json.loads(printed)["scenario"] == "cavity_qed_numbers"

    def test_text_format(self, tmp_path, capsys):
        """Test that the text summary lists steps and check verdicts."""
        main(["run", "heating", "--out", str(tmp_path), "--format", "text"])

        printed = capsys.readouterr().out
        assert printed.startswith("scenario heating (config prysoA")
        assert "[ok] heating" in printed
        assert "PASS heating.monotone_increasing" in printed

    def test_unknown_config_returns_usage_error(self, tmp_path, capsys):
        """Test that a missing bundled config is reported on stderr with exit code 2."""
        status = main(["cqed", "--config", "nonexistent", "--out", str(tmp_path)])

        assert status == EXIT_USAGE
        assert "No bundled config" in capsys.readouterr().err

    def test_failed_check_returns_one(self, tmp_path, capsys):
        """Test that a run with a failing acceptance check exits with 1."""
        config = tmp_path / "strict.yaml"
        config.write_text(STRICT_CONFIG, encoding="utf-8")

        status = main(["cqed", "--config", str(config), "--out", str(tmp_path / "run")])

        assert status == EXIT_FAILED
        report = json.loads((tmp_path / "run" / "report.json").read_text())
        assert report["failed_step"] is None
        verdicts = {c["key"]: c["passed"] for c in report["checks"]}
        assert verdicts == {"cavity_rates.kappa_over_2pi": False}


class TestFitCommand:
    """Tests for the fit subcommand."""

    @pytest.fixture
    def decay_file(self, tmp_path):
        tau = np.linspace(1e-6, 60e-6, 30)
        path = tmp_path / "decay.dat"
        np.savetxt(path, np.column_stack([tau, 0.8 * np.exp(-2 * tau / 68e-6)]), header="tau peak")
        return path

    @pytest.fixture
    def headed_file(self, tmp_path):
        tau = np.linspace(1e-6, 60e-6, 30)
        path = tmp_path / "headed.dat"
        np.savetxt(
            path,
            np.column_stack([tau, 0.8 * np.exp(-2 * tau / 68e-6)]),
            header="model: amp_2pe\ncolumns: tau, peak",
        )
        return path

    def test_model_from_file_header(self, headed_file, tmp_path, capsys):
        """Test that a file naming its model in the header is fitted without --model."""
        status = main(["fit", str(headed_file), "--out", str(tmp_path)])

        assert status == EXIT_OK
        fit = json.loads(capsys.readouterr().out)
        assert fit["model_name"] == "amp_2pe"
        assert fit["parameters"]["t2"] == pytest.approx(68e-6, rel=1e-3)
        assert (tmp_path / "fit_amp_2pe.json").exists()

    def test_model_flag_overrides_header(self, headed_file, capsys):
        """Test that --model wins over the header: read as intensities T2 doubles."""
        status = main(["fit", str(headed_file), "--model", "int_2pe"])

        assert status == EXIT_OK
        fit = json.loads(capsys.readouterr().out)
        assert fit["model_name"] == "int_2pe"
        assert fit["parameters"]["t2"] == pytest.approx(136e-6, rel=1e-3)

    def test_no_model_anywhere(self, decay_file, capsys):
        """Test that a file without a model header needs --model, exiting with 2."""
        status = main(["fit", str(decay_file)])

        assert status == EXIT_USAGE
        assert "no fit model" in capsys.readouterr().err

    def test_unknown_model_in_header(self, tmp_path, capsys):
        """Test that a header naming an unknown model is a usage error."""
        path = tmp_path / "odd.dat"
        path.write_text("# model: triple_exp\n1 2\n2 1\n3 0.5\n4 0.25\n")

        assert main(["fit", str(path)]) == EXIT_USAGE
        assert "unknown fit model" in capsys.readouterr().err

    def test_fit_amplitude_decay(self, decay_file, tmp_path, capsys):
        """Test that fitting a two-pulse amplitude series recovers T2."""
        status = main(["fit", str(decay_file), "--model", "amp_2pe", "--out", str(tmp_path)])

        assert status == EXIT_OK
        fit = json.loads(capsys.readouterr().out)
        assert fit["parameters"]["t2"] == pytest.approx(68e-6, rel=1e-3)
        assert (tmp_path / "fit_amp_2pe.json").exists()

    def test_unreadable_data_file(self, tmp_path, capsys):
        """Test that a missing data file exits with 2."""
        status = main(["fit", str(tmp_path / "missing.dat"), "--model", "hole"])

        assert status == EXIT_USAGE
        assert "cannot read" in capsys.readouterr().err

    def test_single_column_file(self, tmp_path, capsys):
        """Test that a one-column data file is refused."""
        path = tmp_path / "one.dat"
        path.write_text("1\n2\n3\n")

        assert main(["fit", str(path), "--model", "int_2pe"]) == EXIT_USAGE

    def test_run_fit_heating_with_positioner(self):
        """Test that positioner steps are converted with the given step size."""
        steps = np.arange(10.0)
        t2 = 60e-6 + 1e-6 * steps - 0.05e-6 * steps**2

        fit = run_fit(np.column_stack([steps, t2]), "heating", positioner=True, step_size=1e-6)

        assert fit.converged
        assert fit.diagnostics["r_squared"] == pytest.approx(1.0)
