"""Tests for running scenarios end to end."""

import json

import pytest

from src.model.errors import ScenarioError
from src.model.loader import bundled_config, load_config
from src.scenarios import ScenarioReport, read_trace, run_scenario


@pytest.fixture
def resonator_a():
    return load_config(bundled_config("prysoA"))


@pytest.fixture
def resonator_b():
    return load_config(bundled_config("prysoB"))


class TestCavityQedNumbers:
    """Tests for the cavity_qed_numbers scenario."""

    def test_resonator_a_checks_pass(self, resonator_a, tmp_path):
        """Test that every configured check of the Resonator-A numbers passes."""
        report = run_scenario("cavity_qed_numbers", resonator_a, output_dir=tmp_path, seed=0)

        assert report.failed_step is None
        assert report.checks
        assert all(c.passed for c in report.checks), [c for c in report.checks if not c.passed]
        assert report.output("critical_numbers.N0") == pytest.approx(2.15e5, rel=0.01)
        assert report.output("critical_numbers.n0") == pytest.approx(0.166, rel=0.01)

    def test_report_written_to_output_dir(self, resonator_a, tmp_path):
        """Test that report.json is written and reloads to the returned report."""
        report = run_scenario("cavity_qed_numbers", resonator_a, output_dir=tmp_path)

        path = tmp_path / "report.json"
        assert path.exists()
        loaded = ScenarioReport.from_json(path.read_text())
        assert loaded.steps == report.steps
        assert loaded.config["name"] == "prysoA"

    def test_records_operations_and_provenance(self, resonator_a, tmp_path):
        """Test that steps list their operations and conventions are noted."""
        report = run_scenario("cavity_qed_numbers", resonator_a, output_dir=tmp_path)

        assert report.step("cavity_rates").operations == ["kappa_from_q"]
        assert any(p.startswith("photon number convention") for p in report.provenance)
        assert any(p.startswith("critical numbers use g from") for p in report.provenance)

    def test_same_seed_reproduces_report(self, resonator_a, tmp_path):
        """Test that two runs differ only on the volatile line of report.json."""
        run_scenario("cavity_qed_numbers", resonator_a, output_dir=tmp_path / "a", seed=5)
        run_scenario("cavity_qed_numbers", resonator_a, output_dir=tmp_path / "b", seed=5)

        first = (tmp_path / "a" / "report.json").read_text().splitlines()
        second = (tmp_path / "b" / "report.json").read_text().splitlines()
        assert first[:1] + first[2:] == second[:1] + second[2:]

    def test_erbium_is_in_the_strong_coupling_regime(self, tmp_path):
        """Test that the Er:YSO config reports both critical numbers below one."""
        config = load_config(bundled_config("erYSO"))

        report = run_scenario("cavity_qed_numbers", config, output_dir=tmp_path)

        assert report.passed
        assert report.output("strong_coupling.n0_below_one") is True
        assert report.output("strong_coupling.N0_below_one") is True

    def test_invalid_lifetimes_fail_the_run(self, resonator_a, tmp_path):
        """Test that T2 > 2·T1 stops the run at decay_rates without raising."""
        ion = resonator_a.ion.model_copy(update={"t2": 1.0})
        config = resonator_a.model_copy(update={"ion": ion})

        report = run_scenario("cavity_qed_numbers", config, output_dir=tmp_path)

        assert report.failed_step == "decay_rates"
        assert not report.passed
        assert [s.name for s in report.steps] == ["cavity_rates", "decay_rates"]
        assert json.loads((tmp_path / "report.json").read_text())["failed_step"] == "decay_rates"


class TestRunScenario:
    """Tests for run_scenario argument handling and the remaining scenarios."""

    def test_unknown_scenario(self, resonator_a, tmp_path):
        """Test that an unknown scenario raises before anything is written."""
        with pytest.raises(ScenarioError):
            run_scenario("table2", resonator_a, output_dir=tmp_path)
        assert not (tmp_path / "report.json").exists()

    def test_heating(self, resonator_a, tmp_path):
        """Test that the heating fit finds T2 increasing with distance."""
        report = run_scenario("heating", resonator_a, output_dir=tmp_path)

        assert report.passed
        assert report.output("heating.monotone_increasing") is True
        assert "heating" in report.fits
        assert (tmp_path / "heating_series.dat").exists()

    @pytest.mark.slow
    def test_mode_volume(self, resonator_a, tmp_path):
        """Test that the solved fundamental mode gives the Resonator-A mode volume."""
        report = run_scenario("mode_volume", resonator_a, output_dir=tmp_path)

        assert report.passed, report.checks
        assert report.output("mode_volume.volume") == pytest.approx(5.4e-13, rel=0.15)

    @pytest.mark.slow
    def test_echo_suite(self, resonator_a, tmp_path):
        """Test that the simulated echo series recover the configured lifetimes."""
        report = run_scenario("echo_suite", resonator_a, output_dir=tmp_path, seed=1)

        assert report.passed, [c for c in report.checks if not c.passed]
        assert report.output("two_pulse_amplitude.t2") == pytest.approx(68e-6, rel=0.02)
        assert report.traces
        first = report.traces[0]
        assert read_trace(tmp_path / first.path).times.size == first.samples

    @pytest.mark.slow
    def test_bistab_suite(self, resonator_b, tmp_path):
        """Test hysteresis at the highest power and the recovered coupling."""
        report = run_scenario("bistab_suite", resonator_b, output_dir=tmp_path)

        assert report.passed, [c for c in report.checks if not c.passed]
        assert report.output("hysteresis.present_at_max_power") is True
        assert report.output("hysteresis.non_increasing") is True
        assert any(t.path.startswith("hysteresis_800uW") for t in report.traces)
