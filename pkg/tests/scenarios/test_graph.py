"""Tests for scenario workflow construction and routing."""

from unittest.mock import patch

import pytest

from src.model.errors import PreconditionError, ScenarioError
from src.model.loader import bundled_config, load_config
from src.scenarios.graph import SCENARIOS, continue_or_fail, create_workflow
from src.scenarios.nodes import STEPS, StepResult, scenario_step
from src.scenarios.state import ScenarioState


@pytest.fixture
def config():
    return load_config(bundled_config("prysoA"))


class TestContinueOrFail:
    """Tests for the continue_or_fail conditional edge function."""

    def test_continues_without_failure(self, config):
        """Test that the chain continues while no step has failed."""
        state = ScenarioState(scenario="heating", config=config, output_dir=".")
        assert continue_or_fail(state) == "continue"

    def test_fails_after_failed_step(self, config):
        """Test that a recorded failure diverts to the error handler."""
        state = ScenarioState(
            scenario="heating",
            config=config,
            output_dir=".",
            error="rabi: bad pulse",
            failed_step="rabi",
        )
        assert continue_or_fail(state) == "fail"


class TestCreateWorkflow:
    """Tests for create_workflow."""

    def test_every_scenario_compiles(self):
        """Test that every named scenario builds and only uses registered steps."""
        for name, steps in SCENARIOS.items():
            assert set(steps) <= set(STEPS), name
            assert create_workflow(name) is not None

    def test_graph_has_error_and_finalize_nodes(self):
        """Test that the compiled graph contains the steps plus both terminal nodes."""
        workflow = create_workflow("mode_volume")
        nodes = set(workflow.get_graph().nodes)

        assert {"mode_volume", "mode_overlap", "solved_coupling"} <= nodes
        assert {"handle_error", "finalize"} <= nodes

    def test_unknown_scenario(self):
        """Test that an unknown scenario name is refused."""
        with pytest.raises(ScenarioError, match="Unknown scenario"):
            create_workflow("table2")


class TestWorkflowExecution:
    """Tests for running compiled workflows."""

    def test_failed_step_stops_the_chain(self, config, tmp_path):
        """Test that steps after a failure do not run and the report names the failure."""

        def broken(state, store):
            raise PreconditionError("pulse area must be positive")

        with patch.dict(STEPS):
            scenario_step("rabi", "rabi_from_pulse")(broken)
            workflow = create_workflow("cavity_qed_numbers")

        initial = ScenarioState(
            scenario="cavity_qed_numbers", config=config, output_dir=str(tmp_path)
        )
        result = workflow.invoke(initial, config={"configurable": {"thread_id": "broken"}})
        report = result["report"]

        names = [s.name for s in report.steps]
        assert names == ["cavity_rates", "decay_rates", "photon_number", "rabi"]
        assert report.steps[-1].status == "failed"
        assert "pulse area" in report.steps[-1].note
        assert report.failed_step == "rabi"
        assert not report.passed
        assert "run stopped at failed step rabi" in report.provenance
        assert (tmp_path / "report.json").exists()

    def test_skipped_step_does_not_stop_the_chain(self, config, tmp_path):
        """Test that a skipped step is recorded and later steps still run."""

        def nothing(state, store):
            return StepResult(skipped="no data")

        with patch.dict(STEPS):
            scenario_step("photon_number", "photon_number_conventions")(nothing)
            scenario_step("rabi", "rabi_from_pulse")(nothing)
            scenario_step("echo_coupling", "g_from_echo")(nothing)
            workflow = create_workflow("cavity_qed_numbers")

        initial = ScenarioState(
            scenario="cavity_qed_numbers", config=config, output_dir=str(tmp_path)
        )
        report = workflow.invoke(initial, config={"configurable": {"thread_id": "skip"}})[
            "report"
        ]

        assert report.failed_step is None
        assert report.step("rabi").status == "skipped"
        assert report.step("strong_coupling").status == "ok"
        photon_check = next(c for c in report.checks if c.key == "photon_number.n_photons")
        assert photon_check.passed is None
