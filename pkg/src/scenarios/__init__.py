"""Scenario pipelines, trace files and run reports."""

from src.scenarios.acceptance import evaluate_checks
from src.scenarios.graph import SCENARIOS, create_workflow
from src.scenarios.runner import run_scenario
from src.scenarios.schemas import CheckOutcome, ScenarioReport, StepRecord, TraceFile
from src.scenarios.storage import OutputStore
from src.scenarios.traces import emit_trace, read_trace

__all__ = [
    "SCENARIOS",
    "CheckOutcome",
    "OutputStore",
    "ScenarioReport",
    "StepRecord",
    "TraceFile",
    "create_workflow",
    "emit_trace",
    "evaluate_checks",
    "read_trace",
    "run_scenario",
]
