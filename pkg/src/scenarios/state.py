"""LangGraph state of a scenario run.

Nodes return partial updates. List and dict fields carry reducers so that every step
appends to them instead of replacing what earlier steps wrote.
"""

import operator
from typing import Annotated, Any

from pydantic import BaseModel, Field

from src.fitkit.schemas import FitResult
from src.model.config import ExperimentConfig
from src.scenarios.schemas import ScenarioReport, StepRecord, TraceFile


class ScenarioState(BaseModel):
    """State passed between the step nodes of a scenario.

    Attributes:
        scenario: Scenario name
        config: Validated experiment config (never modified by a step)
        output_dir: Directory receiving traces and the report
        seed: Seed of the synthetic measurement noise
        started_at: ``time.perf_counter()`` at the start of the run

        steps: One record per executed step, in execution order
        fits: Fit results by step name
        traces: Trace files written so far
        provenance: Conventions, assumptions and flags applied, in order

        error: Message of the first failed step
        failed_step: Name of that step
        report: Final report, set by ``finalize``
    """

    scenario: str
    config: ExperimentConfig
    output_dir: str
    seed: int = 0
    started_at: float = 0.0

    steps: Annotated[list[StepRecord], operator.add] = Field(default_factory=list)
    fits: Annotated[dict[str, FitResult], operator.or_] = Field(default_factory=dict)
    traces: Annotated[list[TraceFile], operator.add] = Field(default_factory=list)
    provenance: Annotated[list[str], operator.add] = Field(default_factory=list)

    error: str | None = None
    failed_step: str | None = None
    report: ScenarioReport | None = None

    def step(self, name: str) -> StepRecord | None:
        return next((s for s in self.steps if s.name == name), None)

    def value(self, step: str, output: str, default: Any = None) -> Any:
        """Output of an earlier step, or ``default`` when it did not produce one."""
        record = self.step(step)
        if record is None or record.status != "ok":
            return default
        return record.outputs.get(output, default)
