"""Report records produced by scenario runs."""

import json
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.fitkit.schemas import FitResult
from src.model.schemas import FrozenModel

REPORT_SCHEMA_VERSION = 1

StepStatus = Literal["ok", "skipped", "failed"]
OutputValue = float | int | bool | str | list[float] | None


def plain(value: Any) -> Any:
    """Convert numpy scalars and arrays to the builtin types JSON understands."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


class TraceFile(FrozenModel):
    """Manifest entry of a trace written during a run.

    Attributes:
        path: File name relative to the run's output directory
        kind: ``echo`` or ``sweep``
        samples: Number of data lines
        step: Step that wrote the file
    """

    path: str
    kind: Literal["echo", "sweep"]
    samples: int = Field(..., ge=0)
    step: str


class StepRecord(FrozenModel):
    """Outcome of one scenario step.

    Attributes:
        name: Step name; acceptance keys are ``<name>.<output>``
        operations: Library operations the step called, in call order
        status: ``ok``, ``skipped`` (inputs absent from the config) or ``failed``
        outputs: Scalar results, SI units unless the key says otherwise
        note: Skip reason or error message
    """

    name: str
    operations: list[str] = Field(default_factory=list)
    status: StepStatus = "ok"
    outputs: dict[str, OutputValue] = Field(default_factory=dict)
    note: str | None = None

    @field_validator("outputs", mode="before")
    @classmethod
    def _plain_outputs(cls, v: dict[str, Any]) -> dict[str, Any]:
        return {key: plain(value) for key, value in v.items()}


class CheckOutcome(FrozenModel):
    """Result of one acceptance check; ``passed`` is None when its step did not run."""

    key: str
    passed: bool | None
    value: OutputValue = None
    criterion: str


class ScenarioReport(BaseModel):
    """Self-contained record of a scenario run.

    Everything except ``generated_at`` and ``wall_time`` is a pure function of the
    config snapshot, the scenario and the seed.
    """

    model_config = ConfigDict(frozen=True)

    schema_version: Literal[1] = REPORT_SCHEMA_VERSION
    scenario: str
    config_name: str
    config: dict[str, Any]
    seed: int
    steps: list[StepRecord] = Field(default_factory=list)
    fits: dict[str, FitResult] = Field(default_factory=dict)
    traces: list[TraceFile] = Field(default_factory=list)
    checks: list[CheckOutcome] = Field(default_factory=list)
    provenance: list[str] = Field(default_factory=list)
    failed_step: str | None = None
    generated_at: str = ""
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        """True when no step failed and no evaluated check failed."""
        return self.failed_step is None and all(c.passed is not False for c in self.checks)

    def step(self, name: str) -> StepRecord | None:
        return next((s for s in self.steps if s.name == name), None)

    def output(self, key: str) -> OutputValue:
        """Value of ``<step>.<output>``.

        Raises:
            KeyError: If the step or output does not exist
        """
        step_name, _, output_name = key.partition(".")
        record = self.step(step_name)
        if record is None:
            raise KeyError(step_name)
        return record.outputs[output_name]

    def to_json(self) -> str:
        """Indented JSON with sorted keys.

        The run timestamp and wall time sit alone on the second line, under
        ``_volatile``; every other line is reproducible.
        """
        body = self.model_dump(mode="json", exclude={"generated_at", "wall_time"})
        text = json.dumps(body, indent=2, sort_keys=True)
        volatile = json.dumps({"generated_at": self.generated_at, "wall_time_s": self.wall_time})
        first, rest = text.split("\n", 1)
        return f'{first}\n  "_volatile": {volatile},\n{rest}\n'

    @classmethod
    def from_json(cls, text: str) -> "ScenarioReport":
        data = json.loads(text)
        volatile = data.pop("_volatile", {})
        return cls.model_validate(
            {
                **data,
                "generated_at": volatile.get("generated_at", ""),
                "wall_time": volatile.get("wall_time_s", 0.0),
            }
        )
