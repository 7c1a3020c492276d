"""Entry point for running a scenario end to end."""

import logging
import time
from pathlib import Path

from src.config.settings import settings
from src.model.config import ExperimentConfig
from src.scenarios.graph import create_workflow
from src.scenarios.schemas import ScenarioReport
from src.scenarios.state import ScenarioState

logger = logging.getLogger(__name__)


def run_scenario(
    name: str,
    config: ExperimentConfig,
    output_dir: str | Path | None = None,
    seed: int | None = None,
) -> ScenarioReport:
    """Execute a scenario pipeline and write its traces and report.

    Step failures do not raise: the run stops, the report names the ``failed_step``
    and ``report.passed`` is False.

    Args:
        name: One of ``table1``, ``cavity_qed_numbers``, ``mode_volume``, ``echo_suite``,
            ``bistab_suite``, ``heating``
        config: Validated experiment config
        output_dir: Directory for the run's files (default ``settings.output_dir``)
        seed: Noise seed (default ``settings.default_seed``)

    Returns:
        The report, also written as ``report.json`` in ``output_dir``

    Raises:
        ScenarioError: If the scenario is unknown
    """
    workflow = create_workflow(name)
    output_dir = Path(output_dir or settings.output_dir)
    seed = settings.default_seed if seed is None else seed
    logger.info(f"Running scenario {name} with config '{config.name}' into {output_dir}")

    initial = ScenarioState(
        scenario=name,
        config=config,
        output_dir=str(output_dir),
        seed=seed,
        started_at=time.perf_counter(),
    )
    thread = {"configurable": {"thread_id": f"{name}-{config.name}-{seed}"}}
    result = workflow.invoke(initial, config=thread)
    return result["report"]
