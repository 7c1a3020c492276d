"""LangGraph workflows of the scenarios.

Each scenario is a chain of step nodes. After every step a conditional edge either
continues with the next step or, when the step failed, diverts to ``handle_error``;
both paths end in ``finalize``, which writes the report.
"""

from typing import Literal

from langgraph.checkpoint.memory import MemorySaver
from langgraph.graph import END, StateGraph

from src.model.errors import ScenarioError
from src.scenarios.nodes import STEPS, finalize, handle_error
from src.scenarios.state import ScenarioState

CAVITY_QED_STEPS = (
    "cavity_rates",
    "decay_rates",
    "photon_number",
    "rabi",
    "echo_coupling",
    "dipole_coupling",
    "critical_numbers",
    "strong_coupling",
)
ECHO_STEPS = (
    "two_pulse_amplitude",
    "two_pulse_intensity",
    "three_pulse",
    "three_pulse_comparison",
    "accumulated",
)

SCENARIOS: dict[str, tuple[str, ...]] = {
    "cavity_qed_numbers": CAVITY_QED_STEPS,
    "mode_volume": ("mode_volume", "mode_overlap", "solved_coupling"),
    "echo_suite": ("decay_rates", *ECHO_STEPS, "area_scan"),
    "bistab_suite": (
        "cooperativity",
        "root_window",
        "empty_cavity",
        "linear_response",
        "hysteresis",
        "bistability_fit",
    ),
    "heating": ("heating",),
    "table1": (*CAVITY_QED_STEPS, *ECHO_STEPS, "coherence", "table"),
}


def continue_or_fail(state: ScenarioState) -> Literal["continue", "fail"]:
    """Conditional edge: stop the chain once a step has failed.

    Args:
        state: Current scenario state

    Returns:
        ``fail`` when a step recorded an error, else ``continue``
    """
    return "fail" if state.failed_step is not None else "continue"


def create_workflow(scenario: str):
    """Build the compiled graph of one scenario.

    Args:
        scenario: Key of ``SCENARIOS``

    Returns:
        Compiled StateGraph ready for ``invoke``

    Raises:
        ScenarioError: If the scenario is unknown
    """
    if scenario not in SCENARIOS:
        raise ScenarioError(
            f"Unknown scenario '{scenario}' (available: {', '.join(sorted(SCENARIOS))})"
        )
    steps = SCENARIOS[scenario]
    checkpointer = MemorySaver()
    workflow = StateGraph(ScenarioState)

    for name in steps:
        workflow.add_node(name, STEPS[name])
    workflow.add_node("handle_error", handle_error)
    workflow.add_node("finalize", finalize)

    workflow.set_entry_point(steps[0])
    for name, following in zip(steps, (*steps[1:], "finalize"), strict=True):
        workflow.add_conditional_edges(
            name,
            continue_or_fail,
            {"continue": following, "fail": "handle_error"},
        )
    workflow.add_edge("handle_error", "finalize")
    workflow.add_edge("finalize", END)

    return workflow.compile(checkpointer=checkpointer)
