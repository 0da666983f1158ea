"""Sustainability scoring and execution simulation for annotated workflows."""

from ._sadp import (  # noqa: F401
    ApplicationModel,
    Assignment,
    OptimizationResult,
    ParseError,
    SadpError,
    Scorecard,
    SimulationReport,
    TaskOutcome,
    ValidationIssue,
    WorkflowDocument,
    __version__,
    import_bpmn,
    load_workflow,
    make_assignment,
    optimize,
    parse_workflow_json,
    resolve_all_in,
    resolve_rule_driven,
    run_timeline_rule_driven,
    scorecard,
    serialize_workflow,
    simulate,
    step1_score,
    step2_score_explicit,
    step2_score_implicit,
    step3_score,
    topological_order,
    validate,
)
