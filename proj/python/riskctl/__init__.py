"""Risk-informed safety controller synthesis."""

from ._core import (
    AnalysisError,
    Dtmc,
    Error,
    Mdp,
    Model,
    ModelError,
    ParseError,
    build_mdp,
    complete_matrix,
    import_policy,
    inject,
    load_model,
    parse_model,
    parse_policy,
    run,
)

__all__ = [
    "AnalysisError",
    "Dtmc",
    "Error",
    "Mdp",
    "Model",
    "ModelError",
    "ParseError",
    "build_mdp",
    "complete_matrix",
    "import_policy",
    "inject",
    "load_model",
    "parse_model",
    "parse_policy",
    "run",
]
