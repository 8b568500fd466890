from ._phasesketch import (
    Model,
    RunRecord,
    build_model,
    coefficients,
    exp_fit,
    ground_state,
    minimize,
    run_sweep,
)

__all__ = [
    "Model",
    "RunRecord",
    "build_model",
    "coefficients",
    "exp_fit",
    "ground_state",
    "minimize",
    "run_sweep",
]
