"""combsim: statevector simulator and experiment harness for spectral-comb
ground-state preparation, with a gate-level circuit path and an adiabatic
baseline for cost comparisons."""

from ._version import __version__
from .combing import CombingConfig, RunResult, optimize_params, run_combing
from .models import CombParams, InteractionParams, IsingParams
from .qaa import QaaConfig, compare_cost, run_qaa, steps_to_success

__all__ = [
    "__version__",
    "CombingConfig",
    "CombParams",
    "InteractionParams",
    "IsingParams",
    "QaaConfig",
    "RunResult",
    "compare_cost",
    "optimize_params",
    "run_combing",
    "run_qaa",
    "steps_to_success",
]
