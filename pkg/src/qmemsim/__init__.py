"""Classical and quantum simulators for the post-processed perturbed coin."""
__version__ = "0.1.0"

from .errors import BoundaryError, ConvergenceError, QmemsimError, ValidationError
from .process import (
    ProcessParams,
    build_transition_matrix,
    classical_complexity,
    classical_max_entropy,
    classical_word_distribution,
    run_classical_trajectory,
    stationary_distribution,
)
from .quantum import (
    quantum_complexity,
    quantum_max_entropy,
    quantum_stationary_state,
    quantum_word_distribution,
    run_quantum_trajectory,
    step_isometry,
)
from .harness import NoiseModel, verification_report

__all__ = [
    "BoundaryError",
    "ConvergenceError",
    "NoiseModel",
    "ProcessParams",
    "QmemsimError",
    "ValidationError",
    "build_transition_matrix",
    "classical_complexity",
    "classical_max_entropy",
    "classical_word_distribution",
    "quantum_complexity",
    "quantum_max_entropy",
    "quantum_stationary_state",
    "quantum_word_distribution",
    "run_classical_trajectory",
    "run_quantum_trajectory",
    "stationary_distribution",
    "step_isometry",
    "verification_report",
]
