"""Entanglement of thermal cat-like states and its transfer to qubits."""
__version__ = "0.1.0"

from .errors import (CatentError, ConvergenceError, ImpossibleOutcomeError, NonHermitianError,
                     TruncationError, UnderflowError, ValidationError)
from .thermal import ThermalEnsemble, thermal_average
from .qmath import linearized_entropy, negativity, partial_transpose
from .branches import BranchState, ecs_state, make_cat
from .analytics import (CovarianceMatrix, SimonVerdict, mixed_cat_entanglement,
                        pure_cat_entanglement, simon_check)
from .entpower import SchemeSpec, entangling_power_curve, two_qubit_state
from .kernels import BACKEND

__all__ = [
    "BACKEND", "BranchState", "CatentError", "ConvergenceError", "CovarianceMatrix",
    "ImpossibleOutcomeError", "NonHermitianError", "SchemeSpec", "SimonVerdict",
    "ThermalEnsemble", "TruncationError", "UnderflowError", "ValidationError",
    "ecs_state", "entangling_power_curve", "linearized_entropy", "make_cat",
    "mixed_cat_entanglement", "negativity", "partial_transpose", "pure_cat_entanglement",
    "simon_check", "thermal_average", "two_qubit_state",
]
