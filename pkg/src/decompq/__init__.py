"""Optimal decompositions of mixed states into ensembles induced by environment measurements."""

from .errors import (InfeasibleError, NotAStateError, NumericalError, QuadratureError,
                     ValidationError)
from .qcore import (fubini_study_angle, hermitian_eigenvalues, jacobi_eigh, partial_trace_env,
                    shannon_entropy, von_neumann_entropy)
from .ensembles import (ClassicalJointState, Ensemble, EnsembleReport, Partition, Povm,
                        TradeoffPoint, analyze, grouping_povm, induced_ensemble,
                        induced_ensemble_dense, qubit_fixture)
from .optimizer import (OptimizationResult, empirical_tradeoff, enumerate_partitions,
                        optimal_exhaustive, optimal_greedy, optimize)

__version__ = "0.1.0"

__all__ = [
    "ClassicalJointState", "Ensemble", "EnsembleReport", "InfeasibleError", "NotAStateError",
    "NumericalError", "OptimizationResult", "Partition", "Povm", "QuadratureError",
    "TradeoffPoint", "ValidationError", "analyze", "empirical_tradeoff", "enumerate_partitions",
    "fubini_study_angle", "grouping_povm", "hermitian_eigenvalues", "induced_ensemble",
    "induced_ensemble_dense", "jacobi_eigh", "optimal_exhaustive", "optimal_greedy", "optimize",
    "partial_trace_env", "qubit_fixture", "shannon_entropy", "von_neumann_entropy",
]
