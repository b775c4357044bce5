"""ADAPT-VQE: operator pools, the inner parameter optimizer and the outer adaptive loop."""

from .driver import AdaptResult, AdaptTraceRecord, ConvergenceSpec, adapt_vqe, pool_gradients
from .optimizer import Ansatz, OptimizationResult, energy_and_gradient, optimize_parameters
from .pools import OperatorPool, PoolKind, PoolOperator, build_pool

__all__ = [
    "AdaptResult",
    "AdaptTraceRecord",
    "Ansatz",
    "ConvergenceSpec",
    "OperatorPool",
    "OptimizationResult",
    "PoolKind",
    "PoolOperator",
    "adapt_vqe",
    "build_pool",
    "energy_and_gradient",
    "optimize_parameters",
    "pool_gradients",
]
