"""Simulation lab for hybrid unitary-projective circuits.

Stabilizer-tableau trajectories for Clifford models, dense state-vector
and density-matrix evolution for Haar models, and finite-size-scaling
collapse fits of the entanglement transition.
"""

__version__ = "0.1.0"

from .circuit import (
    CircuitConfig,
    EnsembleSummary,
    TrajectoryRecord,
    layer_pairs,
    run_channel,
    run_ensemble,
    run_trajectory,
)
from .scaling import (
    CollapseResult,
    SweepDataset,
    collapse_cost,
    derived_exponents,
    fit_dynamic_collapse,
    fit_static_collapse,
    side_diagnostics,
)

__all__ = [
    "__version__",
    "CircuitConfig",
    "TrajectoryRecord",
    "EnsembleSummary",
    "layer_pairs",
    "run_trajectory",
    "run_ensemble",
    "run_channel",
    "SweepDataset",
    "CollapseResult",
    "collapse_cost",
    "fit_static_collapse",
    "fit_dynamic_collapse",
    "derived_exponents",
    "side_diagnostics",
]
