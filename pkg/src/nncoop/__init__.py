"""Coverage of cellular networks whose base stations cooperate in static
mutually-nearest-neighbour pairs.

The exact NN model is simulated; the Poisson superposition model that
approximates it is evaluated through Laplace transforms of the interference.
"""
from .config import (
    ClosestCluster,
    DerivedConstants,
    FixedTransmitter,
    NetworkConfig,
    ParameterError,
    baseline_constants,
    derive_constants,
)
from .coverage import (
    CoverageQuery,
    DaughterClosest,
    ParentClosest,
    association_masses,
    baseline_closest_closed_form,
    cond_success_pair,
    cond_success_single,
    coverage,
    coverage_closest,
    coverage_fixed,
    threshold_grid,
)
from .curves import CoverageCurve
from .interference import PairLtTable, lt_pairs, lt_singles, lt_singles_closed
from .montecarlo import Model, SimulationPlan, simulate_coverage, simulate_pair_statistics
from .signals import NSC, ExpMixture, Max, Mixture, Off, PhaseCombined, parse_scheme

__version__ = "0.1.0"

__all__ = [
    "ClosestCluster", "CoverageCurve", "CoverageQuery", "DaughterClosest", "DerivedConstants",
    "ExpMixture", "FixedTransmitter", "Max", "Mixture", "Model", "NSC", "NetworkConfig", "Off",
    "PairLtTable", "ParameterError", "ParentClosest", "PhaseCombined", "SimulationPlan",
    "association_masses", "baseline_closest_closed_form", "baseline_constants",
    "cond_success_pair", "cond_success_single", "coverage", "coverage_closest", "coverage_fixed",
    "derive_constants", "lt_pairs", "lt_singles", "lt_singles_closed", "parse_scheme",
    "simulate_coverage", "simulate_pair_statistics", "threshold_grid",
]
