"""Continuous-time quantum walks on weighted graphs: state transfer between twin vertices."""

from .dynamics import evolve, probability, scan_max, sweep_trace
from .families import generate_family, parse_family_spec
from .graph import (
    HamiltonianKind,
    WeightedGraph,
    are_twins,
    build_hamiltonian,
    load_graph,
    parse_graph,
    theta_of,
    twin_sets,
)
from .spectral import decompose, strongly_cospectral, support
from .transfer import (
    AnalysisOptions,
    ExactTime,
    analyze_pair,
    fr_between_twins,
    min_period,
    periodicity,
    pgst_between_twins,
    pst_between_twins,
    ratio_condition,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisOptions",
    "ExactTime",
    "HamiltonianKind",
    "WeightedGraph",
    "analyze_pair",
    "are_twins",
    "build_hamiltonian",
    "decompose",
    "evolve",
    "fr_between_twins",
    "generate_family",
    "load_graph",
    "min_period",
    "parse_family_spec",
    "parse_graph",
    "periodicity",
    "pgst_between_twins",
    "probability",
    "pst_between_twins",
    "ratio_condition",
    "scan_max",
    "strongly_cospectral",
    "support",
    "sweep_trace",
    "theta_of",
    "twin_sets",
]
