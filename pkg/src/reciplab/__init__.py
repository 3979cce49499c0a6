"""Reciprocity and directionality of friendship ties: classification, BDSI contagion,
edge percolation, and peer-influence regression."""

__version__ = "0.1.0"

from .bdsi import BDSIParams, ContagionNetwork, SimulationTrace, bdsi_run, mean_coverage_curve, time_to_coverage
from .graph import EdgeClass, FriendshipGraph, LogicalEdge, NominationArc, TieClass, classify, load_graph, reciprocity_stats
from .percolation import PercolationPlan, delta_z, percolate, percolation_sweep
from .regression import EgoRecord, build_rows, ols_fit
from .stats import closeness_by_class, ecdf, kde, welch_t_test
from .synth import GraphGenSpec, OutcomeGenSpec, gen_graph, gen_outcomes
