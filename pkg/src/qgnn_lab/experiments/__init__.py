"""Seeded experiment pipelines and their configuration dataclasses."""
from .clustering import ClusterConfig, run_spectral_clustering
from .common import AdamConfig, ExperimentResult, GraphSpec, NelderMeadConfig
from .dynamics import DynamicsConfig, run_dynamics_learning
from .ghz import GhzConfig, phase_kickback_test, run_ghz_preparation
from .isomorphism import IsoConfig, run_graph_isomorphism
from .stats import iso_pair_loss, ks_statistic

__all__ = [
    "AdamConfig", "ClusterConfig", "DynamicsConfig", "ExperimentResult", "GhzConfig",
    "GraphSpec", "IsoConfig", "NelderMeadConfig", "iso_pair_loss", "ks_statistic",
    "phase_kickback_test", "run_dynamics_learning", "run_ghz_preparation",
    "run_graph_isomorphism", "run_spectral_clustering",
]
