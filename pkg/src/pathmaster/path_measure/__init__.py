"""Paths on time grids, empirical path measures and transport between them."""

from .coupling import CoupledSystem, QuantileMap, build_coupling, quantile_transport
from .io import dumps, load_measure, loads, save_measure
from .paths import PathMeasure, SamplePath, TimeGrid, path_sup_distance, stop_path
from .transport import (Coupling, assignment, sinkhorn, sup_cost_matrix, theta_distance,
                        wasserstein2)

__all__ = [
    "TimeGrid", "SamplePath", "PathMeasure", "Coupling", "CoupledSystem", "QuantileMap",
    "stop_path", "path_sup_distance", "wasserstein2", "theta_distance", "quantile_transport",
    "build_coupling", "sup_cost_matrix", "assignment", "sinkhorn",
    "dumps", "loads", "save_measure", "load_measure",
]
