"""Wasserstein-1 distances on finite metric spaces, trend statistics, and
Branch & Bound feature selection driven by a W1 criterion."""

from .errors import InputError, KRError, NumericError
from .measures import AtomicMeasure, PointSet, empirical_from_sample, normalize, pushforward, tv_distance
from .metrics import Circle, Discrete, Explicit, Line, Product, cost_matrix, diameter, distance, project
from .kr_exact import TransportSolution, solve_transport, verify_optimality, w1_exact
from .kr_closed import w1, w1_auto, w1_circle, w1_discrete, w1_line, w1_product_additive

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "Circle",
    "Discrete",
    "Explicit",
    "InputError",
    "KRError",
    "Line",
    "NumericError",
    "PointSet",
    "Product",
    "TransportSolution",
    "cost_matrix",
    "diameter",
    "distance",
    "empirical_from_sample",
    "normalize",
    "project",
    "pushforward",
    "solve_transport",
    "tv_distance",
    "verify_optimality",
    "w1",
    "w1_auto",
    "w1_circle",
    "w1_discrete",
    "w1_exact",
    "w1_line",
    "w1_product_additive",
]
