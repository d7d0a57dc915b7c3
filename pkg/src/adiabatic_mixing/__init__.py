"""Simulator for non-abelian adiabatic mixing on independent-set ground manifolds."""
from .errors import CapacityError, GraphParseError, NumericalError
from .gauge import (
    GaugeMatrix,
    basis_state,
    build_gauge_matrix,
    cardinality_probability,
    diffuse,
    entropy,
    holonomy_apply,
    normalized_entropy,
    trivial_probability,
)
from .graph import Graph, generate_random_graph, is_independent, parse_graph, serialize_graph
from .solutions import (
    MedianAdjacency,
    SolutionBasis,
    count_independent_sets,
    enumerate_independent_sets,
    median_adjacency,
    trivial_indices,
)

__version__ = "0.1.0"
