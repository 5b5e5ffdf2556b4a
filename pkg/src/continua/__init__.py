"""Length, partitions, geodesics and double-cover parametrizations of embedded graphs."""

from .chain import DeltaChain, chain_length, geodesic, is_delta_connected, shortest_delta_chain
from .geometry import diam, hausdorff_distance, set_distance
from .graph import (
    EmbeddedGraph,
    EpsilonNet,
    GraphPoint,
    InvalidGraphError,
    components,
    epsilon_net,
    h1,
    intrinsic_distance,
    validate,
)
from .parametrize import (
    ParametrizationResult,
    canonical_parametrization,
    double_cover_euler,
    farthest_uncovered_point,
)
from .partition import (
    DeltaPartition,
    PartitionPiece,
    delta_partition,
    diameter_sum,
    l_delta_bruteforce,
    l_delta_lower_bound,
)
from .path import (
    Field,
    LengthMeasure,
    PolylinePath,
    TraversalLedger,
    area_formula_check,
    constant_speed_reparam,
    degree_zero_test,
    edge_multiplicity,
    join,
    length_measure,
    line_integral,
    path_length,
)

__version__ = "0.1.0"
