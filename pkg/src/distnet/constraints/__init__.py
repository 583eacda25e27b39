"""Flow constraints, saturation algebra and constraint-preserving rewrites."""

from distnet.constraints.models import ConstrainedNetwork, EdgeMapping, FlowConstraint
from distnet.constraints.saturation import (
    sat,
    sat_antiderivative,
    sat_integral,
    saturate,
)
from distnet.constraints.transform import (
    absorb_disturbance,
    absorption_mapping,
    normalize_orientation,
    split_edge,
    split_edges,
    split_intervals,
)

__all__ = [
    'FlowConstraint',
    'ConstrainedNetwork',
    'EdgeMapping',
    'sat',
    'saturate',
    'sat_integral',
    'sat_antiderivative',
    'absorb_disturbance',
    'absorption_mapping',
    'normalize_orientation',
    'split_edge',
    'split_edges',
    'split_intervals',
]
