"""Cycle decompositions, minimal covering sets and augmented networks."""

from distnet.cycles.cover import (
    augment,
    cycles_from_multiplicity,
    decompose_balanced,
    default_breakpoints,
    edge_cycles,
    enumerate_covers,
    minimal_cover,
    minimal_multiplicity,
)
from distnet.cycles.models import AugmentedNetwork, CycleCover, DirectedCycle

__all__ = [
    'DirectedCycle',
    'CycleCover',
    'AugmentedNetwork',
    'decompose_balanced',
    'minimal_multiplicity',
    'cycles_from_multiplicity',
    'minimal_cover',
    'edge_cycles',
    'enumerate_covers',
    'default_breakpoints',
    'augment',
]
