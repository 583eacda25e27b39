"""Directed graphs, incidence algebra and connectivity predicates."""

from distnet.graph.core import (
    bridging_edges,
    component_count,
    incidence,
    is_balanced,
    is_strongly_connected,
    is_weakly_connected,
    matching_state,
    strongly_connected_components,
    upstream_closure,
    weakly_connected_components,
)
from distnet.graph.matching import MatchResult, check_matching
from distnet.graph.models import DirectedGraph, TerminalPattern

__all__ = [
    'DirectedGraph',
    'TerminalPattern',
    'incidence',
    'is_weakly_connected',
    'is_strongly_connected',
    'is_balanced',
    'component_count',
    'weakly_connected_components',
    'strongly_connected_components',
    'bridging_edges',
    'upstream_closure',
    'matching_state',
    'MatchResult',
    'check_matching',
]
