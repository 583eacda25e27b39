"""Static stability analysis: exact cycle verdicts and consensus certificates."""

from distnet.analysis.analyzer import NetworkAnalyzer, analyze_network, restrict_to_component
from distnet.analysis.certificate import (
    certify_consensus,
    copy_assignments,
    cycle_intersections,
    max_margin,
    verify_certificate,
)
from distnet.analysis.cycle import analyze_cycle
from distnet.analysis.models import (
    REPORT_SCHEMA_VERSION,
    ComponentVerdict,
    ConsensusCertificate,
    CycleIntersection,
    CycleVerdict,
    Inconclusive,
    StaticReport,
    Verdict,
)
from distnet.graph.matching import MatchResult, check_matching

__all__ = [
    # Models
    'Verdict',
    'CycleVerdict',
    'CycleIntersection',
    'ConsensusCertificate',
    'ComponentVerdict',
    'Inconclusive',
    'StaticReport',
    'REPORT_SCHEMA_VERSION',
    'MatchResult',
    # Operations
    'analyze_cycle',
    'check_matching',
    'certify_consensus',
    'copy_assignments',
    'max_margin',
    'cycle_intersections',
    'verify_certificate',
    'analyze_network',
    'restrict_to_component',
    'NetworkAnalyzer',
]
