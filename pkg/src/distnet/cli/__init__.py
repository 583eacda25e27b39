"""Command-line interface and network spec files."""

from distnet.cli.main import build_parser, main
from distnet.cli.specfile import (
    SPEC_SCHEMA_VERSION,
    EdgeSpec,
    NetworkSpecFile,
    TerminalSpec,
    dump_spec,
    load_spec,
    parse_spec,
)

__all__ = [
    'NetworkSpecFile',
    'EdgeSpec',
    'TerminalSpec',
    'SPEC_SCHEMA_VERSION',
    'parse_spec',
    'load_spec',
    'dump_spec',
    'build_parser',
    'main',
]
