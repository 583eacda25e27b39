"""Command-line front end: ``distnet analyze | simulate | cover | normalize``.

Exit codes: 0 success or exact/certified verdict, 2 inconclusive, 1 error.
"""

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional, TextIO, Tuple

from distnet import __version__
from distnet.analysis.analyzer import NetworkAnalyzer
from distnet.common.config import AnalysisConfig, SimulationConfig
from distnet.common.exceptions import DistNetError
from distnet.common.logging_config import setup_logging
from distnet.constraints.models import EdgeMapping
from distnet.constraints.transform import (
    absorb_disturbance,
    absorption_mapping,
    normalize_orientation,
)
from distnet.cli.specfile import NetworkSpecFile, dump_spec, load_spec
from distnet.cycles.cover import augment, minimal_cover
from distnet.dynamics.integrator import Simulator
from distnet.dynamics.models import SimulateSpec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1


@contextmanager
def _output(path: str) -> Iterator[TextIO]:
    """Open ``path`` for writing, or yield stdout for ``-``."""
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as handle:
            yield handle


def _write_json(document: dict, path: str) -> None:
    with _output(path) as out:
        json.dump(document, out, indent=2)
        out.write("\n")


def _parse_breakpoints(items: List[str]) -> Dict[int, Tuple[float, ...]]:
    """``EDGE:B1,B2`` items into {edge: (b1, b2)}."""
    points: Dict[int, Tuple[float, ...]] = {}
    for item in items:
        try:
            edge, values = item.split(":", 1)
            points[int(edge)] = tuple(float(v) for v in values.split(","))
        except ValueError as e:
            raise argparse.ArgumentTypeError(
                f"breakpoints must look like EDGE:B1[,B2...], got '{item}'"
            ) from e
    return points


def _normalize(spec: NetworkSpecFile) -> Tuple[NetworkSpecFile, EdgeMapping]:
    """Absorb the disturbance and make the orientation compatible."""
    system = spec.to_system()
    net = system.network
    mapping = EdgeMapping.identity(system.m)
    if system.terminals.k and any(system.disturbance):
        net, xbar = absorb_disturbance(net, system.terminals, system.dbar)
        mapping = absorption_mapping(xbar)
    net, orientation = normalize_orientation(net)
    mapping = mapping.compose(orientation)
    return spec.with_network(net, mapping), mapping


def cmd_analyze(args: argparse.Namespace) -> int:
    """Static analysis report as JSON."""
    spec = load_spec(args.spec)
    report = NetworkAnalyzer(AnalysisConfig()).analyze(spec.to_system())
    document = json.loads(report.model_dump_json(exclude_none=True))
    document["spec_name"] = spec.name
    document["exit_code"] = report.exit_code
    _write_json(document, args.out)
    if report.status == "failed":
        print(f"error: {report.error}", file=sys.stderr)
    return report.exit_code


def cmd_simulate(args: argparse.Namespace) -> int:
    """Trajectory CSV (or a summary report) of one simulation."""
    spec = load_spec(args.spec)
    system = spec.to_system()
    seed = args.seed if args.seed is not None else spec.seed
    run = SimulateSpec(
        horizon=args.horizon,
        seed=seed,
        initial_state=None if args.seed is not None else spec.initial_state,
        initial_scale=spec.initial_scale,
    )
    config = SimulationConfig(step=args.step) if args.step else SimulationConfig()
    result = Simulator(config).run(system, run)

    summary = {
        "schema_version": 1,
        "spec_name": spec.name,
        "status": result.status,
        "seed": result.seed,
        "horizon": args.horizon,
        "step": result.trajectory.step if result.trajectory is not None else None,
        "classification": result.classification.kind if result.classification else None,
        "alpha": result.classification.alpha if result.classification else None,
        "clusters": list(result.classification.clusters) if result.classification else None,
        "predicted_alpha": result.predicted_alpha,
        "final_V": result.final_V,
        "conservation_residual": result.conservation_residual,
        "error": result.error,
    }

    if args.format == "report":
        _write_json(summary, args.out)
    else:
        if result.trajectory is not None:
            with _output(args.out) as out:
                result.trajectory.write_csv(out)
        stream = sys.stderr if args.out == "-" else sys.stdout
        print(json.dumps(summary), file=stream)

    if result.status == "failed":
        print(f"error: {result.error}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_cover(args: argparse.Namespace) -> int:
    """Minimal covering set of cycles, optionally with the augmented network."""
    spec = load_spec(args.spec)
    normalized, mapping = _normalize(spec)
    net = normalized.to_system().network
    cover = minimal_cover(net.graph)

    document = {
        "schema_version": 1,
        "spec_name": spec.name,
        "multiplicity": list(cover.multiplicity),
        "cycles": [list(c.edges) for c in cover.cycles],
    }
    if mapping != EdgeMapping.identity(mapping.original_m):
        document["edges"] = [list(e) for e in net.graph.edges]
        document["mapping"] = mapping.model_dump(mode="json")

    if args.augment:
        breakpoints = _parse_breakpoints(args.breakpoints or []) or None
        augmented = augment(net, cover, breakpoints)
        document["augmented"] = {
            "edges": [list(e) for e in augmented.network.graph.edges],
            "intervals": [list(c) for c in augmented.network.intervals()],
            "cycles": [list(c.edges) for c in augmented.cover.cycles],
            "breakpoints": {str(i): list(b) for i, b in augmented.breakpoints.items()},
            "mapping": augmented.mapping.model_dump(mode="json"),
        }
    _write_json(document, args.out)
    return EXIT_OK


def cmd_normalize(args: argparse.Namespace) -> int:
    """Absorbed, orientation-compatible spec plus the edge mapping."""
    spec = load_spec(args.spec)
    normalized, mapping = _normalize(spec)
    document = {
        "schema_version": 1,
        "spec": json.loads(dump_spec(normalized)),
        "mapping": mapping.model_dump(mode="json"),
    }
    _write_json(document, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", required=True, help="network spec file (JSON)")
    common.add_argument("--out", default="-", help="output file (default: stdout)")
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="logging level for stderr (default: WARNING)",
    )

    parser = argparse.ArgumentParser(
        prog="distnet",
        description="Simulate and analyze distribution networks under saturated PI control",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", parents=[common], help="static stability verdict")
    analyze.add_argument("--format", choices=["report"], default="report", help="output format")
    analyze.set_defaults(func=cmd_analyze)

    simulate = sub.add_parser("simulate", parents=[common], help="integrate the closed loop")
    simulate.add_argument("--horizon", type=float, default=200.0, help="final time (default: 200)")
    simulate.add_argument("--step", type=float, default=None, help="RK4 step (default: 1e-3)")
    simulate.add_argument("--seed", type=int, default=None, help="seed for a random initial state")
    simulate.add_argument(
        "--format", choices=["csv", "report"], default="csv", help="trajectory CSV or summary JSON"
    )
    simulate.set_defaults(func=cmd_simulate)

    cover = sub.add_parser("cover", parents=[common], help="minimal covering set of cycles")
    cover.add_argument("--augment", action="store_true", help="also emit the augmented network")
    cover.add_argument(
        "--breakpoints",
        action="append",
        metavar="EDGE:B1[,B2...]",
        help="breakpoints of a shared edge (repeatable; default: equally spaced)",
    )
    cover.set_defaults(func=cmd_cover)

    normalize = sub.add_parser(
        "normalize", parents=[common], help="absorb disturbances and fix edge orientation"
    )
    normalize.set_defaults(func=cmd_normalize)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the ``distnet`` console script."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse uses 2 for usage errors; 2 is reserved for inconclusive
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR
    setup_logging(level=args.log_level, include_timestamp=False)

    try:
        return args.func(args)
    except (DistNetError, argparse.ArgumentTypeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
