"""Tests for spec file parsing and serialization."""

import json

import numpy as np
import pytest

from distnet.cli.specfile import dump_spec, load_spec, parse_spec
from distnet.common.exceptions import InvalidGraphError, SpecFileError
from distnet.constraints import normalize_orientation
from distnet.dynamics import NamedHamiltonian, simulate
from tests.conftest import fixture_path, load_fixture

TRIANGLE_DOC = {
    "vertices": 3,
    "edges": [
        {"tail": 0, "head": 1, "lo": 1, "hi": 2.5},
        {"tail": 1, "head": 2, "lo": 2, "hi": 3},
        {"tail": 2, "head": 0, "lo": 0, "hi": 3},
    ],
}


def with_changes(**changes) -> str:
    doc = json.loads(json.dumps(TRIANGLE_DOC))
    doc.update(changes)
    return json.dumps(doc)


class TestParseSpec:
    """Test validation with useful error locations."""

    def test_minimal_document(self):
        """Test defaults of a minimal constrained document."""
        spec = parse_spec(json.dumps(TRIANGLE_DOC))
        assert spec.schema_version == 1
        assert spec.mode == "constrained"
        system = spec.to_system()
        assert system.network.intervals() == [(1.0, 2.5), (2.0, 3.0), (0.0, 3.0)]
        assert system.hamiltonian.is_identity

    def test_malformed_json_has_line_and_column(self):
        """Test that a syntax error points into the text."""
        with pytest.raises(SpecFileError) as info:
            parse_spec('{\n  "vertices": 3,\n  "edges": [\n')
        assert info.value.location.startswith("line ")
        assert "column" in info.value.location

    def test_empty_interval_has_field_path(self):
        """Test that lo >= hi is reported on the offending edge."""
        text = with_changes(edges=[{"tail": 0, "head": 1, "lo": 2, "hi": 1}])
        with pytest.raises(SpecFileError, match="lo < hi") as info:
            parse_spec(text)
        assert info.value.location == "edges.0"

    def test_half_interval(self):
        """Test that lo without hi is rejected."""
        with pytest.raises(SpecFileError, match="both lo and hi"):
            parse_spec(with_changes(edges=[{"tail": 0, "head": 1, "lo": 0}]))

    def test_unknown_field(self):
        """Test that misspelled keys are not silently ignored."""
        with pytest.raises(SpecFileError) as info:
            parse_spec(with_changes(vertexes=3))
        assert info.value.location == "vertexes"

    def test_constrained_needs_intervals(self):
        """Test that constrained mode needs an interval on every edge."""
        with pytest.raises(SpecFileError, match="edges \\[0\\]"):
            parse_spec(with_changes(edges=[{"tail": 0, "head": 1}]))

    def test_unconstrained_without_intervals(self):
        """Test that unconstrained documents may omit the intervals."""
        spec = load_fixture("unconstrained_line")
        assert spec.mode == "unconstrained"
        assert spec.initial_state.x == (1.0, 3.0)

    def test_inconsistent_parts(self):
        """Test that a vertex id beyond the vertex count fails at network level."""
        with pytest.raises(SpecFileError, match="outside") as info:
            parse_spec(with_changes(vertices=2))
        assert info.value.location == "network"
        assert isinstance(info.value.__cause__, InvalidGraphError)

    def test_self_loop(self):
        """Test that a self-loop is reported at network level."""
        with pytest.raises(SpecFileError, match="self-loop") as info:
            parse_spec(with_changes(edges=[{"tail": 1, "head": 1, "lo": 0, "hi": 1}]))
        assert info.value.location == "network"

    def test_disturbance_length(self):
        """Test that a disturbance per terminal is required."""
        text = with_changes(terminals=[{"vertex": 0, "sign": 1}], disturbance=[1.0, 2.0])
        with pytest.raises(SpecFileError) as info:
            parse_spec(text)
        assert info.value.location == "network"

    def test_controller_weights_reach_the_system(self, fast_config):
        """Test that controller weights are passed to the system and change the run."""
        doc = json.loads(fixture_path("unconstrained_line").read_text())
        plain = parse_spec(json.dumps(doc))
        weighted = parse_spec(json.dumps({**doc, "controller_weights": [4.0], "gain": [0.5]}))
        system = weighted.to_system()
        assert system.controller_weights == (4.0,)
        assert system.gain == (0.5,)
        assert plain.to_system().controller_weights is None
        first = simulate(plain.to_system(), plain.initial_state, 5.0, fast_config)
        second = simulate(system, weighted.initial_state, 5.0, fast_config)
        assert not np.allclose(first.x[-1], second.x[-1])
        assert parse_spec(dump_spec(weighted)) == weighted

    def test_controller_weights_fixed_in_constrained_mode(self):
        """Test that constrained documents cannot reweight H_c."""
        with pytest.raises(SpecFileError, match="H_c") as info:
            parse_spec(with_changes(controller_weights=[2.0, 1.0, 1.0]))
        assert info.value.location == "network"

    def test_controller_weights_length(self):
        """Test that one weight per edge is required."""
        doc = json.loads(fixture_path("unconstrained_line").read_text())
        with pytest.raises(SpecFileError, match="controller_weights"):
            parse_spec(json.dumps({**doc, "controller_weights": [1.0, 2.0]}))

    def test_named_hamiltonian(self):
        """Test the discriminated storage function."""
        spec = load_fixture("quartic_cycle")
        assert isinstance(spec.hamiltonian, NamedHamiltonian)
        assert spec.hamiltonian.name == "quartic"

    def test_missing_file(self, tmp_path):
        """Test that an unreadable path is a SpecFileError with the path."""
        path = tmp_path / "absent.json"
        with pytest.raises(SpecFileError, match="cannot read") as info:
            load_spec(path)
        assert info.value.location == str(path)


class TestDumpSpec:
    """Test serialization."""

    @pytest.mark.parametrize("name", ["triangle_disturbance", "quartic_cycle", "unconstrained_line"])
    def test_parse_of_dump_is_identity(self, name):
        """Test that dumping and re-parsing gives an equal document."""
        spec = load_spec(fixture_path(name))
        assert parse_spec(dump_spec(spec)) == spec

    def test_with_network_maps_initial_state(self):
        """Test that an explicit controller state follows the edge mapping."""
        text = json.dumps(
            {
                "vertices": 2,
                "edges": [{"tail": 0, "head": 1, "lo": -1, "hi": 2}],
                "initial_state": {"x": [0.0, 1.0], "xc": [0.5]},
            }
        )
        spec = parse_spec(text)
        net, mapping = normalize_orientation(spec.to_system().network)
        rewritten = spec.with_network(net, mapping)
        assert rewritten.initial_state.xc == (0.5, -0.5)
        assert [(e.tail, e.head) for e in rewritten.edges] == [(0, 1), (1, 0)]
        assert rewritten.terminals == []
