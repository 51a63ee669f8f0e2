import json

import numpy as np
import pytest

from hetring import NumericError, ValidationError, build_network, make_ring
from hetring.errors import DomainError
from hetring.io import graph_from_spec, graph_spec, load_graph, network_to_dict, network_to_dot, write_json
from hetring.polyroots import companion, polyval, roots


class TestGraphSpecs:
    def test_ring(self):
        assert graph_from_spec({"n": 7, "m": 2}) == make_ring(7, 2)

    def test_edges_are_one_based(self):
        g = graph_from_spec({"n": 3, "edges": [[1, 2], [2, 3], [3, 1]]})
        assert g == make_ring(3, 1)

    def test_adjacency(self):
        g = graph_from_spec({"adjacency": [[0, 1], [0, 0]]})
        assert g.edges() == [(1, 2)]

    @pytest.mark.parametrize("spec", [[1, 2], {"m": 1}, {"n": 3, "edges": [[0, 1]]}])
    def test_rejects(self, spec):
        with pytest.raises(ValidationError):
            graph_from_spec(spec)

    def test_round_trip(self, tmp_path):
        for g in (make_ring(9, 4), graph_from_spec({"n": 4, "edges": [[1, 3], [4, 2]]})):
            path = tmp_path / "g.json"
            path.write_text(json.dumps(graph_spec(g)))
            assert load_graph(path) == g

    def test_bad_json(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text("{")
        with pytest.raises(ValidationError):
            load_graph(path)


class TestNetworkExport:
    def test_dict_is_deterministic_and_sorted(self, tmp_path):
        net = build_network(make_ring(6, 1), 2.0, 3.04)
        write_json(tmp_path / "a.json", network_to_dict(net))
        write_json(tmp_path / "b.json", network_to_dict(build_network(make_ring(6, 1), 2.0, 3.04)))
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        data = json.loads((tmp_path / "a.json").read_text())
        assert data["census"] == {"1": 6, "2": 9, "3": 2}
        kinds = {c["kind"] for c in data["connections"]}
        assert kinds == {"1->1", "1->2", "2->2", "2->3"}

    def test_dot(self):
        dot = network_to_dot(build_network(make_ring(5, 1), 2.0, 3.04))
        assert dot.count("->") == 20
        assert 'xi_1 -> xi_5 [label="5"];' in dot
        assert "doublecircle" not in dot


class TestRootFinder:
    def test_companion(self):
        c = [1.0, -6.0, 11.0, -6.0]
        assert np.allclose(sorted(np.linalg.eigvals(companion(c)).real), [1, 2, 3])

    def test_polyval_derivative(self):
        p, dp = polyval([1.0, 0.0, -2.0], 3.0)
        assert (p, dp) == (7.0, 6.0)

    def test_requires_monic(self):
        with pytest.raises(DomainError):
            roots([2.0, 1.0])
        with pytest.raises(DomainError):
            roots([1.0])

    def test_unreachable_tolerance_carries_best(self):
        with pytest.raises(NumericError) as info:
            roots([1.0, 1.0, 1.0, -3.3], tol=1e-40)
        assert len(info.value.best) == 3
