import numpy as np
import pytest

from percolab import (
    EdgeListParseError,
    GenerationError,
    GraphValidationError,
    InvalidSizeError,
    WeightedGraph,
    from_edge_tuples,
    make_complete,
    make_coupled_complete,
    make_line_exp,
    make_random_regular,
    make_torus,
    parse_edge_list,
    serialize_edge_list,
    spawn_generator,
)


def degrees(g):
    return np.bincount(np.concatenate([g.u, g.v]), minlength=g.vertex_count)


class TestValidation:
    def test_self_loop_rejected(self):
        with pytest.raises(GraphValidationError, match="self-loop"):
            WeightedGraph(2, np.array([0]), np.array([0]), np.array([1.0]))

    def test_duplicate_rejected_either_orientation(self):
        with pytest.raises(GraphValidationError, match="duplicate"):
            from_edge_tuples(3, [(0, 1, 1.0), (1, 2, 1.0), (1, 0, 2.0)])

    def test_disconnected_rejected(self):
        with pytest.raises(GraphValidationError, match="not connected"):
            from_edge_tuples(4, [(0, 1, 1.0), (2, 3, 1.0)])

    def test_nonpositive_weight_rejected(self):
        for w in (0.0, -1.0, float("inf"), float("nan")):
            with pytest.raises(GraphValidationError, match="weight"):
                from_edge_tuples(2, [(0, 1, w)])

    def test_out_of_range_endpoint(self):
        with pytest.raises(GraphValidationError, match="out of range"):
            from_edge_tuples(2, [(0, 2, 1.0)])

    def test_edges_are_frozen(self):
        g = make_complete(3, 1.0)
        with pytest.raises(ValueError):
            g.w[0] = 5.0


class TestComplete:
    def test_triangle(self):
        g = make_complete(3, 1.0)
        assert g.vertex_count == 3
        assert g.edge_count == 3
        assert np.all(g.w == 1.0)

    def test_er_scaling(self):
        g = make_complete(100, 1.0 / 100)
        assert g.vertex_count == 100
        assert g.edge_count == 100 * 99 // 2
        assert np.allclose(g.w, 0.01)

    def test_single_edge(self):
        g = make_complete(2, 5.0)
        assert g.edge_count == 1
        assert g.w[0] == 5.0

    def test_too_small(self):
        with pytest.raises(InvalidSizeError):
            make_complete(1, 1.0)


class TestTorus:
    def test_small(self):
        g = make_torus(3, 1.0)
        assert g.vertex_count == 9
        assert g.edge_count == 18
        assert np.all(degrees(g) == 4)

    def test_counts(self):
        g = make_torus(20, 1.0)
        assert g.vertex_count == 400
        assert g.edge_count == 800
        assert np.all(degrees(g) == 4)

    def test_too_small(self):
        with pytest.raises(InvalidSizeError):
            make_torus(2, 1.0)


class TestLineExp:
    def test_weights_halve(self):
        g = make_line_exp(3)
        assert g.vertex_count == 3
        assert list(g.w) == [0.5, 0.25]

    def test_smallest(self):
        g = make_line_exp(2)
        assert list(g.w) == [0.5]

    def test_last_weight(self):
        g = make_line_exp(10)
        assert g.w[-1] == 2.0**-9

    @pytest.mark.parametrize("n", [1, 61])
    def test_out_of_range(self, n):
        with pytest.raises(InvalidSizeError):
            make_line_exp(n)


class TestCoupledComplete:
    def test_bridge_smallest(self):
        g = make_coupled_complete(2, "bridge")
        assert g.vertex_count == 4
        assert g.edge_count == 3
        bridge = [(u, v, w) for u, v, w in g.edges() if w == 2.0]
        assert bridge == [(0, 2, 2.0)]

    def test_bridge_counts(self):
        g = make_coupled_complete(100, "bridge")
        assert g.vertex_count == 200
        assert g.edge_count == 9900 + 1
        assert float(g.w.max()) == 100.0

    def test_transitive_counts(self):
        g = make_coupled_complete(100, "transitive")
        assert g.edge_count == 9900 + 10000
        cross = g.w[g.w < 1.0 / 100]
        assert cross.size == 10000
        assert np.allclose(cross, 1e-4)

    def test_transitive_is_vertex_transitive(self):
        g = make_coupled_complete(4, "transitive")
        deg = degrees(g)
        assert np.all(deg == deg[0])
        incident = [[] for _ in range(g.vertex_count)]
        for u, v, w in g.edges():
            incident[u].append(w)
            incident[v].append(w)
        profiles = {tuple(sorted(ws)) for ws in incident}
        assert len(profiles) == 1

    def test_too_small(self):
        with pytest.raises(InvalidSizeError):
            make_coupled_complete(1, "bridge")

    def test_bad_mode(self):
        with pytest.raises(ValueError, match="mode"):
            make_coupled_complete(3, "ladder")


class TestRandomRegular:
    def test_k4_forced(self):
        g = make_random_regular(4, 3, 1.0, spawn_generator(0))
        assert g.same_edges(make_complete(4, 1.0))

    def test_degrees_and_connectivity(self):
        g = make_random_regular(10, 3, 1.0, spawn_generator(1))
        assert np.all(degrees(g) == 3)
        assert g.edge_count == 15

    def test_parity_error(self):
        with pytest.raises(InvalidSizeError, match="even"):
            make_random_regular(5, 3, 1.0, spawn_generator(0))

    def test_degree_too_small(self):
        with pytest.raises(InvalidSizeError):
            make_random_regular(10, 2, 1.0, spawn_generator(0))

    def test_deterministic_per_stream(self):
        a = make_random_regular(12, 3, 1.0, spawn_generator(7))
        b = make_random_regular(12, 3, 1.0, spawn_generator(7))
        assert a.same_edges(b)


class TestEdgeList:
    def test_parse_triangle(self):
        g = parse_edge_list("3\n0 1 1.0\n1 2 1.0\n0 2 1.0\n")
        assert g.same_edges(make_complete(3, 1.0))

    def test_serialize_line_exp(self):
        text = serialize_edge_list(make_line_exp(3))
        assert text == "3\n0 1 0.5\n1 2 0.25\n"

    def test_self_loop_names_line(self):
        with pytest.raises(EdgeListParseError, match="line 2"):
            parse_edge_list("2\n0 0 1.0\n")

    def test_duplicate_names_line(self):
        with pytest.raises(EdgeListParseError, match="line 4"):
            parse_edge_list("3\n0 1 1.0\n1 2 1.0\n1 0 1.0\n")

    def test_nonpositive_weight_names_line(self):
        with pytest.raises(EdgeListParseError, match="line 3"):
            parse_edge_list("2\n# comment\n0 1 -2\n")

    def test_malformed_line(self):
        with pytest.raises(EdgeListParseError, match="line 2"):
            parse_edge_list("2\n0 1\n")

    def test_disconnected(self):
        with pytest.raises(EdgeListParseError, match="connected"):
            parse_edge_list("4\n0 1 1.0\n2 3 1.0\n")

    def test_comments_blanks_crlf_and_bytes(self):
        text = "# header\r\n3\r\n\r\n0 1 1.0  # first\r\n1 2 1.0\r\n0 2 1.0\r\n"
        g = parse_edge_list(text.encode("utf-8"))
        assert g.vertex_count == 3
        assert g.edge_count == 3

    def test_empty_input(self):
        with pytest.raises(EdgeListParseError, match="vertex count"):
            parse_edge_list("# nothing\n")

    @pytest.mark.parametrize("maker", [
        lambda: make_complete(5, 0.3),
        lambda: make_line_exp(7),
        lambda: make_torus(3, 2.5),
        lambda: make_coupled_complete(3, "transitive"),
        lambda: make_random_regular(8, 3, 1.0, spawn_generator(3)),
    ])
    def test_round_trip(self, maker):
        g = maker()
        assert parse_edge_list(serialize_edge_list(g)).same_edges(g)

    def test_round_trip_awkward_weights(self):
        # 17 significant digits must reproduce doubles exactly
        rng = np.random.default_rng(0)
        w = np.exp(rng.normal(size=6) * 10)
        g = from_edge_tuples(4, [
            (0, 1, w[0]), (0, 2, w[1]), (0, 3, w[2]),
            (1, 2, w[3]), (1, 3, w[4]), (2, 3, w[5]),
        ])
        back = parse_edge_list(serialize_edge_list(g))
        assert np.array_equal(back.w, g.w)
