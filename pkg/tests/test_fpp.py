import numpy as np
import pytest

import percolab as pl
from percolab import (
    diameter_product_scan,
    estimate_passage_diameter,
    first_passage,
    make_complete,
    make_coupled_complete,
    make_line_exp,
    make_torus,
    min_weight,
    variance_bound_report,
)


def path_graph(n, weight=1.0):
    return pl.from_edge_tuples(n, [(i, i + 1, weight) for i in range(n - 1)])


class TestFirstPassage:
    def test_path_sums(self):
        field = first_passage(path_graph(3), np.array([1.0, 2.0]), 0)
        assert list(field.times) == [0.0, 1.0, 3.0]

    def test_detour_beats_direct(self):
        g = make_complete(3, 1.0)  # edges: (0,1), (0,2), (1,2)
        field = first_passage(g, np.array([5.0, 1.0, 1.0]), 0)
        assert list(field.times) == [0.0, 2.0, 1.0]

    def test_source_is_zero(self):
        g = make_torus(4, 1.0)
        xi = pl.sample_open_times(g, np.random.default_rng(0))
        field = first_passage(g, xi, 7)
        assert field.times[7] == 0.0
        assert np.all(np.isfinite(field.times))

    def test_source_out_of_range(self):
        with pytest.raises(IndexError):
            first_passage(path_graph(3), np.array([1.0, 2.0]), 5)

    def test_intermediate_recompute_never_shortens(self):
        # triangle-inequality form of correctness
        g = make_torus(4, 1.0)
        rng = np.random.default_rng(1)
        xi = pl.sample_open_times(g, rng)
        field = first_passage(g, xi, 0)
        for mid in (3, 9, 12):
            via = first_passage(g, xi, mid)
            assert np.all(field.times <= field.times[mid] + via.times + 1e-12)


class TestPandemicTime:
    def test_order_statistics(self):
        field = first_passage(path_graph(3), np.array([1.0, 2.0]), 0)
        assert field.pandemic_time(1) == 0.0
        assert field.pandemic_time(2) == 1.0
        assert field.pandemic_time(3) == 3.0

    def test_full_infection_is_eccentricity(self):
        g = make_torus(5, 1.0)
        xi = pl.sample_open_times(g, np.random.default_rng(2))
        field = first_passage(g, xi, 0)
        assert field.pandemic_time(g.vertex_count) == pytest.approx(
            float(field.times.max())
        )

    def test_monotone_in_threshold(self):
        g = make_complete(10, 1.0)
        xi = pl.sample_open_times(g, np.random.default_rng(3))
        field = first_passage(g, xi, 0)
        vals = [field.pandemic_time(k) for k in range(1, 11)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_threshold_range(self):
        field = first_passage(path_graph(3), np.array([1.0, 2.0]), 0)
        with pytest.raises(ValueError):
            field.pandemic_time(0)
        with pytest.raises(ValueError):
            field.pandemic_time(4)

    def test_infection_curve_csv(self, tmp_path):
        field = first_passage(path_graph(3), np.array([1.0, 2.0]), 0)
        out = tmp_path / "curve.csv"
        field.infection_curve_csv(out)
        lines = out.read_text().splitlines()
        assert lines[0] == "t,fraction"
        assert len(lines) == 4


class TestMinWeight:
    def test_line_exp(self):
        assert min_weight(make_line_exp(5)) == 2.0**-4

    def test_complete(self):
        assert min_weight(make_complete(10, 0.1)) == pytest.approx(0.1)

    def test_coupled_transitive(self):
        assert min_weight(make_coupled_complete(100, "transitive")) == pytest.approx(
            1e-4
        )


class TestDiameter:
    def test_single_edge(self):
        g = make_complete(2, 2.0)
        est = estimate_passage_diameter(g, replicates=5000, seed=0)
        assert est.exhaustive
        assert abs(est.value - 0.5) <= 4 * est.se

    def test_two_edge_path(self):
        est = estimate_passage_diameter(path_graph(3), replicates=5000, seed=1)
        assert abs(est.value - 2.0) <= 4 * est.se
        assert tuple(sorted(est.argmax_pair)) == (0, 2)

    def test_stability_across_seeds(self):
        g = make_complete(20, 1.0)
        a = estimate_passage_diameter(g, replicates=4000, seed=10)
        b = estimate_passage_diameter(g, replicates=4000, seed=11)
        assert abs(a.value - b.value) <= 4 * np.hypot(a.se, b.se)

    def test_sampled_pairs_mode(self):
        g = make_torus(15, 1.0)  # 225 vertices > exhaustive limit
        est = estimate_passage_diameter(g, replicates=50, pair_budget=40, seed=2)
        assert not est.exhaustive
        assert len(est.pair_means) == 40
        assert est.value > 0


class TestVarianceBound:
    def test_single_edge_tight(self):
        reports = variance_bound_report(
            make_complete(2, 1.0), 0, target_vertices=[1], replicates=20000, seed=0
        )
        (r,) = reports
        assert r.passed
        assert 0.85 <= r.details["ratio"] <= 1.15

    def test_two_edge_path_tight(self):
        (r,) = variance_bound_report(
            path_graph(3), 0, target_vertices=[2], replicates=20000, seed=1
        )
        assert r.passed
        assert 0.85 <= r.details["ratio"] <= 1.15
        assert r.details["bound"] == pytest.approx(r.details["mean"], rel=0.1)

    def test_torus_point_and_fraction(self):
        reports = variance_bound_report(
            make_torus(8, 1.0),
            0,
            target_vertices=[4 * 8 + 4],
            fractions=[0.5],
            replicates=1500,
            seed=2,
        )
        assert len(reports) == 2
        assert all(r.passed for r in reports)

    def test_weight_scaling_property(self):
        # scaling all rates by c scales passage times by 1/c
        base = variance_bound_report(
            path_graph(4, 1.0), 0, target_vertices=[3], replicates=8000, seed=3
        )[0]
        scaled = variance_bound_report(
            path_graph(4, 2.0), 0, target_vertices=[3], replicates=8000, seed=4
        )[0]
        se = np.hypot(
            base.details["mean"] / np.sqrt(8000) * 0.6,
            2 * scaled.details["mean"] / np.sqrt(8000) * 0.6,
        )
        assert abs(base.details["mean"] - 2 * scaled.details["mean"]) <= 4 * se + 1e-3


class TestProductScan:
    def test_torus_family_increases(self):
        rows, increasing = diameter_product_scan(
            lambda L: make_torus(L, 1.0), [4, 7], replicates=200, seed=0
        )
        assert len(rows) == 2
        assert all(r.min_weight == 1.0 for r in rows)
        assert increasing

    def test_line_family_explodes(self):
        rows, increasing = diameter_product_scan(
            make_line_exp, [4, 6, 8], replicates=300, seed=1
        )
        assert increasing
        assert rows[-1].product > 10 * rows[0].product

    def test_needs_two_sizes(self):
        with pytest.raises(ValueError):
            diameter_product_scan(make_line_exp, [5], replicates=10)
