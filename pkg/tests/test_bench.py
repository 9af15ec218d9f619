import numpy as np
import pytest

from haarfht.bench import (
    CSV_HEADER,
    BenchRecord,
    bench_basis_vs_eigen,
    bench_scaling,
    fit_loglog_slope,
    random_regular_graph,
    records_to_csv,
    report_sparsity,
    time_median,
)
from haarfht.errors import ValidationError
from haarfht.graphs import save_matrix_csv


def test_csv_header_is_schema_stable():
    assert CSV_HEADER == "label,n,repeats,wall_time_s,key=value;…"
    text = records_to_csv([BenchRecord("x", 4, 1, 0.5, {"a": 1, "b": "z"})])
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "x,4,1,0.5,a=1;b=z"


def test_bench_record_invariants():
    with pytest.raises(ValidationError):
        BenchRecord("x", 1, 0, 0.0)
    with pytest.raises(ValidationError):
        BenchRecord("x", 1, 1, -1.0)


def test_time_median_requires_positive_repeats():
    with pytest.raises(ValidationError):
        time_median(lambda: None, 0)
    assert time_median(lambda: None, 1) >= 0.0


def test_fit_loglog_slope_quadratic():
    ns = [2, 4, 8, 16]
    times = [float(n) ** 2 for n in ns]
    assert abs(fit_loglog_slope(ns, times) - 2.0) < 1e-9


class TestRandomRegularGraph:
    def test_every_vertex_degree_four(self):
        g = random_regular_graph(64, 4, 0)
        assert np.array_equal(g.degrees(), np.full(64, 4))

    def test_deterministic(self):
        a = random_regular_graph(32, 4, 5)
        b = random_regular_graph(32, 4, 5)
        assert a.edges == b.edges

    def test_seed_changes_instance(self):
        a = random_regular_graph(32, 4, 5)
        b = random_regular_graph(32, 4, 6)
        assert a.edges != b.edges

    def test_tiny_sizes_fall_back_to_complete_graph(self):
        g = random_regular_graph(2, 4, 0)
        assert g.edges == [(0, 1, 1.0)]
        assert random_regular_graph(5, 4, 0).num_edges == 10

    def test_odd_sizes_rejected(self):
        with pytest.raises(ValidationError):
            random_regular_graph(33, 4, 0)
        with pytest.raises(ValidationError):
            random_regular_graph(1, 4, 0)


class TestBenchScaling:
    def test_records_and_slopes(self):
        records = bench_scaling([16, 32], repeats=2, seed=1)
        labels = [r.label for r in records]
        for method in ("adjoint_fht", "forward_fht", "dense_adjoint", "dense_forward"):
            assert labels.count(method) == 2
            assert f"slope_{method}" in labels
        for r in records:
            assert r.wall_time_s >= 0.0

    def test_singleton_size_list_reports_no_slope(self):
        records = bench_scaling([16], repeats=1, seed=1)
        assert all(not r.label.startswith("slope_") for r in records)
        assert len(records) == 4

    def test_sizes_must_ascend(self):
        with pytest.raises(ValidationError):
            bench_scaling([32, 16], repeats=1, seed=1)


class TestBenchEigen:
    def test_records_well_formed(self):
        records = bench_basis_vs_eigen([16], repeats=1, seed=1)
        assert [r.label for r in records] == ["haar_generation", "eigen_generation"]
        assert all(r.n == 16 for r in records)

    def test_two_vertex_instance_completes(self):
        records = bench_basis_vs_eigen([2], repeats=1, seed=1)
        assert len(records) == 2
        assert all(r.wall_time_s >= 0.0 for r in records)

    def test_size_guard(self):
        with pytest.raises(ValidationError):
            bench_basis_vs_eigen([4096], repeats=1, seed=1)


class TestReportSparsity:
    def test_eight_point_example(self, tmp_path, paired_graph8):
        path = tmp_path / "pairs8.txt"
        lines = [f"{u} {v} {w}" for u, v, w in paired_graph8.edges]
        path.write_text("\n".join(lines), encoding="utf-8")
        report = report_sparsity(path, min_top=2, seed=42)
        assert report.n == 8
        assert report.sparsity == 0.5
        assert report.nnz == 32
        assert report.level_sizes == [2, 4, 8]

    def test_single_vertex(self, tmp_path):
        path = tmp_path / "one.txt"
        path.write_text("#n 1\n", encoding="utf-8")
        report = report_sparsity(path, min_top=1, seed=0)
        assert report.n == 1
        assert report.sparsity == 0.0

    def test_lines_mark_timing_entries(self, tmp_path, paired_graph8):
        path = tmp_path / "pairs8.txt"
        path.write_text("\n".join(f"{u} {v} {w}" for u, v, w in paired_graph8.edges), encoding="utf-8")
        lines = report_sparsity(path, min_top=2, seed=42).lines()
        assert lines[0] == "n=8"
        assert sum(1 for line in lines if line.startswith("time ")) == 3
