"""Benchmark harness: transform scaling, basis-generation comparison, sparsity.

Every benchmark asserts fast/dense agreement on its instance before any
timing. Timing uses the monotonic clock with the median of the requested
repeats; one warm-up run is taken and discarded when repeats > 1. All
randomness flows from the seed, so two runs with the same seed build
identical instances (only the measured times vary).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .basis import HaarBasis, build_haar_basis, sparsity
from .chain import CoarseChain, build_chain, cumulative_weights
from .eigen import jacobi_eigenbasis
from .eigen import warm_up as eigen_warm_up
from .errors import NumericalCheckError, ValidationError
from .graphs import Graph, laplacian, load_edge_list, make_graph
from .transforms import adjoint_fht, dense_adjoint, dense_forward, forward_fht

CSV_HEADER = "label,n,repeats,wall_time_s,key=value;…"
AGREEMENT_TOL = 1e-10


@dataclass
class BenchRecord:
    label: str
    n: int
    repeats: int
    wall_time_s: float
    extra: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.wall_time_s < 0 or self.repeats < 1:
            raise ValidationError("bench record requires wall_time_s >= 0 and repeats >= 1")


def records_to_csv(records: list[BenchRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        extra = ";".join(f"{k}={v}" for k, v in r.extra.items())
        lines.append(f"{r.label},{r.n},{r.repeats},{r.wall_time_s!r},{extra}")
    return "\n".join(lines) + "\n"


def time_median(fn, repeats: int) -> float:
    """Median wall time of `repeats` runs, one discarded warm-up when repeats > 1."""
    if repeats < 1:
        raise ValidationError("repeats must be >= 1")
    if repeats > 1:
        fn()
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return float(np.median(samples))


def fit_loglog_slope(ns: list[int], times: list[float]) -> float:
    return float(np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(times, float)), 1)[0])


def random_regular_graph(n: int, degree: int = 4, seed: int = 42) -> Graph:
    """Random simple degree-regular graph as a union of perfect matchings.

    n must be even and > degree (sizes up to degree+1 fall back to the
    complete graph so tiny benchmark sizes stay runnable); each matching is
    resampled until it avoids already-placed edges, which at these sizes
    succeeds within a few draws.
    """
    if n < 2:
        raise ValidationError(f"need at least 2 vertices, got {n}")
    if n <= degree + 1:
        triples = [(u, v, 1.0) for u in range(n) for v in range(u + 1, n)]
        return make_graph(n, triples)
    if n % 2 != 0:
        raise ValidationError(f"need even n > {degree}, got {n}")
    rng = np.random.default_rng([seed, n, degree])
    placed: set[tuple[int, int]] = set()
    for _ in range(degree):
        for _attempt in range(1000):
            perm = rng.permutation(n)
            pairs = [
                (int(min(perm[2 * i], perm[2 * i + 1])), int(max(perm[2 * i], perm[2 * i + 1])))
                for i in range(n // 2)
            ]
            if all(p not in placed for p in pairs):
                placed.update(pairs)
                break
        else:
            raise ValidationError(f"could not draw a disjoint perfect matching for n={n}")
    triples = [(u, v, 1.0) for u, v in sorted(placed)]
    return make_graph(n, triples)


def _assert_fast_dense_agreement(
    basis: HaarBasis, chain: CoarseChain, cw: np.ndarray, rng: np.random.Generator
) -> None:
    f = rng.standard_normal(chain.n)
    c = rng.standard_normal(chain.n)
    adj_gap = np.max(np.abs(adjoint_fht(f, basis, chain) - dense_adjoint(f, basis)))
    fwd_gap = np.max(np.abs(forward_fht(c, basis, chain, cw) - dense_forward(c, basis)))
    if adj_gap > AGREEMENT_TOL or fwd_gap > AGREEMENT_TOL:
        raise NumericalCheckError(
            f"fast/dense disagreement before timing: adjoint {adj_gap:.3e}, forward {fwd_gap:.3e}"
        )


def bench_scaling(sizes: list[int], repeats: int = 5, seed: int = 42) -> list[BenchRecord]:
    """Time the fast and dense transforms per size; append log-log slope rows.

    Instances are random 4-regular graphs with a min_top=2 chain.
    """
    if sorted(sizes) != list(sizes):
        raise ValidationError("sizes must be ascending")
    records: list[BenchRecord] = []
    by_method: dict[str, list[float]] = {}
    for n in sizes:
        g = random_regular_graph(n, 4, seed)
        chain = build_chain(g, min_top=2, seed=seed)
        basis = build_haar_basis(chain)
        cw = cumulative_weights(chain)
        rng = np.random.default_rng([seed, n, 7])
        basis.dense()  # materialize outside the timed region
        _assert_fast_dense_agreement(basis, chain, cw, rng)
        f = rng.standard_normal(n)
        c = rng.standard_normal(n)
        methods = {
            "adjoint_fht": lambda: adjoint_fht(f, basis, chain),
            "forward_fht": lambda: forward_fht(c, basis, chain, cw),
            "dense_adjoint": lambda: dense_adjoint(f, basis),
            "dense_forward": lambda: dense_forward(c, basis),
        }
        for label, fn in methods.items():
            t = time_median(fn, repeats)
            records.append(
                BenchRecord(label=label, n=n, repeats=repeats, wall_time_s=t, extra={"seed": seed})
            )
            by_method.setdefault(label, []).append(t)
        del basis, chain, cw  # drop the dense matrix before the next size
    if len(sizes) >= 2:
        for label, times in by_method.items():
            slope = fit_loglog_slope(sizes, times)
            records.append(
                BenchRecord(
                    label=f"slope_{label}",
                    n=0,
                    repeats=repeats,
                    wall_time_s=0.0,
                    extra={"slope": round(slope, 6)},
                )
            )
    return records


def bench_basis_vs_eigen(sizes: list[int], repeats: int = 5, seed: int = 42) -> list[BenchRecord]:
    """Haar chain+basis generation vs Laplacian+Jacobi eigenbasis per size."""
    if any(n > 2000 for n in sizes):
        raise ValidationError("bench eigen sizes are limited to 2000")
    eigen_warm_up()  # kernel compilation must not land in a timed region
    records: list[BenchRecord] = []
    for n in sizes:
        g = random_regular_graph(n, 4, seed)

        def gen_haar():
            build_haar_basis(build_chain(g, min_top=2, seed=seed))

        def gen_eigen():
            jacobi_eigenbasis(laplacian(g), tol=1e-10)

        records.append(
            BenchRecord("haar_generation", n, repeats, time_median(gen_haar, repeats), {"seed": seed})
        )
        records.append(
            BenchRecord("eigen_generation", n, repeats, time_median(gen_eigen, repeats), {"seed": seed})
        )
    return records


@dataclass
class SparsityReport:
    n: int
    sparsity: float
    nnz: int
    level_sizes: list[int]
    generation_s: float
    adjoint_s: float
    forward_s: float

    def lines(self) -> list[str]:
        """Non-timing lines first; timing lines carry a fixed prefix."""
        return [
            f"n={self.n}",
            f"sparsity={self.sparsity!r}",
            f"nnz={self.nnz}",
            "levels=" + ",".join(str(s) for s in self.level_sizes),
            f"time generation_s={self.generation_s!r}",
            f"time adjoint_s={self.adjoint_s!r}",
            f"time forward_s={self.forward_s!r}",
        ]


def report_sparsity(edge_list_path, min_top: int = 1, seed: int = 42) -> SparsityReport:
    """Build chain and basis for an edge list and measure sparsity plus FHT times."""
    g = load_edge_list(edge_list_path)
    start = time.perf_counter()
    chain = build_chain(g, min_top=min_top, seed=seed)
    basis = build_haar_basis(chain)
    generation = time.perf_counter() - start
    cw = cumulative_weights(chain)
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(g.n)
    start = time.perf_counter()
    coeffs = adjoint_fht(f, basis, chain)
    adjoint_t = time.perf_counter() - start
    start = time.perf_counter()
    forward_fht(coeffs, basis, chain, cw)
    forward_t = time.perf_counter() - start
    return SparsityReport(
        n=g.n,
        sparsity=sparsity(basis),
        nnz=basis.nnz,
        level_sizes=chain.level_sizes,
        generation_s=generation,
        adjoint_s=adjoint_t,
        forward_s=forward_t,
    )
