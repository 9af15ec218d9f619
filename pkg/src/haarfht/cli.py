"""haarfht command-line interface.

Subcommands: chain, basis, transform, conv, bench scaling, bench eigen,
sparsity, nn gradcheck, nn train. Exit codes: 0 success, 2 validation
error, 3 I/O error, 4 numerical check failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .basis import basis_matches, build_haar_basis, load_basis, save_basis, sparsity
from .chain import build_chain, cumulative_weights, load_chain, save_chain
from .errors import NumericalCheckError, ValidationError
from .graphs import (
    load_edge_list,
    load_matrix_csv,
    load_signal_csv,
    save_matrix_csv,
)
from .nn import (
    TrainHyper,
    finite_difference_check,
    init_model,
    train_toy,
)
from .transforms import (
    adjoint_fht,
    dense_adjoint,
    dense_forward,
    forward_fht,
    haar_convolution,
    spectral_filter_apply,
)

CHECK_TOL = 1e-10


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="haarfht", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chain", help="build a coarse chain from an edge list")
    p.add_argument("--input", required=True)
    p.add_argument("--min-top", type=int, default=1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)

    p = sub.add_parser("basis", help="build the Haar basis for a chain")
    p.add_argument("--chain", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stats", action="store_true")

    p = sub.add_parser("transform", help="apply the fast Haar transforms")
    p.add_argument("--mode", required=True, choices=["adjoint", "forward", "roundtrip"])
    p.add_argument("--basis", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--vector", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--check-dense", action="store_true")

    p = sub.add_parser("conv", help="Haar convolution of a filter with a signal")
    p.add_argument("--basis", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--filter", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--frequency-domain", action="store_true")

    p = sub.add_parser("bench", help="timing benchmarks")
    bench_sub = p.add_subparsers(dest="bench_command", required=True)
    b = bench_sub.add_parser("scaling", help="fast vs dense transform scaling")
    b.add_argument("--sizes", required=True)
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--out", required=True)
    b = bench_sub.add_parser("eigen", help="Haar vs Jacobi basis generation")
    b.add_argument("--sizes", required=True)
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--out", required=True)

    p = sub.add_parser("sparsity", help="basis sparsity report for an edge list")
    p.add_argument("--input", required=True)
    p.add_argument("--min-top", type=int, default=1)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("nn", help="Haar-convolution network utilities")
    nn_sub = p.add_subparsers(dest="nn_command", required=True)
    g = nn_sub.add_parser("gradcheck", help="finite-difference gradient check")
    g.add_argument("--n", type=int, default=16)
    g.add_argument("--features", type=int, default=4)
    g.add_argument("--classes", type=int, default=3)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--eps", type=float, default=1e-6)
    t = nn_sub.add_parser("train", help="train the two-layer node classifier")
    t.add_argument("--input", required=True)
    t.add_argument("--features", required=True)
    t.add_argument("--labels", required=True)
    t.add_argument("--mask", required=True)
    t.add_argument("--epochs", type=int, default=200)
    t.add_argument("--lr", type=float, default=0.01)
    t.add_argument("--hidden", type=int, default=16)
    t.add_argument("--seed", type=int, default=42)
    t.add_argument("--metrics", required=True)
    return parser


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ValidationError(f"--sizes must be a comma list of integers, got {text!r}") from None
    if not sizes:
        raise ValidationError("--sizes is empty")
    return sizes


def _load_pair(basis_path: str, chain_path: str):
    """Load a chain, rebuild its basis, and verify the basis file matches."""
    chain = load_chain(chain_path)
    loaded = load_basis(basis_path)
    basis = build_haar_basis(chain)
    if not basis_matches(loaded, basis):
        raise ValidationError("basis/chain mismatch: basis file was not generated from this chain")
    return basis, chain


def _cmd_chain(args) -> int:
    g = load_edge_list(args.input)
    chain = build_chain(g, min_top=args.min_top, seed=args.seed)
    save_chain(args.out, chain)
    print(f"chain levels: {','.join(str(s) for s in chain.level_sizes)}")
    return 0


def _cmd_basis(args) -> int:
    chain = load_chain(args.chain)
    g = load_edge_list(args.input)
    if g.n != chain.n:
        raise ValidationError(f"edge list has {g.n} vertices but chain has {chain.n}")
    basis = build_haar_basis(chain)
    save_basis(args.out, basis, stats=args.stats)
    print(f"basis n={basis.n} nnz={basis.nnz} sparsity={sparsity(basis)!r}")
    return 0


def _cmd_transform(args) -> int:
    basis, chain = _load_pair(args.basis, args.chain)
    vec = load_signal_csv(args.vector)
    cw = cumulative_weights(chain)
    if args.mode == "adjoint":
        result = adjoint_fht(vec, basis, chain)
        reference = dense_adjoint(vec, basis) if args.check_dense else None
    elif args.mode == "forward":
        result = forward_fht(vec, basis, chain, cw)
        reference = dense_forward(vec, basis) if args.check_dense else None
    else:
        result = forward_fht(adjoint_fht(vec, basis, chain), basis, chain, cw)
        reference = dense_forward(dense_adjoint(vec, basis), basis) if args.check_dense else None
    if reference is not None:
        gap = float(np.max(np.abs(result - reference)))
        if gap > CHECK_TOL:
            raise NumericalCheckError(f"fast/dense gap {gap:.3e} exceeds {CHECK_TOL}")
        print(f"check-dense ok (max gap {gap:.3e})")
    save_matrix_csv(args.out, result)
    return 0


def _cmd_conv(args) -> int:
    basis, chain = _load_pair(args.basis, args.chain)
    filt = load_signal_csv(args.filter)
    signal = load_signal_csv(args.signal)
    cw = cumulative_weights(chain)
    if args.frequency_domain:
        result = spectral_filter_apply(filt, signal, basis, chain, cw)
    else:
        result = haar_convolution(filt, signal, basis, chain, cw)
    save_matrix_csv(args.out, result)
    return 0


def _cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    if args.bench_command == "scaling":
        records = bench_mod.bench_scaling(sizes, repeats=args.repeats, seed=args.seed)
    else:
        records = bench_mod.bench_basis_vs_eigen(sizes, repeats=args.repeats, seed=args.seed)
    Path(args.out).write_text(bench_mod.records_to_csv(records), encoding="utf-8")
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_sparsity(args) -> int:
    report = bench_mod.report_sparsity(args.input, min_top=args.min_top, seed=args.seed)
    for line in report.lines():
        print(line)
    return 0


def _cmd_gradcheck(args) -> int:
    rng = np.random.default_rng(args.seed)
    n = args.n if args.n % 2 == 0 else args.n + 1
    g = bench_mod.random_regular_graph(n, 4, args.seed)
    model = init_model(g, args.features, hidden=4, num_classes=args.classes, seed=args.seed)
    f_in = rng.standard_normal((n, args.features))
    labels = rng.integers(0, args.classes, size=n)
    mask = np.zeros(n, dtype=bool)
    mask[rng.choice(n, size=max(2, n // 2), replace=False)] = True
    errors = finite_difference_check(f_in, labels, mask, model, l2=5e-4, eps=args.eps)
    worst = max(errors.values())
    for name in sorted(errors):
        print(f"{name} max_rel_err={errors[name]:.3e}")
    if worst > 1e-5:
        raise NumericalCheckError(f"gradient check failed: max relative error {worst:.3e}")
    print("gradcheck ok")
    return 0


def _cmd_train(args) -> int:
    g = load_edge_list(args.input)
    features = load_matrix_csv(args.features)
    if features.shape[0] != g.n:
        raise ValidationError(f"feature matrix has {features.shape[0]} rows for {g.n} vertices")
    labels_rows = load_matrix_csv(args.labels)
    if labels_rows.shape[1] != 2:
        raise ValidationError("labels file must be CSV rows of vertex_id,class_id")
    labels = np.full(g.n, -1, dtype=np.int64)
    for vid, cid in labels_rows:
        labels[int(vid)] = int(cid)
    mask_ids = load_matrix_csv(args.mask)
    mask = np.zeros(g.n, dtype=bool)
    mask[mask_ids.ravel().astype(np.int64)] = True
    hyper = TrainHyper(lr=args.lr, epochs=args.epochs, seed=args.seed, hidden=args.hidden)
    _, metrics = train_toy(g, features, labels, mask, hyper)
    lines = ["epoch,loss,train_acc,test_acc"]
    for m in metrics:
        lines.append(f"{m.epoch},{m.loss!r},{m.train_acc!r},{m.test_acc!r}")
    Path(args.metrics).write_text("\n".join(lines) + "\n", encoding="utf-8")
    last = metrics[-1]
    print(f"final epoch={last.epoch} loss={last.loss!r} train_acc={last.train_acc!r} test_acc={last.test_acc!r}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "chain": _cmd_chain,
        "basis": _cmd_basis,
        "transform": _cmd_transform,
        "conv": _cmd_conv,
        "bench": _cmd_bench,
        "sparsity": _cmd_sparsity,
    }
    try:
        if args.command == "nn":
            if args.nn_command == "gradcheck":
                return _cmd_gradcheck(args)
            return _cmd_train(args)
        return handlers[args.command](args)
    except NumericalCheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
