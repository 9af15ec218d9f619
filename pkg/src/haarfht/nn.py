"""Haar-convolution network layers, the two-layer node classifier, and a toy trainer.

Layers keep filter parameters in the coefficient ("frequency") domain: a
convolution is adjoint transform, diagonal scaling, forward transform. The
node model is

    softmax(HC2(relu(HC1(F)))),   HC_i(F) = A_hat (w1_i * F) w2_i,

where w1_i holds one frequency filter per input column, stored at the
coarsest chain level and expanded to the finest level by weight sharing.
Gradients are exact chain-rule derivations; shared parameters accumulate
their cluster's contributions (the transpose of the sharing expansion).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import HaarBasis, build_haar_basis
from .chain import CoarseChain, build_chain, cumulative_weights, finest_ancestors
from .errors import ValidationError
from .graphs import Graph, make_graph, smoothing_matrix
from .transforms import adjoint_fht_matrix, check_pair, forward_fht_matrix


def share_weights(params: np.ndarray, chain: CoarseChain, j1: int) -> np.ndarray:
    """Expand level-j1 parameters to the finest level: each vertex takes the
    parameter of its level-j1 ancestor. Works on vectors or (N_j1, d) matrices."""
    if not (chain.j0 <= j1 <= chain.j):
        raise ValidationError(f"share level {j1} outside chain range {chain.j0}..{chain.j}")
    params = np.asarray(params, dtype=np.float64)
    n_shared = chain.level(j1).n
    if params.shape[0] != n_shared:
        raise ValidationError(f"expected {n_shared} shared parameters, got {params.shape[0]}")
    anc = finest_ancestors(chain)[j1 - chain.j0]
    return params[anc]


def share_weights_adjoint(grad: np.ndarray, chain: CoarseChain, j1: int) -> np.ndarray:
    """Transpose of share_weights: sum finest-level gradients over each cluster."""
    grad = np.asarray(grad, dtype=np.float64)
    anc = finest_ancestors(chain)[j1 - chain.j0]
    n_shared = chain.level(j1).n
    out = np.zeros((n_shared,) + grad.shape[1:], dtype=np.float64)
    np.add.at(out, anc, grad)
    return out


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def softmax_rows(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass
class HaarConvLayer:
    """Detached convolutional layer: unified diagonal filter + compression.

    g_diag has length N_{share_level} and is expanded over descendants; the
    expanded filter scales every column of the transformed input, then
    W_compress (d, m) mixes features and the activation applies.
    """

    g_diag: np.ndarray
    w_compress: np.ndarray
    share_level: int
    activation: str = "relu"  # "relu" or "identity"

    def activate(self, z: np.ndarray) -> np.ndarray:
        if self.activation == "relu":
            return relu(z)
        if self.activation == "identity":
            return z
        raise ValidationError(f"unknown activation {self.activation!r}")


def conv_layer_forward(
    f_in: np.ndarray,
    layer: HaarConvLayer,
    basis: HaarBasis,
    chain: CoarseChain,
    cw: np.ndarray,
) -> np.ndarray:
    """sigma(Phi(G(Phi^T F)) W) with the shared diagonal expanded to length N."""
    check_pair(basis, chain)
    f_in = np.asarray(f_in, dtype=np.float64)
    if f_in.ndim != 2 or f_in.shape[0] != chain.n:
        raise ValidationError(f"input must be (N, d) with N={chain.n}, got {f_in.shape}")
    if layer.w_compress.shape[0] != f_in.shape[1]:
        raise ValidationError(
            f"compression matrix expects {layer.w_compress.shape[0]} features, input has {f_in.shape[1]}"
        )
    g = share_weights(layer.g_diag, chain, layer.share_level)
    coeff = adjoint_fht_matrix(f_in, basis, chain)
    conv = forward_fht_matrix(g[:, None] * coeff, basis, chain, cw)
    return layer.activate(conv @ layer.w_compress)


def general_layer_forward(
    f_in: np.ndarray,
    bank: np.ndarray,
    basis: HaarBasis,
    chain: CoarseChain,
    cw: np.ndarray,
    activation: str = "identity",
) -> np.ndarray:
    """Multi-filter layer: out_i = sigma(sum_j Phi(bank[i, j] . Phi^T f_j)).

    bank has shape (m, d, N) of frequency-domain filters; the sum over j is
    taken in the coefficient domain (the forward transform is linear), which
    keeps the arithmetic identical to transforming each term separately.
    """
    f_in = np.asarray(f_in, dtype=np.float64)
    bank = np.asarray(bank, dtype=np.float64)
    if f_in.ndim != 2 or f_in.shape[0] != chain.n:
        raise ValidationError(f"input must be (N, d) with N={chain.n}, got {f_in.shape}")
    m, d, n = bank.shape
    if d != f_in.shape[1] or n != chain.n:
        raise ValidationError(f"filter bank shape {bank.shape} does not match input {f_in.shape}")
    coeff = adjoint_fht_matrix(f_in, basis, chain)
    combined = np.einsum("mdn,nd->nm", bank, coeff)
    out = forward_fht_matrix(combined, basis, chain, cw)
    layer = HaarConvLayer(np.empty(0), np.empty((0, 0)), chain.j0, activation)
    return layer.activate(out)


def graph_max_pool(f: np.ndarray, chain: CoarseChain, j: int) -> np.ndarray:
    """Reduce an (N_j, d) matrix to level j-1 by elementwise max over children."""
    if j <= chain.j0:
        raise ValidationError(f"cannot pool below the coarsest level {chain.j0}")
    if not (j <= chain.j):
        raise ValidationError(f"level {j} outside chain range")
    lvl = chain.level(j)
    f = np.asarray(f, dtype=np.float64)
    if f.ndim == 1:
        f = f[:, None]
    if f.shape[0] != lvl.n:
        raise ValidationError(f"expected {lvl.n} rows at level {j}, got {f.shape[0]}")
    coarse_n = chain.level(j - 1).n
    out = np.full((coarse_n,) + f.shape[1:], -np.inf)
    np.maximum.at(out, lvl.parent, f)
    return out


@dataclass
class NodeClassifier:
    """Two Haar convolutional layers with smoothing, plus the transform context."""

    w1_1: np.ndarray  # (N_share, M) frequency filters of layer 1
    w2_1: np.ndarray  # (M, H)
    w1_2: np.ndarray  # (N_share, H)
    w2_2: np.ndarray  # (H, C)
    smoothing: np.ndarray  # (N, N) A_hat
    basis: HaarBasis = field(repr=False, default=None)
    chain: CoarseChain = field(repr=False, default=None)
    cw: np.ndarray = field(repr=False, default=None)
    share_level: int = 0

    def params(self) -> dict[str, np.ndarray]:
        return {"w1_1": self.w1_1, "w2_1": self.w2_1, "w1_2": self.w1_2, "w2_2": self.w2_2}


def init_model(
    g: Graph,
    num_features: int,
    hidden: int,
    num_classes: int,
    seed: int,
    min_top: int = 1,
) -> NodeClassifier:
    """Build chain/basis/smoothing for g and initialize parameters.

    Frequency filters start at all-ones (identity filter); compression
    matrices are uniform in [-s, s] with s = sqrt(6 / (fan_in + fan_out)).
    """
    chain = build_chain(g, min_top=min_top, seed=seed)
    basis = build_haar_basis(chain)
    cw = cumulative_weights(chain)
    rng = np.random.default_rng(seed)
    n0 = chain.levels[0].n

    def glorot(fan_in: int, fan_out: int) -> np.ndarray:
        s = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-s, s, size=(fan_in, fan_out))

    return NodeClassifier(
        w1_1=np.ones((n0, num_features)),
        w2_1=glorot(num_features, hidden),
        w1_2=np.ones((n0, hidden)),
        w2_2=glorot(hidden, num_classes),
        smoothing=smoothing_matrix(g),
        basis=basis,
        chain=chain,
        cw=cw,
        share_level=chain.j0,
    )


def _conv_columns(
    coeff: np.ndarray, filters: np.ndarray, model: NodeClassifier
) -> np.ndarray:
    """Forward-transform per-column filtered coefficients (filters already expanded)."""
    return forward_fht_matrix(filters * coeff, model.basis, model.chain, model.cw)


def _model_internals(f_in: np.ndarray, model: NodeClassifier) -> dict[str, np.ndarray]:
    """Forward pass keeping every intermediate needed by the backward pass."""
    f_in = np.asarray(f_in, dtype=np.float64)
    if f_in.ndim != 2 or f_in.shape[0] != model.chain.n:
        raise ValidationError(f"input must be (N, M) with N={model.chain.n}, got {f_in.shape}")
    if f_in.shape[1] != model.w1_1.shape[1]:
        raise ValidationError(
            f"model expects {model.w1_1.shape[1]} input features, got {f_in.shape[1]}"
        )
    g1 = share_weights(model.w1_1, model.chain, model.share_level)
    u1 = adjoint_fht_matrix(f_in, model.basis, model.chain)
    c1 = _conv_columns(u1, g1, model)
    z1 = (model.smoothing @ c1) @ model.w2_1
    h = relu(z1)
    g2 = share_weights(model.w1_2, model.chain, model.share_level)
    u2 = adjoint_fht_matrix(h, model.basis, model.chain)
    c2 = _conv_columns(u2, g2, model)
    z2 = (model.smoothing @ c2) @ model.w2_2
    probs = softmax_rows(z2)
    return {"u1": u1, "c1": c1, "z1": z1, "h": h, "u2": u2, "c2": c2, "z2": z2, "probs": probs}


def node_model_forward(f_in: np.ndarray, model: NodeClassifier) -> np.ndarray:
    """Row-stochastic class probabilities for every vertex."""
    return _model_internals(f_in, model)["probs"]


def masked_cross_entropy(
    probs: np.ndarray, labels: np.ndarray, mask: np.ndarray, params=None, l2: float = 0.0
) -> float:
    """Mean cross-entropy over masked vertices plus l2 * sum of squared params."""
    idx = np.nonzero(mask)[0]
    if len(idx) == 0:
        raise ValidationError("mask selects no vertices")
    if np.any(labels[idx] < 0):
        raise ValidationError("mask selects vertices without labels")
    picked = probs[idx, labels[idx]]
    loss = -float(np.mean(np.log(np.maximum(picked, 1e-300))))
    if params is not None and l2 > 0.0:
        loss += l2 * sum(float(np.sum(p * p)) for p in params.values())
    return loss


def model_backward(
    f_in: np.ndarray,
    labels: np.ndarray,
    mask: np.ndarray,
    model: NodeClassifier,
    l2: float = 0.0,
) -> tuple[float, dict[str, np.ndarray]]:
    """Loss and exact gradients of all four parameter tensors."""
    labels = np.asarray(labels)
    mask = np.asarray(mask, dtype=bool)
    idx = np.nonzero(mask)[0]
    if len(idx) == 0:
        raise ValidationError("mask selects no vertices")
    inter = _model_internals(f_in, model)
    probs, z1 = inter["probs"], inter["z1"]

    d_z2 = np.zeros_like(probs)
    d_z2[idx] = probs[idx]
    d_z2[idx, labels[idx]] -= 1.0
    d_z2 /= len(idx)

    a_dz2 = model.smoothing @ d_z2
    d_w2_2 = inter["c2"].T @ a_dz2
    d_c2 = a_dz2 @ model.w2_2.T
    v2 = adjoint_fht_matrix(d_c2, model.basis, model.chain)
    d_g2 = inter["u2"] * v2
    g2 = share_weights(model.w1_2, model.chain, model.share_level)
    d_h = _conv_columns(v2, g2, model)
    d_w1_2 = share_weights_adjoint(d_g2, model.chain, model.share_level)

    d_z1 = d_h * (z1 > 0)
    a_dz1 = model.smoothing @ d_z1
    d_w2_1 = inter["c1"].T @ a_dz1
    d_c1 = a_dz1 @ model.w2_1.T
    v1 = adjoint_fht_matrix(d_c1, model.basis, model.chain)
    d_g1 = inter["u1"] * v1
    d_w1_1 = share_weights_adjoint(d_g1, model.chain, model.share_level)

    grads = {"w1_1": d_w1_1, "w2_1": d_w2_1, "w1_2": d_w1_2, "w2_2": d_w2_2}
    params = model.params()
    if l2 > 0.0:
        for name in grads:
            grads[name] = grads[name] + 2.0 * l2 * params[name]
    loss = masked_cross_entropy(probs, labels, mask, params=params, l2=l2)
    return loss, grads


def finite_difference_check(
    f_in: np.ndarray,
    labels: np.ndarray,
    mask: np.ndarray,
    model: NodeClassifier,
    l2: float = 0.0,
    eps: float = 1e-6,
) -> dict[str, float]:
    """Max relative error of analytic vs central-difference gradients per tensor.

    Relative error uses a unit floor: |a - n| / max(1, |a|, |n|)."""
    _, grads = model_backward(f_in, labels, mask, model, l2=l2)

    def loss_now() -> float:
        return masked_cross_entropy(
            node_model_forward(f_in, model), labels, mask, model.params(), l2
        )

    errors = {}
    for name, param in model.params().items():
        worst = 0.0
        analytic = grads[name]
        for index in np.ndindex(param.shape):
            orig = param[index]
            param[index] = orig + eps
            up = loss_now()
            param[index] = orig - eps
            down = loss_now()
            param[index] = orig
            numeric = (up - down) / (2.0 * eps)
            a = float(analytic[index])
            err = abs(a - numeric) / max(1.0, abs(a), abs(numeric))
            worst = max(worst, err)
        errors[name] = worst
    return errors


@dataclass
class TrainHyper:
    lr: float = 0.01
    epochs: int = 200
    seed: int = 42
    l2: float = 5e-4
    hidden: int = 16
    momentum: float = 0.9


@dataclass
class EpochMetrics:
    epoch: int
    loss: float
    train_acc: float
    test_acc: float


def _accuracy(probs: np.ndarray, labels: np.ndarray, idx: np.ndarray) -> float:
    if len(idx) == 0:
        return float("nan")
    pred = probs[idx].argmax(axis=1)
    return float(np.mean(pred == labels[idx]))


def train_toy(
    g: Graph,
    f_in: np.ndarray,
    labels: np.ndarray,
    mask: np.ndarray,
    hyper: TrainHyper,
) -> tuple[NodeClassifier, list[EpochMetrics]]:
    """Gradient descent with momentum 0.9; deterministic for a fixed seed.

    Test accuracy is measured over labeled vertices outside the mask.
    """
    labels = np.asarray(labels)
    mask = np.asarray(mask, dtype=bool)
    num_classes = int(labels[labels >= 0].max()) + 1
    model = init_model(
        g, num_features=f_in.shape[1], hidden=hyper.hidden, num_classes=num_classes, seed=hyper.seed
    )
    train_idx = np.nonzero(mask)[0]
    test_idx = np.nonzero((labels >= 0) & ~mask)[0]
    velocity = {name: np.zeros_like(p) for name, p in model.params().items()}
    metrics = []
    for epoch in range(1, hyper.epochs + 1):
        loss, grads = model_backward(f_in, labels, mask, model, l2=hyper.l2)
        params = model.params()
        for name, p in params.items():
            velocity[name] = hyper.momentum * velocity[name] - hyper.lr * grads[name]
            p += velocity[name]
        probs = node_model_forward(f_in, model)
        metrics.append(
            EpochMetrics(
                epoch=epoch,
                loss=loss,
                train_acc=_accuracy(probs, labels, train_idx),
                test_acc=_accuracy(probs, labels, test_idx),
            )
        )
    return model, metrics


def make_two_cluster_instance(
    n_per_cluster: int = 16, seed: int = 42, labeled_fraction: float = 0.2
) -> tuple[Graph, np.ndarray, np.ndarray, np.ndarray]:
    """Linearly separable synthetic instance: two dense clusters, one-hot
    cluster features, a seeded 20% train mask per cluster."""
    rng = np.random.default_rng(seed)
    n = 2 * n_per_cluster
    edges = []
    for block in range(2):
        lo = block * n_per_cluster
        for a in range(lo, lo + n_per_cluster):
            for b in range(a + 1, lo + n_per_cluster):
                if rng.random() < 0.8:
                    edges.append((a, b, 1.0))
    bridges = max(1, n_per_cluster // 8)
    for _ in range(bridges):
        a = int(rng.integers(0, n_per_cluster))
        b = int(rng.integers(n_per_cluster, n))
        edges.append((a, b, 0.5))
    g = make_graph(n, edges)
    features = np.zeros((n, 2))
    features[:n_per_cluster, 0] = 1.0
    features[n_per_cluster:, 1] = 1.0
    labels = np.repeat(np.array([0, 1]), n_per_cluster)
    mask = np.zeros(n, dtype=bool)
    per = max(1, int(round(labeled_fraction * n_per_cluster)))
    for block in range(2):
        lo = block * n_per_cluster
        chosen = rng.choice(n_per_cluster, size=per, replace=False)
        mask[lo + chosen] = True
    return g, features, labels, mask


def regression_forward(
    f_in: np.ndarray,
    layers: list[HaarConvLayer],
    basis: HaarBasis,
    chain: CoarseChain,
    cw: np.ndarray,
) -> np.ndarray:
    """QM7-style head: the conv stack followed by a mean readout per filter."""
    out = np.asarray(f_in, dtype=np.float64)
    for layer in layers:
        out = conv_layer_forward(out, layer, basis, chain, cw)
    return out.mean(axis=0)


def mse_loss(pred: np.ndarray, target: np.ndarray) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    return float(np.mean((pred - target) ** 2))
