"""Haar bases on graph coarsening chains with fast transforms and a small GNN."""

from .basis import (
    HaarBasis,
    SparseColumn,
    build_haar_basis,
    column_support,
    extend_one_level,
    level_one_vectors,
    sparsity,
)
from .chain import (
    ChainLevel,
    CoarseChain,
    build_chain,
    chain_from_parent_maps,
    coarsen_once,
    cumulative_weights,
    validate_filtration,
)
from .eigen import jacobi_eigenbasis
from .errors import HaarError, NumericalCheckError, ParseError, ValidationError
from .graphs import (
    Graph,
    laplacian,
    load_edge_list,
    load_matrix_csv,
    make_graph,
    smoothing_matrix,
)
from .nn import (
    HaarConvLayer,
    NodeClassifier,
    TrainHyper,
    conv_layer_forward,
    general_layer_forward,
    graph_max_pool,
    model_backward,
    node_model_forward,
    share_weights,
    train_toy,
)
from .transforms import (
    adjoint_fht,
    dense_adjoint,
    dense_forward,
    forward_fht,
    haar_convolution,
    spectral_filter_apply,
    weighted_sums,
)

__all__ = [
    "ChainLevel",
    "CoarseChain",
    "Graph",
    "HaarBasis",
    "HaarConvLayer",
    "HaarError",
    "NodeClassifier",
    "NumericalCheckError",
    "ParseError",
    "SparseColumn",
    "TrainHyper",
    "ValidationError",
    "adjoint_fht",
    "build_chain",
    "build_haar_basis",
    "chain_from_parent_maps",
    "coarsen_once",
    "column_support",
    "conv_layer_forward",
    "cumulative_weights",
    "dense_adjoint",
    "dense_forward",
    "extend_one_level",
    "forward_fht",
    "general_layer_forward",
    "graph_max_pool",
    "haar_convolution",
    "jacobi_eigenbasis",
    "laplacian",
    "level_one_vectors",
    "load_edge_list",
    "load_matrix_csv",
    "make_graph",
    "model_backward",
    "node_model_forward",
    "share_weights",
    "smoothing_matrix",
    "sparsity",
    "spectral_filter_apply",
    "train_toy",
    "validate_filtration",
    "weighted_sums",
]
