"""Rainbow tree embedding in locally bounded edge-colourings of K_n.

Core objects: edge colourings of complete graphs (`colouring`), trees and
their layered decompositions (`trees`), rainbow matchings with switching
(`matching`), disjoint rainbow star families (`stars`), and the embedding
pipeline (`pipeline`).  Applications in `apps`, exact verifiers in
`checks`, Monte-Carlo statistical checks in `stats`.
"""

from .colouring import (
    EdgeColouring,
    colouring_from_json,
    colouring_from_spec,
    explicit_colouring,
    group_sum_colouring,
    nd_colouring,
    random_locally_k_bounded,
    round_robin_proper,
)
from .errors import (
    CompletionError,
    EmbedFailure,
    InvalidEdgeError,
    ParameterError,
    RainbowError,
    ScanLimitError,
    SizeError,
)
from .kernels import BACKEND
from .trees import Tree, enumerate_trees, random_tree, split_tree
from .pipeline import EmbedOutcome, PipelineConfig, RainbowEmbedding, embed_tree

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CompletionError",
    "EdgeColouring",
    "EmbedFailure",
    "EmbedOutcome",
    "InvalidEdgeError",
    "ParameterError",
    "PipelineConfig",
    "RainbowEmbedding",
    "RainbowError",
    "ScanLimitError",
    "SizeError",
    "Tree",
    "colouring_from_json",
    "colouring_from_spec",
    "embed_tree",
    "enumerate_trees",
    "explicit_colouring",
    "group_sum_colouring",
    "nd_colouring",
    "random_locally_k_bounded",
    "random_tree",
    "round_robin_proper",
    "split_tree",
]
