from .graph import (
    BIAS,
    EMBEDDING,
    WEIGHT,
    DimensionError,
    Graph,
    GraphError,
    Node,
    Parameter,
    softmax,
)
from .params import ParamStore
from .optim import AdamState, AveragedParams, adam_step, clip_gradients, global_norm, update_average
from .serialize import ModelFormatError, read_params, write_params

__all__ = [
    "BIAS", "EMBEDDING", "WEIGHT", "DimensionError", "Graph", "GraphError", "Node",
    "Parameter", "softmax", "AdamState", "AveragedParams", "adam_step", "clip_gradients",
    "global_norm", "update_average", "ParamStore", "ModelFormatError", "read_params", "write_params",
]
