"""Minimal neural-network stack: tensors, tape autodiff, GRU/MLP layers, Adam."""

from .adam import AdamState, adam_step
from .autodiff import (Value, add, backward, concat_cols, constant, flatten1,
                       gather_rows, gru_decode, gru_sequence, linear, lookup,
                       mean, param, relu, scale, square, sub, total)
from .gradcheck import grad_check
from .layers import (GRUWeights, gru_decode_logprob, gru_encode, gru_step,
                     gru_weights, init_matrix, mlp_forward, register_embedding,
                     register_gru, register_linear, sigmoid)
from .tensor import ParamStore, ShapeError, Tensor

__all__ = [
    "AdamState", "GRUWeights", "ParamStore", "ShapeError", "Tensor", "Value",
    "adam_step", "add", "backward", "concat_cols", "constant", "flatten1",
    "gather_rows", "grad_check", "gru_decode", "gru_decode_logprob",
    "gru_encode", "gru_sequence", "gru_step", "gru_weights", "init_matrix",
    "linear", "lookup", "mean", "mlp_forward", "param", "register_embedding",
    "register_gru", "register_linear", "relu", "scale", "sigmoid", "square",
    "sub", "total",
]
