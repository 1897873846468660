"""Dense float64 math kernel: matmul, row softmax, cross-attention with an
analytic backward pass, a small strided conv/residual feature stack, and a
central finite-difference gradient oracle.

All operations are pure functions over immutable inputs and raise
:class:`~textsr.errors.ShapeError` / :class:`~textsr.errors.NumericError`
instead of silently propagating bad values.
"""

from .ops import as_tensor, check_finite, matmul, softmax_rows
from .attention import (
    AttentionGradients,
    AttentionProjections,
    LinearProjection,
    cross_attention,
    cross_attention_backward,
    cross_attention_forward,
)
from .convnet import FeatureExtractorParams, conv_residual_forward
from .gradcheck import finite_diff_grad_check

__all__ = [
    "as_tensor",
    "check_finite",
    "matmul",
    "softmax_rows",
    "LinearProjection",
    "AttentionProjections",
    "AttentionGradients",
    "cross_attention",
    "cross_attention_forward",
    "cross_attention_backward",
    "FeatureExtractorParams",
    "conv_residual_forward",
    "finite_diff_grad_check",
]
