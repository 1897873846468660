"""Elementary dense-array operations with strict validation.

Tensors are plain ``numpy.ndarray`` values in double precision, row-major.
Every public operation checks its shape contract up front and verifies the
result is finite before returning it.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericError, ShapeError


def as_tensor(values) -> np.ndarray:
    """Coerce ``values`` to a C-contiguous float64 array."""
    return np.ascontiguousarray(np.asarray(values, dtype=np.float64))


def check_finite(x: np.ndarray, context: str) -> np.ndarray:
    """Raise :class:`NumericError` if ``x`` contains NaN or Inf."""
    if not np.all(np.isfinite(x)):
        raise NumericError(f"{context}: non-finite values in result")
    return x


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of two 2-D tensors.

    Raises :class:`ShapeError` naming both shapes when the inner
    dimensions disagree.
    """
    a = as_tensor(a)
    b = as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul expects 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul inner dimensions disagree: {a.shape} x {b.shape}")
    return check_finite(a @ b, "matmul")


def softmax_rows(x: np.ndarray) -> np.ndarray:
    """Numerically stabilized softmax applied to each row of a 2-D tensor.

    Each output row is nonnegative and sums to 1; stabilization subtracts
    the row maximum before exponentiation.
    """
    x = as_tensor(x)
    if x.ndim != 2:
        raise ShapeError(f"softmax_rows expects a 2-D tensor, got shape {x.shape}")
    if x.shape[1] == 0:
        raise ShapeError(f"softmax_rows: empty row dimension in shape {x.shape}")
    check_finite(x, "softmax_rows input")
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return check_finite(e / e.sum(axis=1, keepdims=True), "softmax_rows")
