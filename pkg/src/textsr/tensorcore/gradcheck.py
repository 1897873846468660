"""Central finite-difference gradient oracle.

Deliberately independent of the analytic backward pass: it only evaluates
the scalar function, so it can vouch for any gradient handed to it.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import NumericError, ParameterError
from .ops import as_tensor


def finite_diff_grad_check(
    f: Callable[[np.ndarray], float],
    x: np.ndarray,
    analytic: np.ndarray,
    eps: float = 1e-6,
) -> float:
    """Compare ``analytic`` against central differences of ``f`` at ``x``.

    Returns the max over coordinates of
    ``|analytic - central_difference| / max(1, |analytic|)``.
    """
    if eps <= 0.0:
        raise ParameterError(f"finite_diff_grad_check: eps must be positive, got {eps}")
    x = as_tensor(x)
    analytic = as_tensor(analytic)
    if analytic.shape != x.shape:
        raise ParameterError(
            f"finite_diff_grad_check: analytic gradient shape {analytic.shape} "
            f"does not match input shape {x.shape}"
        )
    worst = 0.0
    flat = x.ravel().copy()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        f_plus = float(f(flat.reshape(x.shape)))
        flat[i] = orig - eps
        f_minus = float(f(flat.reshape(x.shape)))
        flat[i] = orig
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise NumericError("finite_diff_grad_check: f(x +/- eps) is non-finite")
        numeric = (f_plus - f_minus) / (2.0 * eps)
        a = analytic.flat[i]
        err = abs(a - numeric) / max(1.0, abs(a))
        worst = max(worst, err)
    return worst
