"""Pure-numpy score kernels (fallback when the compiled extension is absent).

Both backends clamp the Phi arguments to +-40 before evaluation and use a
fixed reduction order, so results are reproducible run to run.
"""

import numpy as np
from scipy.special import ndtr

BACKEND_NAME = "numpy"

_CLAMP = 40.0
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _z(scores, c, h):
    return np.clip((c - scores) / h, -_CLAMP, _CLAMP)


def smooth_f_raw(X, Y, omega, c, pi, h):
    """Minimization-form data term: pi*mean(Phi(zx)) - (1-pi)*mean(Phi(zy))."""
    zx = _z(X @ omega, c, h)
    zy = _z(Y @ omega, c, h)
    return float(pi * ndtr(zx).mean() - (1.0 - pi) * ndtr(zy).mean())


def smooth_grad_raw(X, Y, omega, c, pi, h):
    """Analytic gradient of smooth_f_raw; last coordinate is d/dc."""
    n1, n0 = X.shape[0], Y.shape[0]
    zx = _z(X @ omega, c, h)
    zy = _z(Y @ omega, c, h)
    phix = np.exp(-0.5 * zx * zx) * _INV_SQRT_2PI
    phiy = np.exp(-0.5 * zy * zy) * _INV_SQRT_2PI
    ax = pi / (n1 * h)
    ay = (1.0 - pi) / (n0 * h)
    grad = np.empty(X.shape[1] + 1)
    grad[:-1] = -ax * (phix @ X) + ay * (phiy @ Y)
    grad[-1] = ax * phix.sum() - ay * phiy.sum()
    return grad
