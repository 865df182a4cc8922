"""Backend selection for the score kernels.

The compiled extension is used when importable; set
YOUDEN_NAPG_BACKEND=numpy (or =compiled) to force a backend.
"""

import os

from . import _kernels_numpy

_requested = os.environ.get("YOUDEN_NAPG_BACKEND", "").strip().lower()

if _requested == "numpy":
    _impl = _kernels_numpy
else:
    try:
        from . import _scorekernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "YOUDEN_NAPG_BACKEND=compiled but the extension is not built"
            )
        _impl = _kernels_numpy

BACKEND = _impl.BACKEND_NAME
smooth_f_raw = _impl.smooth_f_raw
smooth_grad_raw = _impl.smooth_grad_raw
