"""Hot-kernel dispatch.

The compiled extension is preferred when it imported cleanly; the numpy
fallback otherwise.  ``SPARSELU_BACKEND=python`` or
``SPARSELU_BACKEND=compiled`` forces a lane (the latter raises if the
extension is missing).  The active lane is reported by ``BACKEND``.
"""

import os

_forced = os.environ.get("SPARSELU_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _py as _impl
elif _forced in ("", "compiled"):
    try:
        from . import _fast as _impl
    except ImportError:
        if _forced == "compiled":
            raise
        from . import _py as _impl
else:
    raise ValueError(
        f"SPARSELU_BACKEND must be 'python' or 'compiled', got {_forced!r}")

BACKEND = _impl.BACKEND
fwht_rows = _impl.fwht_rows
sem_gather_dense = _impl.sem_gather_dense
sem_gather_csc = _impl.sem_gather_csc
sem_scatter_dense = _impl.sem_scatter_dense
sem_scatter_csc = _impl.sem_scatter_csc

__all__ = [
    "BACKEND",
    "fwht_rows",
    "sem_gather_dense",
    "sem_gather_csc",
    "sem_scatter_dense",
    "sem_scatter_csc",
]
