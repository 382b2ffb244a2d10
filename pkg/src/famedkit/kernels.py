"""Backend selection for the numerical kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation is used.  Set ``FAMEDKIT_PURE_PYTHON=1`` to force the latter.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("FAMEDKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "compiled"

sin_sum = _impl.sin_sum
coupled_sum2 = _impl.coupled_sum2
coupled_sum3 = _impl.coupled_sum3


def set_threads(n: int) -> None:
    """OpenMP thread count of the compiled kernels; ignored by the numpy backend."""
    if n < 1:
        raise ValueError("thread count must be positive")
    if BACKEND == "compiled":
        _impl.set_threads(n)


__all__ = ["BACKEND", "sin_sum", "coupled_sum2", "coupled_sum3", "set_threads"]
