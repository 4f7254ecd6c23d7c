"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when
``ALPHAMOD_PURE_PYTHON=1`` is set, the numpy fallback takes over.  Both
expose ``smooth_step``, ``interval_windows``, ``gather_blocks`` and
``row_power_sums`` with identical semantics.
"""

import os

from . import _kernels_py

PURE_ENV = "ALPHAMOD_PURE_PYTHON"


def _load():
    if os.environ.get(PURE_ENV, "").strip() not in ("", "0"):
        return _kernels_py, "python"
    try:
        from . import _ckernels
    except ImportError:
        return _kernels_py, "python"
    return _ckernels, "cython"


_impl, BACKEND = _load()

smooth_step = _impl.smooth_step
interval_windows = _impl.interval_windows
gather_blocks = _impl.gather_blocks
row_power_sums = _impl.row_power_sums


def backend_module(name: str):
    """Return the kernel module for ``"python"`` or ``"cython"`` explicitly."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
