"""Kernel backend selection.

The compiled extension is preferred when importable; ``OCCLUMASK_BACKEND``
overrides the choice ("cython", "python", or "auto"). Both backends share
the exact same function contracts, so everything above this module is
backend-agnostic.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_requested = os.environ.get("OCCLUMASK_BACKEND", "auto").strip().lower()

_impl = None
if _requested in ("auto", "cython", "native"):
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested != "auto":
            raise ImportError(
                "OCCLUMASK_BACKEND=%s but the compiled extension is not "
                "available; build it or unset the variable" % _requested
            )
elif _requested != "python":
    raise ValueError("unknown OCCLUMASK_BACKEND value: %r" % _requested)

BACKEND = "cython" if _impl is not None else "python"
_mod = _impl if _impl is not None else _kernels_py


def active_backend() -> str:
    """Name of the kernel backend in use ("cython" or "python")."""
    return BACKEND


def _c(arr: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(arr, dtype=np.float64)


def conv2d_direct(img: np.ndarray, kern: np.ndarray) -> np.ndarray:
    return np.asarray(_mod.conv2d_direct(_c(img), _c(kern)))


def min_filter_rows(img: np.ndarray, half: int) -> np.ndarray:
    return np.asarray(_mod.min_filter_rows(_c(img), int(half)))


def min_filter_cols(img: np.ndarray, half: int) -> np.ndarray:
    return np.asarray(_mod.min_filter_cols(_c(img), int(half)))
