"""Pure-numpy fallbacks for the compiled kernels in ``_native``.

Same contracts as the Cython versions: replicate-edge borders, float64 in
and out. The convolution loops over kernel taps (one vectorized
multiply-add per tap) instead of over pixels.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv2d_direct(img: np.ndarray, kern: np.ndarray) -> np.ndarray:
    h, w = img.shape
    kh, kw = kern.shape
    my, mx = kh // 2, kw // 2
    padded = np.pad(img, ((my, kh - 1 - my), (mx, kw - 1 - mx)), mode="edge")
    out = np.zeros((h, w), dtype=np.float64)
    # convolution flips the kernel relative to the image patch
    for u in range(kh):
        for v in range(kw):
            kv = kern[u, v]
            if kv == 0.0:
                continue
            i0 = kh - 1 - u
            j0 = kw - 1 - v
            out += kv * padded[i0 : i0 + h, j0 : j0 + w]
    return out


def min_filter_rows(img: np.ndarray, half: int) -> np.ndarray:
    if half <= 0:
        return img.copy()
    padded = np.pad(img, ((0, 0), (half, half)), mode="edge")
    return sliding_window_view(padded, 2 * half + 1, axis=1).min(axis=-1)


def min_filter_cols(img: np.ndarray, half: int) -> np.ndarray:
    if half <= 0:
        return img.copy()
    padded = np.pad(img, ((half, half), (0, 0)), mode="edge")
    return sliding_window_view(padded, 2 * half + 1, axis=0).min(axis=-1)
