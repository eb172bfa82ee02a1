# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: direct 2-D convolution and separable min filters.

Both use replicate-edge boundary handling (indices clamped into the grid).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def conv2d_direct(double[:, ::1] img, double[:, ::1] kern):
    """True convolution of ``img`` with ``kern``, same output size."""
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t kh = kern.shape[0], kw = kern.shape[1]
    cdef Py_ssize_t my = kh // 2, mx = kw // 2
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, u, v, si, sj
    cdef double acc, kv
    with nogil:
        for i in range(h):
            for j in range(w):
                acc = 0.0
                for u in range(kh):
                    si = i - (u - my)
                    if si < 0:
                        si = 0
                    elif si >= h:
                        si = h - 1
                    for v in range(kw):
                        kv = kern[u, v]
                        if kv == 0.0:
                            continue
                        sj = j - (v - mx)
                        if sj < 0:
                            sj = 0
                        elif sj >= w:
                            sj = w - 1
                        acc += kv * img[si, sj]
                out[i, j] = acc
    return out_arr


def min_filter_rows(double[:, ::1] img, Py_ssize_t half):
    """Sliding minimum of width ``2*half + 1`` along each row."""
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k, lo, hi
    cdef double m, v
    if half <= 0:
        out_arr[...] = np.asarray(img)
        return out_arr
    with nogil:
        for i in range(h):
            for j in range(w):
                lo = j - half
                if lo < 0:
                    lo = 0
                hi = j + half
                if hi >= w:
                    hi = w - 1
                m = img[i, lo]
                for k in range(lo + 1, hi + 1):
                    v = img[i, k]
                    if v < m:
                        m = v
                out[i, j] = m
    return out_arr


def min_filter_cols(double[:, ::1] img, Py_ssize_t half):
    """Sliding minimum of width ``2*half + 1`` along each column."""
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k, lo, hi
    cdef double m, v
    if half <= 0:
        out_arr[...] = np.asarray(img)
        return out_arr
    with nogil:
        for j in range(w):
            for i in range(h):
                lo = i - half
                if lo < 0:
                    lo = 0
                hi = i + half
                if hi >= h:
                    hi = h - 1
                m = img[lo, j]
                for k in range(lo + 1, hi + 1):
                    v = img[k, j]
                    if v < m:
                        m = v
                out[i, j] = m
    return out_arr
