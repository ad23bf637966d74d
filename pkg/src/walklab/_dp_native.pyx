# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled convolution kernel for the walk DP hot loop."""

import numpy as np


def convolve(double[::1] cur, double[::1] pmf):
    """Full convolution of cur with pmf, same contract as np.convolve."""
    cdef Py_ssize_t nc = cur.shape[0]
    cdef Py_ssize_t np_ = pmf.shape[0]
    out_arr = np.zeros(nc + np_ - 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double w
    for i in range(nc):
        w = cur[i]
        if w == 0.0:
            continue
        for j in range(np_):
            out[i + j] += w * pmf[j]
    return out_arr
