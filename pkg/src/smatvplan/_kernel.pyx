# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernel.

smatvplan._kernel_py is the reference implementation and documents the
array layout; this file mirrors it loop for loop. Keep accumulation
order identical in both so results agree to floating-point noise.
"""

from libc.math cimport INFINITY, isnan, log10, pow

import numpy as np


def evaluate(
    const long long[::1] row_ptr,
    const double[::1] base,
    const double[::1] src,
    const long long[::1] kptr,
    const long long[::1] kidx,
    const unsigned char[::1] has_cnr,
    const double[::1] src_cn_pow,
    const long long[::1] rs_ptr,
    const long long[::1] rs_idx,
    const long long[::1] stage_ptr,
    const double[::1] stage_base,
    const double[::1] stage_src,
    const long long[::1] skptr,
    const long long[::1] skidx,
    const double[::1] stage_nf,
    const double[::1] knob_vals,
    const double[::1] row_override,
    const double[::1] stage_override,
    double[::1] out_min,
    double[::1] out_max,
    double[::1] out_cnr,
):
    cdef Py_ssize_t n_rows = row_ptr.shape[0] - 1
    cdef Py_ssize_t n_stages = stage_ptr.shape[0] - 1
    cdef double[::1] stage_noise = np.empty(stage_base.shape[0], dtype=np.float64)
    cdef Py_ssize_t r, s, i, j, k, a, b
    cdef double off, lvl, mn, mx, flat_src, noise, noise_max

    for s in range(n_stages):
        a = stage_ptr[s]
        b = stage_ptr[s + 1]
        off = 0.0
        for j in range(skptr[s], skptr[s + 1]):
            off += knob_vals[skidx[j]]
        if isnan(stage_override[s]):
            for i in range(a, b):
                lvl = stage_src[i] + stage_base[i] + off
                stage_noise[i] = pow(10.0, -(lvl - stage_nf[s]) / 10.0)
        else:
            flat_src = stage_override[s]
            for i in range(a, b):
                lvl = flat_src + stage_base[i] + off
                stage_noise[i] = pow(10.0, -(lvl - stage_nf[s]) / 10.0)

    for r in range(n_rows):
        a = row_ptr[r]
        b = row_ptr[r + 1]
        off = 0.0
        for j in range(kptr[r], kptr[r + 1]):
            off += knob_vals[kidx[j]]
        mn = INFINITY
        mx = -INFINITY
        if isnan(row_override[r]):
            for i in range(a, b):
                lvl = src[i] + base[i] + off
                if lvl < mn:
                    mn = lvl
                if lvl > mx:
                    mx = lvl
        else:
            flat_src = row_override[r]
            for i in range(a, b):
                lvl = flat_src + base[i] + off
                if lvl < mn:
                    mn = lvl
                if lvl > mx:
                    mx = lvl
        out_min[r] = mn
        out_max[r] = mx
        if has_cnr[r]:
            noise_max = 0.0
            for k in range(b - a):
                noise = src_cn_pow[r]
                for j in range(rs_ptr[r], rs_ptr[r + 1]):
                    s = rs_idx[j]
                    noise += stage_noise[stage_ptr[s] + k]
                if noise > noise_max:
                    noise_max = noise
            out_cnr[r] = -10.0 * log10(noise_max)
        else:
            out_cnr[r] = INFINITY
