"""Pure-Python evaluation kernel, used when the compiled one is absent.

This is the reference implementation of smatvplan._kernel.evaluate; the
two must stay in lock step, including the order in which offsets and
noise powers are accumulated. The compiled kernel is just this, loop for
loop, without interpreter overhead.

Array layout (all C-contiguous, built by engine.compile_network):

* rows: one per (output, line), row r spans base[row_ptr[r]:row_ptr[r+1]]
* per-row knob refs: kidx[kptr[r]:kptr[r+1]] index into knob_vals
* stages: active transfers, same slicing via stage_ptr / skptr
* rs_idx[rs_ptr[r]:rs_ptr[r+1]] lists the stages feeding row r's noise
* row_override / stage_override replace the source spectrum with a flat
  level where not NaN (level sweeps use this)

Outputs: per-row min level, max level and min C/N (+inf when the row has
no C/N constraint, i.e. has_cnr is 0).
"""

from __future__ import annotations

import numpy as np


def evaluate(
    row_ptr,
    base,
    src,
    kptr,
    kidx,
    has_cnr,
    src_cn_pow,
    rs_ptr,
    rs_idx,
    stage_ptr,
    stage_base,
    stage_src,
    skptr,
    skidx,
    stage_nf,
    knob_vals,
    row_override,
    stage_override,
    out_min,
    out_max,
    out_cnr,
):
    n_rows = row_ptr.shape[0] - 1
    n_stages = stage_ptr.shape[0] - 1

    # Noise power contributed by each active stage at each grid point:
    # 10^(-(u_in - nf)/10), with u_in the level at the stage input.
    stage_noise = np.empty(stage_base.shape[0], dtype=np.float64)
    for s in range(n_stages):
        a, b = stage_ptr[s], stage_ptr[s + 1]
        off = 0.0
        for j in range(skptr[s], skptr[s + 1]):
            off += knob_vals[skidx[j]]
        if np.isnan(stage_override[s]):
            level = stage_src[a:b] + stage_base[a:b] + off
        else:
            level = stage_override[s] + stage_base[a:b] + off
        stage_noise[a:b] = 10.0 ** (-(level - stage_nf[s]) / 10.0)

    for r in range(n_rows):
        a, b = row_ptr[r], row_ptr[r + 1]
        off = 0.0
        for j in range(kptr[r], kptr[r + 1]):
            off += knob_vals[kidx[j]]
        if np.isnan(row_override[r]):
            level = src[a:b] + base[a:b] + off
        else:
            level = row_override[r] + base[a:b] + off
        out_min[r] = level.min()
        out_max[r] = level.max()
        if has_cnr[r]:
            noise = np.full(b - a, src_cn_pow[r])
            for j in range(rs_ptr[r], rs_ptr[r + 1]):
                s = rs_idx[j]
                noise += stage_noise[stage_ptr[s] : stage_ptr[s + 1]]
            out_cnr[r] = -10.0 * np.log10(noise.max())
        else:
            out_cnr[r] = np.inf
