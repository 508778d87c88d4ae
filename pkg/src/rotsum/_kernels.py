"""Numba kernels for orbit sums.

Every kernel iterates the same additive recurrence (x += alpha with one
conditional subtraction) and accumulates with the same compensated-summation
sequence, so the series, final-value, and batch entry points are bit-identical
where they overlap.  fastmath stays off: it would re-associate the Kahan
steps away and break reproducibility.
"""

from __future__ import annotations

import os

# Allow oversubscribed worker counts (the worker flag must accept 1..8 even
# on small machines; results never depend on it).  Must be set before numba
# initializes its threading layer.
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(16, os.cpu_count() or 1)))

import numpy as np
from numba import njit, prange, set_num_threads

OBS_SAWTOOTH = 0
OBS_INDICATOR = 1


def apply_workers(workers: int | None) -> None:
    if workers is not None:
        limit = int(os.environ["NUMBA_NUM_THREADS"])
        set_num_threads(max(1, min(workers, limit)))


@njit(cache=True)
def series_at_times(x0, alpha, times, kind, gamma):
    """S_t at the sorted positive checkpoint times; returns (values, evals)."""
    m = times.shape[0]
    out = np.empty(m)
    evals = 0
    x = x0
    s = 0.0
    c = 0.0
    idx = 0
    t = 0
    t_max = times[m - 1]
    while t < t_max:
        if kind == OBS_SAWTOOTH:
            term = x - 0.5
        else:
            term = (1.0 - gamma) if x < gamma else -gamma
        y = term - c
        tot = s + y
        c = (tot - s) - y
        s = tot
        evals += 1
        x += alpha
        if x >= 1.0:
            x -= 1.0
        t += 1
        if t == times[idx]:
            out[idx] = s
            idx += 1
    return out, evals


@njit(parallel=True, cache=True)
def batch_final(x0s, alphas, ts, kind, gamma):
    """S_{ts[i]}(x0s[i], alphas[i]) for every sample; returns (values, evals)."""
    n = x0s.shape[0]
    out = np.empty(n)
    counts = np.empty(n, dtype=np.int64)
    for i in prange(n):
        x = x0s[i]
        a = alphas[i]
        s = 0.0
        c = 0.0
        evals = 0
        for _ in range(ts[i]):
            if kind == OBS_SAWTOOTH:
                term = x - 0.5
            else:
                term = (1.0 - gamma) if x < gamma else -gamma
            y = term - c
            tot = s + y
            c = (tot - s) - y
            s = tot
            evals += 1
            x += a
            if x >= 1.0:
                x -= 1.0
        out[i] = s
        counts[i] = evals
    return out, counts


@njit(parallel=True, cache=True)
def batch_position_sum(x0s, alphas, T):
    """Per-orbit compensated sums of the raw positions sum_{k<T} x_k."""
    n = x0s.shape[0]
    out = np.empty(n)
    counts = np.empty(n, dtype=np.int64)
    for i in prange(n):
        x = x0s[i]
        a = alphas[i]
        s = 0.0
        c = 0.0
        evals = 0
        for _ in range(T):
            y = x - c
            tot = s + y
            c = (tot - s) - y
            s = tot
            evals += 1
            x += a
            if x >= 1.0:
                x -= 1.0
        out[i] = s
        counts[i] = evals
    return out, counts
