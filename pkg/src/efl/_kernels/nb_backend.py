"""Numba-jitted twins of the numpy kernels (per-point loops, nogil)."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _comp_count(q, r):
    # C(q + r - 1, r - 1) by the multiplicative formula, exact in int64.
    n = q + r - 1
    k = r - 1
    out = 1
    for i in range(1, k + 1):
        out = out * (n - k + i) // i
    return out


@njit(cache=True, nogil=True)
def compositions(q, r):
    total = _comp_count(q, r)
    out = np.empty((total, r), dtype=np.int64)
    state = np.zeros(r, dtype=np.int64)
    state[r - 1] = q
    idx = 0
    while True:
        for c in range(r):
            out[idx, c] = state[c]
        idx += 1
        if idx == total:
            break
        # lexicographic successor: move one unit leftward from the tail
        if state[r - 1] > 0:
            state[r - 2] += 1
            state[r - 1] -= 1
        else:
            j = r - 2
            while state[j] == 0:
                j -= 1
            v = state[j]
            state[j] = 0
            state[j - 1] += 1
            state[r - 1] = v - 1
    return out


@njit(cache=True, nogil=True)
def extremal_prefs(lengths, eps):
    n, r = lengths.shape
    k_eps = r - 2
    thresholds = np.empty(k_eps, dtype=np.float64)
    for k in range(k_eps):
        thresholds[k] = 1.0 - eps[k]
    out = np.zeros((n, r, r), dtype=np.bool_)
    y = np.empty(r, dtype=np.float64)
    for p in range(n):
        for j in range(r):
            for c in range(r):
                y[c] = lengths[p, (c + j) % r]
            interior = False
            s = 0.0
            ok_before = True
            for k in range(k_eps):
                s += y[k]
                if s > thresholds[k]:
                    interior = True
                if s >= thresholds[k] and ok_before:
                    out[p, j, (k + j) % r] = True
                if not (s <= thresholds[k]):
                    ok_before = False
            if not interior:
                if y[r - 2] >= y[r - 1]:
                    out[p, j, (r - 2 + j) % r] = True
                if y[r - 1] >= y[r - 2]:
                    out[p, j, (r - 1 + j) % r] = True
    return out


@njit(cache=True, nogil=True)
def tile_values(lengths, xp, fp):
    n, r = lengths.shape
    m = len(xp)
    vals = np.empty((n, r), dtype=np.float64)
    for p in range(n):
        cum = 0.0
        prev = 0.0
        for c in range(r):
            cum += lengths[p, c]
            # rightmost j with xp[j] <= cum, clamped to a valid segment
            lo = 0
            hi = m
            while lo < hi:
                mid = (lo + hi) // 2
                if xp[mid] <= cum:
                    lo = mid + 1
                else:
                    hi = mid
            j = lo - 1
            if j < 0:
                j = 0
            elif j > m - 2:
                j = m - 2
            slope = (fp[j + 1] - fp[j]) / (xp[j + 1] - xp[j])
            cdf = fp[j] + slope * (cum - xp[j])
            vals[p, c] = cdf - prev
            prev = cdf
    return vals


@njit(cache=True, nogil=True)
def _augment(adj2, row, match_col, seen, row_stack, col_ptr):
    r = adj2.shape[1]
    depth = 0
    row_stack[0] = row
    col_ptr[0] = -1
    while depth >= 0:
        u = row_stack[depth]
        v = col_ptr[depth] + 1
        descended = False
        while v < r:
            if adj2[u, v] and not seen[v]:
                seen[v] = True
                col_ptr[depth] = v
                owner = match_col[v]
                if owner < 0:
                    match_col[v] = u
                    depth -= 1
                    while depth >= 0:
                        match_col[col_ptr[depth]] = row_stack[depth]
                        depth -= 1
                    return True
                depth += 1
                row_stack[depth] = owner
                col_ptr[depth] = -1
                descended = True
                break
            v += 1
        if not descended:
            depth -= 1
    return False


@njit(cache=True, nogil=True)
def square_matching_mask(adj):
    n, m, r = adj.shape
    out = np.zeros(n, dtype=np.bool_)
    match_col = np.empty(r, dtype=np.int64)
    seen = np.empty(r, dtype=np.bool_)
    row_stack = np.empty(m + 1, dtype=np.int64)
    col_ptr = np.empty(m + 1, dtype=np.int64)
    for p in range(n):
        match_col[:] = -1
        ok = True
        for u in range(m):
            seen[:] = False
            if not _augment(adj[p], u, match_col, seen, row_stack, col_ptr):
                ok = False
                break
        out[p] = ok
    return out
