"""Vectorized numpy implementations of the sweep kernels.

Every function here has a numba twin in ``nb_backend`` with identical
signature and bit-identical output (same arithmetic, same evaluation
order), so the two backends are interchangeable.
"""

import numpy as np


def compositions(q, r):
    """All nonnegative integer r-tuples summing to q, lexicographically ascending.

    Returns an int64 array of shape (C(q+r-1, r-1), r). These are the
    barycentric lattice points of the simplex with denominator q.
    """
    if r == 1:
        return np.array([[q]], dtype=np.int64)
    blocks = []
    for k in range(q + 1):
        sub = compositions(q - k, r - 1)
        head = np.full((sub.shape[0], 1), k, dtype=np.int64)
        blocks.append(np.hstack([head, sub]))
    return np.vstack(blocks)


def extremal_prefs(lengths, eps):
    """Preference table of the nested-threshold construction on a batch of cuts.

    lengths: (N, r) float64 rows on the simplex.
    eps: (r-2,) strictly descending positives below 1/r.

    Returns bool (N, r, r) indexed [point, player, tile] (0-based). Player
    j's sets are the player-0 sets evaluated on the coordinates rotated so
    that position j comes first, with tile indices rotated back.

    Player 0 on a row y: tile k (k < r-2) is preferred when the prefix sum
    S_{k+1} reaches 1-eps_k while no earlier prefix exceeded its threshold;
    the last two tiles are preferred when the corresponding coordinate is
    the (weakly) larger of the final pair and the row is outside the
    interior of the threshold region, i.e. no prefix sum is strictly above
    its threshold.
    """
    n, r = lengths.shape
    thresholds = 1.0 - np.asarray(eps, dtype=np.float64)
    out = np.zeros((n, r, r), dtype=np.bool_)
    for j in range(r):
        y = np.roll(lengths, -j, axis=1)
        prefix = np.cumsum(y, axis=1)[:, : r - 2]
        ge = prefix >= thresholds
        below = prefix <= thresholds
        ok_before = np.ones((n, r - 2), dtype=np.bool_)
        if r > 3:
            ok_before[:, 1:] = np.logical_and.accumulate(below[:, :-1], axis=1)
        rot = np.empty((n, r), dtype=np.bool_)
        rot[:, : r - 2] = ge & ok_before
        interior = (prefix > thresholds).any(axis=1)
        rot[:, r - 2] = (y[:, r - 2] >= y[:, r - 1]) & ~interior
        rot[:, r - 1] = (y[:, r - 1] >= y[:, r - 2]) & ~interior
        out[:, j, :] = np.roll(rot, j, axis=1)
    return out


def tile_values(lengths, xp, fp):
    """Per-tile value of each cut row under a piecewise-linear cumulative fp(xp).

    lengths: (N, r); xp, fp: breakpoint grid of the cumulative value,
    xp[0] = 0, xp[-1] = 1. Returns float64 (N, r).
    """
    cum = np.cumsum(lengths, axis=1)
    j = np.searchsorted(xp, cum, side="right") - 1
    np.clip(j, 0, len(xp) - 2, out=j)
    x0 = xp[j]
    f0 = fp[j]
    slope = (fp[j + 1] - f0) / (xp[j + 1] - x0)
    cdf = f0 + slope * (cum - x0)
    vals = np.empty_like(cdf)
    vals[:, 0] = cdf[:, 0]
    vals[:, 1:] = cdf[:, 1:] - cdf[:, :-1]
    return vals


def square_matching_mask(adj):
    """Which rows of a batch of square bipartite graphs admit a perfect matching.

    adj: bool (N, r, r) [point, left vertex, right vertex]. Returns bool (N,).

    Subset DP: reach[mask] = the first popcount(mask) left vertices can be
    matched exactly onto the right subset ``mask``.
    """
    n, m, r = adj.shape
    if m != r:
        raise ValueError("square_matching_mask needs equally sized sides")
    full = 1 << r
    reach = np.zeros((n, full), dtype=np.bool_)
    reach[:, 0] = True
    popcount = np.array([bin(mask).count("1") for mask in range(full)])
    for mask in range(1, full):
        k = popcount[mask] - 1
        acc = np.zeros(n, dtype=np.bool_)
        rest = mask
        while rest:
            bit = rest & (-rest)
            v = bit.bit_length() - 1
            acc |= reach[:, mask ^ bit] & adj[:, k, v]
            rest ^= bit
        reach[:, mask] = acc
    return reach[:, full - 1]
