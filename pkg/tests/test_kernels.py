"""The two kernel backends must agree bit for bit, and match brute force."""

import itertools
from math import comb

import numpy as np
import pytest

from efl import _kernels
from efl._kernels import nb_backend, np_backend


def random_simplex_rows(rng, n, r):
    return rng.dirichlet(np.ones(r), size=n)


@pytest.mark.parametrize("q,r", [(5, 2), (7, 3), (6, 4), (5, 5), (12, 3)])
def test_compositions_backends_agree(q, r):
    a = np_backend.compositions(q, r)
    b = nb_backend.compositions(q, r)
    assert a.shape == (comb(q + r - 1, r - 1), r)
    assert np.array_equal(a, b)
    assert np.all(a.sum(axis=1) == q)
    rows = [tuple(row) for row in a]
    assert rows == sorted(rows)
    assert len(set(rows)) == len(rows)


def test_extremal_prefs_backends_agree(rng):
    for r, eps in ((3, (0.2,)), (4, (0.2, 0.1)), (5, (0.19, 0.15, 0.11))):
        rows = np.vstack(
            [random_simplex_rows(rng, 300, r), np_backend.compositions(8, r) / 8.0]
        )
        e = np.asarray(eps)
        assert np.array_equal(np_backend.extremal_prefs(rows, e), nb_backend.extremal_prefs(rows, e))


def test_tile_values_backends_agree(rng):
    xp = np.array([0.0, 0.3, 0.55, 1.0])
    masses = np.array([0.2, 0.5, 0.3])
    fp = np.concatenate([[0.0], np.cumsum(masses)])
    rows = random_simplex_rows(rng, 500, 4)
    a = np_backend.tile_values(rows, xp, fp)
    b = nb_backend.tile_values(rows, xp, fp)
    assert np.array_equal(a, b)
    assert np.allclose(a.sum(axis=1), 1.0, atol=1e-9)


def _brute_square(adj_row):
    r = adj_row.shape[0]
    return any(
        all(adj_row[i, p[i]] for i in range(r)) for p in itertools.permutations(range(r))
    )


def test_square_matching_backends_and_bruteforce(rng):
    for r in (2, 3, 4, 5):
        adj = rng.random((120, r, r)) < 0.45
        a = np_backend.square_matching_mask(adj)
        b = nb_backend.square_matching_mask(adj)
        assert np.array_equal(a, b)
        brute = np.array([_brute_square(adj[k]) for k in range(adj.shape[0])])
        assert np.array_equal(a, brute)


def _brute_secretive(adj_row):
    m, r = adj_row.shape
    for i in range(r):
        cols = [c for c in range(r) if c != i]
        if not any(
            all(adj_row[u, p[u]] for u in range(m))
            for p in itertools.permutations(cols)
        ):
            return False
    return True


def _brute_expelled(adj_row):
    m, r = adj_row.shape
    for j in range(m):
        rows = [u for u in range(m) if u != j]
        if not any(
            all(adj_row[rows[k], p[k]] for k in range(r))
            for p in itertools.permutations(range(r))
        ):
            return False
    return True


def test_exclusion_masks_match_bruteforce(rng):
    for r in (2, 3, 4):
        sec = rng.random((80, r - 1, r)) < 0.7
        got = _kernels.secretive_mask(sec)
        brute = np.array([_brute_secretive(sec[k]) for k in range(sec.shape[0])])
        assert np.array_equal(got, brute)
        exp = rng.random((80, r + 1, r)) < 0.7
        got = _kernels.expelled_mask(exp)
        brute = np.array([_brute_expelled(exp[k]) for k in range(exp.shape[0])])
        assert np.array_equal(got, brute)


def test_backend_switching(rng):
    before = _kernels.active_backend()
    try:
        _kernels.use_backend("numpy")
        a = _kernels.compositions(6, 3)
        _kernels.use_backend("numba")
        b = _kernels.compositions(6, 3)
        assert np.array_equal(a, b)
        with pytest.raises(ValueError):
            _kernels.use_backend("fortran")
    finally:
        _kernels.use_backend(before)
