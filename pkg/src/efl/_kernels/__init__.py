"""Hot-loop kernels with two interchangeable backends.

The grid sweeps dominate runtime, so their inner loops exist twice: a
numba-jitted backend (default when numba imports) and a pure-numpy
vectorized backend. Select with the ``EFL_BACKEND`` environment variable
("numba" or "numpy") or programmatically via :func:`use_backend`. Both
backends return identical arrays; ``benchmarks/bench_backends.py``
compares their throughput.
"""

import os

import numpy as np

from . import np_backend

try:
    from . import nb_backend

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb_backend = None
    _HAVE_NUMBA = False


def _initial_backend():
    env = os.environ.get("EFL_BACKEND", "").strip().lower()
    if env in ("", "auto"):
        return "numba" if _HAVE_NUMBA else "numpy"
    if env == "numpy":
        return "numpy"
    if env == "numba":
        if not _HAVE_NUMBA:
            raise RuntimeError("EFL_BACKEND=numba but numba is not importable")
        return "numba"
    raise RuntimeError(f"EFL_BACKEND must be 'numba' or 'numpy', got {env!r}")


_ACTIVE = _initial_backend()


def active_backend():
    """Name of the backend currently answering kernel calls."""
    return _ACTIVE


def use_backend(name):
    """Switch backends at runtime (used by tests and the benchmark)."""
    global _ACTIVE
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    _ACTIVE = name


def _mod():
    return nb_backend if _ACTIVE == "numba" else np_backend


def compositions(q, r):
    return _mod().compositions(q, r)


def extremal_prefs(lengths, eps):
    lengths = np.ascontiguousarray(lengths, dtype=np.float64)
    eps = np.ascontiguousarray(eps, dtype=np.float64)
    return _mod().extremal_prefs(lengths, eps)


def tile_values(lengths, xp, fp):
    lengths = np.ascontiguousarray(lengths, dtype=np.float64)
    xp = np.ascontiguousarray(xp, dtype=np.float64)
    fp = np.ascontiguousarray(fp, dtype=np.float64)
    return _mod().tile_values(lengths, xp, fp)


def square_matching_mask(adj):
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    return _mod().square_matching_mask(adj)


def secretive_mask(adj):
    """Rows where dropping any single column still lets all left vertices match.

    adj: bool (N, r-1, r). For each excluded column i the (r-1)-player side
    must match perfectly onto the remaining r-1 columns.
    """
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    n, m, r = adj.shape
    if m != r - 1:
        raise ValueError("secretive sweep needs one player fewer than tiles")
    ok = np.ones(n, dtype=np.bool_)
    cols = np.arange(r)
    for i in range(r):
        keep = cols != i
        ok &= square_matching_mask(adj[:, :, keep])
        if not ok.any():
            break
    return ok


def expelled_mask(adj):
    """Rows where dropping any single left vertex leaves a perfect matching.

    adj: bool (N, r+1, r). For each excluded player j the remaining r
    players must match perfectly onto all r columns.
    """
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    n, m, r = adj.shape
    if m != r + 1:
        raise ValueError("expelled sweep needs one player more than tiles")
    ok = np.ones(n, dtype=np.bool_)
    rows = np.arange(m)
    for j in range(m):
        keep = rows != j
        ok &= square_matching_mask(adj[:, keep, :])
        if not ok.any():
            break
    return ok
