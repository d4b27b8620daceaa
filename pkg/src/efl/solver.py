"""Grid search for envy-free divisions and matching-family certificates.

The sweep enumerates every barycentric lattice point of the cut simplex
with denominator q, tests each cut for a perfect matching between players
and their preferred tiles, clusters the hits, and enumerates all envy-free
allocations at each cluster representative. The secretive and expelled
verifiers check the stronger any-exclusion matching families at a single
cut; ``find_certified_cut`` sweeps for the first cut where they hold.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Cut, Division, InputError, divisions_equal, project_to_simplex
from .graphs import build_graph, enumerate_perfect_matchings


@dataclass(frozen=True)
class SearchParams:
    """Sweep configuration: lattice denominator, cluster radius, refinement."""

    grid_denominator: int
    dedup_tol: float | None = None
    refine_levels: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.grid_denominator < 2:
            raise InputError("grid denominator must be at least 2")
        if self.dedup_tol is None:
            object.__setattr__(self, "dedup_tol", 3.0 / self.grid_denominator)
        if self.dedup_tol <= 0:
            raise InputError("dedup_tol must be positive")
        if self.refine_levels < 0:
            raise InputError("refine_levels must be nonnegative")
        if self.threads < 1:
            raise InputError("threads must be at least 1")


@dataclass(frozen=True)
class BijectionFamily:
    """One matching per possible exclusion, certifying a secretive/expelled cut.

    ``excluded[k]`` is the withheld tile (secretive) or dropped player
    (expelled) of member k; ``maps[k]`` lists its (player, tile) pairs.
    """

    mode: str
    excluded: tuple
    maps: tuple

    def map_for(self, excluded_index):
        for e, m in zip(self.excluded, self.maps):
            if e == excluded_index:
                return dict(m)
        raise InputError(f"no member excludes {excluded_index}")


@dataclass(frozen=True)
class CutCluster:
    """A deduplicated envy-free cut with every allocation it admits.

    ``representative_is_hit`` records whether the mean-projected
    representative itself admitted a matching; when it does not (possible
    for non-convex hit sets) the stored cut is the member hit nearest the
    mean instead.
    """

    cut: Cut
    grid_hits: int
    allocations: tuple
    representative_is_hit: bool = True


def _batched(fn, rows, threads):
    """Apply fn to row-chunks, merging in chunk order for determinism."""
    if threads <= 1 or rows.shape[0] < 2 * threads:
        return fn(rows)
    chunks = np.array_split(rows, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate(parts)


def _envy_free_mask(oracle, lengths, threads):
    def work(rows):
        return _kernels.square_matching_mask(oracle.batch(rows))

    return _batched(work, lengths, threads)


def cluster_cuts(points, tol):
    """Leader clustering in lexicographic order with Chebyshev radius tol.

    points: float (H, r) rows. Returns a list of index arrays; each point
    joins the first cluster whose seed (first member) is within tol.
    """
    clusters = []
    seeds = []
    for idx in range(points.shape[0]):
        p = points[idx]
        for c, seed in enumerate(seeds):
            if np.max(np.abs(p - seed)) <= tol:
                clusters[c].append(idx)
                break
        else:
            seeds.append(p)
            clusters.append([idx])
    return [np.asarray(ix, dtype=np.int64) for ix in clusters]


def _local_lattice(center, denom, radius):
    """Lattice points of denominator denom within Chebyshev radius of center."""
    r = len(center)
    lo = [max(0, int(np.ceil((c - radius) * denom - 1e-9))) for c in center]
    hi = [min(denom, int(np.floor((c + radius) * denom + 1e-9))) for c in center]
    rows = []
    state = []

    def rec(pos, remaining):
        if pos == r - 1:
            if lo[pos] <= remaining <= hi[pos]:
                rows.append(state + [remaining])
            return
        tail_lo = sum(lo[pos + 1 :])
        tail_hi = sum(hi[pos + 1 :])
        for k in range(lo[pos], hi[pos] + 1):
            if tail_lo <= remaining - k <= tail_hi:
                state.append(k)
                rec(pos + 1, remaining - k)
                state.pop()

    rec(0, denom)
    if not rows:
        return np.empty((0, r), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64)


def _refine_representative(rep, q, levels, mask_fn):
    """Re-grid a shrinking box around rep at 5x denominator per level."""
    denom = q
    center = np.asarray(rep, dtype=np.float64)
    for _ in range(levels):
        radius = 2.0 / denom
        denom *= 5
        local = _local_lattice(center, denom, radius)
        if local.shape[0] == 0:
            break
        hits = local[mask_fn(local / float(denom))]
        if hits.shape[0] == 0:
            break
        center = np.asarray(project_to_simplex(hits.mean(axis=0) / float(denom)))
    return center


def sweep_envy_free(oracle, params):
    """Full grid sweep; returns the list of CutClusters in deterministic order."""
    if oracle.players != oracle.arity:
        raise InputError(
            f"envy-free sweep needs players == arity, got {oracle.players} != {oracle.arity}"
        )
    r = oracle.arity
    q = params.grid_denominator
    if q < r:
        raise InputError(f"grid denominator {q} below arity {r}")

    lattice = _kernels.compositions(q, r)
    lengths = lattice / float(q)
    mask = _envy_free_mask(oracle, lengths, params.threads)
    hit_rows = lengths[mask]

    def mask_fn(rows):
        return _envy_free_mask(oracle, rows, params.threads)

    clusters = []
    for member_ix in cluster_cuts(hit_rows, params.dedup_tol):
        members = hit_rows[member_ix]
        rep_vec = np.asarray(project_to_simplex(members.mean(axis=0)))
        if params.refine_levels:
            rep_vec = _refine_representative(rep_vec, q, params.refine_levels, mask_fn)
        rep_is_hit = bool(mask_fn(rep_vec[None, :])[0])
        if not rep_is_hit:
            # Mean of a non-convex hit set can miss; fall back to the
            # member closest to it so the cluster still yields divisions.
            dists = np.max(np.abs(members - rep_vec), axis=1)
            rep_vec = members[int(np.argmin(dists))]
        rep_cut = Cut(tuple(float(v) for v in rep_vec))
        allocations = enumerate_perfect_matchings(build_graph(oracle, rep_cut))
        clusters.append(
            CutCluster(
                cut=rep_cut,
                grid_hits=int(member_ix.shape[0]),
                allocations=tuple(allocations),
                representative_is_hit=rep_is_hit,
            )
        )
    return clusters


def find_envy_free_divisions(oracle, params):
    """All (representative cut, allocation) divisions found by the sweep."""
    return [
        Division(cluster.cut, alloc)
        for cluster in sweep_envy_free(oracle, params)
        for alloc in cluster.allocations
    ]


def count_distinct_divisions(divisions, tol):
    """Size of the greedy quotient of the list under divisions_equal(tol)."""
    reps = []
    for d in divisions:
        if not any(divisions_equal(d, rep, tol) for rep in reps):
            reps.append(d)
    return len(reps)


def _match_rows_to_cols(adj, allowed_cols):
    """Kuhn's algorithm on a small boolean (rows x cols) matrix.

    Returns col index per row (0-based) or None when some row is unmatched.
    """
    n_rows, n_cols = adj.shape
    match_col = [-1] * n_cols

    def augment(u, seen):
        for v in allowed_cols:
            if adj[u, v] and v not in seen:
                seen.add(v)
                if match_col[v] == -1 or augment(match_col[v], seen):
                    match_col[v] = u
                    return True
        return False

    for u in range(n_rows):
        if not augment(u, set()):
            return None
    out = [-1] * n_rows
    for v, u in enumerate(match_col):
        if u >= 0:
            out[u] = v
    return out


def verify_secretive(oracle, cut):
    """All-exclusions matching family for one player fewer than tiles.

    For each withheld tile i, the r-1 players must match within their
    preferred sets onto the remaining tiles. Returns the family of r
    bijections, or None if some exclusion admits no matching.
    """
    r = oracle.arity
    if oracle.players != r - 1:
        raise InputError(
            f"secretive setting needs {r - 1} players for {r} tiles, got {oracle.players}"
        )
    adj = oracle.batch(cut.as_array()[None, :])[0]
    excluded = []
    maps = []
    for i in range(1, r + 1):
        allowed = [v for v in range(r) if v != i - 1]
        matched = _match_rows_to_cols(adj, allowed)
        if matched is None:
            return None
        excluded.append(i)
        maps.append(tuple((u + 1, v + 1) for u, v in enumerate(matched)))
    return BijectionFamily("secretive", tuple(excluded), tuple(maps))


def verify_expelled(oracle, cut):
    """All-exclusions matching family for one player more than tiles.

    For each dropped player j, the remaining r players must perfectly
    match onto all r tiles. Returns the family of r+1 bijections or None.
    """
    r = oracle.arity
    if oracle.players != r + 1:
        raise InputError(
            f"expelled setting needs {r + 1} players for {r} tiles, got {oracle.players}"
        )
    adj = oracle.batch(cut.as_array()[None, :])[0]
    allowed = list(range(r))
    excluded = []
    maps = []
    for j in range(1, r + 2):
        rows = [u for u in range(r + 1) if u != j - 1]
        matched = _match_rows_to_cols(adj[rows], allowed)
        if matched is None:
            return None
        excluded.append(j)
        maps.append(tuple((rows[k] + 1, v + 1) for k, v in enumerate(matched)))
    return BijectionFamily("expelled", tuple(excluded), tuple(maps))


def find_certified_cut(oracle, mode, params):
    """First lattice cut (lexicographic) certifying the requested family.

    Returns (cut, family) or None when no grid point qualifies at this
    resolution.
    """
    if mode not in ("secretive", "expelled"):
        raise InputError(f"mode must be 'secretive' or 'expelled', got {mode!r}")
    r = oracle.arity
    want = r - 1 if mode == "secretive" else r + 1
    if oracle.players != want:
        raise InputError(f"{mode} setting needs {want} players, got {oracle.players}")
    q = params.grid_denominator
    if q < r:
        raise InputError(f"grid denominator {q} below arity {r}")
    kernel = _kernels.secretive_mask if mode == "secretive" else _kernels.expelled_mask

    def work(rows):
        return kernel(oracle.batch(rows))

    lattice = _kernels.compositions(q, r)
    mask = _batched(work, lattice / float(q), params.threads)
    hits = np.flatnonzero(mask)
    if hits.size == 0:
        return None
    cut = Cut(tuple(float(v) for v in lattice[hits[0]] / float(q)))
    family = verify_secretive(oracle, cut) if mode == "secretive" else verify_expelled(oracle, cut)
    assert family is not None
    return cut, family
