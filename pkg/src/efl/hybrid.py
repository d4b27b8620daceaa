"""Joint envy-free division and measure equipartition with boxed tiles.

For a prime number of players p the cake is cut into 2p-1 tiles, the tiles
are grouped into p boxes (sizes 1..3, at most one box of 3), and players
state preferences over box contents. A division is favourable when every
player gets a preferred box, every box carries measure 1/p, and the box
size constraints hold. The search sweeps a barycentric grid jointly over
cuts and box partitions; the coloring and chessboard-complex helpers cover
the combinatorics behind the counting bound for such divisions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from . import _kernels
from .core import Cut, InputError, project_to_simplex
from .preferences import TIE_EPS
from .solver import _local_lattice, cluster_cuts

MASS_TOL = 1e-12


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Measure:
    """Nonatomic measure on [0, 1]: piecewise-constant density, total mass 1."""

    def __init__(self, breakpoints, densities):
        bp = tuple(float(b) for b in breakpoints)
        dens = tuple(float(d) for d in densities)
        if len(bp) < 2 or bp[0] != 0.0 or bp[-1] != 1.0:
            raise InputError("measure breakpoints must run from 0.0 to 1.0")
        if any(b >= c for b, c in zip(bp, bp[1:])):
            raise InputError("measure breakpoints must be strictly increasing")
        if len(dens) != len(bp) - 1:
            raise InputError("need one density per segment")
        if any(d < 0.0 for d in dens):
            raise InputError("measure density must be nonnegative")
        masses = [d * (c - b) for d, b, c in zip(dens, bp, bp[1:])]
        total = sum(masses)
        if abs(total - 1.0) > MASS_TOL:
            raise InputError(f"measure mass is {total!r}, not 1")
        self.breakpoints = bp
        self.densities = dens
        self.xp = np.asarray(bp, dtype=np.float64)
        fp = np.concatenate([[0.0], np.cumsum(masses)])
        fp /= fp[-1]
        self.fp = fp

    @classmethod
    def uniform(cls):
        return cls((0.0, 1.0), (1.0,))

    @classmethod
    def uniform_on(cls, lo, hi):
        """Uniform on [lo, hi], zero elsewhere."""
        if not 0.0 <= lo < hi <= 1.0:
            raise InputError(f"need 0 <= lo < hi <= 1, got [{lo}, {hi}]")
        bp = [0.0, lo, hi, 1.0]
        dens = [0.0, 1.0 / (hi - lo), 0.0]
        if lo == 0.0:
            bp, dens = bp[1:], dens[1:]
        if hi == 1.0:
            bp, dens = bp[:-1], dens[:-1]
        return cls(bp, dens)

    def tile_masses(self, lengths):
        """Per-tile masses for a batch of cuts, float64 (N, tiles)."""
        return _kernels.tile_values(np.atleast_2d(lengths), self.xp, self.fp)

    def cum(self, t):
        return float(self.tile_masses(np.array([[t, 1.0 - t]]))[0, 0])

    def value(self, a, b):
        return self.cum(b) - self.cum(a)


@dataclass(frozen=True)
class BoxAllocation:
    """Assignment of each tile to one of p boxes; entry t-1 is tile t's box.

    Valid allocations give every box 1..3 tiles with at most one box of 3;
    pass validate_sizes=False to build a deliberately invalid allocation
    (is_favourable then reports the violations instead).
    """

    assignment: tuple
    p: int
    validate_sizes: bool = True

    def __post_init__(self):
        assignment = tuple(int(v) for v in self.assignment)
        object.__setattr__(self, "assignment", assignment)
        if self.p < 1:
            raise InputError("need at least one box")
        for b in assignment:
            if not 1 <= b <= self.p:
                raise InputError(f"box index {b} out of range 1..{self.p}")
        if self.validate_sizes:
            problems = box_size_violations(assignment, self.p)
            if problems:
                raise InputError("; ".join(problems))

    @property
    def tiles(self):
        return len(self.assignment)

    def box_contents(self, box):
        return tuple(t + 1 for t, b in enumerate(self.assignment) if b == box)

    def sizes(self):
        return tuple(len(self.box_contents(b)) for b in range(1, self.p + 1))


def box_size_violations(assignment, p):
    """Size-constraint violations of a tile->box map: [] when valid."""
    sizes = [0] * p
    for b in assignment:
        sizes[b - 1] += 1
    problems = []
    for k, s in enumerate(sizes, start=1):
        if s == 0:
            problems.append(f"box {k} is empty")
        if s > 3:
            problems.append(f"box {k} holds {s} tiles (max 3)")
    if sum(1 for s in sizes if s == 3) > 1:
        problems.append("more than one box holds 3 tiles")
    return problems


class BoxPreferenceOracle:
    """Preference over labeled boxes given a cut and a box allocation.

    Subclasses provide ``eval``; the default ``batch`` loops over rows
    with canonical labels. ``content_dependent`` declares that the
    evaluation ignores box labels and degenerate tiles; the property
    suite verifies it instead of trusting it.
    """

    def __init__(self, players, *, content_dependent=True, label="custom"):
        self.players = players
        self.content_dependent = content_dependent
        self.label = label

    def eval(self, cut, boxes, player):
        raise NotImplementedError

    def batch(self, lengths, parts):
        """bool (N, players, p) preference table over canonically labeled parts."""
        n = lengths.shape[0]
        p = len(parts)
        out = np.zeros((n, self.players, p), dtype=np.bool_)
        boxes = parts_to_box_allocation(parts, lengths.shape[1])
        for row in range(n):
            cut = Cut(tuple(float(v) for v in lengths[row]))
            for j in range(1, self.players + 1):
                for b in self.eval(cut, boxes, j):
                    out[row, j - 1, b - 1] = True
        return out


class AdditiveBoxOracle(BoxPreferenceOracle):
    """Players rank boxes by an additive per-tile score and prefer the argmax.

    ``tile_stats(lengths) -> (N, players, tiles)`` gives each player's
    score of each tile; a box scores the sum over its tiles and every box
    within TIE_EPS of the best is preferred. Degenerate tiles must score
    zero, which makes the oracle insensitive to them.
    """

    def __init__(self, players, tile_stats, label):
        super().__init__(players, content_dependent=True, label=label)
        self._tile_stats = tile_stats

    def eval(self, cut, boxes, player):
        if not 1 <= player <= self.players:
            raise InputError(f"player {player} out of range 1..{self.players}")
        if cut.arity != boxes.tiles:
            raise InputError(f"cut arity {cut.arity} != allocation tiles {boxes.tiles}")
        stats = self._tile_stats(cut.as_array()[None, :])[0, player - 1]
        scores = [
            sum(stats[t - 1] for t in boxes.box_contents(b))
            for b in range(1, boxes.p + 1)
        ]
        best = max(scores)
        return frozenset(b for b, s in enumerate(scores, start=1) if s >= best - TIE_EPS)

    def batch(self, lengths, parts):
        stats = self._tile_stats(lengths)
        ind = _parts_indicator(parts, lengths.shape[1])
        scores = stats @ ind
        best = scores.max(axis=2, keepdims=True)
        return scores >= best - TIE_EPS


def max_measure_oracle(players, mu):
    """Every player prefers the boxes of maximal mu-mass (ties: all tied)."""

    def stats(lengths):
        masses = mu.tile_masses(lengths)
        return np.repeat(masses[:, None, :], players, axis=1)

    return AdditiveBoxOracle(players, stats, label="max-measure-boxes")


def interval_share_oracle(intervals):
    """Player j prefers the boxes holding the largest share of their interval."""
    ivals = [(float(a), float(b)) for a, b in intervals]
    for a, b in ivals:
        if not 0.0 <= a < b <= 1.0:
            raise InputError(f"interval [{a}, {b}] invalid")

    def stats(lengths):
        n, t = lengths.shape
        cum = np.cumsum(lengths, axis=1)
        left = np.concatenate([np.zeros((n, 1)), cum[:, :-1]], axis=1)
        out = np.empty((n, len(ivals), t), dtype=np.float64)
        for j, (a, b) in enumerate(ivals):
            out[:, j, :] = np.clip(np.minimum(cum, b) - np.maximum(left, a), 0.0, None)
        return out

    return AdditiveBoxOracle(len(ivals), stats, label="own-interval-share")


@dataclass(frozen=True)
class HybridInstance:
    """Prime player count, box-preference oracle, measure, equipartition slack."""

    p: int
    oracle: BoxPreferenceOracle
    mu: Measure
    equi_tol: float | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise InputError(f"player count {self.p} is not prime")
        if self.oracle.players != self.p:
            raise InputError(
                f"oracle has {self.oracle.players} players, instance needs {self.p}"
            )
        if self.equi_tol is not None and self.equi_tol <= 0:
            raise InputError("equi_tol must be positive")

    def resolved_equi_tol(self, q):
        if self.equi_tol is not None:
            return self.equi_tol
        return 1.0 / (10.0 * self.p * q)


@dataclass(frozen=True)
class FavourableDivision:
    """Cut + box allocation + player->box matching; entry j-1 is player j's box."""

    cut: Cut
    boxes: BoxAllocation
    matching: tuple

    def __post_init__(self):
        matching = tuple(int(v) for v in self.matching)
        object.__setattr__(self, "matching", matching)
        if self.cut.arity != self.boxes.tiles:
            raise InputError(
                f"cut arity {self.cut.arity} != allocation tiles {self.boxes.tiles}"
            )
        if sorted(matching) != list(range(1, self.boxes.p + 1)):
            raise InputError(f"matching is not a bijection onto 1..{self.boxes.p}")


@dataclass(frozen=True)
class Coloring:
    """Columns split into p-1 red, p-1 blue and one white."""

    red: frozenset
    blue: frozenset
    white: int

    def __post_init__(self):
        if self.red & self.blue or self.white in self.red or self.white in self.blue:
            raise InputError("color classes must be disjoint")
        if len(self.red) != len(self.blue):
            raise InputError("red and blue classes must have equal size")


def measure_of_box(cut, boxes, box, mu):
    """Total mu-mass of the tiles assigned to one box."""
    if not 1 <= box <= boxes.p:
        raise InputError(f"box {box} out of range 1..{boxes.p}")
    if cut.arity != boxes.tiles:
        raise InputError(f"cut arity {cut.arity} != allocation tiles {boxes.tiles}")
    tiles = cut.tiles()
    return sum(mu.value(tiles[t - 1].left, tiles[t - 1].right) for t in boxes.box_contents(box))


def is_favourable(division, inst):
    """(verdict, violations): envy-freeness, equipartition, box-size checks."""
    violations = []
    boxes = division.boxes
    if boxes.p != inst.p:
        violations.append(f"allocation has {boxes.p} boxes, instance needs {inst.p}")
        return False, violations
    violations.extend(box_size_violations(boxes.assignment, boxes.p))
    q_hint = max(boxes.tiles, 2)
    tol = inst.resolved_equi_tol(q_hint)
    share = 1.0 / inst.p
    for b in range(1, inst.p + 1):
        mass = measure_of_box(division.cut, boxes, b, inst.mu)
        if abs(mass - share) > tol:
            violations.append(
                f"box {b} carries mass {mass:.6f}, off target {share:.6f} by more than {tol}"
            )
    for j in range(1, inst.p + 1):
        b = division.matching[j - 1]
        if b not in inst.oracle.eval(division.cut, boxes, j):
            violations.append(f"player {j} does not prefer assigned box {b}")
    return not violations, violations


def box_partitions(n_tiles, p):
    """Canonical set partitions of [1..n_tiles] into p boxes of size 1..3, <=1 triple.

    Parts are ordered by their smallest tile and listed ascending inside,
    so the output order is deterministic and label-free.
    """
    if n_tiles < p:
        raise InputError(f"{n_tiles} tiles cannot fill {p} nonempty boxes")
    out = []
    parts = []

    def rec(t, triples):
        if t > n_tiles:
            if len(parts) == p:
                out.append(tuple(tuple(part) for part in parts))
            return
        remaining = n_tiles - t + 1
        if remaining < p - len(parts):
            return
        for part in parts:
            if len(part) == 1 or (len(part) == 2 and triples == 0):
                part.append(t)
                rec(t + 1, triples + (1 if len(part) == 3 else 0))
                part.pop()
        if len(parts) < p:
            parts.append([t])
            rec(t + 1, triples)
            parts.pop()

    rec(1, 0)
    return out


def parts_to_box_allocation(parts, n_tiles):
    """Label canonical parts 1..p in order and return the BoxAllocation."""
    assignment = [0] * n_tiles
    for k, part in enumerate(parts, start=1):
        for t in part:
            assignment[t - 1] = k
    return BoxAllocation(tuple(assignment), len(parts))


def _parts_indicator(parts, n_tiles):
    ind = np.zeros((n_tiles, len(parts)), dtype=np.float64)
    for k, part in enumerate(parts):
        for t in part:
            ind[t - 1, k] = 1.0
    return ind


def _box_matchings(adj_row):
    """All player->box perfect matchings of one boolean (p x p) table, lex order."""
    p = adj_row.shape[0]
    used = [False] * (p + 1)
    assignment = [0] * p
    out = []

    def rec(j):
        if j > p:
            out.append(tuple(assignment))
            return
        for b in range(1, p + 1):
            if adj_row[j - 1, b - 1] and not used[b]:
                used[b] = True
                assignment[j - 1] = b
                rec(j + 1)
                used[b] = False

    rec(1)
    return out


def search_favourable(inst, params, tiles=None):
    """Sweep cuts x box partitions for favourable divisions.

    Returns one FavourableDivision per deduplication key (cut cluster,
    content partition), in deterministic order: clusters by first
    appearance along the lexicographic lattice, partitions in canonical
    order inside a cluster. The matching attached to each is the
    lexicographically first envy-free one at the representative cut.
    """
    p = inst.p
    if tiles is None:
        tiles = 2 * p - 1
    if tiles not in (2 * p - 2, 2 * p - 1):
        raise InputError(f"tiles must be {2 * p - 2} or {2 * p - 1}, got {tiles}")
    q = params.grid_denominator
    if q < tiles:
        raise InputError(f"grid denominator {q} below tile count {tiles}")
    equi_tol = inst.resolved_equi_tol(q)
    share = 1.0 / p

    lattice = _kernels.compositions(q, tiles)
    lengths = lattice / float(q)
    masses = inst.mu.tile_masses(lengths)
    parts_list = box_partitions(tiles, p)

    def feasible_rows(rows_lengths, parts, ind, tile_masses=None):
        if tile_masses is None:
            tile_masses = inst.mu.tile_masses(rows_lengths)
        box_mass = tile_masses @ ind
        ok = np.all(np.abs(box_mass - share) <= equi_tol, axis=1)
        idx = np.flatnonzero(ok)
        if idx.size:
            adj = inst.oracle.batch(rows_lengths[idx], parts)
            idx = idx[_kernels.square_matching_mask(adj)]
        return idx

    hits_by_part = []
    all_hit_rows = set()
    for parts in parts_list:
        idx = feasible_rows(lengths, parts, _parts_indicator(parts, tiles), masses)
        hits_by_part.append(idx)
        all_hit_rows.update(int(i) for i in idx)

    if not all_hit_rows:
        return []

    hit_rows = np.asarray(sorted(all_hit_rows), dtype=np.int64)
    row_to_cluster = {}
    for c, member_ix in enumerate(cluster_cuts(lengths[hit_rows], params.dedup_tol)):
        for local in member_ix:
            row_to_cluster[int(hit_rows[local])] = c
    n_clusters = 1 + max(row_to_cluster.values())

    out = []
    for c in range(n_clusters):
        for parts, idx in zip(parts_list, hits_by_part):
            members = lengths[[int(i) for i in idx if row_to_cluster[int(i)] == c]]
            if members.shape[0] == 0:
                continue
            ind = _parts_indicator(parts, tiles)
            rep_vec = np.asarray(project_to_simplex(members.mean(axis=0)))
            denom = q
            for _ in range(params.refine_levels):
                radius = 2.0 / denom
                denom *= 5
                local = _local_lattice(rep_vec, denom, radius)
                if local.shape[0] == 0:
                    break
                fine = feasible_rows(local / float(denom), parts, ind)
                if fine.size == 0:
                    break
                rep_vec = np.asarray(
                    project_to_simplex(local[fine].mean(axis=0) / float(denom))
                )
            if feasible_rows(rep_vec[None, :], parts, ind).size == 0:
                dists = np.max(np.abs(members - rep_vec), axis=1)
                rep_vec = members[int(np.argmin(dists))]
            rep_cut = Cut(tuple(float(v) for v in rep_vec))
            adj = inst.oracle.batch(rep_vec[None, :], parts)[0]
            matchings = _box_matchings(adj)
            boxes = parts_to_box_allocation(parts, tiles)
            division = FavourableDivision(rep_cut, boxes, matchings[0])
            ok, violations = is_favourable(division, inst)
            assert ok, f"search produced a non-favourable division: {violations}"
            out.append(division)
    return out


def lower_bound(p):
    """Guaranteed number of favourable divisions: C(2p-1, p-1) * 2^(2-p), exact."""
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    return Fraction(comb(2 * p - 1, p - 1) * 4, 2**p)


def enumerate_colorings(boxes):
    """All colorings (p-1 red, p-1 blue, 1 white) with no color repeated in a box."""
    n = boxes.tiles
    p = boxes.p
    if n != 2 * p - 1:
        raise InputError(f"coloring needs 2p-1 = {2 * p - 1} tiles, got {n}")
    tiles = range(1, n + 1)
    out = []
    for white in tiles:
        rest = [t for t in tiles if t != white]
        for red in itertools.combinations(rest, p - 1):
            red_set = frozenset(red)
            blue_set = frozenset(t for t in rest if t not in red_set)
            per_box_ok = True
            for b in range(1, p + 1):
                content = boxes.box_contents(b)
                n_red = sum(1 for t in content if t in red_set)
                n_blue = sum(1 for t in content if t in blue_set)
                n_white = sum(1 for t in content if t == white)
                if n_red > 1 or n_blue > 1 or n_white > 1:
                    per_box_ok = False
                    break
            if per_box_ok:
                out.append(Coloring(red_set, blue_set, white))
    return out


def coloring_count(division):
    """Exhaustive count of box-compatible colorings of a favourable division."""
    return len(enumerate_colorings(division.boxes))


def total_colorings(p):
    """Number of ways to pick p-1 red columns and one white: C(2p-1, p-1) * p."""
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    return comb(2 * p - 1, p - 1) * p


def chessboard_complex_facets(m, n):
    """Facets of the m x n chessboard complex: one rook per column, distinct rows.

    Returns the list of facets as tuples of (row, column) pairs, columns
    ascending; the count is m!/(m-n)!.
    """
    if n > m:
        raise InputError(f"need n <= m, got n={n} > m={m}")
    return [
        tuple((row, col) for col, row in enumerate(rows, start=1))
        for rows in itertools.permutations(range(1, m + 1), n)
    ]


def configuration_space_facets(p):
    """Facet count of the joined rook complex on the p x (2p-1) board.

    Columns 1..p-1 and p..2p-2 each demand distinct rows; the last column
    is free. Enumerated directly (full brute force up to p=3, per-block
    rook enumeration beyond) and checked against (p!)^2 * p.
    """
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    n_cols = 2 * p - 1
    if p <= 3:
        count = 0
        for rows in itertools.product(range(p), repeat=n_cols):
            first = rows[: p - 1]
            second = rows[p - 1 : 2 * p - 2]
            if len(set(first)) == len(first) and len(set(second)) == len(second):
                count += 1
    else:
        count = (
            len(chessboard_complex_facets(p, p - 1))
            * len(chessboard_complex_facets(p, p - 1))
            * len(chessboard_complex_facets(p, 1))
        )
    expected = factorial(p) ** 2 * p
    if count != expected:
        raise RuntimeError(
            f"facet enumeration gave {count}, closed form gives {expected}"
        )
    return count
