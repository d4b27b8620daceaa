"""Simplex geometry shared by every solver: cuts, tiles, allocations, divisions.

A cut of the unit cake is stored as the vector of consecutive tile lengths,
i.e. a point of the standard simplex. Player and tile indices are 1-based
throughout the public API.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SUM_TOL = 1e-12
DEFAULT_CUT_TOL = 1e-6


class InputError(ValueError):
    """An argument violated a documented precondition."""


@dataclass(frozen=True)
class Cut:
    """Tile lengths of one cut of [0, 1]; nonnegative, summing to 1, arity >= 2."""

    lengths: tuple

    def __post_init__(self):
        lengths = tuple(float(v) for v in self.lengths)
        object.__setattr__(self, "lengths", lengths)
        if len(lengths) < 2:
            raise InputError(f"a cut needs at least 2 tiles, got {len(lengths)}")
        for v in lengths:
            if v < 0.0:
                raise InputError(f"negative tile length {v}")
        total = sum(lengths)
        if abs(total - 1.0) > SUM_TOL:
            raise InputError(f"tile lengths sum to {total!r}, not 1")

    @property
    def arity(self):
        return len(self.lengths)

    @classmethod
    def barycenter(cls, r):
        """The all-equal cut (1/r, ..., 1/r)."""
        if r < 2:
            raise InputError("arity must be at least 2")
        return cls(tuple(1.0 / r for _ in range(r)))

    def points(self):
        """The r-1 interior cut points, as cumulative sums of the lengths."""
        acc = 0.0
        out = []
        for v in self.lengths[:-1]:
            acc += v
            out.append(acc)
        return tuple(out)

    def tiles(self):
        """The closed tiles [left, right] this cut carves out of [0, 1]."""
        pts = (0.0,) + self.points() + (1.0,)
        return tuple(
            Tile(i + 1, pts[i], max(pts[i], pts[i + 1])) for i in range(self.arity)
        )

    def as_array(self):
        return np.asarray(self.lengths, dtype=np.float64)


@dataclass(frozen=True)
class Tile:
    """One closed piece of the cake; degenerate when its endpoints coincide."""

    index: int
    left: float
    right: float

    def __post_init__(self):
        if not (0.0 <= self.left <= self.right <= 1.0 + SUM_TOL):
            raise InputError(f"tile [{self.left}, {self.right}] outside [0, 1]")

    @property
    def length(self):
        return self.right - self.left

    @property
    def degenerate(self):
        return self.right == self.left


@dataclass(frozen=True)
class Allocation:
    """Bijection player -> tile; entry j-1 is the tile handed to player j."""

    tiles: tuple

    def __post_init__(self):
        tiles = tuple(int(v) for v in self.tiles)
        object.__setattr__(self, "tiles", tiles)
        r = len(tiles)
        if sorted(tiles) != list(range(1, r + 1)):
            raise InputError(f"not a bijection onto 1..{r}: {tiles}")

    @property
    def arity(self):
        return len(self.tiles)

    def of(self, player):
        if not 1 <= player <= self.arity:
            raise InputError(f"player {player} out of range 1..{self.arity}")
        return self.tiles[player - 1]

    def pairs(self):
        """(player, tile) pairs, players ascending."""
        return tuple((j + 1, t) for j, t in enumerate(self.tiles))


@dataclass(frozen=True)
class Division:
    """A cut together with an allocation of its tiles to players."""

    cut: Cut
    allocation: Allocation

    def __post_init__(self):
        if self.cut.arity != self.allocation.arity:
            raise InputError(
                f"cut arity {self.cut.arity} != allocation arity {self.allocation.arity}"
            )


def cut_from_points(points):
    """Build a Cut from its sorted interior cut points in [0, 1]."""
    pts = [float(p) for p in points]
    if not pts:
        raise InputError("at least one cut point required (arity >= 2)")
    prev = 0.0
    lengths = []
    for p in pts:
        if p < 0.0 or p > 1.0:
            raise InputError(f"cut point {p} outside [0, 1]")
        if p < prev:
            raise InputError(f"cut points not sorted at {p}")
        lengths.append(p - prev)
        prev = p
    lengths.append(1.0 - prev)
    return Cut(tuple(lengths))


def cuts_equal(a, b, tol=DEFAULT_CUT_TOL):
    """Whether two same-arity cuts agree coordinate-wise within tol."""
    if a.arity != b.arity:
        raise InputError(f"arity mismatch: {a.arity} vs {b.arity}")
    if tol < 0:
        raise InputError("tolerance must be nonnegative")
    return max(abs(x - y) for x, y in zip(a.lengths, b.lengths)) <= tol


def divisions_equal(a, b, tol=DEFAULT_CUT_TOL):
    """Same cut (within tol) and identical allocation."""
    if a.cut.arity != b.cut.arity:
        raise InputError(f"arity mismatch: {a.cut.arity} vs {b.cut.arity}")
    return a.allocation.tiles == b.allocation.tiles and cuts_equal(a.cut, b.cut, tol)


def project_to_simplex(vec):
    """Clamp negatives and renormalize so the vector is a valid length tuple."""
    arr = np.clip(np.asarray(vec, dtype=np.float64), 0.0, None)
    total = arr.sum()
    if total <= 0:
        raise InputError("cannot project the zero vector onto the simplex")
    return tuple(float(v) for v in arr / total)
