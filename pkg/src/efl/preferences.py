"""Preference models over cuts.

Three families are built in:

* the nested-threshold construction admitting exactly two envy-free
  divisions (``extremal_preferences``),
* additive hungry players with piecewise-constant value densities
  (``utility_preferences``),
* explicit polyhedral systems given as boolean combinations of closed
  half-spaces (``halfspace_preferences``).

All oracles evaluate as total functions on the closed simplex, degenerate
tiles included. Preferred sets are closed: every comparison is non-strict,
so boundary cuts belong to all adjacent regions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import InputError

# Absolute slack when detecting analytic ties in floating point.
TIE_EPS = 1e-12


class PreferenceOracle:
    """Evaluable map (cut, player) -> nonempty set of preferred tile indices.

    ``players`` may differ from ``arity`` (one player fewer for the
    secretive setting, one more for the expelled setting). ``is_hungry``
    is a declared flag; the property suite checks it on a grid rather
    than trusting it.
    """

    def __init__(self, arity, players, batch_fn, *, is_hungry=False, label="custom"):
        if arity < 2:
            raise InputError("oracle arity must be at least 2")
        if players < 1:
            raise InputError("oracle needs at least one player")
        self.arity = arity
        self.players = players
        self.is_hungry = is_hungry
        self.label = label
        self._batch_fn = batch_fn

    def batch(self, lengths):
        """Preference table for many cuts at once.

        lengths: float64 (N, arity). Returns bool (N, players, arity),
        entry [n, j-1, i-1] meaning player j prefers tile i at cut n.
        """
        lengths = np.ascontiguousarray(lengths, dtype=np.float64)
        if lengths.ndim != 2 or lengths.shape[1] != self.arity:
            raise InputError(f"expected (N, {self.arity}) length rows")
        out = self._batch_fn(lengths)
        assert out.shape == (lengths.shape[0], self.players, self.arity)
        return out

    def preferred(self, cut, player):
        """Preferred tile set of one player at one cut, as a frozenset."""
        if cut.arity != self.arity:
            raise InputError(f"cut arity {cut.arity} != oracle arity {self.arity}")
        if not 1 <= player <= self.players:
            raise InputError(f"player {player} out of range 1..{self.players}")
        row = self.batch(cut.as_array()[None, :])[0, player - 1]
        return frozenset(int(i) + 1 for i in np.flatnonzero(row))


def preferred_tiles(oracle, cut, player):
    """The oracle's evaluation for one player at one cut (1-based tiles)."""
    return oracle.preferred(cut, player)


def oracle_from_eval(arity, players, eval_fn, *, is_hungry=False, label="custom"):
    """Wrap a scalar eval(lengths_tuple, player)->iterable-of-tiles as an oracle.

    The batch path simply loops; use the built-in families for anything
    that has to sweep large grids fast.
    """

    def batch(lengths):
        n = lengths.shape[0]
        out = np.zeros((n, players, arity), dtype=np.bool_)
        for row in range(n):
            x = tuple(lengths[row])
            for j in range(1, players + 1):
                for i in eval_fn(x, j):
                    if not 1 <= i <= arity:
                        raise InputError(f"tile {i} out of range 1..{arity}")
                    out[row, j - 1, i - 1] = True
        return out

    return PreferenceOracle(arity, players, batch, is_hungry=is_hungry, label=label)


# ---------------------------------------------------------------------------
# Nested-threshold construction with exactly two envy-free divisions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremalInstance:
    """Arity r >= 3 plus a strictly descending chain 1/r > eps_1 > ... > eps_{r-2} > 0."""

    r: int
    eps: tuple

    def __post_init__(self):
        eps = tuple(float(v) for v in self.eps)
        object.__setattr__(self, "eps", eps)
        if self.r < 3:
            raise InputError("extremal construction needs arity >= 3")
        if len(eps) != self.r - 2:
            raise InputError(f"need {self.r - 2} epsilon values, got {len(eps)}")
        chain = (1.0 / self.r,) + eps + (0.0,)
        for a, b in zip(chain, chain[1:]):
            if not a > b:
                raise InputError(f"epsilon chain must satisfy 1/r > eps_1 > ... > 0, got {eps}")


def default_eps(r):
    """A valid default chain: eps_k = (1/r) * (1 - k/(r-1)) * 0.9."""
    return tuple((1.0 / r) * (1.0 - k / (r - 1)) * 0.9 for k in range(1, r - 1))


def extremal_preferences(inst):
    """Oracle of the nested-threshold construction.

    Player 1's sets on a cut x: tile 1 when x_1 >= 1-eps_1; tile k
    (2 <= k <= r-2) when every earlier prefix sum stays at or below its
    threshold and x_1+...+x_k >= 1-eps_k; tiles r-1 and r split by
    whichever of the last two coordinates is weakly larger, minus the
    interior of the thresholded region (some prefix strictly above its
    threshold). Player j sees the same sets with all coordinate and tile
    indices shifted cyclically by j-1.
    """
    eps = np.asarray(inst.eps, dtype=np.float64)

    def batch(lengths):
        return _kernels.extremal_prefs(lengths, eps)

    return PreferenceOracle(
        inst.r, inst.r, batch, is_hungry=True, label=f"extremal(r={inst.r})"
    )


# ---------------------------------------------------------------------------
# Additive hungry players
# ---------------------------------------------------------------------------


class Valuation:
    """Piecewise-constant strictly positive value density on [0, 1], mass 1."""

    def __init__(self, breakpoints, densities):
        bp = tuple(float(b) for b in breakpoints)
        dens = tuple(float(d) for d in densities)
        if len(bp) < 2 or bp[0] != 0.0 or bp[-1] != 1.0:
            raise InputError("breakpoints must run from 0.0 to 1.0")
        if any(b >= c for b, c in zip(bp, bp[1:])):
            raise InputError("breakpoints must be strictly increasing")
        if len(dens) != len(bp) - 1:
            raise InputError("need one density per segment")
        if any(d <= 0.0 for d in dens):
            raise InputError("valuation density must be strictly positive")
        masses = [d * (c - b) for d, b, c in zip(dens, bp, bp[1:])]
        total = sum(masses)
        if abs(total - 1.0) > 1e-9:
            raise InputError(f"valuation mass is {total!r}, not 1")
        self.breakpoints = bp
        self.densities = dens
        self.xp = np.asarray(bp, dtype=np.float64)
        fp = np.concatenate([[0.0], np.cumsum(masses)])
        fp /= fp[-1]  # absorb the <=1e-9 rounding so total mass is exactly 1
        self.fp = fp

    @classmethod
    def uniform(cls):
        return cls((0.0, 1.0), (1.0,))

    @classmethod
    def from_weights(cls, weights):
        """Equal-width segments with the given positive weights, normalized."""
        w = [float(v) for v in weights]
        if not w or any(v <= 0 for v in w):
            raise InputError("weights must be positive")
        n = len(w)
        total = sum(v / n for v in w)
        bp = tuple(i / n for i in range(n + 1))
        return cls(bp, tuple(v / total for v in w))

    def cum(self, t):
        """Mass of [0, t]."""
        return float(
            _kernels.tile_values(np.array([[t, 1.0 - t]]), self.xp, self.fp)[0, 0]
        )

    def value(self, a, b):
        """Mass of [a, b]."""
        return self.cum(b) - self.cum(a)


def utility_preferences(valuations, arity=None, tie_tol=0.0):
    """Additive hungry players: each prefers the tiles of maximal value.

    Ties within max(tie_tol, 1e-12) of the best value are all preferred,
    which keeps the sets closed; a strictly positive density means no
    degenerate tile can ever reach the maximum, so the players are hungry.
    tie_tol widens the argmax deliberately (grid searches can then land on
    the tie regions); it must stay below 1/arity or a zero-length tile
    could tie the best one.
    """
    vals = list(valuations)
    if not vals:
        raise InputError("need at least one valuation")
    if arity is None:
        arity = len(vals)
    if tie_tol < 0.0:
        raise InputError("tie_tol must be nonnegative")
    if tie_tol >= 1.0 / arity:
        raise InputError(f"tie_tol {tie_tol} must stay below 1/arity = {1.0 / arity}")
    players = len(vals)
    slack = max(tie_tol, TIE_EPS)

    def batch(lengths):
        n = lengths.shape[0]
        out = np.empty((n, players, arity), dtype=np.bool_)
        for j, v in enumerate(vals):
            tile_vals = _kernels.tile_values(lengths, v.xp, v.fp)
            best = tile_vals.max(axis=1, keepdims=True)
            out[:, j, :] = tile_vals >= best - slack
        return out

    return PreferenceOracle(
        arity, players, batch, is_hungry=True, label=f"utility(m={players})"
    )


# ---------------------------------------------------------------------------
# Explicit polyhedral systems
# ---------------------------------------------------------------------------


def _eval_node(node, x, strict):
    if not isinstance(node, dict) or len(node) != 1:
        raise InputError(f"malformed half-space node: {node!r}")
    (op, body), = node.items()
    if op == "halfspace":
        a = body["a"]
        b = float(body["b"])
        if len(a) != len(x):
            raise InputError("half-space coefficient arity mismatch")
        s = sum(float(c) * xi for c, xi in zip(a, x))
        return s > b if strict else s >= b
    if op == "all":
        return all(_eval_node(child, x, strict) for child in body)
    if op == "any":
        return any(_eval_node(child, x, strict) for child in body)
    if op == "minus_interior":
        outer, inner = body
        # Interior of the subtrahend is approximated by its strict
        # membership; exact for single half-spaces and for the unions used
        # here, conservative on boundary-overlapping unions.
        if strict:
            return _eval_node(outer, x, True) and not _eval_node(inner, x, False)
        return _eval_node(outer, x, False) and not _eval_node(inner, x, True)
    raise InputError(f"unknown half-space op {op!r}")


class HalfspaceSystem:
    """Per (player, tile) boolean combinations of closed half-spaces a.x >= b.

    ``sets[j-1][i-1]`` is the region where player j prefers tile i, given
    as a nested dict tree with nodes ``halfspace``, ``all``, ``any`` and
    ``minus_interior`` (second operand subtracted as an open set).
    """

    def __init__(self, r, players, sets):
        if len(sets) != players or any(len(row) != r for row in sets):
            raise InputError(f"need a {players} x {r} table of set descriptions")
        self.r = r
        self.players = players
        self.sets = sets
        probe = tuple([1.0 / r] * r)
        for row in sets:
            for node in row:
                _eval_node(node, probe, False)  # validate shape eagerly

    def member(self, x, player, tile, strict=False):
        return _eval_node(self.sets[player - 1][tile - 1], tuple(x), strict)

    def to_json(self):
        return {"r": self.r, "players": self.players, "sets": self.sets}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(int(data["r"]), int(data["players"]), data["sets"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed half-space system: {exc}") from exc


def halfspace_preferences(system, *, is_hungry=False):
    """Oracle evaluating an explicit HalfspaceSystem membership table."""

    def eval_fn(x, j):
        return [i for i in range(1, system.r + 1) if system.member(x, j, i)]

    return oracle_from_eval(
        system.r,
        system.players,
        eval_fn,
        is_hungry=is_hungry,
        label="halfspace",
    )
