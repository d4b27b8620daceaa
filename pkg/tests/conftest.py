import numpy as np
import pytest

from efl.preferences import Valuation, utility_preferences


def block_biased_valuations(r, rng, peak=(3.0, 6.0), base=(0.4, 0.9)):
    """One valuation per player, each peaked on the player's own 1/r block.

    Produces hungry instances whose envy-free regions are wide enough for
    coarse grids to see several distinct divisions.
    """
    segs = 2 * r
    vals = []
    for j in range(r):
        w = rng.uniform(base[0], base[1], size=segs)
        pk = rng.uniform(*peak)
        w[2 * j] *= pk
        w[2 * j + 1] *= pk
        vals.append(Valuation.from_weights(w))
    return vals


def tie_tolerant_oracle(r, m, seed, tie_tol=None, segments=6):
    """Random hungry oracle of m players over r tiles with widened argmax ties.

    The widened ties fatten the certified regions so a finite grid can land
    on them; exact-argmax oracles have measure-zero certified sets.
    """
    if tie_tol is None:
        tie_tol = 0.12 if r == 2 else 0.2
    rng = np.random.default_rng(seed)
    vals = [Valuation.from_weights(rng.uniform(0.6, 1.6, size=segments)) for _ in range(m)]
    return utility_preferences(vals, arity=r, tie_tol=tie_tol)


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)
