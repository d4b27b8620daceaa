import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from efl.core import (
    Allocation,
    Cut,
    Division,
    InputError,
    cut_from_points,
    cuts_equal,
    divisions_equal,
)


def test_cut_from_points_midpoint():
    assert cut_from_points([0.5]).lengths == (0.5, 0.5)


def test_cut_from_points_rejects_empty():
    with pytest.raises(InputError):
        cut_from_points([])


def test_cut_from_points_thirds_is_barycenter():
    c = cut_from_points([1 / 3, 2 / 3])
    b = Cut.barycenter(3)
    assert max(abs(a - b) for a, b in zip(c.lengths, b.lengths)) <= 1e-12


def test_cut_from_points_rejects_unsorted_and_out_of_range():
    with pytest.raises(InputError):
        cut_from_points([0.6, 0.4])
    with pytest.raises(InputError):
        cut_from_points([-0.1])
    with pytest.raises(InputError):
        cut_from_points([1.2])


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=1, max_size=9))
def test_cut_from_points_sums_to_one(points):
    c = cut_from_points(sorted(points))
    assert abs(sum(c.lengths) - 1.0) <= 1e-12
    assert all(v >= 0 for v in c.lengths)


def test_cut_validation():
    with pytest.raises(InputError):
        Cut((1.0,))
    with pytest.raises(InputError):
        Cut((0.7, 0.4))
    with pytest.raises(InputError):
        Cut((-0.1, 1.1))


def test_cuts_equal_examples():
    b = Cut.barycenter(3)
    assert cuts_equal(b, b, 1e-6)
    assert cuts_equal(Cut((0.5, 0.5)), Cut((0.5 + 2e-7, 0.5 - 2e-7)), 1e-6)
    assert not cuts_equal(Cut((1.0, 0.0)), Cut((0.0, 1.0)), 1e-6)
    with pytest.raises(InputError):
        cuts_equal(Cut.barycenter(2), Cut.barycenter(3), 1e-6)
    with pytest.raises(InputError):
        cuts_equal(b, b, -1.0)


def test_cuts_equal_reflexive_symmetric(rng):
    for _ in range(200):
        r = int(rng.integers(2, 6))
        a = Cut(tuple(v for v in rng.dirichlet(np.ones(r))))
        b = Cut(tuple(v for v in rng.dirichlet(np.ones(r))))
        tol = float(rng.uniform(0, 0.5))
        assert cuts_equal(a, a, tol)
        assert cuts_equal(a, b, tol) == cuts_equal(b, a, tol)


def test_tiles_cover_unit_interval(rng):
    for _ in range(200):
        r = int(rng.integers(2, 7))
        cut = Cut(tuple(v for v in rng.dirichlet(np.ones(r))))
        tiles = cut.tiles()
        assert tiles[0].left == 0.0
        assert tiles[-1].right == 1.0
        for a, b in zip(tiles, tiles[1:]):
            assert a.right == b.left
        for t, length in zip(tiles, cut.lengths):
            assert abs(t.length - length) <= 1e-9
            assert t.degenerate == (t.length == 0.0)


def test_allocation_validation():
    Allocation((2, 3, 1))
    with pytest.raises(InputError):
        Allocation((1, 1, 3))
    with pytest.raises(InputError):
        Allocation((0, 1, 2))


def test_divisions_equal_examples():
    b = Cut.barycenter(3)
    d1 = Division(b, Allocation((2, 3, 1)))
    d2 = Division(b, Allocation((3, 1, 2)))
    assert not divisions_equal(d1, d2, 1e-6)
    assert divisions_equal(d1, Division(b, Allocation((2, 3, 1))), 1e-6)
    shifted = Cut((1 / 3 + 2e-6, 1 / 3 - 2e-6, 1 / 3))
    assert not divisions_equal(d1, Division(shifted, Allocation((2, 3, 1))), 1e-6)


def test_division_arity_mismatch():
    with pytest.raises(InputError):
        Division(Cut.barycenter(3), Allocation((1, 2)))
