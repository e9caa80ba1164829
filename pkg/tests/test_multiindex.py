from fractions import Fraction

import pytest

from toeplab.errors import UnboundedFiberError, ValidationError
from toeplab.multiindex import (
    SubtorusData,
    diagonal_circle,
    dimension_of_degree_space,
    enumerate_degree,
    enumerate_fiber,
    fiber_count_growth,
    fiber_polytope_vertices,
    full_torus,
    grlex_key,
    recession_pointed,
)


def test_enumerate_degree_order_and_count():
    mis = enumerate_degree(2, 2)
    assert mis == [(2, 0), (1, 1), (0, 2)]
    for n, k in [(2, 5), (3, 4), (4, 6)]:
        mis = enumerate_degree(n, k)
        assert len(mis) == dimension_of_degree_space(n, k)
        assert all(sum(mi) == k for mi in mis)
        keys = [grlex_key(mi) for mi in mis]
        assert keys == sorted(keys)
        assert len(set(mis)) == len(mis)


def test_enumerate_degree_zero():
    assert enumerate_degree(3, 0) == [(0, 0, 0)]


def test_grlex_orders_by_total_degree_first():
    assert grlex_key((0, 2)) > grlex_key((1, 0))
    assert grlex_key((1, 1)) > grlex_key((2, 0))


def test_subtorus_validation():
    with pytest.raises(ValidationError):
        SubtorusData(n=2, d=0, weight_matrix=(), alpha=())
    with pytest.raises(ValidationError):
        SubtorusData(n=2, d=1, weight_matrix=((1, 1, 1),), alpha=(1,))
    # rank-deficient weight rows
    with pytest.raises(ValidationError):
        SubtorusData(n=2, d=2, weight_matrix=((1, 1), (2, 2)), alpha=(1, 2))


def test_subtorus_json_round_trip():
    sub = SubtorusData(n=4, d=2, weight_matrix=((1, 1, 0, 0), (0, 0, 1, 1)), alpha=(1, 1))
    assert SubtorusData.from_json(sub.to_json()) == sub
    with pytest.raises(ValidationError):
        SubtorusData.from_json({"n": 2, "d": 1, "Bt": [[1, 1]]})
    with pytest.raises(ValidationError):
        SubtorusData.from_json({"n": 2, "d": 1, "Bt": [[1, 1]], "alpha": [1], "extra": 0})


def test_recession_pointed():
    assert recession_pointed(diagonal_circle(3))
    assert not recession_pointed(SubtorusData(n=2, d=1, weight_matrix=((1, -1),), alpha=(0,)))


def test_fiber_diagonal_equals_degree_space():
    sub = diagonal_circle(2)
    for k in (1, 3, 7):
        assert enumerate_fiber(sub, k) == enumerate_degree(2, k)


def test_fiber_weighted_mixes_degrees():
    sub = SubtorusData(n=2, d=1, weight_matrix=((1, 2),), alpha=(2,))
    assert enumerate_fiber(sub, 1) == [(0, 1), (2, 0)]
    assert [len(enumerate_fiber(sub, k)) for k in (1, 2, 3)] == [2, 3, 4]


def test_fiber_product_of_lines_counts():
    sub = SubtorusData(n=4, d=2, weight_matrix=((1, 1, 0, 0), (0, 0, 1, 1)), alpha=(1, 1))
    assert fiber_count_growth(sub, [1, 2, 5]) == [(1, 4), (2, 9), (5, 36)]


def test_fiber_full_torus_single_point():
    sub = full_torus((1, 2))
    assert enumerate_fiber(sub, 3) == [(3, 6)]


def test_fiber_unbounded_raises():
    sub = SubtorusData(n=2, d=1, weight_matrix=((1, -1),), alpha=(0,))
    with pytest.raises(UnboundedFiberError):
        enumerate_fiber(sub, 1)


def test_fiber_rejects_bad_level():
    with pytest.raises(ValidationError):
        enumerate_fiber(diagonal_circle(2), 0)


def test_polytope_vertices_weighted_segment():
    sub = SubtorusData(n=2, d=1, weight_matrix=((1, 2),), alpha=(2,))
    verts = fiber_polytope_vertices(sub)
    assert set(verts) == {(Fraction(2), Fraction(0)), (Fraction(0), Fraction(1))}


def test_polytope_vertices_scale_with_level():
    sub = diagonal_circle(3)
    level1 = set(fiber_polytope_vertices(sub, level=1))
    level3 = set(fiber_polytope_vertices(sub, level=3))
    assert level3 == {tuple(3 * c for c in v) for v in level1}
