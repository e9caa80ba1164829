from fractions import Fraction

import pytest

from toeplab.errors import ValidationError
from toeplab.hardy_sphere import InvariantSymbol
from toeplab.inverse import (
    extrapolate_ray,
    loglog_slope,
    ray_levels,
    reconstruct,
    spectral_distinguishability,
)
from toeplab.multiindex import diagonal_circle
from toeplab.toric import equivariant_spectrum

A1 = InvariantSymbol.coordinate(0, 2)
A2 = InvariantSymbol.coordinate(1, 2)


def circle_oracle(symbol):
    return lambda k: equivariant_spectrum(symbol, diagonal_circle(2), k)


def test_ray_levels():
    assert ray_levels(8, 64) == [8, 16, 32, 64]
    assert ray_levels(3, 64) == [3, 6, 15, 30, 63]
    assert ray_levels(16, 10) == []
    assert ray_levels(4, 20, spacing="all") == [4, 8, 12, 16, 20]
    with pytest.raises(ValidationError):
        ray_levels(0, 10)
    with pytest.raises(ValidationError):
        ray_levels(4, 20, spacing="dyadic")


def test_extrapolate_orders_sharpen_the_limit():
    ks = [8, 16, 32, 64]
    vals = [Fraction(k // 4 + 1, k + 2) for k in ks]  # -> 1/4
    devs = {}
    for order in (0, 1, 2, 3):
        res = extrapolate_ray(ks, vals, order)
        devs[order] = abs(res.limit - 0.25)
        assert not res.low_confidence
    assert devs[1] < devs[0] / 10
    assert devs[2] < devs[1] / 5
    assert devs[3] < devs[2] / 4
    # order 0 reports the last raw increment
    res0 = extrapolate_ray(ks, vals, 0)
    assert res0.limit == float(vals[-1])
    assert res0.error == pytest.approx(abs(float(vals[-1] - vals[-2])))


def test_extrapolate_flags_noise_amplification():
    res = extrapolate_ray([8, 16, 32, 64], [0.5, 0.5001, 0.49999, 0.50001], 3)
    assert res.low_confidence
    assert res.error > abs(0.50001 - 0.49999)


def test_extrapolate_sample_requirements():
    with pytest.raises(ValidationError):
        extrapolate_ray([8], [1.0], 0)
    with pytest.raises(ValidationError):
        extrapolate_ray([8, 16], [1.0, 2.0], 2)
    with pytest.raises(ValidationError):
        extrapolate_ray([8, 16], [1.0], 1)


def test_reconstruct_on_coordinate_symbol():
    calls = []
    base = circle_oracle(A1)

    def oracle(k):
        calls.append(k)
        return base(k)

    grid = [(0, 1), (Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 4), Fraction(3, 4))]
    rec = reconstruct(oracle, 2, grid, 64, order=1)
    assert len(calls) == len(set(calls)) == 7  # one spectrum per distinct level
    ray_half = rec.rays[1]
    # lambda is exactly 1/2 along the central ray
    assert ray_half.estimate == 0.5
    assert ray_half.error == 0.0
    assert not ray_half.low_confidence
    # worst point is (0, 1): residual 1/33 - 1/34 after one acceleration step
    assert rec.max_error(lambda p: p[0]) == pytest.approx(1 / 1122, rel=1e-12)


def test_reconstruct_order_zero_error():
    rec = reconstruct(circle_oracle(A1), 2, [(0, 1)], 64, order=0)
    # raw eigenvalue at the top level: 1/(64 + 2)
    assert rec.max_error(lambda p: p[0]) == pytest.approx(1 / 66, rel=1e-12)


def test_reconstruct_marks_unreachable_points_missing():
    rec = reconstruct(circle_oracle(A1), 2, [(Fraction(1, 16), Fraction(15, 16))], 20, order=1)
    assert rec.rays[0].missing
    assert rec.rays[0].ks == (16,)
    assert rec.estimates() == {}
    with pytest.raises(ValidationError):
        rec.max_error(lambda p: p[0])


def test_reconstruct_rejects_off_simplex_points():
    with pytest.raises(ValidationError):
        reconstruct(circle_oracle(A1), 2, [(Fraction(1, 2), Fraction(1, 3))], 16)
    with pytest.raises(ValidationError):
        reconstruct(circle_oracle(A1), 2, [(Fraction(3, 2), Fraction(-1, 2))], 16)
    with pytest.raises(ValidationError):
        reconstruct(circle_oracle(A1), 2, [(1,)], 16)


def test_distinguishability_coordinate_swap():
    rep = spectral_distinguishability(circle_oracle(A1), circle_oracle(A2), 5)
    assert rep.first_labeled_difference == 1
    assert rep.first_multiset_difference is None
    assert rep.labeled_differ and not rep.multiset_differ
    js = rep.to_json()
    assert js["labeled_differ"] is True and js["multiset_differ"] is False


def test_distinguishability_identical_and_distinct():
    same = spectral_distinguishability(circle_oracle(A1), circle_oracle(A1), 5)
    assert not same.labeled_differ and not same.multiset_differ
    a1sq = InvariantSymbol.from_poly([((2, 0), 1)], 2)
    both = spectral_distinguishability(circle_oracle(A1), circle_oracle(a1sq), 5)
    assert both.first_labeled_difference == 1
    assert both.first_multiset_difference == 1


def test_loglog_slope():
    xs = [1.0, 2.0, 4.0, 8.0]
    assert loglog_slope(xs, [3.0 / x**2 for x in xs]) == pytest.approx(-2.0, abs=1e-12)
    with pytest.raises(ValidationError):
        loglog_slope(xs, [1.0, -1.0, 1.0, 1.0])
    with pytest.raises(ValidationError):
        loglog_slope([1.0], [1.0])


def test_reconstruction_csv(tmp_path):
    grid = [(0, 1), (Fraction(1, 16), Fraction(15, 16))]
    rec = reconstruct(circle_oracle(A1), 2, grid, 20, order=1)
    path = tmp_path / "rec.csv"
    rec.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "point,levels,estimate,error,low_confidence,missing"
    assert len(lines) == 3
    # the missing row carries empty estimate and error fields
    assert lines[2].endswith(",,0,1")
