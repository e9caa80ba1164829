from fractions import Fraction
from math import pi

import pytest

from toeplab.errors import (
    RegularityError,
    SamplerEfficiencyError,
    UnboundedFiberError,
    ValidationError,
)
from toeplab.hardy_sphere import InvariantSymbol
from toeplab.multiindex import SubtorusData, diagonal_circle, full_torus, recession_pointed
from toeplab.spectral import TestFunction
from toeplab.toric import (
    EXAMPLE_SUBTORI,
    equivariant_spectrum,
    fiber_measure,
    fiber_measure_exact,
    fiber_measure_series,
    fiber_volume,
    regular_free_check,
    theorem2_leading,
)

F_ONE = TestFunction.polynomial([1.0])
F_X = TestFunction.polynomial([0.0, 1.0])
F_X2 = TestFunction.polynomial([0.0, 0.0, 1.0])
A1_2 = InvariantSymbol.coordinate(0, 2)


def test_spectrum_diagonal_circle():
    spec = equivariant_spectrum(A1_2, diagonal_circle(2), 2)
    assert spec.count == 3
    assert spec.lambdas_exact == (Fraction(3, 4), Fraction(1, 2), Fraction(1, 4))
    assert spec.eigenvalue_of((1, 1)) == Fraction(1, 2)
    with pytest.raises(ValidationError):
        spec.eigenvalue_of((5, 5))


def test_spectrum_product_of_lines():
    sub = EXAMPLE_SUBTORI["product_of_lines"]
    spec = equivariant_spectrum(InvariantSymbol.coordinate(0, 4), sub, 1)
    # beta1 in {0,1}, twice each; |beta| = 2 so lambda = (beta1+1)/6
    assert spec.count == 4
    assert sorted(spec.lambdas_exact) == [Fraction(1, 6), Fraction(1, 6), Fraction(1, 3), Fraction(1, 3)]


def test_spectrum_validation():
    with pytest.raises(ValidationError):
        equivariant_spectrum(A1_2, diagonal_circle(3), 2)


def test_fiber_measures():
    spec = equivariant_spectrum(A1_2, diagonal_circle(2), 2)
    assert fiber_measure(spec, F_X) == pytest.approx(1.5)
    assert fiber_measure_exact(spec, [0, 1]) == Fraction(3, 2)
    assert fiber_measure_exact(spec, [0, 0, 1]) == Fraction(7, 8)
    assert fiber_measure_exact(spec, [Fraction(1, 3)]) == 1


def test_fiber_measure_series():
    rows = fiber_measure_series(A1_2, F_X, diagonal_circle(2), [10])
    (k, count, mu, scaled) = rows[0]
    assert (k, count) == (10, 11)
    assert mu == pytest.approx(5.5)
    assert scaled == pytest.approx(1.1 * pi)


@pytest.mark.parametrize(
    "name,target",
    [
        ("diagonal_circle_2", 2 * pi),
        ("diagonal_circle_3", 2 * pi**2),
        ("product_of_lines", 4 * pi**2),
        ("weighted_line", 2 * pi),
        ("full_torus_12", 1.0),
    ],
)
def test_fiber_volume_examples(name, target):
    assert fiber_volume(EXAMPLE_SUBTORI[name]) == pytest.approx(target, rel=1e-9)


def test_fiber_volume_validation():
    with pytest.raises(ValidationError):
        fiber_volume(diagonal_circle(3), k_list=[4, 8])
    unbounded = SubtorusData(n=2, d=1, weight_matrix=((1, -1),), alpha=(1,))
    with pytest.raises(UnboundedFiberError):
        fiber_volume(unbounded)


def test_regular_free_pass():
    for name in ("diagonal_circle_2", "diagonal_circle_3", "product_of_lines", "full_torus_12"):
        rep = regular_free_check(EXAMPLE_SUBTORI[name])
        assert rep.ok, name
        assert all(v.minor == 1 for v in rep.vertices)


def test_regular_free_weighted_line_fails():
    rep = regular_free_check(EXAMPLE_SUBTORI["weighted_line"])
    assert not rep.ok
    bad = [v for v in rep.vertices if not v.free]
    assert len(bad) == 1
    assert bad[0].vertex == (Fraction(0), Fraction(1))
    assert bad[0].minor == 2
    assert "minor 2" in rep.message
    js = rep.to_json()
    assert js["ok"] is False and len(js["vertices"]) == 2


def test_regular_free_degenerate_vertex():
    sub = SubtorusData(n=3, d=2, weight_matrix=((1, 0, 1), (0, 1, 1)), alpha=(1, 1))
    rep = regular_free_check(sub)
    assert not rep.ok
    degenerate = [v for v in rep.vertices if v.minor is None]
    assert len(degenerate) == 1
    assert degenerate[0].support == (2,)
    assert "degenerate" in rep.message


def test_theorem2_point_fiber():
    est, se = theorem2_leading(A1_2, F_X, EXAMPLE_SUBTORI["full_torus_12"])
    # single point a = (1, 2) normalizes to (1/3, 2/3)
    assert est == pytest.approx(1 / 3, abs=1e-15)
    assert se == 0.0


def test_theorem2_diagonal_circle():
    est, se = theorem2_leading(A1_2, F_X, diagonal_circle(2), samples=50_000, seed=2)
    assert abs(est - pi) < 3 * se
    est, se = theorem2_leading(A1_2, F_X2, diagonal_circle(2), samples=50_000, seed=2)
    assert abs(est - 2 * pi / 3) < 3 * se


def test_theorem2_product_of_lines():
    sym = InvariantSymbol.from_poly([((1, 0, 0, 0), 1), ((0, 0, 1, 0), 1)], 4)
    est, se = theorem2_leading(sym, F_X, EXAMPLE_SUBTORI["product_of_lines"], samples=50_000, seed=2)
    # (a1 + a3)/(a1+a2+a3+a4) has mean 1/2 on the product of segments
    assert abs(est - 2 * pi**2) < 3 * se


def test_theorem2_supplied_volume():
    est, se = theorem2_leading(A1_2, F_ONE, diagonal_circle(2), samples=10_000, volume=5.0)
    assert est == 5.0 and se == 0.0


def test_theorem2_requires_regular_free():
    with pytest.raises(RegularityError):
        theorem2_leading(A1_2, F_X, EXAMPLE_SUBTORI["weighted_line"])
    with pytest.raises(RegularityError):
        theorem2_leading(InvariantSymbol.coordinate(0, 1), F_X, full_torus((0,)))


def test_theorem2_sampler_efficiency_guard():
    # the simplex fills ~1/8! of its bounding box in 8 chart coordinates
    with pytest.raises(SamplerEfficiencyError):
        theorem2_leading(InvariantSymbol.coordinate(0, 9), F_X, diagonal_circle(9), samples=10_000)


def test_theorem2_validation():
    with pytest.raises(ValidationError):
        theorem2_leading(A1_2, F_X, diagonal_circle(2), samples=100)
    with pytest.raises(ValidationError):
        theorem2_leading("a1", F_X, diagonal_circle(2))


def test_example_registry():
    assert set(EXAMPLE_SUBTORI) == {
        "diagonal_circle_2",
        "diagonal_circle_3",
        "product_of_lines",
        "weighted_line",
        "full_torus_12",
    }
    for sub in EXAMPLE_SUBTORI.values():
        assert recession_pointed(sub)


def test_spectrum_csv(tmp_path):
    spec = equivariant_spectrum(A1_2, diagonal_circle(2), 2)
    path = tmp_path / "spec.csv"
    spec.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "idx,beta,eigenvalue"
    assert lines[1] == "0,2 0,0.75"
    assert len(lines) == 4
