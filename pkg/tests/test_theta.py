import pytest
from gmpy2 import mpq

from superconf.coords import CoordinateData
from superconf.theta import (SQRT_T, ThetaFamily, symbolic_data, theta1, theta2, theta_table,
                             verify_theta_identity)

half = mpq(1, 2)


def test_trivial_data_gives_trivial_families():
    table = theta_table()
    first = theta1(CoordinateData("zero", table.one(), [table.zero()], [table.zero()]), 2)
    assert first.specialize({SQRT_T: 1}).is_trivial()
    second = theta2(CoordinateData("infinity", None, [table.zero()], [table.zero()]), 2)
    assert second.is_trivial()


def test_scaling_only_family():
    # a pure scaling is absorbed by the rescaled frame: nothing is left over
    table = theta_table([("a", "even")], laurent=["a"])
    fam = theta1(CoordinateData("zero", table.gen("a"), [table.zero()], [table.zero()]), 2)
    assert fam.is_trivial()


def test_first_family_at_order_three():
    data = symbolic_data("zero", 1, 3)
    fam = theta1(data, 2)
    t = data.table
    root, x, phi = t.gen(SQRT_T), t.gen("x"), t.gen("phi")
    a1, m1 = t.gen("A1"), t.gen("M1")
    assert fam.exp_theta0 == t.one() + x * root ** 2 * a1 + root * phi * m1
    assert fam.theta(1) == root ** 2 * a1 + root ** 3 * a1 * phi * m1
    assert fam.theta(half) == root ** 2 * a1 * phi + root * m1
    assert fam.theta(2).is_zero() and fam.theta(mpq(3, 2)).is_zero()


def test_first_family_parities_and_polynomiality():
    data = symbolic_data("zero", 2, 4, scale=True)
    fam = theta1(data, 3)
    for j in range(1, 4):
        assert fam.theta(j).parity() in (0, None)
        assert fam.theta(j - half).parity() in (1, None)
        for value in (fam.theta(j), fam.theta(j - half)):
            r = value.degree_range("x")
            assert r is None or r[0] >= 0


def test_second_family_lives_in_inverse_powers():
    data = symbolic_data("infinity", 2, 4)
    fam = theta2(data, 3)
    assert not fam.is_trivial()
    for value in [fam.exp_theta0 - fam.table.one()] + fam.even + fam.odd:
        r = value.degree_range("x")
        assert r is None or r[1] < 0


def test_two_truncation_orders_agree():
    low = theta1(symbolic_data("zero", 1, 3), 2)
    high = theta1(symbolic_data("zero", 1, 5), 2)
    target = low.table
    projected = high.map_coefficients(lambda c: c.embed(target))
    assert projected.exp_theta0 == low.exp_theta0
    assert projected.even == low.even and projected.odd == low.odd


def test_json_shape():
    fam = theta1(symbolic_data("zero", 1, 3), 1)
    out = fam.to_json()
    assert out["kind"] == "first" and out["cutoff"] == 1
    assert {"expTheta0", "theta:1", "theta:1/2"} <= set(out)


@pytest.mark.parametrize("kind,scale", [("first", False), ("first", True), ("second", False)])
def test_identities_hold(kind, scale):
    data = symbolic_data("zero" if kind == "first" else "infinity", 1, 3, scale=scale)
    report = verify_theta_identity(kind, data)
    assert report["status"] == "pass", report


@pytest.mark.parametrize("kind", ["first", "second"])
def test_identities_hold_with_two_parameters(kind):
    data = symbolic_data("zero" if kind == "first" else "infinity", 2, 4)
    report = verify_theta_identity(kind, data, weight=mpq(3, 2))
    assert report["status"] == "pass", report


@pytest.mark.parametrize("kind", ["first", "second"])
def test_uncorrected_first_factor_fails(kind):
    data = symbolic_data("zero" if kind == "first" else "infinity", 1, 3)
    report = verify_theta_identity(kind, data, corrected=False)
    assert report["status"] == "fail"
    assert report["first_failure"] is not None


def test_specialize_and_mode_terms():
    fam = theta1(symbolic_data("zero", 1, 3), 1).specialize({SQRT_T: 1})
    assert isinstance(fam, ThetaFamily)
    terms = fam.mode_terms(-1)
    assert len(terms) == 2
    assert all(not c.contains(SQRT_T) for c, _ in terms)
