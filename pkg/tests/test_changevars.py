import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from superconf.changevars import (Annulus, ChangeAtInfinity, ChangeAtZero, Point,
                                  annulus_scaling_degeneration, annulus_verify, build_iso_family,
                                  gamma_h, gamma_theta, pair, restrict_window, shifted_change,
                                  verify_bracket_infinity, verify_bracket_zero,
                                  verify_change_infinity, verify_change_zero, verify_iso_family,
                                  verify_scaling_reduction, vertex_at, xi_dual, xi_star, xi_theta)
from superconf.coords import CoordinateData
from superconf.fockvosa import FockSpace
from superconf.nsmod import G, L, DualVector, exp_modes
from superconf.theta import symbolic_data, theta_table

half = mpq(1, 2)

ZERO = symbolic_data("zero", 1, 3, scale=True)
ZERO_SPACE = FockSpace(ZERO.table)
ZERO_CHANGE = ChangeAtZero(ZERO)
INF = symbolic_data("infinity", 2, 4)
INF_SPACE = FockSpace(INF.table)
INF_CHANGE = ChangeAtInfinity(INF)


def basis(space, weight):
    return [space.basis_vector(b) for b in space.basis_upto(weight)]


def vectors(space, weight):
    """Rational combinations of basis vectors up to ``weight``."""
    size = len(space.basis_upto(weight))
    coeffs = st.lists(st.integers(-3, 3), min_size=size, max_size=size)

    def build(values):
        out = space.vacuum().scale(space.table.zero())
        for q, v in zip(values, basis(space, weight)):
            out = out + v.scale(space.table.const(q))
        return out

    return coeffs.map(build)


# -- gamma operators


def test_gamma_h_fixes_vacuum():
    assert gamma_h(ZERO_CHANGE, ZERO_SPACE.vacuum()) == ZERO_SPACE.vacuum()


def test_gamma_h_on_tau_for_scaling():
    a = ZERO.table.gen("a")
    scaling = ChangeAtZero(CoordinateData("zero", a, [], []))
    tau = ZERO_SPACE.tau()
    assert gamma_h(scaling, tau) == tau.scale(a.invert() ** 3)


@settings(max_examples=15, deadline=None)
@given(vectors(ZERO_SPACE, 3))
def test_gamma_h_inverse(v):
    assert gamma_h(ZERO_CHANGE, gamma_h(ZERO_CHANGE, v), inverse=True) == v
    assert gamma_h(ZERO_CHANGE, gamma_h(ZERO_CHANGE, v, inverse=True)) == v


@settings(max_examples=15, deadline=None)
@given(vectors(ZERO_SPACE, 2))
def test_gamma_theta_inverse(v):
    assert gamma_theta(ZERO_CHANGE, gamma_theta(ZERO_CHANGE, v), inverse=True) == v
    assert gamma_theta(ZERO_CHANGE, gamma_theta(ZERO_CHANGE, v, inverse=True)) == v


def test_gamma_theta_identity_change():
    table = ZERO.table
    ident = ChangeAtZero(CoordinateData("zero", table.one(), [table.zero()], [table.zero()]))
    for v in basis(ZERO_SPACE, 2):
        assert gamma_theta(ident, v) == v


def test_gamma_theta_scaling_lowers_by_weight():
    a = ZERO.table.gen("a")
    scaling = ChangeAtZero(CoordinateData("zero", a, [], []))
    for b in ZERO_SPACE.basis_upto(2):
        v = ZERO_SPACE.basis_vector(b)
        assert gamma_theta(scaling, v) == v.scale(a.invert() ** int(2 * ZERO_SPACE.weight(b)))


# -- change at zero


def test_change_zero_identity():
    table = ZERO.table
    ident = ChangeAtZero(CoordinateData("zero", table.one(), [], []))
    vecs = basis(ZERO_SPACE, 1)
    assert verify_change_zero(ident, ZERO_SPACE, vecs, vecs, (-3, 3))["status"] == "pass"


def test_change_zero_symbolic():
    vecs = basis(ZERO_SPACE, 1)
    report = verify_change_zero(ZERO_CHANGE, ZERO_SPACE, vecs, vecs, (-3, 3))
    assert report["status"] == "pass", report
    assert report["checked"] == 2 * len(vecs) ** 2


def test_change_zero_scaling_is_l0_conjugation():
    vecs = basis(ZERO_SPACE, 1)
    report = verify_scaling_reduction(ZERO.table.gen("a"), ZERO_SPACE, vecs, vecs, (-3, 3))
    assert report["status"] == "pass", report


def test_change_zero_rejects_negated_theta():
    broken = ChangeAtZero(ZERO, flip_theta=True)
    vecs = basis(ZERO_SPACE, 1)
    report = verify_change_zero(broken, ZERO_SPACE, vecs, vecs, (-3, 3))
    assert report["status"] == "fail"
    assert report["first_failure"]["form"] == "forward"


def test_forward_and_rewritten_forms_are_linked():
    # applying gamma_H^{-1} and gamma_Theta^{-1} to the forward form gives the rewritten one
    origin = Point.origin_chart(ZERO.table)
    for u in basis(ZERO_SPACE, 1):
        for v in basis(ZERO_SPACE, half):
            u2 = gamma_theta(ZERO_CHANGE, u, inverse=True)
            v2 = gamma_h(ZERO_CHANGE, v, inverse=True)
            forward = vertex_at(ZERO_SPACE, gamma_theta(ZERO_CHANGE, u2),
                                gamma_h(ZERO_CHANGE, v2), ZERO_CHANGE.point, 3)
            rewritten = gamma_h(ZERO_CHANGE, vertex_at(ZERO_SPACE, u2, v2, origin, 3))
            assert restrict_window(forward, -3, 3) == restrict_window(rewritten, -3, 3)


# -- brackets


def test_bracket_with_vacuum_is_zero():
    report = verify_bracket_zero(ZERO, ZERO_SPACE, [ZERO_SPACE.vacuum()], basis(ZERO_SPACE, 1))
    assert report["status"] == "pass"


def test_bracket_single_l1_term_on_fermion():
    table = theta_table([("A1", "even")], {"A1": 1})
    data = CoordinateData("zero", table.one(), [table.gen("A1")], [table.zero()])
    space = FockSpace(table)
    u = [space.basis_vector(((), (1,)))]
    report = verify_bracket_zero(data, space, u, basis(space, 1))
    assert report["status"] == "pass", report


def test_bracket_zero_symbolic():
    vecs = basis(ZERO_SPACE, 1)
    report = verify_bracket_zero(ZERO, ZERO_SPACE, vecs, vecs, (-3, 3))
    assert report["status"] == "pass", report


def test_bracket_infinity_single_odd_parameter():
    table = theta_table([("N1", "odd")])
    data = CoordinateData("infinity", None, [table.zero()], [table.gen("N1")])
    space = FockSpace(table)
    vecs = basis(space, 1)
    report = verify_bracket_infinity(data, space, vecs, vecs, (-3, 3))
    assert report["status"] == "pass", report


# -- change at infinity


def test_xi_maps_trivial_for_zero_data():
    table = INF.table
    trivial = ChangeAtInfinity(CoordinateData("infinity", None, [table.zero()], [table.zero()]))
    for v in basis(INF_SPACE, 2):
        assert xi_star(trivial, v) == v
        assert xi_theta(trivial, v) == v
        f = DualVector(INF_SPACE, dict(v.terms))
        assert xi_dual(trivial, f).terms == f.terms


def test_xi_dual_is_adjoint():
    for b in INF_SPACE.basis_upto(3):
        f = DualVector(INF_SPACE, {b: INF.table.one()})
        xf = xi_dual(INF_CHANGE, f)
        for b2 in INF_SPACE.basis_upto(3):
            v = INF_SPACE.basis_vector(b2)
            assert pair(xf, v) == pair(f, xi_star(INF_CHANGE, v))


def test_transported_vacuum_leading_terms():
    table = INF.table
    one = xi_star(INF_CHANGE, INF_SPACE.vacuum(), inverse=True)
    tau = INF_SPACE.tau()
    omega = INF_SPACE.ns_act(L(-2), INF_SPACE.vacuum())
    low = one.project(lambda b: INF_SPACE.weight(b) <= 2)
    b2, n1, n2 = (table.gen(n) for n in ("B2", "N1", "N2"))
    assert low.coefficient(((), ())) == table.one()
    assert low.coefficient(((1,), (1,))) == n2
    # the weight two part starts with B2 omega, corrected by the product N1 N2
    assert low - INF_SPACE.vacuum() - tau.scale(n2) == \
        omega.scale(b2 - n1 * n2)


@settings(max_examples=10, deadline=None)
@given(vectors(INF_SPACE, 1))
def test_xi_theta_inverse(v):
    assert xi_theta(INF_CHANGE, xi_theta(INF_CHANGE, v), inverse=True) == v


def test_change_infinity_trivial_and_symbolic():
    table = INF.table
    trivial = ChangeAtInfinity(CoordinateData("infinity", None, [table.zero()], [table.zero()]))
    vecs = basis(INF_SPACE, half)
    assert verify_change_infinity(trivial, INF_SPACE, vecs, vecs, 2, (-2, 2))["status"] == "pass"
    small = symbolic_data("infinity", 1, 3)
    space = FockSpace(small.table)
    vecs = basis(space, 1)
    report = verify_change_infinity(ChangeAtInfinity(small), space, vecs, vecs, 3, (-3, 3))
    assert report["status"] == "pass", report


def test_change_infinity_pairings_are_cap_stable():
    small = symbolic_data("infinity", 1, 3)
    space = FockSpace(small.table)
    change = ChangeAtInfinity(small)
    u, v = space.tau(), space.basis_vector(((), (1,)))
    inner = restrict_window(vertex_at(space, xi_theta(change, u), v, change.point, 2), -2, 2)
    values = {}
    for cap in (2, 3):
        for b in space.basis_upto(cap):
            value = pair(xi_dual(change, DualVector(space, {b: small.table.one()})), inner)
            assert values.setdefault(b, value) == value


# -- isomorphic families


def test_iso_family_of_identity_is_the_original():
    table = ZERO.table
    family = build_iso_family(ChangeAtZero(CoordinateData("zero", table.one(), [], [])))
    origin = Point.origin_chart(table)
    for u in basis(ZERO_SPACE, 1):
        for v in basis(ZERO_SPACE, 1):
            assert family.vertex(u, v, 3) == vertex_at(ZERO_SPACE, u, v, origin, 3)


def test_iso_family_zero_case():
    family = build_iso_family(ZERO_CHANGE)
    assert family.vacuum == ZERO_SPACE.vacuum()
    reports = verify_iso_family(family, 1, (-3, 3))
    assert all(r["status"] == "pass" for r in reports), reports


def test_iso_family_scaling_tau():
    a = ZERO.table.gen("a")
    family = build_iso_family(ChangeAtZero(CoordinateData("zero", a, [], [])))
    expected = ZERO_SPACE.tau().scale(a.invert() ** 3)
    reports = verify_iso_family(family, 1, (-3, 3), expected_tau=expected)
    assert all(r["status"] == "pass" for r in reports), reports


@pytest.mark.parametrize("kind", ["infinity", "inverse"])
def test_iso_family_infinity(kind):
    small = symbolic_data("infinity", 1, 3)
    family = build_iso_family(ChangeAtInfinity(small), kind)
    reports = verify_iso_family(family, 1, (-3, 3))
    assert all(r["status"] == "pass" for r in reports), reports


# -- shifted change and annulus


SHIFT_TABLE = theta_table([("A1", "even"), ("z", "even"), ("a", "even"), ("M1", "odd"),
                           ("zeta", "odd")], {"A1": 1, "z": 2}, ["a"])


def test_shifted_change_with_zero_center_is_the_change_formula():
    g = SHIFT_TABLE.gen
    space = FockSpace(SHIFT_TABLE)
    change = ChangeAtZero(CoordinateData("zero", g("a"), [g("A1")], [g("M1")]))
    vecs = basis(space, 1)
    zero = SHIFT_TABLE.zero()
    assert shifted_change(change, (zero, zero), space, vecs, vecs, (-3, 3))["status"] == "pass"


def test_shifted_change_symbolic_center():
    g = SHIFT_TABLE.gen
    space = FockSpace(SHIFT_TABLE)
    vecs = basis(space, 1)
    center = (g("z"), g("zeta"))
    ident = ChangeAtZero(CoordinateData("zero", SHIFT_TABLE.one(), [], []))
    assert shifted_change(ident, center, space, vecs, vecs, (-3, 3))["status"] == "pass"
    change = ChangeAtZero(CoordinateData("zero", g("a"), [g("A1")], [g("M1")]))
    report = shifted_change(change, center, space, vecs, vecs, (-3, 3))
    assert report["status"] == "pass", report


def test_shifted_translation_matches_exponential_conjugation():
    g = SHIFT_TABLE.gen
    space = FockSpace(SHIFT_TABLE)
    z, theta = g("z"), g("zeta")
    x, phi = SHIFT_TABLE.gen("x"), SHIFT_TABLE.gen("phi")
    moved = Point(x - z - phi * theta, phi - theta)
    origin = Point.origin_chart(SHIFT_TABLE)
    for u in basis(space, 1):
        v = space.basis_vector(((1,), ()))
        direct = vertex_at(space, u, v, moved, 2)
        shift = [(z, L(-1)), (theta, G(-half))]
        conj = exp_modes([(-c, m) for c, m in shift],
                         vertex_at(space, u, exp_modes(shift, v), origin, 2))
        assert restrict_window(direct, -2, 2) == restrict_window(conj, -2, 2)


ANNULUS_TABLE = theta_table([("A1", "even"), ("B1", "even"), ("a", "even"), ("M1", "odd"),
                             ("N1", "odd")], {"A1": 1, "B1": 1}, ["a"])


def test_annulus_trivial():
    table = ANNULUS_TABLE
    space = FockSpace(table)
    f1 = ChangeAtZero(CoordinateData("zero", table.one(), [], []))
    f2 = ChangeAtInfinity(CoordinateData("infinity", None, [table.zero()], [table.zero()]))
    ann = Annulus(f1, f2)
    assert ann.point.x == table.gen("x") and ann.point.phi == table.gen("phi")
    vecs = basis(space, half)
    assert annulus_verify(f1, f2, space, vecs, vecs, 2, (-2, 2))["status"] == "pass"


def test_annulus_symbolic_and_scaling():
    g = ANNULUS_TABLE.gen
    space = FockSpace(ANNULUS_TABLE)
    vecs = basis(space, 1)
    f1 = ChangeAtZero(CoordinateData("zero", g("a"), [g("A1")], [g("M1")]))
    f2 = ChangeAtInfinity(CoordinateData("infinity", None, [g("B1")], [g("N1")]))
    report = annulus_verify(f1, f2, space, vecs, vecs, 3, (-3, 3))
    assert report["status"] == "pass", report
    report = annulus_scaling_degeneration(g("a"), space, vecs, vecs, (-3, 3))
    assert report["status"] == "pass", report
    transport = verify_iso_family(Annulus(f1, f2).family(), half, (-2, 2))
    assert all(r["status"] == "pass" for r in transport), transport
