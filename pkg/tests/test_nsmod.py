from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from superconf.nsmod import (G, L, DualVector, VermaModule, check_ns_module, dual_adjoint_act,
                             exp_modes, graded_projection, mode_act, mode_name, ns_bracket,
                             parse_mode, power_l0)
from superconf.superring import GeneratorTable

half = mpq(1, 2)
TABLE = GeneratorTable([("c", "even"), ("h", "even"), ("B1", "even"), ("A1", "even"),
                        ("N1", "odd")], caps={"B1": 3, "A1": 2})
V = VermaModule(TABLE)
c, h = TABLE.gen("c"), TABLE.gen("h")


def test_mode_names_roundtrip():
    for mode in (L(-2), L(3), G(-half), G(mpq(5, 2))):
        assert parse_mode(mode_name(mode)) == mode


def test_lowest_weight_relations():
    v = V.highest()
    assert mode_act(L(1), mode_act(L(-1), v)) == v.scale(h * 2)
    assert mode_act(G(half), mode_act(G(-half), v)) == v.scale(h * 2)
    expected = h * 2 + c * mpq(2, 3)
    assert mode_act(G(mpq(3, 2)), mode_act(G(-mpq(3, 2)), v)) == v.scale(expected)


def test_central_term_in_bracket():
    # [L(2), L(-2)] = 4 L(0) + c/2 on the lowest weight vector
    v = V.highest()
    assert mode_act(L(2), mode_act(L(-2), v)) == v.scale(h * 4 + c * half)
    bracket = ns_bracket(L(2), L(-2), c)
    image = v.scale(TABLE.zero())
    for coeff, mode in bracket:
        image = image + (v if mode is None else mode_act(mode, v)).scale(coeff)
    assert image == v.scale(h * 4 + c * half)


def test_ns_relations_on_verma():
    ok, checked, failure = check_ns_module(V, 3, 3)
    assert ok, failure
    assert checked > 100


def test_exponential_examples():
    v = V.highest()
    assert exp_modes([], v) == v
    b1 = TABLE.gen("B1")
    got = exp_modes([(b1, L(-1))], v)
    l1v = mode_act(L(-1), v)
    l2v = mode_act(L(-1), l1v)
    l3v = mode_act(L(-1), l2v)
    assert got == v + l1v.scale(b1) + l2v.scale(b1 * b1 * half) + l3v.scale(b1 ** 3 * mpq(1, 6))


def test_exponential_stops_on_low_weight():
    v = mode_act(G(-half), V.highest())
    a1 = TABLE.gen("A1")
    got = exp_modes([(a1, L(1))], v)
    assert got == v + mode_act(L(1), v).scale(a1)


@settings(max_examples=20, deadline=None)
@given(st.integers(-2, 2), st.integers(-2, 2))
def test_exponential_inverse(p, q):
    b1, n1 = TABLE.gen("B1"), TABLE.gen("N1")
    terms = [(b1 * p, L(-1)), (n1 * q, G(-half)), (TABLE.gen("A1"), L(1))]
    v = V.word_vector([G(-mpq(3, 2)), L(-1)])
    back = exp_modes([(-k, m) for k, m in terms], exp_modes(terms, v))
    assert back == v


def test_power_l0_symbolic_and_numeric():
    v = V.highest()
    base = TABLE.one() + TABLE.gen("B1")
    # base^(2 L0) with L0 = h on the lowest weight vector
    got = power_l0(base, v, 2)
    assert got == v.scale(base.binomial_power(h * 2))
    numeric_table = GeneratorTable([("c", "even"), ("h", "even")])
    fixed = VermaModule(numeric_table, c="c", h=mpq(1, 2))
    x = mode_act(L(-1), fixed.highest())
    assert power_l0(numeric_table.const(2), x, 2) == x.scale(numeric_table.const(8))


def test_dual_adjoint_pairs_with_the_opposite_mode():
    for b in V.basis_upto(2):
        for b2 in V.basis_upto(2):
            f = DualVector(V, {b2: TABLE.one()})
            v = V.basis_vector(b)
            for mode in (L(1), G(half), L(2), G(mpq(3, 2))):
                lhs = dual_adjoint_act(mode, f).pair(v)
                rhs = f.pair(mode_act((mode[0], -mode[1]), v))
                assert lhs == rhs


def test_dual_of_highest_vector():
    f = DualVector(V, {(L(-1),): TABLE.one()})
    image = dual_adjoint_act(L(1), f)
    assert image.pair(V.highest()) == f.pair(mode_act(L(-1), V.highest()))


def test_graded_projection_is_idempotent():
    v = V.highest() + mode_act(L(-1), V.highest()) + mode_act(G(-half), V.highest())
    p1 = graded_projection(v, 1)
    assert graded_projection(p1, 1) == p1
    total = graded_projection(v, 0) + graded_projection(v, half) + p1
    assert total == v
    assert graded_projection(V.highest(), half).is_zero()
