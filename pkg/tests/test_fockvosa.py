from gmpy2 import mpq

from superconf.fockvosa import (TAU, VACUUM, FockSpace, oscillator_act, parse_fock_word,
                                verify_vosa_axioms)
from superconf.nsmod import G, L
from superconf.superring import GeneratorTable, SuperScalar

half = mpq(1, 2)
TABLE = GeneratorTable([("x", "even"), ("phi", "odd")], laurent=["x"])
SPACE = FockSpace(TABLE)


def vec(plain):
    return SPACE.lift(plain)


def test_oscillator_relations():
    # alpha(1) alpha(-1) 1 = 1, psi(1/2) psi(-1/2) 1 = 1, psi(-1/2)^2 1 = 0
    one = {VACUUM: 1}
    created = oscillator_act("a", -2, VACUUM)
    assert {b: q for b, q in _act_all("a", 2, created).items() if q} == one
    created = oscillator_act("psi", -1, VACUUM)
    assert _act_all("psi", 1, created) == one
    assert not _act_all("psi", -1, created)


def _act_all(kind, index2, state):
    out = {}
    for b, q in state.items():
        for b2, q2 in oscillator_act(kind, index2, b).items():
            out[b2] = out.get(b2, 0) + q * q2
    return {b: q for b, q in out.items() if q}


def test_stress_tensor_and_weights():
    omega = vec({((1, 1), ()): half, ((), (3, 1)): half})
    assert SPACE.ns_act(L(-2), SPACE.vacuum()) == omega
    assert SPACE.ns_act(G(-half), SPACE.tau()) == omega.scale(TABLE.const(2))
    assert SPACE.ns_act(L(0), SPACE.tau()) == SPACE.tau().scale(TABLE.const(mpq(3, 2)))
    assert SPACE.basis_name(TAU) == "a-1*psi-1/2*1"


def test_parse_words():
    assert parse_fock_word(["a-1", "psi-1/2"]) == {TAU: 1}


def test_g_half_anticommutator_is_twice_l0():
    for b in SPACE.basis_upto(2):
        v = SPACE.basis_vector(b)
        lhs = SPACE.ns_act(G(half), SPACE.ns_act(G(-half), v)) + \
            SPACE.ns_act(G(-half), SPACE.ns_act(G(half), v))
        assert lhs == SPACE.ns_act(L(0), v).scale(TABLE.const(2))


def test_vacuum_vertex_operator_is_identity():
    x, phi = TABLE.gen("x"), TABLE.gen("phi")
    for b in SPACE.basis_upto(2):
        v = SPACE.basis_vector(b)
        assert SPACE.vertex_apply(SPACE.vacuum(), v, x, phi, -8) == v


def test_fermion_field_on_vacuum():
    x = TABLE.gen("x")
    psi = vec({((), (1,)): 1})
    got = SPACE.vertex_apply(psi, SPACE.vacuum(), x, TABLE.zero(), -3)
    # psi(x) 1 = psi(-1/2) 1 + x psi(-3/2) 1 + x^2 psi(-5/2) 1 + ...
    assert got.coefficient(((), (1,))) == TABLE.one()
    assert got.coefficient(((), (3,))) == x
    assert got.coefficient(((), (5,))) == x * x


def test_tau_modes_reproduce_the_ns_algebra():
    x, phi = TABLE.gen("x"), TABLE.gen("phi")
    v = SPACE.basis_vector(((1,), ()))
    y = SPACE.vertex_apply(SPACE.tau(), v, x, phi, -6)
    plain = y.map_coefficients(_without_phi)
    with_phi = (y - plain).map_coefficients(lambda c: c.derivative("phi"))
    for n in range(-2, 2):
        # G(n + 1/2) sits at x^(-n-2); the phi part carries 2 L(n) at the same power
        assert _power(plain, -n - 2) == SPACE.ns_act(G(n + half), v)
        assert _power(with_phi, -n - 2) == SPACE.ns_act(L(n), v).scale(TABLE.const(2))


def _power(vector, k):
    return vector.map_coefficients(lambda c: c.split_by("x").get(k, TABLE.zero()))


def _without_phi(c):
    bit = 1 << c.table.odd_index["phi"]
    return SuperScalar(c.table, {k: q for k, q in c.terms.items() if not k[1] & bit})


def test_axioms_at_small_cap():
    reports = verify_vosa_axioms(cap=2, window=(-3, 3))
    assert all(r["status"] == "pass" for r in reports), reports


def test_rank_one_is_rejected():
    reports = verify_vosa_axioms(cap=1, window=(-2, 2), rank=1)
    assert any(r["status"] == "fail" for r in reports)
