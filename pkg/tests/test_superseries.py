from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from superconf.coords import inversion_inverse, inversion_map, scaling_map, shift_map
from superconf.superring import GeneratorTable
from superconf.superseries import (CoordinateMap, SuperSeries, delta_identity_check, demote,
                                   is_superconformal, map_compose, map_invert, promote,
                                   series_compose, series_derive)

TABLE = GeneratorTable([("x", "even"), ("phi", "odd"), ("x0", "even"), ("a", "even"),
                        ("A1", "even"), ("z1", "odd"), ("z2", "odd")],
                       caps={"x0": 3, "A1": 3}, laurent=["a", "x"])


def series(even=None, odd=None, prec=None):
    return SuperSeries(TABLE, {k: TABLE.const(v) if isinstance(v, (int, mpq)) else v
                               for k, v in (even or {}).items()},
                       {k: TABLE.const(v) if isinstance(v, (int, mpq)) else v
                        for k, v in (odd or {}).items()}, prec)


def test_superderivative_examples():
    assert series_derive(SuperSeries.phi(TABLE)) == SuperSeries.constant(TABLE.one(), TABLE)
    x3 = SuperSeries.x(TABLE, 3)
    assert series_derive(series_derive(x3)) == series({2: 3})
    f = series({1: 1}, {2: 1})
    assert series_derive(f, "phi") == series({2: 1})


def test_compose_with_inversion_gives_reciprocal():
    inv = inversion_map(TABLE)
    assert series_compose(SuperSeries.x(TABLE), inv) == series({-1: 1})
    assert series_compose(SuperSeries.phi(TABLE), CoordinateMap.identity(TABLE)) == \
        SuperSeries.phi(TABLE)


def test_compose_binomial_shift():
    x0 = TABLE.gen("x0")
    target = CoordinateMap(series({0: x0, 1: 1}), SuperSeries.phi(TABLE))
    got = series_compose(SuperSeries.x(TABLE, 2), target)
    assert got == series({2: 1, 1: x0 * 2, 0: x0 * x0})


def test_inversion_and_inverse():
    inv = inversion_map(TABLE)
    back = map_compose(inv, inversion_inverse(TABLE))
    assert back.x == SuperSeries.x(TABLE) and back.phi == SuperSeries.phi(TABLE)
    assert is_superconformal(inv)[0]


def test_shift_composition_is_identity():
    z, theta = TABLE.gen("x0"), TABLE.gen("z1")
    forward = shift_map(z, theta)
    backward = shift_map(-z, -theta)
    both = map_compose(forward, backward)
    assert both.x == SuperSeries.x(TABLE) and both.phi == SuperSeries.phi(TABLE)
    assert is_superconformal(forward)[0]


def test_scaling_group():
    a, b = TABLE.gen("a"), TABLE.gen("a") * 3
    both = map_compose(scaling_map(a), scaling_map(b))
    assert both.x == scaling_map(a * b).x and both.phi == scaling_map(a * b).phi
    inverse = map_invert(scaling_map(a), 4)
    assert inverse.x.coefficient(1) == a.invert() ** 2
    assert inverse.phi.coefficient(0, "odd") == a.invert()


def test_invert_identity():
    ident = CoordinateMap.identity(TABLE)
    inv = map_invert(ident, 5)
    assert inv.equal_upto(ident, 5)


def test_not_superconformal_witness():
    broken = CoordinateMap(SuperSeries.x(TABLE), series({}, {0: 1, 1: 1}))
    ok, witness = is_superconformal(broken, 4)
    assert not ok
    assert witness is not None


@st.composite
def superconformal_maps(draw):
    """Superconformal maps built as (x + A1 x^2 ... ) flows through the exponential."""
    from superconf.coords import CoordinateData, ehat_expand
    a = TABLE.const(draw(st.integers(1, 3)))
    even = [TABLE.gen("A1") * draw(st.integers(-2, 2))]
    odd = [TABLE.gen("z1") * draw(st.integers(-2, 2)) + TABLE.gen("z2") * draw(st.integers(-1, 1))]
    return ehat_expand(CoordinateData("zero", a, even, odd), 7)


@settings(max_examples=15, deadline=None)
@given(superconformal_maps())
def test_invert_roundtrip(h):
    inv = map_invert(h, 6)
    assert map_compose(h, inv, 6).equal_upto(CoordinateMap.identity(TABLE), 6)
    assert map_compose(inv, h, 6).equal_upto(CoordinateMap.identity(TABLE), 6)
    assert is_superconformal(h, 6)[0]


@settings(max_examples=25)
@given(st.dictionaries(st.integers(-3, 3), st.integers(-4, 4), max_size=4),
       st.dictionaries(st.integers(-3, 3), st.integers(-4, 4), max_size=4))
def test_promote_demote_roundtrip(even, odd):
    f = series(even, odd)
    assert demote(promote(f)) == f


def test_delta_identity_and_its_negative():
    ok, checked, failure = delta_identity_check(4)
    assert ok and checked > 0 and failure is None
    flipped_ok, _, _ = delta_identity_check(4, flip_sign=True)
    assert not flipped_ok


def test_json_roundtrip():
    f = series({-1: TABLE.gen("a"), 2: 3}, {0: TABLE.gen("z1")}, prec=4)
    assert SuperSeries.from_json(TABLE, f.to_json()) == f
