"""Superconformal vector fields, their exponentials and the standard coordinates.

The Neveu-Schwarz derivations act on series in ``(x, phi)``::

    L_j     = -(x^(j+1) d/dx + (j+1)/2 x^j phi d/dphi)
    G_(k-1/2) = -x^k (d/dphi - phi d/dx)

Exponentiating a combination of them gives the coordinate changes used
throughout the package.  Exponentials act as automorphisms: applying
``exp(D)`` to a function ``g(x, phi)`` substitutes the image of the
coordinates, so products of exponentials compose in reverse order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from gmpy2 import mpq

from .superring import (GeneratorTable, I_UNIT, NotInvertibleError, SuperScalar, coeff_to_json,
                        parse_coeff)
from .superseries import (INF, CompositionDomainError, CoordinateMap, SeriesError, SuperSeries,
                          TruncationError, is_superconformal, map_compose)

__all__ = [
    "CoordinateData",
    "NotSuperconformalError",
    "derivation_apply",
    "apply_field",
    "exp_derivation",
    "ehat_expand",
    "ehat_inverse",
    "infinity_flow",
    "shift_map",
    "inversion_map",
    "scaling_map",
    "check_ns_relations_derivations",
    "half",
]

half = mpq(1, 2)


class NotSuperconformalError(SeriesError):
    pass


def _as_index(index) -> mpq:
    value = mpq(index) if not isinstance(index, str) else mpq(index)
    if (2 * value).denominator != 1:
        raise ValueError(f"index {index} is not in Z/2")
    return value


def _is_integer(value) -> bool:
    return value.denominator == 1


@dataclass
class CoordinateData:
    """Parameters of a coordinate change at zero or at infinity.

    ``even[j-1]`` and ``odd[j-1]`` hold the coefficients of index ``j`` and
    ``j - 1/2``.  ``a_sqrt`` is the scale factor used at zero (the square
    root of the leading coefficient of the even coordinate of its inverse).
    """

    kind: str
    a_sqrt: SuperScalar | None
    even: list = field(default_factory=list)
    odd: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("zero", "infinity"):
            raise ValueError("kind must be 'zero' or 'infinity'")
        for c in self.even:
            if c.parity() not in (0,):
                raise ValueError("even coordinate parameters must be even")
        for c in self.odd:
            if c.parity() not in (1,) and not c.is_zero():
                raise ValueError("odd coordinate parameters must be odd")
        if self.kind == "zero":
            if self.a_sqrt is None:
                raise ValueError("data at zero needs a scale factor")
            if self.a_sqrt.parity() != 0:
                raise ValueError("scale factor must be even")
            try:
                self.a_sqrt.invert()
            except NotInvertibleError as exc:
                raise ValueError("scale factor must be invertible") from exc

    @property
    def table(self) -> GeneratorTable:
        for c in [self.a_sqrt] + list(self.even) + list(self.odd):
            if c is not None:
                return c.table
        raise ValueError("empty coordinate data has no table")

    @property
    def length(self) -> int:
        return max(len(self.even), len(self.odd))

    def even_at(self, j: int) -> SuperScalar:
        return self.even[j - 1] if j - 1 < len(self.even) else self.table.zero()

    def odd_at(self, j: int) -> SuperScalar:
        return self.odd[j - 1] if j - 1 < len(self.odd) else self.table.zero()

    def field_terms(self, sign: int = 1, at_infinity: bool | None = None) -> list:
        """``sign * sum(A_j L_j + M_(j-1/2) G_(j-1/2))`` as ``(coeff, index)`` pairs.

        At infinity the indices are negated.
        """
        flip = (self.kind == "infinity") if at_infinity is None else at_infinity
        terms = []
        for j in range(1, self.length + 1):
            e, o = self.even_at(j), self.odd_at(j)
            if not e.is_zero():
                terms.append((e * sign, -j if flip else j))
            if not o.is_zero():
                terms.append((o * sign, -(j - half) if flip else j - half))
        return terms

    def map_coefficients(self, func) -> "CoordinateData":
        return CoordinateData(self.kind, None if self.a_sqrt is None else func(self.a_sqrt),
                              [func(c) for c in self.even], [func(c) for c in self.odd])

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "a_sqrt": None if self.a_sqrt is None else self.a_sqrt.to_json(),
                "even": [c.to_json() for c in self.even],
                "odd": [c.to_json() for c in self.odd]}

    @classmethod
    def from_json(cls, table: GeneratorTable, data) -> "CoordinateData":
        a = data.get("a_sqrt")
        return cls(data["kind"], None if a is None else SuperScalar.from_json(table, a),
                   [SuperScalar.from_json(table, c) for c in data.get("even", [])],
                   [SuperScalar.from_json(table, c) for c in data.get("odd", [])])


# ---------------------------------------------------------------------------
# derivations


def derivation_apply(index, f: SuperSeries, l_sign: int = 1, g_inner_sign: int = 1) -> SuperSeries:
    """Apply ``L_index`` (integer index) or ``G_index`` (half-integer index).

    ``l_sign`` and ``g_inner_sign`` exist only to build deliberately wrong
    conventions for negative tests.
    """
    index = _as_index(index)
    if _is_integer(index):
        j = int(index)
        term1 = f.dx().shift(j + 1)
        term2 = f.dphi().times_phi().shift(j).scale(mpq(j + 1, 2))
        return -(term1 + term2) if l_sign == 1 else term1 + term2
    k = int(index + half)
    inner = f.dphi() - f.dx().drop_phi().times_phi().scale(g_inner_sign)
    return -inner.shift(k)


def apply_field(terms: Sequence, f: SuperSeries, **conventions) -> SuperSeries:
    """Apply ``sum coeff * D_index`` to ``f`` with coefficients on the left."""
    result = SuperSeries.zero(f.table, f.prec)
    for coeff, index in terms:
        result = result + derivation_apply(index, f, **conventions).scale(coeff)
    return result


def _exp_series(terms: Sequence, f: SuperSeries, prec) -> SuperSeries:
    indices = [_as_index(i) for _, i in terms]
    raising = all(i > 0 for i in indices)
    table = f.table
    bound = table.nilpotency_bound()
    if prec is not None and raising:
        base_val = f.val() if f.val() != INF else 0
        guard = 2 * int(prec - base_val + 2) + 2 * bound + 8
    else:
        guard = 4 * bound + 8
        if prec is not None:
            guard += 4 * abs(int(prec)) + 8
    total = f if prec is None else f.truncate(prec)
    term = total
    for k in range(1, guard + 1):
        term = apply_field(terms, term).scale(mpq(1, k))
        if prec is not None:
            term = term.truncate(prec)
        if term.is_zero() or (prec is not None and raising and term.val() > prec):
            # adding the last term keeps the precision its truncation recorded
            return total + term
        total = total + term
    raise TruncationError("exponential of a derivation did not terminate; give a window")


def exp_derivation(terms: Sequence, target: CoordinateMap | None = None, prec=None,
                   table: GeneratorTable | None = None) -> CoordinateMap:
    """``exp(sum coeff * D_index)`` applied to each component of ``target``.

    With the identity target this is the coordinate flow of the vector field.
    The raising case is truncated at ``prec``; the lowering case must
    terminate through nilpotency of the coefficients.
    """
    if target is None:
        target = CoordinateMap.identity(table if table is not None else terms[0][0].table)
    return CoordinateMap(_exp_series(terms, target.x, prec), _exp_series(terms, target.phi, prec))


def scaling_map(a: SuperScalar) -> CoordinateMap:
    """``(x, phi) -> (a^2 x, a phi)``."""
    table = a.table
    return CoordinateMap(SuperSeries(table, {1: a * a}, {}), SuperSeries(table, {}, {0: a}))


def ehat_expand(data: CoordinateData, prec=None) -> CoordinateMap:
    """The superconformal map at zero determined by ``data``.

    It is the flow of ``-sum(A_j L_j + M_(j-1/2) G_(j-1/2))`` followed by the
    scaling ``(x, phi) -> (a^2 x, a phi)``.
    """
    if data.kind != "zero":
        raise ValueError("ehat_expand needs data at zero")
    table = data.table
    flow = exp_derivation(data.field_terms(-1), CoordinateMap.identity(table), prec)
    a = data.a_sqrt
    return CoordinateMap(flow.x.scale(a * a), flow.phi.scale(a))


def infinity_flow(data: CoordinateData, sign: int = 1, prec=None) -> CoordinateMap:
    """``exp(sign * sum(B_j L_-j + N_(j-1/2) G_(-j+1/2)))`` applied to ``(x, phi)``."""
    if data.kind != "infinity":
        raise ValueError("infinity_flow needs data at infinity")
    table = data.table
    return exp_derivation(data.field_terms(sign), CoordinateMap.identity(table), prec)


def ehat_inverse(h: CoordinateMap, order: int, check: bool = True) -> CoordinateData:
    """Recover ``(a, A, M)`` from a superconformal map fixing the origin.

    ``order`` is the largest exponent of ``x`` to match; the returned data
    has ``order - 1`` even and ``order`` odd parameters.
    """
    table = h.table
    if check:
        ok, witness = is_superconformal(h, order)
        if not ok:
            raise NotSuperconformalError(f"map is not superconformal: {witness}")
    for n in h.x.even:
        if n <= 0:
            raise CompositionDomainError("map must vanish at zero")
    for n in h.phi.even:
        if n <= 0:
            raise CompositionDomainError("map must vanish at zero")
    a = h.phi.coefficient(0, "odd")
    try:
        a_inv = a.invert()
    except NotInvertibleError as exc:
        raise CompositionDomainError("coefficient of phi is not invertible") from exc
    target = CoordinateMap(h.x.scale(a_inv * a_inv), h.phi.scale(a_inv))
    n_even = max(order - 1, 0)
    even = [table.zero() for _ in range(n_even)]
    odd = [table.zero() for _ in range(order)]

    def current():
        data = CoordinateData("zero", table.one(), list(even), list(odd))
        return exp_derivation(data.field_terms(-1), CoordinateMap.identity(table), order)

    flow = current()
    for d in range(1, order + 1):
        for _ in range(4 + table.nilpotency_bound()):
            changed = False
            if d <= n_even:
                r = target.x.coefficient(d + 1) - flow.x.coefficient(d + 1)
                if not r.is_zero():
                    even[d - 1] = even[d - 1] + r
                    changed = True
            r = target.phi.coefficient(d) - flow.phi.coefficient(d)
            if not r.is_zero():
                odd[d - 1] = odd[d - 1] + r
                changed = True
            if not changed:
                break
            flow = current()
        else:
            raise SeriesError("coefficient matching did not settle")
    # The coefficient of phi x^order in the odd coordinate involves A_order,
    # which lies beyond the requested order, so it is left out of the check.
    diff = CoordinateMap(flow.x, _drop_odd_from(flow.phi, order)).first_difference(
        CoordinateMap(target.x, _drop_odd_from(target.phi, order)), order)
    if diff is not None:
        raise NotSuperconformalError(f"map is not of the expected form near {diff}")
    return CoordinateData("zero", a, even, odd)


def _drop_odd_from(f: SuperSeries, n: int) -> SuperSeries:
    return SuperSeries(f.table, dict(f.even), {k: v for k, v in f.odd.items() if k < n}, f.prec)


def shift_map(center_x: SuperScalar, center_phi: SuperScalar) -> CoordinateMap:
    """``(x, phi) -> (x - z - phi theta, phi - theta)`` for the center ``(z, theta)``."""
    table = center_x.table
    return CoordinateMap(SuperSeries(table, {0: -center_x, 1: table.one()}, {0: -center_phi}),
                         SuperSeries(table, {0: -center_phi}, {0: table.one()}))


def inversion_map(table: GeneratorTable) -> CoordinateMap:
    """``(x, phi) -> (1/x, i phi / x)``."""
    return CoordinateMap(SuperSeries(table, {-1: table.one()}, {}),
                         SuperSeries(table, {}, {-1: table.const(I_UNIT)}))


def inversion_inverse(table: GeneratorTable) -> CoordinateMap:
    """``(x, phi) -> (1/x, -i phi / x)``, the inverse of :func:`inversion_map`."""
    return CoordinateMap(SuperSeries(table, {-1: table.one()}, {}),
                         SuperSeries(table, {}, {-1: table.const(-I_UNIT)}))


# ---------------------------------------------------------------------------
# Neveu-Schwarz relations on the derivations


def _bracket(first, second, f, **conv):
    a = derivation_apply(first, derivation_apply(second, f, **conv), **conv)
    b = derivation_apply(second, derivation_apply(first, f, **conv), **conv)
    both_odd = not _is_integer(_as_index(first)) and not _is_integer(_as_index(second))
    return a + b if both_odd else a - b


def check_ns_relations_derivations(index_bound: int = 4, power_bound: int = 6,
                                   table: GeneratorTable | None = None, **conventions):
    """Check the centerless Neveu-Schwarz relations on ``x^k`` and ``phi x^k``.

    Returns ``(ok, checked, first_failure)``.
    """
    table = table or GeneratorTable([])
    tests = []
    for k in range(-power_bound, power_bound + 1):
        tests.append(("x", k, SuperSeries.x(table, k)))
        tests.append(("phi x", k, SuperSeries.phi(table, k)))
    checked = 0
    rng = range(-index_bound, index_bound + 1)
    for m in rng:
        for n in rng:
            cases = [
                ((m, n), lambda f: derivation_apply(m + n, f, **conventions).scale(m - n)),
                ((m + half, n),
                 lambda f: derivation_apply(m + n + half, f, **conventions).scale(m - mpq(n - 1, 2))),
                ((m + half, n - half),
                 lambda f: derivation_apply(m + n, f, **conventions).scale(2)),
            ]
            for (i1, i2), rhs in cases:
                for label, k, f in tests:
                    checked += 1
                    lhs = _bracket(i1, i2, f, **conventions)
                    want = rhs(f)
                    if lhs.first_difference(want, 10 * (power_bound + index_bound)) is not None:
                        return False, checked, {"pair": [str(i1), str(i2)], "on": f"{label}^{k}"}
    return True, checked, None


def series_map_to_json(h: CoordinateMap) -> dict:
    return h.to_json()


def coeff_json(value):
    return coeff_to_json(value)


def parse_index(text: str) -> mpq:
    return _as_index(parse_coeff(text))


def compose_all(maps: Iterable[CoordinateMap], prec=None) -> CoordinateMap:
    """Compose maps listed from outermost to innermost."""
    maps = list(maps)
    result = maps[-1]
    for outer in reversed(maps[:-1]):
        result = map_compose(outer, result, prec)
    return result
