"""Truncated Laurent series in one even and one odd variable.

A series is ``f(x, phi) = f_even(x) + phi * f_odd(x)`` with coefficients in a
supercommutative ring; the odd variable is always written to the left of its
coefficient.  ``prec`` is the largest exponent known exactly; ``None`` means
the series is exact (a finite Laurent polynomial with nothing dropped).
Every operation propagates precision honestly, so a result never claims
more exponents than its inputs determine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from gmpy2 import mpq

from .superring import (GeneratorTable, NotInvertibleError, SuperScalar, binomial,
                        coerce_coeff)

__all__ = [
    "SeriesError",
    "TruncationError",
    "CompositionDomainError",
    "SuperSeries",
    "CoordinateMap",
    "series_derive",
    "series_compose",
    "map_compose",
    "map_invert",
    "is_superconformal",
    "delta_identity_check",
    "promote",
    "demote",
]

INF = math.inf


class SeriesError(Exception):
    pass


class TruncationError(SeriesError):
    """An exact answer needs more terms than the requested window allows."""


class CompositionDomainError(SeriesError):
    """A composition needs an expansion that does not exist in this ring."""


def _all_nilpotent(c: SuperScalar) -> bool:
    return all(c._is_nilpotent_term(k) for k in c.terms)


def _min_prec(*values):
    finite = [v for v in values if v is not None and v != INF]
    return min(finite) if finite else None


def _clean(coeffs: Mapping[int, SuperScalar], prec) -> dict[int, SuperScalar]:
    return {n: c for n, c in coeffs.items() if not c.is_zero() and (prec is None or n <= prec)}


def _conv(left: dict, right: dict, limit, twist_left: bool = False) -> dict:
    out: dict[int, SuperScalar] = {}
    for n, a in left.items():
        if twist_left:
            a = a.involution()
        for m, b in right.items():
            k = n + m
            if limit is not None and k > limit:
                continue
            prod = a * b
            if prod.is_zero():
                continue
            cur = out.get(k)
            out[k] = prod if cur is None else cur + prod
    return {k: v for k, v in out.items() if not v.is_zero()}


def _add_dicts(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        cur = out.get(k)
        w = v if sign == 1 else -v
        out[k] = w if cur is None else cur + w
    return {k: v for k, v in out.items() if not v.is_zero()}


@dataclass
class SuperSeries:
    """``sum even[n] x^n + phi * sum odd[n] x^n`` known through exponent ``prec``."""

    table: GeneratorTable
    even: dict = field(default_factory=dict)
    odd: dict = field(default_factory=dict)
    prec: int | None = None

    def __post_init__(self):
        self.even = _clean(self.even, self.prec)
        self.odd = _clean(self.odd, self.prec)

    # -- constructors
    @classmethod
    def zero(cls, table, prec=None):
        return cls(table, {}, {}, prec)

    @classmethod
    def constant(cls, value, table=None):
        if not isinstance(value, SuperScalar):
            value = table.const(value)
        return cls(value.table, {0: value}, {})

    @classmethod
    def x(cls, table, power: int = 1):
        return cls(table, {power: table.one()}, {})

    @classmethod
    def phi(cls, table, power: int = 0):
        return cls(table, {}, {power: table.one()})

    # -- inspection
    @property
    def exact(self) -> bool:
        return self.prec is None

    def window(self) -> tuple[int, int]:
        keys = list(self.even) + list(self.odd)
        lo = min(keys) if keys else (self.prec if self.prec is not None else 0)
        hi = self.prec if self.prec is not None else (max(keys) if keys else 0)
        return lo, hi

    def val(self):
        keys = list(self.even) + list(self.odd)
        if keys:
            return min(keys)
        return INF if self.prec is None else self.prec + 1

    def val_even(self):
        if self.even:
            return min(self.even)
        return INF if self.prec is None else self.prec + 1

    def is_zero(self) -> bool:
        return not self.even and not self.odd

    def coefficient(self, n: int, part: str = "even") -> SuperScalar:
        if self.prec is not None and n > self.prec:
            raise TruncationError(f"exponent {n} beyond precision {self.prec}")
        coeffs = self.even if part == "even" else self.odd
        return coeffs.get(n, self.table.zero())

    def max_exponent(self):
        keys = list(self.even) + list(self.odd)
        return max(keys) if keys else None

    # -- ring structure
    def _coerce(self, other) -> "SuperSeries":
        if isinstance(other, SuperSeries):
            return other
        if isinstance(other, SuperScalar):
            return SuperSeries(other.table, {0: other}, {})
        return SuperSeries(self.table, {0: self.table.const(other)}, {})

    def __add__(self, other):
        other = self._coerce(other)
        prec = _min_prec(self.prec, other.prec)
        return SuperSeries(self.table, _add_dicts(self.even, other.even),
                           _add_dicts(self.odd, other.odd), prec)

    __radd__ = __add__

    def __neg__(self):
        return SuperSeries(self.table, {k: -v for k, v in self.even.items()},
                           {k: -v for k, v in self.odd.items()}, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, coeff) -> "SuperSeries":
        """Left multiplication by a ring element or number."""
        if not isinstance(coeff, SuperScalar):
            coeff = self.table.const(coeff)
        twisted = coeff.involution()
        return SuperSeries(self.table, {k: coeff * v for k, v in self.even.items()},
                           {k: twisted * v for k, v in self.odd.items()}, self.prec)

    def right_scale(self, coeff) -> "SuperSeries":
        if not isinstance(coeff, SuperScalar):
            coeff = self.table.const(coeff)
        return SuperSeries(self.table, {k: v * coeff for k, v in self.even.items()},
                           {k: v * coeff for k, v in self.odd.items()}, self.prec)

    def mul(self, other, limit=None) -> "SuperSeries":
        other = self._coerce(other)
        prec = None
        candidates = []
        if self.prec is not None:
            candidates.append(self.prec + other.val())
        if other.prec is not None:
            candidates.append(other.prec + self.val())
        if candidates:
            prec = min(candidates)
            prec = None if prec == INF else int(prec)
        if limit is not None:
            cut = limit if prec is None else min(prec, limit)
        else:
            cut = prec
        even = _conv(self.even, other.even, cut)
        odd = _add_dicts(_conv(self.even, other.odd, cut, twist_left=True),
                         _conv(self.odd, other.even, cut))
        if limit is not None:
            tops = (self.max_exponent(), other.max_exponent())
            if None not in tops and sum(tops) > limit:
                prec = limit if prec is None else min(prec, limit)
        return SuperSeries(self.table, even, odd, prec)

    def __mul__(self, other):
        if isinstance(other, SuperSeries):
            return self.mul(other)
        return self.mul(self._coerce(other))

    def __rmul__(self, other):
        return self._coerce(other).mul(self)

    def shift(self, k: int) -> "SuperSeries":
        """Multiply by ``x**k``."""
        return SuperSeries(self.table, {n + k: v for n, v in self.even.items()},
                           {n + k: v for n, v in self.odd.items()},
                           None if self.prec is None else self.prec + k)

    def truncate(self, n) -> "SuperSeries":
        if n is None or n == INF:
            return self
        top = self.max_exponent()
        if self.prec is None and (top is None or top <= n):
            return self
        prec = n if self.prec is None else min(self.prec, n)
        return SuperSeries(self.table, self.even, self.odd, prec)

    def with_prec(self, prec) -> "SuperSeries":
        return SuperSeries(self.table, self.even, self.odd, prec)

    def map_coefficients(self, func) -> "SuperSeries":
        return SuperSeries(self.table, {k: func(v) for k, v in self.even.items()},
                           {k: func(v) for k, v in self.odd.items()}, self.prec)

    def equal_upto(self, other: "SuperSeries", n: int) -> bool:
        return self.first_difference(other, n) is None

    def first_difference(self, other: "SuperSeries", n: int):
        """Lowest ``(part, exponent)`` where the series differ, up to ``n``."""
        for p in (self.prec, other.prec):
            if p is not None and p < n:
                raise TruncationError(f"cannot compare through {n}: precision {p}")
        keys = sorted(set(self.even) | set(other.even) | set(self.odd) | set(other.odd))
        for k in keys:
            if k > n:
                break
            for part in ("even", "odd"):
                a = (self.even if part == "even" else self.odd).get(k, self.table.zero())
                b = (other.even if part == "even" else other.odd).get(k, other.table.zero())
                if a != b:
                    return part, k
        return None

    # -- calculus
    def dx(self) -> "SuperSeries":
        return SuperSeries(self.table, {n - 1: v * n for n, v in self.even.items() if n},
                           {n - 1: v * n for n, v in self.odd.items() if n},
                           None if self.prec is None else self.prec - 1)

    def dphi(self) -> "SuperSeries":
        return SuperSeries(self.table, dict(self.odd), {}, self.prec)

    def superderivative(self) -> "SuperSeries":
        """``(d/dphi + phi d/dx)`` applied to the series."""
        deriv = self.dx()
        return SuperSeries(self.table, dict(self.odd), dict(deriv.even), deriv.prec)

    def times_phi(self) -> "SuperSeries":
        """Left multiplication by the odd variable."""
        return SuperSeries(self.table, {}, dict(self.even), self.prec)

    def drop_phi(self) -> "SuperSeries":
        return SuperSeries(self.table, dict(self.even), {}, self.prec)

    # -- powers and composition
    def power(self, n: int, work=None) -> "SuperSeries":
        if n < 0:
            return self.inverse(work).power(-n, work)
        result = SuperSeries.constant(self.table.one())
        base = self
        while n:
            if n & 1:
                result = result.mul(base, work)
            n >>= 1
            if n:
                base = base.mul(base, work)
        return result

    def inverse(self, work=None) -> "SuperSeries":
        """Multiplicative inverse, expanding in positive powers past the lowest even term.

        The lowest even coefficient must be invertible in the ring; the rest is
        expanded as a geometric series.  ``work`` bounds the exponents kept
        when the expansion does not terminate.
        """
        if not self.even:
            raise CompositionDomainError("series with vanishing even part is not invertible")
        v = lead_inv = None
        for n in sorted(self.even):
            try:
                lead_inv = self.even[n].invert()
                v = n
                break
            except NotInvertibleError:
                if not _all_nilpotent(self.even[n]):
                    raise CompositionDomainError(
                        f"coefficient at x^{n} is neither invertible nor nilpotent")
        if v is None:
            raise CompositionDomainError("no invertible coefficient in the even part")
        for n, c in self.odd.items():
            if not _all_nilpotent(c):
                raise CompositionDomainError("odd part must have nilpotent coefficients")
        rel = self.shift(-v).scale(lead_inv)
        soul = rel - 1
        rel_work = None if work is None else work + v
        total = SuperSeries.constant(self.table.one())
        term = total
        exact_stop = False
        bound = self.table.nilpotency_bound()
        drop = bound * max(0, -soul.val()) if soul.val() != INF else 0
        guard = 4 * (abs(rel_work or 0) + 4) + 4 * bound + drop + 4
        for _ in range(guard + 1):
            term = -term.mul(soul, rel_work)
            if term.is_zero():
                exact_stop = term.prec is None
                break
            if rel_work is not None and term.val() - drop > rel_work:
                break
            total = total + term
        else:
            raise TruncationError("inverse expansion did not settle; pass a smaller window")
        if rel_work is None and not exact_stop:
            raise TruncationError("inverse needs a window")
        if not exact_stop:
            total = total.truncate(rel_work).with_prec(
                rel_work if total.prec is None else min(total.prec, rel_work))
        return total.scale(lead_inv).shift(-v)

    def compose(self, target: "CoordinateMap", prec=None) -> "SuperSeries":
        """Substitute ``x -> target.x`` and ``phi -> target.phi``."""
        return series_compose(self, target, prec)

    def __repr__(self):
        parts = []
        for n in sorted(self.even):
            parts.append(f"({self.even[n]})*x^{n}")
        for n in sorted(self.odd):
            parts.append(f"phi*({self.odd[n]})*x^{n}")
        body = " + ".join(parts) if parts else "0"
        return body + ("" if self.prec is None else f" + O(x^{self.prec + 1})")

    # -- JSON
    def to_json(self) -> dict:
        lo, hi = self.window()
        return {"window": [lo, hi],
                "exact": self.prec is None,
                "even": {str(n): v.to_json() for n, v in sorted(self.even.items())},
                "odd": {str(n): v.to_json() for n, v in sorted(self.odd.items())}}

    @classmethod
    def from_json(cls, table: GeneratorTable, data: Mapping) -> "SuperSeries":
        lo, hi = data["window"]
        even = {int(n): SuperScalar.from_json(table, v) for n, v in data.get("even", {}).items()}
        odd = {int(n): SuperScalar.from_json(table, v) for n, v in data.get("odd", {}).items()}
        for n in list(even) + list(odd):
            if not lo <= n <= hi:
                raise ValueError(f"exponent {n} outside declared window {lo, hi}")
        return cls(table, even, odd, None if data.get("exact", False) else hi)


@dataclass
class CoordinateMap:
    """A pair ``(x~, phi~)`` of series in the source variables."""

    x: SuperSeries
    phi: SuperSeries

    @property
    def table(self):
        return self.x.table

    @classmethod
    def identity(cls, table):
        return cls(SuperSeries.x(table), SuperSeries.phi(table))

    @property
    def prec(self):
        return _min_prec(self.x.prec, self.phi.prec)

    def truncate(self, n) -> "CoordinateMap":
        return CoordinateMap(self.x.truncate(n), self.phi.truncate(n))

    def map_coefficients(self, func) -> "CoordinateMap":
        return CoordinateMap(self.x.map_coefficients(func), self.phi.map_coefficients(func))

    def first_difference(self, other: "CoordinateMap", n: int):
        diff = self.x.first_difference(other.x, n)
        if diff is not None:
            return ("x",) + diff
        diff = self.phi.first_difference(other.phi, n)
        if diff is not None:
            return ("phi",) + diff
        return None

    def equal_upto(self, other: "CoordinateMap", n: int) -> bool:
        return self.first_difference(other, n) is None

    def to_json(self) -> dict:
        return {"x": self.x.to_json(), "phi": self.phi.to_json()}

    @classmethod
    def from_json(cls, table, data) -> "CoordinateMap":
        return cls(SuperSeries.from_json(table, data["x"]), SuperSeries.from_json(table, data["phi"]))


# ---------------------------------------------------------------------------
# operations


def series_derive(f: SuperSeries, kind: str = "D") -> SuperSeries:
    """Derivative of a series: ``"x"``, ``"phi"`` or the superderivative ``"D"``."""
    if kind == "x":
        return f.dx()
    if kind == "phi":
        return f.dphi()
    if kind == "D":
        return f.superderivative()
    raise ValueError(f"unknown derivative kind {kind!r}")


def series_compose(f: SuperSeries, target: CoordinateMap, prec=None) -> SuperSeries:
    """``f(target.x, target.phi)``, expanding negative powers past the leading term."""
    big_x, big_phi = target.x, target.phi
    goal = prec
    if f.prec is not None:
        vx = big_x.val()
        if vx == INF or vx < 1:
            raise CompositionDomainError(
                "a truncated series can only be composed with a map of positive valuation")
        bound = min((f.prec + 1) * vx, big_phi.val() + (f.prec + 1) * vx) - 1
        goal = bound if goal is None else min(goal, bound)
    exps = sorted(set(f.even) | set(f.odd))
    if not exps:
        return SuperSeries.zero(f.table, goal)
    neg = [n for n in exps if n < 0]
    pos = [n for n in exps if n > 0]
    work = None
    if goal is not None:
        vx = big_x.val()
        vphi = big_phi.val()
        spread = max([abs(n) for n in exps] + [1])
        extra = spread * (abs(vx) if vx != INF else 1) + (abs(vphi) if vphi != INF else 0) + 2
        work = int(goal + extra)

    powers: dict[int, SuperSeries] = {0: SuperSeries.constant(f.table.one())}
    if pos:
        cur = powers[0]
        for k in range(1, max(pos) + 1):
            cur = cur.mul(big_x, work)
            powers[k] = cur
    if neg:
        inv = big_x.inverse(work)
        cur = powers[0]
        for k in range(1, -min(neg) + 1):
            cur = cur.mul(inv, work)
            powers[-k] = cur

    even_sum = SuperSeries.zero(f.table)
    odd_sum = SuperSeries.zero(f.table)
    for n in exps:
        if n in f.even:
            even_sum = even_sum + powers[n].scale(f.even[n])
        if n in f.odd:
            odd_sum = odd_sum + powers[n].scale(f.odd[n])
    result = even_sum + big_phi.mul(odd_sum, work)
    if goal is not None:
        result = result.truncate(goal)
    return result


def map_compose(outer: CoordinateMap, inner: CoordinateMap, prec=None) -> CoordinateMap:
    """``outer o inner``."""
    return CoordinateMap(series_compose(outer.x, inner, prec), series_compose(outer.phi, inner, prec))


def _check_vanishing(h: CoordinateMap):
    for n in h.x.even:
        if n <= 0:
            raise CompositionDomainError("map must vanish at zero in its even component")
    for n in list(h.x.odd) + list(h.phi.odd):
        if n < 0:
            raise CompositionDomainError("map must be a power series")
    for n in h.phi.even:
        if n <= 0:
            raise CompositionDomainError("odd component must vanish at zero")


def map_invert(h: CoordinateMap, prec: int) -> CoordinateMap:
    """Compositional inverse of a map fixing the origin, through exponent ``prec``."""
    _check_vanishing(h)
    table = h.table
    try:
        alpha_inv = h.x.coefficient(1).invert()
        beta_inv = h.phi.coefficient(0, "odd").invert()
    except NotInvertibleError as exc:
        raise CompositionDomainError("linear part of the map is not invertible") from exc
    ident = CoordinateMap.identity(table)
    guess = CoordinateMap(SuperSeries.x(table).scale(alpha_inv).with_prec(prec),
                          SuperSeries.phi(table).scale(beta_inv).with_prec(prec))
    limit = 2 * prec + 2 * table.n_odd + 2 * sum(table.caps.values()) + 6
    for _ in range(limit):
        image = map_compose(h, guess, prec)
        err_x = ident.x - image.x
        err_phi = ident.phi - image.phi
        err_x = err_x.truncate(prec)
        err_phi = err_phi.truncate(prec)
        if err_x.is_zero() and err_phi.is_zero():
            return guess
        guess = CoordinateMap((guess.x + err_x.scale(alpha_inv)).truncate(prec),
                              (guess.phi + err_phi.scale(beta_inv)).truncate(prec))
    raise SeriesError("reversion did not converge")


def is_superconformal(h: CoordinateMap, upto=None):
    """Check ``D x~ = phi~ D phi~`` with ``D phi~`` nonvanishing.

    Returns ``(ok, witness)`` where the witness names the lowest offending
    coefficient, or ``None`` when the map passes.
    """
    d_x = h.x.superderivative()
    d_phi = h.phi.superderivative()
    lhs = d_x
    rhs = h.phi.mul(d_phi)
    n = _min_prec(lhs.prec, rhs.prec)
    if upto is not None:
        n = upto if n is None else min(n, upto)
    if n is None:
        keys = list(lhs.even) + list(lhs.odd) + list(rhs.even) + list(rhs.odd)
        n = max(keys) if keys else 0
    diff = lhs.first_difference(rhs, n)
    if diff is not None:
        part, k = diff
        got = (lhs.even if part == "even" else lhs.odd).get(k, h.table.zero())
        want = (rhs.even if part == "even" else rhs.odd).get(k, h.table.zero())
        return False, {"part": part, "exponent": k, "lhs": got, "rhs": want}
    if d_phi.is_zero():
        return False, {"part": "D phi", "exponent": None, "lhs": h.table.zero(), "rhs": None}
    return True, None


def delta_identity_check(window: int, flip_sign: bool = False):
    """Coefficientwise check of the odd formal delta identity.

    Compares ``x1^-1 delta((x2 + x0 + phi1 phi2)/x1)`` with
    ``x2^-1 delta((x1 - x0 - phi1 phi2)/x2)``, both expanded in nonnegative
    powers of ``x0``, for every exponent triple with absolute values at most
    ``window``.  Both the plain part and the ``phi1 phi2`` part are compared.
    Returns ``(ok, checked, first_failure)``.
    """
    sign = -1 if flip_sign else 1
    checked = 0
    rng = range(-window, window + 1)
    for a in range(0, window + 1):
        for b in rng:
            for c in rng:
                # left side: x1 power b fixes n
                n = -b - 1
                lhs_plain = binomial(n, a) if a + c == n else mpq(0)
                lhs_nil = n * binomial(n - 1, a) if a + c == n - 1 else mpq(0)
                m = -c - 1
                rhs_plain = binomial(m, a) * (-1) ** a if a + b == m else mpq(0)
                rhs_nil = -sign * m * binomial(m - 1, a) * (-1) ** a if a + b == m - 1 else mpq(0)
                checked += 2
                if lhs_plain != rhs_plain or lhs_nil != rhs_nil:
                    return False, checked, {"x0": a, "x1": b, "x2": c,
                                            "lhs": [str(lhs_plain), str(lhs_nil)],
                                            "rhs": [str(rhs_plain), str(rhs_nil)]}
    return True, checked, None


# ---------------------------------------------------------------------------
# bridge between series and ring elements with promoted variables


def promote(f: SuperSeries, x_name: str = "x", phi_name: str = "phi") -> SuperScalar:
    """Turn a series into a ring element in which ``x`` and ``phi`` are generators."""
    table = f.table
    phi = table.gen(phi_name)
    result = table.zero()
    for n, c in f.even.items():
        result = result + table.gen(x_name, n) * c if n else result + c
    for n, c in f.odd.items():
        result = result + phi * (table.gen(x_name, n) * c if n else c)
    return result


def demote(s: SuperScalar, x_name: str = "x", phi_name: str = "phi", prec=None) -> SuperSeries:
    """Inverse of :func:`promote`: read ``x`` and ``phi`` back as series variables."""
    table = s.table
    xi = table.even_index[x_name]
    bit = 1 << table.odd_index[phi_name]
    even: dict[int, dict] = {}
    odd: dict[int, dict] = {}
    for (exps, mask), c in s.terms.items():
        n = exps[xi]
        rest = exps[:xi] + (0,) + exps[xi + 1:]
        if mask & bit:
            before = (mask & (bit - 1)).bit_count() & 1
            target = odd.setdefault(n, {})
            target[(rest, mask ^ bit)] = -c if before else c
        else:
            even.setdefault(n, {})[(rest, mask)] = c
    return SuperSeries(table, {n: SuperScalar(table, t) for n, t in even.items()},
                       {n: SuperScalar(table, t) for n, t in odd.items()}, prec)


def scalar_series(value, table) -> SuperSeries:
    return SuperSeries.constant(coerce_coeff(value) if not isinstance(value, SuperScalar) else value,
                                table)
