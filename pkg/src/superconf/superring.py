"""Exact arithmetic in a free supercommutative ring.

Coefficients are Gaussian rationals.  A ring is described by a
:class:`GeneratorTable` listing even and odd generators; even generators may
carry a nilpotency cap (monomials above the cap are dropped, which is the
quotient by a monomial ideal) or be declared Laurent (negative exponents
allowed, no cap).  Odd generators square to zero and anticommute.

Elements are stored as dictionaries mapping a monomial key
``(even_exponents, odd_mask)`` to a nonzero coefficient.  The odd part of a
monomial is always the product of its odd generators in table order.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from operator import add
from typing import Iterable, Mapping

from gmpy2 import mpq

__all__ = [
    "RingError",
    "TableMismatchError",
    "NotInvertibleError",
    "ParityError",
    "GaussianRational",
    "GeneratorTable",
    "SuperScalar",
    "I_UNIT",
    "coerce_coeff",
    "parse_coeff",
    "format_coeff",
    "binomial",
    "ring_add",
    "ring_mul",
    "ring_invert",
    "ring_substitute",
]


class RingError(Exception):
    """Base class for ring level failures."""


class TableMismatchError(RingError):
    pass


class NotInvertibleError(RingError):
    pass


class ParityError(RingError):
    pass


# ---------------------------------------------------------------------------
# coefficients


def _gauss(re_part, im_part):
    if im_part == 0:
        return re_part
    return GaussianRational(re_part, im_part)


class GaussianRational:
    """A Gaussian rational with nonzero imaginary part.

    Arithmetic collapses back to a plain rational whenever the imaginary
    part cancels, so real computations never see this type.
    """

    __slots__ = ("re", "im")

    def __init__(self, re_part=0, im_part=0):
        self.re = mpq(re_part)
        self.im = mpq(im_part)

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return _gauss(self.re + other.re, self.im + other.im)
        try:
            return _gauss(self.re + other, self.im)
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return _gauss(self.re * other.re - self.im * other.im,
                          self.re * other.im + self.im * other.re)
        try:
            return _gauss(self.re * other, self.im * other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def inverse(self):
        norm = self.re * self.re + self.im * self.im
        return _gauss(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            return self * other.inverse()
        return _gauss(self.re / other, self.im / other)

    def __rtruediv__(self, other):
        return other * self.inverse()

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return False

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return True

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        return f"({format_coeff(self.re)}{'+' if self.im >= 0 else '-'}{format_coeff(abs(self.im))}i)"


I_UNIT = GaussianRational(0, 1)


def coerce_coeff(value):
    """Return ``value`` as an exact coefficient (rational or Gaussian)."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, complex):
        raise TypeError("floating point complex numbers are not exact coefficients")
    if isinstance(value, float):
        raise TypeError("floating point numbers are not exact coefficients")
    if isinstance(value, str):
        return mpq(value)
    return mpq(value)


_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


def parse_coeff(data) -> object:
    """Parse ``{"re": "p/q", "im": "p/q"}`` or a bare rational string."""
    if isinstance(data, Mapping):
        re_s, im_s = str(data.get("re", "0")), str(data.get("im", "0"))
        for text in (re_s, im_s):
            if not _RATIONAL_RE.match(text.strip()):
                raise ValueError(f"malformed rational {text!r}")
        return _gauss(mpq(re_s), mpq(im_s))
    text = str(data).strip()
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"malformed rational {text!r}")
    return mpq(text)


def format_coeff(value) -> str:
    value = mpq(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def coeff_to_json(value) -> dict:
    if isinstance(value, GaussianRational):
        return {"re": format_coeff(value.re), "im": format_coeff(value.im)}
    return {"re": format_coeff(value), "im": "0"}


def binomial(top, k: int):
    """Generalized binomial coefficient for an exact number ``top``."""
    out = mpq(1)
    for i in range(k):
        out = out * (top - i) / (i + 1)
    return out


def _koszul_parity(left: int, right: int) -> int:
    """Parity of the reordering sign for ``left`` times ``right``.

    Counts pairs (i in left, j in right) with i > j.
    """
    count = 0
    while right:
        low = right & -right
        j = low.bit_length() - 1
        count += (left >> (j + 1)).bit_count()
        right ^= low
    return count & 1


# ---------------------------------------------------------------------------
# generator tables


class GeneratorTable:
    """Ordered list of generators with parities, caps and Laurent flags.

    ``entries`` is a sequence of ``(name, "even" | "odd")`` pairs.  ``caps``
    maps even generator names to a maximal exponent.  ``laurent`` names even
    generators that may appear with negative exponents; those cannot carry a
    cap.
    """

    def __init__(self, entries: Iterable[tuple[str, str]], caps: Mapping[str, int] | None = None,
                 laurent: Iterable[str] = ()):
        entries = tuple((str(n), str(p)) for n, p in entries)
        names = [n for n, _ in entries]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        for n, p in entries:
            if p not in ("even", "odd"):
                raise ValueError(f"bad parity {p!r} for {n}")
        self.entries = entries
        self.even_names = tuple(n for n, p in entries if p == "even")
        self.odd_names = tuple(n for n, p in entries if p == "odd")
        self.even_index = {n: i for i, n in enumerate(self.even_names)}
        self.odd_index = {n: i for i, n in enumerate(self.odd_names)}
        self.caps = dict(caps or {})
        self.laurent = frozenset(laurent)
        for n in self.caps:
            if n not in self.even_index:
                raise ValueError(f"cap on non-even generator {n}")
            if n in self.laurent:
                raise ValueError(f"Laurent generator {n} cannot be capped")
        for n in self.laurent:
            if n not in self.even_index:
                raise ValueError(f"Laurent flag on non-even generator {n}")
        self.capped = tuple((self.even_index[n], c) for n, c in sorted(self.caps.items()))
        self.n_even = len(self.even_names)
        self.n_odd = len(self.odd_names)
        self._zero_exp = (0,) * self.n_even
        self._koszul_cache: dict = {}
        self._key = (self.entries, tuple(sorted(self.caps.items())), tuple(sorted(self.laurent)))
        self._laurent_mask = tuple(n in self.laurent for n in self.even_names)
        self._capped_mask = tuple(n in self.caps for n in self.even_names)

    def __eq__(self, other):
        return isinstance(other, GeneratorTable) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"GeneratorTable({list(self.entries)}, caps={self.caps}, laurent={sorted(self.laurent)})"

    def parity_of(self, name: str) -> int:
        if name in self.odd_index:
            return 1
        if name in self.even_index:
            return 0
        raise KeyError(name)

    def __contains__(self, name):
        return name in self.even_index or name in self.odd_index

    def koszul(self, left: int, right: int) -> int:
        key = (left, right)
        cached = self._koszul_cache.get(key)
        if cached is None:
            cached = _koszul_parity(left, right)
            self._koszul_cache[key] = cached
        return cached

    # constructors
    def zero(self) -> "SuperScalar":
        return SuperScalar(self, {})

    def one(self) -> "SuperScalar":
        return self.const(1)

    def const(self, value) -> "SuperScalar":
        value = coerce_coeff(value)
        if not value:
            return SuperScalar(self, {})
        return SuperScalar(self, {(self._zero_exp, 0): value})

    def gen(self, name: str, power: int = 1) -> "SuperScalar":
        return self.monomial(1, {name: power} if name in self.even_index else {},
                             [name] if name in self.odd_index else [])

    def monomial(self, coeff=1, even: Mapping[str, int] | None = None,
                 odd: Iterable[str] = ()) -> "SuperScalar":
        """Build ``coeff * prod(even) * prod(odd)``; odd names are multiplied left to right."""
        exps = list(self._zero_exp)
        for name, e in (even or {}).items():
            if name not in self.even_index:
                raise KeyError(f"unknown even generator {name}")
            if e < 0 and name not in self.laurent:
                raise ValueError(f"negative exponent on non-Laurent generator {name}")
            exps[self.even_index[name]] += e
        result = SuperScalar(self, {(tuple(exps), 0): coerce_coeff(coeff)} if coerce_coeff(coeff) else {})
        result = result._apply_caps()
        for name in odd:
            if name not in self.odd_index:
                raise KeyError(f"unknown odd generator {name}")
            bit = 1 << self.odd_index[name]
            result = result * SuperScalar(self, {(self._zero_exp, bit): mpq(1)})
        return result

    def nilpotency_bound(self) -> int | None:
        """Longest possible nonzero product of nilpotent monomials, if finite."""
        return self.n_odd + sum(self.caps.values())


# ---------------------------------------------------------------------------
# elements


_MPQ = type(mpq(1))


def _is_number(value) -> bool:
    return isinstance(value, (int, _MPQ, GaussianRational, Fraction))


class SuperScalar:
    """Element of a free supercommutative ring with exact coefficients."""

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: dict):
        self.table = table
        self.terms = terms

    # -- coercion helpers
    def _coerce(self, other) -> "SuperScalar":
        if isinstance(other, SuperScalar):
            if other.table is not self.table and other.table != self.table:
                raise TableMismatchError("operands come from different generator tables")
            return other
        if _is_number(other):
            return self.table.const(other)
        raise TypeError(f"cannot combine SuperScalar with {type(other).__name__}")

    def _apply_caps(self) -> "SuperScalar":
        capped = self.table.capped
        if not capped:
            return self
        terms = {k: v for k, v in self.terms.items()
                 if all(k[0][i] <= c for i, c in capped)}
        return SuperScalar(self.table, terms)

    # -- arithmetic
    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            cur = out.get(k)
            if cur is None:
                out[k] = v
            else:
                cur = cur + v
                if cur:
                    out[k] = cur
                else:
                    del out[k]
        return SuperScalar(self.table, out)

    __radd__ = __add__

    def __neg__(self):
        return SuperScalar(self.table, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, number) -> "SuperScalar":
        number = coerce_coeff(number)
        if not number:
            return SuperScalar(self.table, {})
        if number == 1:
            return self
        return SuperScalar(self.table, {k: v * number for k, v in self.terms.items()})

    def __mul__(self, other):
        if _is_number(other):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return SuperScalar(self.table, _mul_terms(self.table, self.terms, other.terms))

    def __rmul__(self, other):
        if _is_number(other):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if _is_number(other):
            return self.scale(1 / coerce_coeff(other))
        return self * self._coerce(other).invert()

    def __rtruediv__(self, other):
        return self.invert() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers; use binomial_power for symbolic exponents")
        if n < 0:
            return self.invert() ** (-n)
        result = self.table.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, SuperScalar):
            if other.table != self.table:
                return False
            return self.terms == other.terms
        if _is_number(other):
            return self.terms == self.table.const(other).terms
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- structure
    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements, ``None`` for mixed, 0 for zero."""
        parities = {k[1].bit_count() & 1 for k in self.terms}
        if not parities:
            return 0
        if len(parities) == 1:
            return parities.pop()
        return None

    def even_part(self) -> "SuperScalar":
        return SuperScalar(self.table, {k: v for k, v in self.terms.items() if not k[1].bit_count() & 1})

    def odd_part(self) -> "SuperScalar":
        return SuperScalar(self.table, {k: v for k, v in self.terms.items() if k[1].bit_count() & 1})

    def involution(self) -> "SuperScalar":
        """The parity automorphism: negate odd terms."""
        return SuperScalar(self.table, {k: (-v if k[1].bit_count() & 1 else v)
                                        for k, v in self.terms.items()})

    def body(self):
        """Coefficient of the unit monomial."""
        return self.terms.get((self.table._zero_exp, 0), mpq(0))

    def is_constant(self) -> bool:
        return all(k == (self.table._zero_exp, 0) for k in self.terms)

    def coefficient(self, even: Mapping[str, int] | None = None, odd: Iterable[str] = ()):
        """Coefficient of ``prod(even) * prod(odd)`` with odd names in the given order."""
        probe = self.table.monomial(1, even or {}, odd)
        if not probe.terms:
            return mpq(0)
        (key, sign), = probe.terms.items()
        return self.terms.get(key, mpq(0)) * sign

    def degree_range(self, name: str) -> tuple[int, int] | None:
        i = self.table.even_index[name]
        exps = [k[0][i] for k in self.terms]
        if not exps:
            return None
        return min(exps), max(exps)

    def contains(self, name: str) -> bool:
        if name in self.table.even_index:
            i = self.table.even_index[name]
            return any(k[0][i] for k in self.terms)
        bit = 1 << self.table.odd_index[name]
        return any(k[1] & bit for k in self.terms)

    def split_by(self, name: str) -> dict[int, "SuperScalar"]:
        """Group terms by the exponent of an even generator, removing it."""
        i = self.table.even_index[name]
        out: dict[int, dict] = {}
        for (exps, mask), v in self.terms.items():
            e = exps[i]
            rest = exps[:i] + (0,) + exps[i + 1:]
            out.setdefault(e, {})[(rest, mask)] = v
        return {e: SuperScalar(self.table, t) for e, t in out.items()}

    def map_coefficients(self, func) -> "SuperScalar":
        out = {}
        for k, v in self.terms.items():
            w = func(v)
            if w:
                out[k] = w
        return SuperScalar(self.table, out)

    def drop_where(self, predicate) -> "SuperScalar":
        """Remove monomials whose exponent dictionary satisfies ``predicate``."""
        out = {}
        names = self.table.even_names
        for k, v in self.terms.items():
            if not predicate(dict(zip(names, k[0]))):
                out[k] = v
        return SuperScalar(self.table, out)

    # -- inversion and powers
    def _unit_split(self):
        """Split into ``c * m`` (single Laurent monomial) and the remainder."""
        table = self.table
        laurent_mask = table._laurent_mask
        unit_terms = {}
        for (exps, mask), v in self.terms.items():
            if mask:
                continue
            if all(e == 0 or laurent_mask[i] for i, e in enumerate(exps)):
                unit_terms[(exps, mask)] = v
        return unit_terms

    def _is_nilpotent_term(self, key) -> bool:
        exps, mask = key
        if mask:
            return True
        table = self.table
        for i, e in enumerate(exps):
            if e > 0 and table._capped_mask[i]:
                return True
        return False

    def invert(self) -> "SuperScalar":
        """Multiplicative inverse; the leading part must be a Laurent monomial."""
        unit_terms = self._unit_split()
        if len(unit_terms) != 1:
            raise NotInvertibleError(
                "element has no single invertible leading monomial" if unit_terms else
                "element has zero body")
        (key, c), = unit_terms.items()
        exps = key[0]
        inv_lead = SuperScalar(self.table, {(tuple(-e for e in exps), 0): 1 / c})
        rest = self - SuperScalar(self.table, {key: c})
        soul = inv_lead * rest
        for k in soul.terms:
            if not soul._is_nilpotent_term(k):
                raise NotInvertibleError("remainder is not nilpotent within this table")
        return inv_lead * _geometric(soul)

    def binomial_power(self, exponent) -> "SuperScalar":
        """``self ** exponent`` for ``self = 1 + nilpotent`` and a symbolic even exponent."""
        soul = self - 1
        for k in soul.terms:
            if not soul._is_nilpotent_term(k):
                raise NotInvertibleError("binomial power needs the form 1 + nilpotent")
        if not isinstance(exponent, SuperScalar):
            exponent = self.table.const(exponent)
        result = self.table.one()
        coeff = self.table.one()
        power = self.table.one()
        k = 0
        while True:
            k += 1
            power = power * soul
            if power.is_zero():
                return result
            coeff = coeff * (exponent - (k - 1)) * mpq(1, k)
            result = result + coeff * power

    # -- derivatives
    def derivative(self, name: str) -> "SuperScalar":
        """Partial derivative; odd generators use the left derivative."""
        table = self.table
        out: dict = {}
        if name in table.even_index:
            i = table.even_index[name]
            for (exps, mask), v in self.terms.items():
                e = exps[i]
                if e:
                    key = (exps[:i] + (e - 1,) + exps[i + 1:], mask)
                    out[key] = v * e
            return SuperScalar(table, out)
        j = table.odd_index[name]
        bit = 1 << j
        for (exps, mask), v in self.terms.items():
            if mask & bit:
                sign = (mask & (bit - 1)).bit_count() & 1
                out[(exps, mask ^ bit)] = -v if sign else v
        return SuperScalar(table, out)

    # -- substitution
    def substitute(self, assignment: Mapping[str, object], target: GeneratorTable | None = None
                   ) -> "SuperScalar":
        """Ring homomorphism sending generators to given values.

        Unassigned generators map to the generator of the same name in the
        target table.  Odd generators must be sent to odd values.
        """
        target = target or self.table
        values: dict[str, SuperScalar] = {}
        for name, value in assignment.items():
            if name not in self.table:
                raise KeyError(f"unknown generator {name}")
            if not isinstance(value, SuperScalar):
                value = target.const(value)
            if value.table != target:
                raise TableMismatchError("substitution value lives in another table")
            par = value.parity()
            if self.table.parity_of(name) == 1 and par != 1 and not value.is_zero():
                raise ParityError(f"odd generator {name} must map to an odd value")
            if self.table.parity_of(name) == 0 and par != 0:
                raise ParityError(f"even generator {name} must map to an even value")
            values[name] = value
        for name, _ in self.table.entries:
            if name not in values:
                values[name] = target.gen(name)
        even_vals = [values[n] for n in self.table.even_names]
        odd_vals = [values[n] for n in self.table.odd_names]
        power_cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in power_cache:
                power_cache[key] = even_vals[i] ** e
            return power_cache[key]

        result = target.zero()
        for (exps, mask), c in self.terms.items():
            term = target.const(c)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
                    if term.is_zero():
                        break
            if term.is_zero():
                continue
            j = 0
            m = mask
            while m:
                if m & 1:
                    term = term * odd_vals[j]
                m >>= 1
                j += 1
            result = result + term
        return result

    def embed(self, target: GeneratorTable) -> "SuperScalar":
        """Rename into a table that contains all generators used here."""
        if target == self.table:
            return self
        even_map = []
        for i, n in enumerate(self.table.even_names):
            even_map.append(target.even_index.get(n))
        odd_map = [target.odd_index.get(n) for n in self.table.odd_names]
        zero = list(target._zero_exp)
        result = target.zero()
        for (exps, mask), c in self.terms.items():
            ex = list(zero)
            for i, e in enumerate(exps):
                if e:
                    if even_map[i] is None:
                        raise TableMismatchError(f"{self.table.even_names[i]} missing in target")
                    ex[even_map[i]] = e
            term = SuperScalar(target, {(tuple(ex), 0): c})._apply_caps()
            j, m = 0, mask
            while m:
                if m & 1:
                    if odd_map[j] is None:
                        raise TableMismatchError(f"{self.table.odd_names[j]} missing in target")
                    term = term * SuperScalar(target, {(target._zero_exp, 1 << odd_map[j]): mpq(1)})
                m >>= 1
                j += 1
            result = result + term
        return result

    # -- presentation
    def to_json(self) -> dict:
        terms = []
        for (exps, mask), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            even = {n: e for n, e in zip(self.table.even_names, exps) if e}
            odd = [self.table.odd_names[i] for i in range(self.table.n_odd) if mask >> i & 1]
            terms.append({"coeff": coeff_to_json(c), "even": even, "odd": odd})
        return {"terms": terms}

    @classmethod
    def from_json(cls, table: GeneratorTable, data: Mapping) -> "SuperScalar":
        result = table.zero()
        for term in data.get("terms", []):
            odd = list(term.get("odd", []))
            positions = [table.odd_index[n] if n in table.odd_index else None for n in odd]
            if None in positions:
                raise KeyError("unknown odd generator in JSON")
            if positions != sorted(positions) or len(set(positions)) != len(positions):
                raise ValueError("odd generator list must be sorted and free of repeats")
            result = result + table.monomial(parse_coeff(term["coeff"]), term.get("even", {}), odd)
        return result

    def __repr__(self):
        if not self.terms:
            return "0"
        pieces = []
        for (exps, mask), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            factors = []
            for n, e in zip(self.table.even_names, exps):
                if e == 1:
                    factors.append(n)
                elif e:
                    factors.append(f"{n}^{e}")
            factors += [self.table.odd_names[i] for i in range(self.table.n_odd) if mask >> i & 1]
            text = repr(c) if isinstance(c, GaussianRational) else format_coeff(c)
            if factors:
                if text == "1":
                    text = ""
                elif text == "-1":
                    text = "-"
                else:
                    text += "*"
                text += "*".join(factors)
            pieces.append(text)
        return " + ".join(pieces)


def _mul_terms(table: GeneratorTable, left: dict, right: dict) -> dict:
    out: dict = {}
    if not left or not right:
        return out
    capped = table.capped
    koszul = table.koszul
    get = out.get
    for (e1, o1), c1 in left.items():
        for (e2, o2), c2 in right.items():
            if o1 & o2:
                continue
            e = tuple(map(add, e1, e2)) if e2 else e1
            if capped:
                skip = False
                for i, cap in capped:
                    if e[i] > cap:
                        skip = True
                        break
                if skip:
                    continue
            c = c1 * c2
            if o1 and o2 and koszul(o1, o2):
                c = -c
            key = (e, o1 | o2)
            cur = get(key)
            if cur is None:
                out[key] = c
            else:
                cur = cur + c
                if cur:
                    out[key] = cur
                else:
                    del out[key]
    return out


def _geometric(soul: SuperScalar) -> SuperScalar:
    """``1 / (1 + soul)`` for a nilpotent soul."""
    table = soul.table
    result = table.one()
    power = table.one()
    bound = table.nilpotency_bound()
    for _ in range(bound + 1):
        power = -(power * soul)
        if power.is_zero():
            return result
        result = result + power
    raise NotInvertibleError("nilpotent expansion did not terminate")


# ---------------------------------------------------------------------------
# functional interface


def ring_add(a: SuperScalar, b: SuperScalar) -> SuperScalar:
    return a + b


def ring_mul(a: SuperScalar, b: SuperScalar) -> SuperScalar:
    return a * b


def ring_invert(a: SuperScalar) -> SuperScalar:
    return a.invert()


def ring_substitute(a: SuperScalar, assignment: Mapping[str, object]) -> SuperScalar:
    return a.substitute(assignment)


def ring_sum(items: Iterable[SuperScalar], table: GeneratorTable) -> SuperScalar:
    return reduce(lambda x, y: x + y, items, table.zero())
