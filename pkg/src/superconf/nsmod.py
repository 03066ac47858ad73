"""Modules for the Neveu-Schwarz algebra and vectors over a supercommutative ring.

Modes are encoded as ``(kind, twice_index)`` with kind 0 for ``L`` and 1 for
``G``; ``L(-2)`` is ``(0, -4)`` and ``G(-3/2)`` is ``(1, -3)``.  A vector is a
finite combination of basis elements with ring coefficients written to the
left, so an odd mode passing an odd coefficient picks up a sign.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq

from .superring import GeneratorTable, SuperScalar, parse_coeff, coeff_to_json

__all__ = [
    "L",
    "G",
    "mode_name",
    "parse_mode",
    "mode_parity",
    "mode_index",
    "ModuleVector",
    "DualVector",
    "VermaModule",
    "mode_act",
    "apply_terms",
    "exp_modes",
    "power_l0",
    "dual_adjoint_act",
    "graded_projection",
    "ns_bracket",
    "check_ns_module",
    "ExpansionError",
]


class ExpansionError(Exception):
    """An operator exponential failed to terminate."""


def L(n) -> tuple[int, int]:
    return (0, int(2 * mpq(n)))


def G(r) -> tuple[int, int]:
    twice = 2 * mpq(r)
    if twice.denominator != 1 or int(twice) % 2 == 0:
        raise ValueError(f"G index {r} must be a half odd integer")
    return (1, int(twice))


def mode_index(mode) -> mpq:
    return mpq(mode[1], 2)


def mode_parity(mode) -> int:
    return mode[0]


def mode_name(mode) -> str:
    idx = mode_index(mode)
    text = str(idx.numerator) if idx.denominator == 1 else f"{idx.numerator}/{idx.denominator}"
    return ("L" if mode[0] == 0 else "G") + text


def parse_mode(text: str):
    text = text.strip()
    kind, rest = text[0], text[1:]
    value = parse_coeff(rest)
    if kind == "L":
        if value.denominator != 1:
            raise ValueError(f"bad L index in {text}")
        return L(value)
    if kind == "G":
        return G(value)
    raise ValueError(f"unknown mode {text}")


def _order_key(mode):
    return (mode[1], mode[0])


# ---------------------------------------------------------------------------
# bracket of the Neveu-Schwarz algebra


def ns_bracket(first, second, c) -> list:
    """Supercommutator ``[first, second}`` as ``(coefficient, mode or None)`` pairs.

    ``None`` stands for the identity operator; ``c`` is the central charge.
    """
    k1, i1 = first
    k2, i2 = second
    m, n = mpq(i1, 2), mpq(i2, 2)
    out = []
    if k1 == 0 and k2 == 0:
        if m != n:
            out.append((m - n, (0, i1 + i2)))
        if i1 + i2 == 0 and m * m * m - m != 0:
            out.append((c * ((m * m * m - m) / 12), None))
    elif k1 == 0 and k2 == 1:
        coeff = m / 2 - n
        if coeff:
            out.append((coeff, (1, i1 + i2)))
    elif k1 == 1 and k2 == 0:
        coeff = m - n / 2
        if coeff:
            out.append((coeff, (1, i1 + i2)))
    else:
        out.append((mpq(2), (0, i1 + i2)))
        if i1 + i2 == 0 and m * m - mpq(1, 4) != 0:
            out.append((c * ((m * m - mpq(1, 4)) / 3), None))
    return out


# ---------------------------------------------------------------------------
# vectors


class ModuleVector:
    """Finite linear combination of basis elements with ring coefficients."""

    __slots__ = ("module", "terms")

    def __init__(self, module, terms: Mapping | None = None):
        self.module = module
        self.terms = {b: c for b, c in (terms or {}).items() if not c.is_zero()}

    @property
    def table(self) -> GeneratorTable:
        return self.module.table

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        out = dict(self.terms)
        for b, c in other.terms.items():
            cur = out.get(b)
            out[b] = c if cur is None else cur + c
        return ModuleVector(self.module, out)

    def __neg__(self):
        return ModuleVector(self.module, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, coeff) -> "ModuleVector":
        """Left multiplication by a ring element or number."""
        if not isinstance(coeff, SuperScalar):
            coeff = self.table.const(coeff)
        return ModuleVector(self.module, {b: coeff * c for b, c in self.terms.items()})

    def __rmul__(self, coeff):
        return self.scale(coeff)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, basis) -> SuperScalar:
        return self.terms.get(basis, self.table.zero())

    def map_coefficients(self, func: Callable) -> "ModuleVector":
        return ModuleVector(self.module, {b: func(c) for b, c in self.terms.items()})

    def project(self, keep: Callable) -> "ModuleVector":
        return ModuleVector(self.module, {b: c for b, c in self.terms.items() if keep(b)})

    def max_weight(self):
        return max((self.module.weight(b) for b in self.terms), default=None)

    def __eq__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def first_difference(self, other: "ModuleVector"):
        diff = self - other
        if diff.is_zero():
            return None
        b = min(diff.terms, key=lambda k: (self.module.weight(k), repr(k)))
        return b, diff.terms[b]

    def __repr__(self):
        if not self.terms:
            return "0"
        pieces = []
        for b in sorted(self.terms, key=lambda k: (self.module.weight(k), repr(k))):
            pieces.append(f"({self.terms[b]})*{self.module.basis_name(b)}")
        return " + ".join(pieces)

    def to_json(self) -> dict:
        return self.module.vector_to_json(self)


class DualVector(ModuleVector):
    """A functional on the module, given by its values on basis elements."""

    def pair(self, vec: ModuleVector) -> SuperScalar:
        total = self.table.zero()
        for b, c in self.terms.items():
            v = vec.terms.get(b)
            if v is not None:
                total = total + c * v
        return total

    def __add__(self, other):
        return DualVector(self.module, ModuleVector.__add__(self, other).terms)

    def __neg__(self):
        return DualVector(self.module, {b: -c for b, c in self.terms.items()})

    def scale(self, coeff):
        return DualVector(self.module, ModuleVector.scale(self, coeff).terms)


# ---------------------------------------------------------------------------
# generic operator actions


def mode_act(mode, vec: ModuleVector) -> ModuleVector:
    """Apply a single mode, with the Koszul sign for odd modes."""
    module = vec.module
    out: dict = {}
    odd = mode[0] == 1
    for b, c in vec.terms.items():
        image = module.act_basis(mode, b)
        if not image:
            continue
        c = c.involution() if odd else c
        for b2, q in image.items():
            term = c * q
            cur = out.get(b2)
            out[b2] = term if cur is None else cur + term
    return ModuleVector(module, out)


def apply_terms(terms: Sequence, vec: ModuleVector) -> ModuleVector:
    """Apply ``sum coeff * mode``; ``mode=None`` means the identity."""
    result = ModuleVector(vec.module)
    for coeff, mode in terms:
        image = vec if mode is None else mode_act(mode, vec)
        result = result + image.scale(coeff)
    return result


def exp_modes(terms: Sequence, vec: ModuleVector, weight_cap=None,
              max_terms: int | None = None) -> ModuleVector:
    """``exp(sum coeff * mode)`` applied to ``vec``.

    The series must terminate, either because the operator lowers the weight
    or because its coefficients are nilpotent.  With ``weight_cap`` every
    partial result is projected to weights at most the cap, which is exact
    for the graded components up to the cap when no mode lowers the weight.
    """
    module = vec.module
    keep = None
    if weight_cap is not None:
        keep = lambda b: module.weight(b) <= weight_cap  # noqa: E731
        vec = vec.project(keep)
    if max_terms is None:
        max_terms = 4 * module.table.nilpotency_bound() + 64
    total = vec
    term = vec
    for k in range(1, max_terms + 1):
        term = apply_terms(terms, term).scale(mpq(1, k))
        if keep is not None:
            term = term.project(keep)
        if term.is_zero():
            return total
        total = total + term
    raise ExpansionError("operator exponential did not terminate")


def power_l0(base: SuperScalar, vec: ModuleVector, factor: int = 2) -> ModuleVector:
    """``base ** (factor * L(0))`` applied to ``vec``.

    Symbolic weights need ``base = 1 + nilpotent``; numeric weights allow any
    invertible base.
    """
    module = vec.module
    out = {}
    cache: dict = {}
    for b, c in vec.terms.items():
        eigen = module.l0_eigenvalue(b) * factor
        key = repr(eigen)
        if key not in cache:
            if eigen.is_constant():
                e = eigen.body()
                if e.denominator != 1:
                    raise ValueError("L(0) power needs integral exponents")
                cache[key] = base ** int(e)
            else:
                cache[key] = base.binomial_power(eigen)
        out[b] = cache[key] * c
    return ModuleVector(module, out)


def graded_projection(vec: ModuleVector, weight) -> ModuleVector:
    """Component of ``vec`` of the given weight (measured above the lowest weight)."""
    weight = mpq(weight)
    return vec.project(lambda b: vec.module.weight(b) == weight)


def dual_adjoint_act(mode, dual: DualVector) -> DualVector:
    """The contragredient action: ``<X' f, v> = <f, X(-index) v>`` on basis vectors."""
    module = dual.module
    if not dual.terms:
        return DualVector(module)
    adjoint = (mode[0], -mode[1])
    shift = mpq(-adjoint[1], 2)
    out: dict = {}
    weights = {module.weight(b) for b in dual.terms}
    for w in weights:
        source = w - shift
        if source < 0:
            continue
        for b in module.basis_of_weight(source):
            image = module.act_basis(adjoint, b)
            value = module.table.zero()
            for b2, q in image.items():
                f = dual.terms.get(b2)
                if f is not None:
                    value = value + f * q
            if not value.is_zero():
                out[b] = out.get(b, module.table.zero()) + value
    return DualVector(module, out)


# ---------------------------------------------------------------------------
# Verma module


def _ns_partitions(weight2: int, max_part2: int | None = None) -> list[tuple]:
    """Lists of raising modes with total twice-weight ``weight2``, in PBW order."""
    if weight2 == 0:
        return [()]
    out = []
    top = weight2 if max_part2 is None else min(weight2, max_part2)
    for part in range(top, 0, -1):
        mode = (0, -part) if part % 2 == 0 else (1, -part)
        for rest in _ns_partitions(weight2 - part, part - (1 if part % 2 else 0)):
            out.append((mode,) + rest)
    return out


class VermaModule:
    """Verma module over the Neveu-Schwarz algebra with symbolic or numeric ``c`` and ``h``.

    Basis elements are tuples of raising modes in PBW order (most negative
    index first), applied to the highest weight vector ``()``.  ``L`` modes
    may repeat, ``G`` modes may not.
    """

    def __init__(self, table: GeneratorTable, c="c", h="h"):
        self.table = table
        self.c = table.gen(c) if isinstance(c, str) else (c if isinstance(c, SuperScalar) else table.const(c))
        self.h = table.gen(h) if isinstance(h, str) else (h if isinstance(h, SuperScalar) else table.const(h))
        self._memo: dict = {}
        self._basis_cache: dict = {}

    # -- basis data
    def weight(self, b) -> mpq:
        return mpq(-sum(m[1] for m in b), 2)

    def parity(self, b) -> int:
        return sum(m[0] for m in b) & 1

    def l0_eigenvalue(self, b) -> SuperScalar:
        return self.h + self.weight(b)

    def basis_of_weight(self, weight) -> list:
        w2 = int(2 * mpq(weight))
        if w2 not in self._basis_cache:
            self._basis_cache[w2] = _ns_partitions(w2) if w2 >= 0 else []
        return self._basis_cache[w2]

    def basis_upto(self, weight) -> list:
        out = []
        for w2 in range(0, int(2 * mpq(weight)) + 1):
            out += self.basis_of_weight(mpq(w2, 2))
        return out

    def basis_name(self, b) -> str:
        return "".join(mode_name(m) for m in b) + "v"

    def highest(self) -> ModuleVector:
        return ModuleVector(self, {(): self.table.one()})

    def basis_vector(self, b, coeff=None) -> ModuleVector:
        return ModuleVector(self, {tuple(b): coeff if coeff is not None else self.table.one()})

    def word_vector(self, modes: Sequence, coeff=None) -> ModuleVector:
        """Apply modes right to left to the highest weight vector."""
        vec = self.highest()
        for m in reversed(list(modes)):
            vec = mode_act(m, vec)
        return vec.scale(coeff) if coeff is not None else vec

    # -- action
    def act_basis(self, mode, b) -> dict:
        key = (mode, b)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = self._act(mode, b)
        self._memo[key] = result
        return result

    def _add_into(self, out: dict, image: dict, coeff):
        for b, q in image.items():
            term = q * coeff if not isinstance(coeff, int) or coeff != 1 else q
            cur = out.get(b)
            out[b] = term if cur is None else cur + term

    def _act(self, mode, b) -> dict:
        kind, i2 = mode
        one = self.table.one()
        if i2 == 0:
            return {b: self.l0_eigenvalue(b)}
        if i2 > 0 and mpq(i2, 2) > self.weight(b):
            return {}
        if not b:
            return {} if i2 > 0 else {(mode,): one}
        first = b[0]
        if i2 < 0 and _order_key(mode) <= _order_key(first):
            if mode == first and kind == 1:
                return self.act_basis((0, 2 * i2), b[1:])
            return {(mode,) + b: one}
        rest = b[1:]
        out: dict = {}
        for coeff, bmode in ns_bracket(mode, first, self.c):
            if bmode is None:
                self._add_into(out, {rest: one}, coeff)
            else:
                self._add_into(out, self.act_basis(bmode, rest), coeff)
        sign = -1 if kind == 1 and first[0] == 1 else 1
        inner = self.act_basis(mode, rest)
        for b2, q in inner.items():
            self._add_into(out, self.act_basis(first, b2), q * sign)
        return {k: v for k, v in out.items() if not v.is_zero()}

    # -- JSON
    def vector_to_json(self, vec: ModuleVector) -> dict:
        return {"h": self.h.to_json(), "c": self.c.to_json(),
                "terms": [{"word": [mode_name(m) for m in b], "coeff": c.to_json()}
                          for b, c in sorted(vec.terms.items(), key=lambda kv: (self.weight(kv[0]), kv[0]))]}

    def vector_from_json(self, data) -> ModuleVector:
        vec = ModuleVector(self)
        for term in data.get("terms", []):
            modes = [parse_mode(w) for w in term["word"]]
            coeff = SuperScalar.from_json(self.table, term["coeff"])
            vec = vec + self.word_vector(modes, coeff)
        return vec


def check_ns_module(module, weight: int | mpq = 4, index_bound: int = 3):
    """Check the Neveu-Schwarz relations as operators on every basis vector up to ``weight``.

    Returns ``(ok, checked, first_failure)``.
    """
    modes = []
    for n in range(-index_bound, index_bound + 1):
        modes.append(L(n))
        modes.append(G(mpq(2 * n + 1, 2)) if abs(mpq(2 * n + 1, 2)) <= index_bound else None)
    modes = [m for m in modes if m is not None]
    checked = 0
    for b in module.basis_upto(weight):
        vec = module.basis_vector(b)
        for m1 in modes:
            for m2 in modes:
                lhs = mode_act(m1, mode_act(m2, vec))
                other = mode_act(m2, mode_act(m1, vec))
                lhs = lhs + other if (m1[0] == 1 and m2[0] == 1) else lhs - other
                rhs = apply_terms(ns_bracket(m1, m2, module.c), vec)
                checked += 1
                if lhs != rhs:
                    return False, checked, {"modes": [mode_name(m1), mode_name(m2)],
                                            "on": module.basis_name(b)}
    return True, checked, None


def vector_from_words(module, words: Iterable, coeffs: Iterable) -> ModuleVector:
    vec = ModuleVector(module)
    for w, c in zip(words, coeffs):
        vec = vec + module.word_vector(w, c)
    return vec


def coeff_json(c):
    return coeff_to_json(c)
