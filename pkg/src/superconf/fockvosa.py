"""The free boson plus free fermion vertex operator superalgebra.

Oscillators satisfy ``[a(m), a(n)] = m delta_{m+n,0}`` and
``{psi(r), psi(s)} = delta_{r+s,0}``.  A basis vector is
``a(-n1)...a(-nk) psi(-r1)...psi(-rl) 1`` with ``n1 >= n2 >= ...`` and
``r1 > r2 > ...``; it is stored as the pair of tuples ``(n's, 2r's)``.

Vertex operator modes are produced by the normal ordered product recursion,
so every ``u_(n) v`` is computed from the oscillator action alone.  The
superconformal vector is ``tau = a(-1) psi(-1/2) 1``; ``G(r)`` and ``L(n)`` are
read off as modes of ``Y(tau, (x, phi))``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from gmpy2 import mpq

from .nsmod import (G, L, ModuleVector, apply_terms, mode_act, mode_name, ns_bracket)
from .superring import GeneratorTable, SuperScalar, binomial

__all__ = [
    "FockSpace",
    "VACUUM",
    "TAU",
    "oscillator_act",
    "vertex_op",
    "virasoro_ns_modes",
    "verify_vosa_axioms",
    "parse_fock_word",
]

VACUUM = ((), ())
TAU = ((1,), (1,))
HALF = mpq(1, 2)


def _floor(q) -> int:
    q = mpq(q)
    return int(q.numerator // q.denominator)


def basis_weight(b) -> mpq:
    return sum(b[0]) + mpq(sum(b[1]), 2)


def basis_parity(b) -> int:
    return len(b[1]) & 1


def oscillator_act(kind: str, index2: int, b) -> dict:
    """Apply ``a(index2 / 2)`` or ``psi(index2 / 2)`` to a basis vector.

    ``index2`` is twice the mode index.  Returns a plain dictionary of
    rational coefficients.
    """
    bosons, fermions = b
    if kind == "a":
        n = index2 // 2
        if index2 % 2:
            raise ValueError("boson modes are integral")
        if n > 0:
            count = bosons.count(n)
            if not count:
                return {}
            lst = list(bosons)
            lst.remove(n)
            return {(tuple(lst), fermions): mpq(n * count)}
        if n == 0:
            return {}
        lst = sorted(bosons + (-n,), reverse=True)
        return {(tuple(lst), fermions): mpq(1)}
    if kind == "psi":
        if index2 % 2 == 0:
            raise ValueError("fermion modes are half odd integers")
        if index2 > 0:
            if index2 not in fermions:
                return {}
            pos = fermions.index(index2)
            rest = fermions[:pos] + fermions[pos + 1:]
            return {(bosons, rest): mpq(-1 if pos % 2 else 1)}
        f = -index2
        if f in fermions:
            return {}
        pos = sum(1 for g in fermions if g > f)
        new = fermions[:pos] + (f,) + fermions[pos:]
        return {(bosons, new): mpq(-1 if pos % 2 else 1)}
    raise ValueError(f"unknown oscillator {kind}")


def _accumulate(out: dict, image: dict, coeff):
    for b, q in image.items():
        v = out.get(b, 0) + coeff * q
        if v:
            out[b] = v
        else:
            out.pop(b, None)


def _leading(u):
    """Split ``u = a_(-k) u'`` by its leftmost oscillator."""
    bosons, fermions = u
    if bosons:
        return "a", bosons[0], (bosons[1:], fermions)
    f = fermions[0]
    return "psi", (f + 1) // 2, ((), fermions[1:])


def _field_mode(kind: str, m: int) -> tuple[str, int]:
    """Translate the field mode ``a_(m)`` into an oscillator index (twice the index)."""
    return (kind, 2 * m) if kind == "a" else (kind, 2 * m + 1)


@lru_cache(maxsize=None)
def vertex_mode(u, n: int, v) -> dict:
    """``u_(n) v`` for basis vectors, as a plain dictionary of rationals.

    Uses ``Y(a_(-k) u', x) = :d^(k-1)a(x)/(k-1)! Y(u', x):``.
    """
    if basis_weight(u) + basis_weight(v) - n - 1 < 0:
        return {}
    if u == VACUUM:
        return {v: mpq(1)} if n == -1 else {}
    kind, k, rest = _leading(u)
    wt_rest = basis_weight(rest)
    out: dict = {}
    # creation part: m < 0
    bound = _floor(wt_rest + basis_weight(v) - 1)
    m_low = n - k - bound
    for m in range(-1, min(m_low, 0) - 1, -1):
        coeff = binomial(-m - 1, k - 1)
        if not coeff:
            continue
        inner = vertex_mode(rest, n - m - k, v)
        for b, q in inner.items():
            _accumulate(out, oscillator_act(*_field_mode(kind, m), b), coeff * q)
    # annihilation part: m >= 0
    sign = -1 if kind == "psi" and basis_parity(rest) else 1
    wt_a = 1 if kind == "a" else HALF
    m_high = _floor(basis_weight(v) + wt_a - 1)
    for m in range(0, m_high + 1):
        coeff = binomial(-m - 1, k - 1)
        if not coeff:
            continue
        image = oscillator_act(*_field_mode(kind, m), v)
        for b, q in image.items():
            _accumulate(out, vertex_mode(rest, n - m - k, b), sign * coeff * q)
    return out


def _combine(images: Sequence[tuple[object, dict]]) -> dict:
    out: dict = {}
    for coeff, image in images:
        _accumulate(out, image, coeff)
    return out


class FockSpace:
    """Fock module of one free boson and one free fermion."""

    def __init__(self, table: GeneratorTable | None = None, kappa: int = 1):
        self.table = table or GeneratorTable([])
        self.kappa = kappa
        self.c = self.table.const(mpq(3, 2))
        self._ns_memo: dict = {}
        self._basis_cache: dict = {}
        self._g_half_tau = None

    # -- basis data
    def weight(self, b) -> mpq:
        return basis_weight(b)

    def parity(self, b) -> int:
        return basis_parity(b)

    def l0_eigenvalue(self, b) -> SuperScalar:
        return self.table.const(self.weight(b))

    def basis_of_weight(self, weight) -> list:
        w2 = int(2 * mpq(weight))
        if w2 not in self._basis_cache:
            out = []
            for f2 in range(0, w2 + 1):
                if (w2 - f2) % 2:
                    continue
                for ferm in _distinct_odd_parts(f2):
                    for bos in _partitions((w2 - f2) // 2):
                        out.append((bos, ferm))
            self._basis_cache[w2] = sorted(out)
        return self._basis_cache[w2]

    def basis_upto(self, weight) -> list:
        out = []
        for w2 in range(0, int(2 * mpq(weight)) + 1):
            out += self.basis_of_weight(mpq(w2, 2))
        return out

    def basis_name(self, b) -> str:
        words = [f"a-{n}" for n in b[0]] + [f"psi-{f}/2" for f in b[1]]
        return "*".join(words) + ("*1" if words else "1")

    def vacuum(self) -> ModuleVector:
        return ModuleVector(self, {VACUUM: self.table.one()})

    highest = vacuum

    def basis_vector(self, b, coeff=None) -> ModuleVector:
        return ModuleVector(self, {b: coeff if coeff is not None else self.table.one()})

    def tau(self) -> ModuleVector:
        return self.basis_vector(TAU, self.table.const(self.kappa))

    def lift(self, plain: dict) -> ModuleVector:
        return ModuleVector(self, {b: self.table.const(q) for b, q in plain.items()})

    # -- superconformal structure
    def g_mode_plain(self, i2: int, b) -> dict:
        """``G(i2/2) b = tau_(i2/2 + 1/2) b``."""
        n = (i2 + 1) // 2
        return {k: v * self.kappa for k, v in vertex_mode(TAU, n, b).items()}

    def g_half_tau(self) -> dict:
        if self._g_half_tau is None:
            self._g_half_tau = self.g_mode_plain(-1, TAU)
            self._g_half_tau = {k: v * self.kappa for k, v in self._g_half_tau.items()}
        return self._g_half_tau

    def act_plain(self, mode, b) -> dict:
        key = (mode, b)
        hit = self._ns_memo.get(key)
        if hit is not None:
            return hit
        kind, i2 = mode
        if kind == 1:
            result = self.g_mode_plain(i2, b)
        else:
            n = i2 // 2
            images = [(q / 2, vertex_mode(w, n + 1, b)) for w, q in self.g_half_tau().items()]
            result = _combine(images)
        self._ns_memo[key] = result
        return result

    def act_basis(self, mode, b) -> dict:
        if mode[1] > 0 and mpq(mode[1], 2) > self.weight(b):
            return {}
        plain = self.act_plain(mode, b)
        const = self.table.const
        return {k: const(v) for k, v in plain.items()}

    def ns_act(self, mode, vec: ModuleVector) -> ModuleVector:
        return mode_act(mode, vec)

    # -- vertex operators
    def ymode_plain(self, u, n: int, v, odd_part: bool = False) -> dict:
        """Modes of ``Y(u, (x, phi)) = Y(u, x) + phi Y(G(-1/2) u, x)``."""
        if not odd_part:
            return vertex_mode(u, n, v)
        gu = self.act_plain(G(-HALF), u)
        return _combine([(q, vertex_mode(w, n, v)) for w, q in gu.items()])

    def mode_range(self, u, v, lowest: int) -> range:
        """Indices ``n >= lowest`` for which ``u_(n) v`` can be nonzero."""
        top = _floor(self.weight(u) + self.weight(v) - HALF)
        return range(lowest, top + 1)

    def vertex_apply(self, u_vec: ModuleVector, v_vec: ModuleVector, var, odd_var,
                     lowest: int, powers=None) -> ModuleVector:
        """``Y(u, (X, Phi)) v`` keeping modes ``n >= lowest``.

        ``var`` and ``odd_var`` are ring elements substituted for the formal
        variables; ``powers`` may supply precomputed powers of ``var``.
        """
        if powers is None:
            powers = {}

        def power(k):
            if k not in powers:
                powers[k] = var ** k
            return powers[k]

        out: dict = {}
        for u, cu in u_vec.terms.items():
            pu = self.parity(u)
            for v, dv in v_vec.terms.items():
                d_even = dv.involution() if pu else dv
                d_odd = dv if pu else dv.involution()
                for n in self.mode_range(u, v, lowest):
                    even_img = vertex_mode(u, n, v)
                    odd_img = self.ymode_plain(u, n, v, True)
                    if not even_img and not odd_img:
                        continue
                    xp = power(-n - 1)
                    if even_img:
                        c = cu * xp * d_even
                        for b, q in even_img.items():
                            term = c * q
                            cur = out.get(b)
                            out[b] = term if cur is None else cur + term
                    if odd_img and not odd_var.is_zero():
                        c = cu * odd_var * xp * d_odd
                        for b, q in odd_img.items():
                            term = c * q
                            cur = out.get(b)
                            out[b] = term if cur is None else cur + term
        return ModuleVector(self, out)

    # -- JSON
    def vector_to_json(self, vec: ModuleVector) -> dict:
        return {"terms": [{"word": [f"a-{n}" for n in b[0]] + [f"psi-{f}/2" for f in b[1]],
                           "coeff": c.to_json()}
                          for b, c in sorted(vec.terms.items(), key=lambda kv: (self.weight(kv[0]), kv[0]))]}

    def vector_from_json(self, data) -> ModuleVector:
        vec = ModuleVector(self)
        for term in data.get("terms", []):
            plain = parse_fock_word(term["word"])
            coeff = SuperScalar.from_json(self.table, term["coeff"])
            vec = vec + self.lift(plain).scale(coeff)
        return vec


def parse_fock_word(words: Sequence[str]) -> dict:
    """Apply named creation operators right to left to the vacuum."""
    state = {VACUUM: mpq(1)}
    for w in reversed(list(words)):
        w = w.strip()
        if w.startswith("a-"):
            op = ("a", -2 * int(w[2:]))
        elif w.startswith("psi-"):
            op = ("psi", -int(2 * mpq(w[4:])))
        else:
            raise ValueError(f"unknown Fock creation operator {w}")
        new: dict = {}
        for b, q in state.items():
            _accumulate(new, oscillator_act(*op, b), q)
        state = new
    return state


def _partitions(n: int, max_part: int | None = None) -> list[tuple]:
    if n == 0:
        return [()]
    max_part = n if max_part is None else min(n, max_part)
    out = []
    for p in range(max_part, 0, -1):
        for rest in _partitions(n - p, p):
            out.append((p,) + rest)
    return out


def _distinct_odd_parts(total: int, max_part: int | None = None) -> list[tuple]:
    """Strictly decreasing tuples of odd positive integers summing to ``total``."""
    if total == 0:
        return [()]
    max_part = total if max_part is None else min(total, max_part)
    out = []
    for p in range(max_part, 0, -1):
        if p % 2 == 0:
            continue
        for rest in _distinct_odd_parts(total - p, p - 1):
            out.append((p,) + rest)
    return out


def vertex_op(space: FockSpace, u, v, n: int, odd_part: bool = False) -> ModuleVector:
    """Mode ``n`` of ``Y(u, (x, phi)) v`` for basis vectors; ``odd_part`` selects the phi part."""
    return space.lift(space.ymode_plain(u, n, v, odd_part))


def virasoro_ns_modes(space: FockSpace, mode, b) -> ModuleVector:
    return space.lift(space.act_plain(mode, b))


# ---------------------------------------------------------------------------
# axiom checks


def _result(name, ok, checked, failure):
    return {"identity": name, "status": "pass" if ok else "fail", "checked": checked,
            "first_failure": failure}


def verify_vosa_axioms(cap=3, window=(-6, 6), rank=mpq(3, 2), kappa: int = 1,
                       pair_cap=2, jacobi_cap=1):
    """Run the superalgebra axiom checks on the Fock space; returns a list of reports."""
    rank = mpq(rank)
    table = GeneratorTable([("x0", "even"), ("phi0", "odd"), ("phi1", "odd"), ("phi2", "odd")],
                           caps={"x0": 3})
    space = FockSpace(table, kappa)
    lo, hi = window
    reports = []
    basis = space.basis_upto(cap)

    # Neveu-Schwarz relations with the declared rank
    ok, checked, failure = True, 0, None
    one = table.one()
    modes = [L(n) for n in range(-3, 4)] + [G(mpq(2 * n + 1, 2)) for n in range(-3, 3)]
    for b in basis:
        vec = space.basis_vector(b)
        for m1 in modes:
            for m2 in modes:
                lhs = mode_act(m1, mode_act(m2, vec))
                other = mode_act(m2, mode_act(m1, vec))
                lhs = lhs + other if m1[0] == 1 and m2[0] == 1 else lhs - other
                rhs = apply_terms(ns_bracket(m1, m2, one * rank), vec)
                checked += 1
                if ok and lhs != rhs:
                    ok, failure = False, {"modes": [mode_name(m1), mode_name(m2)],
                                          "on": space.basis_name(b)}
                    break
            if not ok:
                break
        if not ok:
            break
    reports.append(_result("ns-relations", ok, checked, failure))

    # vacuum annihilation
    ok, checked, failure = True, 0, None
    for n in range(-1, hi + 1):
        for mode in (L(n), G(n + HALF)):
            checked += 1
            if space.act_plain(mode, VACUUM):
                ok, failure = False, {"mode": mode_name(mode)}
    reports.append(_result("vacuum-annihilation", ok, checked, failure))

    # vacuum property Y(1, (x, phi)) = identity
    ok, checked, failure = True, 0, None
    for v in basis:
        for n in range(lo, hi + 1):
            for odd in (False, True):
                checked += 1
                got = space.ymode_plain(VACUUM, n, v, odd)
                want = {v: mpq(1)} if (n == -1 and not odd) else {}
                if got != want and ok:
                    ok, failure = False, {"v": space.basis_name(v), "n": n, "odd": odd}
    reports.append(_result("vacuum", ok, checked, failure))

    # creation property: Y(u, (x, phi)) 1 = exp(x L(-1) + phi G(-1/2)) u, so
    # u_(n) 1 = 0 for n >= 0, u_(-1) 1 = u and the phi part at x^0 is G(-1/2) u
    ok, checked, failure = True, 0, None
    for u in basis:
        for n in range(-1, hi + 1):
            for odd in (False, True):
                checked += 1
                got = space.ymode_plain(u, n, VACUUM, odd)
                if n == -1:
                    want = space.act_plain(G(-HALF), u) if odd else {u: mpq(1)}
                else:
                    want = {}
                if got != want and ok:
                    ok, failure = False, {"u": space.basis_name(u), "n": n, "odd": odd}
    reports.append(_result("creation", ok, checked, failure))

    # G(-1/2) derivative: (d/dphi + phi d/dx) Y(u) = Y(G(-1/2) u)
    ok, checked, failure = True, 0, None
    for u in basis:
        gu = space.act_plain(G(-HALF), u)
        for v in basis:
            for n in range(lo, hi + 1):
                # d/dphi Y(u) has x-part = odd part of Y(u)
                left_even = space.ymode_plain(u, n, v, True)
                right_even = _combine([(q, vertex_mode(w, n, v)) for w, q in gu.items()])
                # phi d/dx Y(u,x): coefficient of x^(-n-1) from d/dx x^(-n) u_(n-1)
                left_odd = {b: q * (-n) for b, q in vertex_mode(u, n - 1, v).items() if q * (-n)}
                right_odd = _combine([(q, space.ymode_plain(w, n, v, True)) for w, q in gu.items()])
                checked += 2
                if ok and (left_even != right_even or left_odd != right_odd):
                    ok, failure = False, {"u": space.basis_name(u), "v": space.basis_name(v), "n": n}
    reports.append(_result("g-derivative", ok, checked, failure))

    # L(-1) derivative
    ok, checked, failure = True, 0, None
    for u in basis:
        lu = space.act_plain(L(-1), u)
        for v in basis:
            for n in range(lo, hi + 1):
                want = {b: q * (-n) for b, q in vertex_mode(u, n - 1, v).items() if q * (-n)}
                got = _combine([(q, vertex_mode(w, n, v)) for w, q in lu.items()])
                checked += 1
                if ok and got != want:
                    ok, failure = False, {"u": space.basis_name(u), "v": space.basis_name(v), "n": n}
    reports.append(_result("l-derivative", ok, checked, failure))

    reports.append(check_supercommutator(space, pair_cap, window))
    reports.append(check_l0_conjugation(space, min(cap, 2), window))
    reports.append(check_shift_conjugation(space, min(cap, 2), window))
    reports.append(check_jacobi(space, jacobi_cap, (max(lo, -3), min(hi, 3))))
    return reports


def _ytilde_modes(space, u, n, v):
    """Pair ``(u_(n) v, (G(-1/2)u)_(n) v)`` as plain dictionaries."""
    return vertex_mode(u, n, v), space.ymode_plain(u, n, v, True)


def _apply_y_mode_vec(space: FockSpace, u, n: int, vec: ModuleVector, phi: SuperScalar) -> ModuleVector:
    """Coefficient of ``x^(-n-1)`` in ``Y(u, (x, phi)) vec``."""
    out = ModuleVector(space)
    pu = space.parity(u)
    for v, d in vec.terms.items():
        even_img, odd_img = _ytilde_modes(space, u, n, v)
        d_even = d.involution() if pu else d
        d_odd = d if pu else d.involution()
        if even_img:
            out = out + space.lift(even_img).scale(d_even)
        if odd_img:
            out = out + space.lift(odd_img).scale(phi * d_odd)
    return out


def check_supercommutator(space: FockSpace, cap, window):
    """Odd supercommutator formula on basis triples, coefficientwise in ``x1`` and ``x2``."""
    table = space.table
    phi1, phi2 = table.gen("phi1"), table.gen("phi2")
    lo, hi = window
    basis = space.basis_upto(cap)
    checked = 0
    for u in basis:
        for v in basis:
            sign = -1 if space.parity(u) and space.parity(v) else 1
            for w in space.basis_upto(min(cap, 1)):
                wv = space.basis_vector(w)
                for m in range(lo, hi + 1):
                    for n in range(lo, hi + 1):
                        # left side at x1^(-m-1) x2^(-n-1)
                        lhs = _apply_y_mode_vec(space, u, m, _apply_y_mode_vec(space, v, n, wv, phi2), phi1)
                        other = _apply_y_mode_vec(space, v, n, _apply_y_mode_vec(space, u, m, wv, phi1), phi2)
                        lhs = lhs - other.scale(sign)
                        rhs = _commutator_rhs(space, u, v, m, n, wv, phi1, phi2)
                        checked += 1
                        if lhs != rhs:
                            return _result("supercommutator", False, checked,
                                           {"u": space.basis_name(u), "v": space.basis_name(v),
                                            "w": space.basis_name(w), "m": m, "n": n})
    return _result("supercommutator", True, checked, None)


def _commutator_rhs(space, u, v, m, n, wv, phi1, phi2):
    """Coefficient of ``x1^(-m-1) x2^(-n-1)`` in the residue side of the supercommutator."""
    table = space.table
    diff = phi1 - phi2
    nil = phi1 * phi2
    out = ModuleVector(space)
    top = _floor(space.weight(u) + space.weight(v) - HALF)
    e1 = -m - 1
    for p in range(0, top + 1):
        even_img, odd_img = _ytilde_modes(space, u, p, v)
        if not even_img and not odd_img:
            continue
        # Y(u,(x0, phi1 - phi2)) v at x0^(-p-1) is even_img + (phi1 - phi2) odd_img
        inner = ModuleVector(space)
        if even_img:
            inner = inner + space.lift(even_img)
        if odd_img:
            inner = inner + space.lift(odd_img).scale(diff)
        # plain delta term: C(k, p) x1^(k - p) (-1)^p with k - p = e1
        k = e1 + p
        c_plain = binomial(k, p) * (-1) ** p
        # nilpotent term: -phi1 phi2 k C(k-1, p) x1^(k-1-p) (-1)^p with k - 1 - p = e1
        k2 = e1 + p + 1
        c_nil = -k2 * binomial(k2 - 1, p) * (-1) ** p
        for kk, coeff in ((k, table.const(c_plain)), (k2, nil * c_nil)):
            if coeff.is_zero():
                continue
            # x2 power: x2^(-kk-1) * x2^(-q-1) = x2^(-n-1)  =>  q = n - kk - 1
            q = n - kk - 1
            for b, c in inner.terms.items():
                piece = _apply_y_mode_vec(space, b, q, wv, phi2)
                out = out + piece.scale(coeff * c)
    return out


def check_l0_conjugation(space: FockSpace, cap, window):
    """``z^(2L(0)) Y(v,(x,phi)) z^(-2L(0)) = Y(z^(2L(0)) v, (z^2 x, z phi))`` coefficientwise."""
    lo, hi = window
    checked = 0
    for v in space.basis_upto(cap):
        for w in space.basis_upto(cap):
            for n in range(lo, hi + 1):
                for odd in (False, True):
                    img = space.ymode_plain(v, n, w, odd)
                    # left: z^(2(wt(result)) - 2 wt(w)); right: z^(2 wt v) z^(2(-n-1)) z^(odd)
                    for b in img:
                        left = 2 * (space.weight(b) - space.weight(w))
                        right = 2 * space.weight(v) + 2 * (-n - 1) + (1 if odd else 0)
                        checked += 1
                        if left != right:
                            return _result("l0-conjugation", False, checked,
                                           {"v": space.basis_name(v), "n": n})
    return _result("l0-conjugation", True, checked, None)


def check_shift_conjugation(space: FockSpace, cap, window):
    """Both exponential shift formulas with a capped even shift and an odd shift."""
    table = space.table
    z, theta = table.gen("x0"), table.gen("phi0")
    lo, hi = window
    shift_terms = [(z, L(-1)), (theta, G(-HALF))]
    neg_terms = [(-z, L(-1)), (-theta, G(-HALF))]
    from .nsmod import exp_modes
    checked = 0
    zcap = table.caps["x0"]
    for v in space.basis_upto(cap):
        vv = space.basis_vector(v)
        ev = exp_modes(shift_terms, vv)
        for w in space.basis_upto(cap):
            wv = space.basis_vector(w)
            ew = exp_modes(neg_terms, wv)
            for e in range(lo, hi + 1):
                # coefficient of x^e on each side, split by phi degree
                for phi_deg in (0, 1):
                    # (A) Y(e^{zL(-1)+theta G(-1/2)} v, (x, phi)) = Y(v, (x + z + theta phi, theta + phi))
                    lhs_a = _y_coeff(space, ev, wv, e, phi_deg)
                    rhs_a = _y_shifted_coeff(space, v, wv, e, phi_deg, z, theta, zcap, first=True)
                    # (B) e^{...} Y(v,(x,phi)) e^{-...} = Y(v, (x + z + phi theta, phi + theta))
                    inner = _y_coeff(space, vv, ew, e, phi_deg)
                    lhs_b = exp_modes(shift_terms, inner)
                    rhs_b = _y_shifted_coeff(space, v, wv, e, phi_deg, z, theta, zcap, first=False)
                    checked += 2
                    if lhs_a != rhs_a or lhs_b != rhs_b:
                        return _result("shift-conjugation", False, checked,
                                       {"v": space.basis_name(v), "w": space.basis_name(w), "e": e,
                                        "phi": phi_deg, "which": "A" if lhs_a != rhs_a else "B"})
    return _result("shift-conjugation", True, checked, None)


def _y_coeff(space, uvec, wvec, e, phi_deg):
    """Coefficient of ``phi^phi_deg x^e`` in ``Y(u, (x, phi)) w``, phi written on the left."""
    out = ModuleVector(space)
    n = -e - 1
    for u, cu in uvec.terms.items():
        pu = space.parity(u)
        for w, dw in wvec.terms.items():
            img = space.ymode_plain(u, n, w, bool(phi_deg))
            if not img:
                continue
            # moving coefficient dw past Y(u) (parity pu) and, for the phi part, past phi
            d = dw.involution() if (pu + phi_deg) % 2 else dw
            c = (cu.involution() if phi_deg else cu) * d
            out = out + space.lift(img).scale(c)
    return out


def _y_shifted_coeff(space, v, wvec, e, phi_deg, z, theta, zcap, first):
    """Coefficient of ``phi^phi_deg x^e`` in ``Y(v, (x + z + s, phi + theta)) w``.

    ``s`` is ``theta phi`` when ``first`` and ``phi theta`` otherwise.  The
    shift is expanded in nonnegative powers of ``z``, truncated by its cap.
    """
    out = ModuleVector(space)
    pv = space.parity(v)
    # Y(v,(X, Phi)) w = sum_n X^(-n-1) v_(n) w + Phi X^(-n-1) (Gv)_(n) w,
    # X = x + z + s, Phi = phi + theta.  Expand X^k = (x+z)^k + k s (x+z)^(k-1).
    # s = sigma * theta phi with sigma = 1 (first) or -1 (phi theta = -theta phi).
    sigma = 1 if first else -1
    for w, dw in wvec.terms.items():
        for n in range(-e - 1 - zcap - 2, int(space.weight(v) + space.weight(w)) + 1):
            k = -n - 1
            even_img = vertex_mode(v, n, w)
            odd_img = space.ymode_plain(v, n, w, True)
            if not even_img and not odd_img:
                continue
            d_even = dw.involution() if pv else dw
            d_odd = dw if pv else dw.involution()
            # (x+z)^k coefficient of x^e: C(k, k-e) z^(k-e)
            i = k - e
            if 0 <= i <= zcap:
                zc = z ** i * binomial(k, i)
                if phi_deg == 0:
                    out = out + space.lift(even_img).scale(zc * d_even)
                    out = out + space.lift(odd_img).scale(theta * zc * d_odd)
                else:
                    # odd part: phi coefficient of Phi X^k -> X^k from phi, and
                    # k s (x+z)^(k-1) from the theta part of Phi; plus theta? none
                    out = out + space.lift(odd_img).scale(zc * d_odd)
            if phi_deg == 1:
                # phi-coefficient from k * sigma * theta phi (x+z)^(k-1) in the even term:
                # sigma theta phi = -sigma phi theta, so phi-left coefficient is -sigma * theta
                i2 = k - 1 - e
                if 0 <= i2 <= zcap:
                    zc2 = z ** i2 * binomial(k - 1, i2) * k
                    out = out + space.lift(even_img).scale(theta * zc2 * (-sigma) * d_even)
                    # theta * (k sigma theta phi ...) vanishes since theta^2 = 0
    return out


def check_jacobi(space: FockSpace, cap, window):
    """Three-term Jacobi identity for basis triples, coefficientwise in ``x0, x1, x2``.

    Only the plain components (all odd variables set to zero) are compared, which
    is the ordinary Jacobi identity of the underlying vertex superalgebra.
    """
    lo, hi = window
    checked = 0
    basis = space.basis_upto(cap)
    for u in basis:
        for v in basis:
            sign = -1 if space.parity(u) and space.parity(v) else 1
            for w in basis:
                for a in range(lo, hi + 1):
                    for b in range(lo, hi + 1):
                        for c in range(lo, hi + 1):
                            lhs = _jacobi_term(space, u, v, w, a, b, c, sign)
                            rhs = _jacobi_rhs(space, u, v, w, a, b, c)
                            checked += 1
                            if lhs != rhs:
                                return _result("jacobi", False, checked,
                                               {"u": space.basis_name(u), "v": space.basis_name(v),
                                                "w": space.basis_name(w), "exps": [a, b, c]})
    return _result("jacobi", True, checked, None)


def _jacobi_term(space, u, v, w, a, b, c, sign):
    out: dict = {}
    k = -a - 1
    wt_bound = int(space.weight(u) + space.weight(v) + space.weight(w)) + 2
    # x0^-1 delta((x1 - x2)/x0) Y(u,x1) Y(v,x2) w, expanding in powers of x2
    for i in range(0, wt_bound + abs(c) + abs(k) + 4):
        n = i - c - 1
        mm = k - i - b - 1
        coeff = binomial(k, i) * (-1) ** i
        if not coeff:
            continue
        inner = vertex_mode(v, n, w)
        for bb, q in inner.items():
            _accumulate(out, vertex_mode(u, mm, bb), coeff * q)
    # - sign * x0^-1 delta((x2 - x1)/(-x0)) Y(v,x2) Y(u,x1) w, expanding in powers of x1
    # (-x0)^(-k-1) (x2 - x1)^k: x0 power -k-1 = a
    pref = -sign * (-1) ** k
    for i in range(0, wt_bound + abs(b) + abs(k) + 4):
        mm = i - b - 1
        n = k - i - c - 1
        coeff = binomial(k, i) * (-1) ** i * pref
        if not coeff:
            continue
        inner = vertex_mode(u, mm, w)
        for bb, q in inner.items():
            _accumulate(out, vertex_mode(v, n, bb), coeff * q)
    return out


def _jacobi_rhs(space, u, v, w, a, b, c):
    out: dict = {}
    # x2^-1 delta((x1 - x0)/x2) Y(Y(u,x0)v, x2) w
    top = int(space.weight(u) + space.weight(v)) + 1
    for p in range(-a - 1, top + 1):
        i = a + p + 1
        if i < 0:
            continue
        inner = vertex_mode(u, p, v)
        if not inner:
            continue
        # (x1 - x0)^k x2^(-k-1): x1 power k - i = b
        k = b + i
        coeff = binomial(k, i) * (-1) ** i
        if not coeff:
            continue
        # x2^(-k-1) * x2^(-r-1) = x2^c  =>  r = -c - k - 2
        r = -c - k - 2
        for bb, s in inner.items():
            _accumulate(out, vertex_mode(bb, r, w), coeff * s)
    return out
