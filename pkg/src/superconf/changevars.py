"""Change of variables operators for N=1 Neveu-Schwarz vertex operator superalgebras.

Every formula here is checked on the Fock model with formal (nilpotent)
parameters.  Vertex operators are evaluated at points ``(X, Phi)`` that are
ring elements in the generators ``x`` and ``phi``; a point is only usable
when ``X`` is ``x`` times a unit, which holds for every coordinate change
with nilpotent parameters.  Results are compared on a window of ``x``
exponents, and each evaluation keeps enough modes for that window to be
complete.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil
from typing import Callable, Sequence

from gmpy2 import mpq

from .coords import CoordinateData, half
from .fockvosa import FockSpace
from .nsmod import (DualVector, G, L, ModuleVector, apply_terms, dual_adjoint_act, exp_modes,
                    power_l0)
from .superring import NotInvertibleError, SuperScalar
from .theta import (SQRT_T, ThetaFamily, theta1, theta1_center, theta1_lhs_terms, theta2,
                    theta2_center, theta2_lhs_terms)

__all__ = [
    "AnnulusDomainError",
    "Point",
    "ChangeAtZero",
    "ChangeAtInfinity",
    "TransportedVOSA",
    "vertex_at",
    "restrict_window",
    "gamma_h",
    "gamma_theta",
    "xi_star",
    "xi_dual",
    "xi_theta",
    "pair",
    "verify_change_zero",
    "verify_scaling_reduction",
    "verify_bracket_zero",
    "verify_bracket_infinity",
    "verify_change_infinity",
    "build_iso_family",
    "verify_iso_family",
    "shifted_change",
    "annulus_verify",
    "annulus_scaling_degeneration",
    "Annulus",
]


class AnnulusDomainError(ValueError):
    """The composed coordinate of an annulus cannot be formed formally."""


def _report(identity: str, failure, checked: int) -> dict:
    return {"identity": identity, "status": "pass" if failure is None else "fail",
            "checked": checked, "first_failure": failure}


def _index_mode(index):
    index = mpq(index)
    return L(int(index)) if index.denominator == 1 else G(index)


def _modes(field_terms: Sequence) -> list:
    return [(c, _index_mode(i)) for c, i in field_terms]


def _negate(terms: Sequence) -> list:
    return [(-c, m) for c, m in terms]


def _at_t_one(terms: Sequence, t_name: str = SQRT_T) -> list:
    out = []
    for c, m in terms:
        c = c.substitute({t_name: 1}) if t_name in c.table else c
        if not c.is_zero():
            out.append((c, m))
    return out


# ---------------------------------------------------------------------------
# Points and windows


@dataclass
class Point:
    """A point ``(X, Phi)`` at which vertex operators are evaluated."""

    x: SuperScalar
    phi: SuperScalar
    x_name: str = "x"
    powers: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def origin_chart(cls, table, x_name: str = "x", phi_name: str = "phi") -> "Point":
        return cls(table.gen(x_name), table.gen(phi_name), x_name)

    def substitute(self, assignment) -> "Point":
        return Point(self.x.substitute(assignment), self.phi.substitute(assignment), self.x_name)

    def depth(self) -> int:
        """How far below ``x^(-n-1)`` the expansion of ``X^(-n-1)`` can reach.

        Writing ``X = lead * (1 + eps)`` with ``eps`` nilpotent, every power of
        ``1 + eps`` is a combination of the powers of ``eps``, so their lowest
        ``x`` exponent bounds the reach.
        """
        if "depth" in self.powers:
            return self.powers["depth"]
        table = self.x.table
        lead = SuperScalar(table, self.x._unit_split())
        if lead.degree_range(self.x_name) != (1, 1) or len(lead.terms) != 1:
            raise ValueError("the even coordinate must be x times a unit")
        eps = self.x * lead.invert() - table.one()
        low, power = 0, eps
        while not power.is_zero():
            low = min(low, _lowest_exponent(power, self.x_name))
            power = power * eps
        depth = -low + max(0, -_lowest_exponent(self.phi, self.x_name))
        self.powers["depth"] = depth
        return depth


def _lowest_exponent(value: SuperScalar, x_name: str) -> int:
    r = value.degree_range(x_name)
    return 0 if r is None else r[0]


def _vector_lowest(vec: ModuleVector, x_name: str) -> int:
    return min([_lowest_exponent(c, x_name) for c in vec.terms.values()] + [0])


def vertex_at(space: FockSpace, u: ModuleVector, v: ModuleVector, point: Point,
              hi: int) -> ModuleVector:
    """``Y(u, point) v`` with every coefficient of ``x^p`` for ``p <= hi`` complete."""
    margin = point.depth() - _vector_lowest(u, point.x_name) - _vector_lowest(v, point.x_name)
    lowest = -(hi + margin) - 1
    return space.vertex_apply(u, v, point.x, point.phi, lowest, point.powers)


def restrict_window(vec: ModuleVector, lo: int, hi: int, x_name: str = "x") -> ModuleVector:
    """Keep the monomials whose ``x`` exponent lies in ``[lo, hi]``."""
    keep = lambda e: not lo <= e[x_name] <= hi  # noqa: E731
    return vec.map_coefficients(lambda c: c.drop_where(keep))


def _diff(lhs: ModuleVector, rhs: ModuleVector, **where) -> dict | None:
    d = lhs.first_difference(rhs)
    if d is None:
        return None
    return dict(where, difference=repr(d))


def _superderivative(vec: ModuleVector, x_name: str, phi_name: str) -> ModuleVector:
    phi = vec.table.gen(phi_name)
    return vec.map_coefficients(lambda c: c.derivative(phi_name) + phi * c.derivative(x_name))


def _max_weight(vec: ModuleVector) -> int:
    w = vec.max_weight()
    return 0 if w is None else int(ceil(w))


# ---------------------------------------------------------------------------
# Change of variables at zero


class ChangeAtZero:
    """A change of variables ``H`` vanishing at zero.

    ``data`` holds ``(a, A, M)`` with ``H^{-1} = E^(a, A, M)``; then
    ``H = a^(2 L_0) exp(sum(A_j L_j + M G))`` applied to ``(x, phi)``.  The
    table must contain ``x``, ``phi`` and the square root of ``t``.
    ``flip_theta`` negates every ``Theta_j``; it exists to confirm that the
    checks reject a wrong operator.
    """

    def __init__(self, data: CoordinateData, x_name: str = "x", phi_name: str = "phi",
                 t_name: str = SQRT_T, flip_theta: bool = False):
        if data.kind != "zero":
            raise ValueError("ChangeAtZero needs data at zero")
        self.data = data
        self.table = data.table
        self.x_name, self.phi_name, self.t_name = x_name, phi_name, t_name
        cx, cphi = theta1_center(data, t_name, x_name, phi_name)
        self.point = Point(cx, cphi, x_name).substitute({t_name: 1})
        self.flip_theta = flip_theta
        self._theta: dict[int, ThetaFamily] = {}

    @property
    def a(self) -> SuperScalar:
        return self.data.a_sqrt

    def field_modes(self) -> list:
        """``sum(A_j L(j) + M_(j-1/2) G(j-1/2))`` as operator terms."""
        return _modes(self.data.field_terms(1))

    def theta(self, cutoff: int, symbolic_t: bool = False) -> ThetaFamily:
        """The first Theta family, specialised to ``t = 1`` unless ``symbolic_t``."""
        cutoff = max(cutoff, 1)
        key = (cutoff, symbolic_t)
        if key not in self._theta:
            fam = theta1(self.data, cutoff, self.t_name, self.x_name, self.phi_name)
            if self.flip_theta:
                fam = ThetaFamily(fam.kind, fam.exp_theta0, [-c for c in fam.even],
                                  [-c for c in fam.odd], fam.x_name, fam.phi_name)
            self._theta[key] = fam if symbolic_t else fam.specialize({self.t_name: 1})
        return self._theta[key]


def gamma_h(change: ChangeAtZero, v: ModuleVector, inverse: bool = False) -> ModuleVector:
    """``exp(-sum(A_j L(j) + M G(j-1/2))) a^(-2 L(0))`` and its inverse."""
    terms = change.field_modes()
    if inverse:
        return power_l0(change.a, exp_modes(terms, v), 2)
    return exp_modes(_negate(terms), power_l0(change.a, v, -2))


def gamma_theta(change: ChangeAtZero, u: ModuleVector, inverse: bool = False,
                family: ThetaFamily | None = None) -> ModuleVector:
    """The Theta operator at zero, forward or inverse, at ``t = 1``."""
    fam = family or change.theta(_max_weight(u) + 1)
    if inverse:
        inner = exp_modes(fam.mode_terms(1), power_l0(change.a, u, 2))
        return power_l0(fam.exp_theta0, inner, 2)
    inner = exp_modes(fam.mode_terms(-1), power_l0(fam.exp_theta0, u, -2))
    return power_l0(change.a, inner, -2)


def _pairs(us: Sequence[ModuleVector], vs: Sequence[ModuleVector]):
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            yield i, j, u, v


def verify_change_zero(change: ChangeAtZero, space: FockSpace, us: Sequence[ModuleVector],
                       vs: Sequence[ModuleVector], window=(-4, 4)) -> dict:
    """Both forms of the change of variables formula at zero on an ``x`` window."""
    lo, hi = window
    origin = Point.origin_chart(change.table, change.x_name, change.phi_name)
    checked = 0
    for i, j, u, v in _pairs(us, vs):
        lhs = gamma_h(change, vertex_at(space, u, v, origin, hi))
        rhs = vertex_at(space, gamma_theta(change, u), gamma_h(change, v), change.point, hi)
        checked += 1
        failure = _diff(restrict_window(lhs, lo, hi), restrict_window(rhs, lo, hi),
                        form="forward", u=i, v=j)
        if failure:
            return _report("change-zero", failure, checked)
        lhs = vertex_at(space, u, v, change.point, hi)
        inner = vertex_at(space, gamma_theta(change, u, inverse=True),
                          gamma_h(change, v, inverse=True), origin, hi)
        rhs = gamma_h(change, inner)
        checked += 1
        failure = _diff(restrict_window(lhs, lo, hi), restrict_window(rhs, lo, hi),
                        form="rewritten", u=i, v=j)
        if failure:
            return _report("change-zero", failure, checked)
    return _report("change-zero", None, checked)


def verify_scaling_reduction(a: SuperScalar, space: FockSpace, us: Sequence[ModuleVector],
                             vs: Sequence[ModuleVector], window=(-4, 4)) -> dict:
    """The pure scaling change against direct ``L(0)`` conjugation.

    With ``H^{-1} = (a^2 x, a phi)`` the change formula must coincide with
    ``x0^(2L(0)) Y(v, (x, phi)) x0^(-2L(0)) = Y(x0^(2L(0)) v, (x0^2 x, x0 phi))``
    for ``x0 = 1/a``.
    """
    lo, hi = window
    table = a.table
    change = ChangeAtZero(CoordinateData("zero", a, [], []))
    x0 = a.invert()
    conj_point = Point(table.gen("x") * x0 * x0, table.gen("phi") * x0)
    origin = Point.origin_chart(table)
    checked = 0
    if change.point.x != conj_point.x or change.point.phi != conj_point.phi:
        return _report("change-zero-scaling", {"reason": "H is not the scaling map"}, checked)
    for i, j, u, v in _pairs(us, vs):
        checked += 1
        if gamma_theta(change, u) != power_l0(x0, u, 2):
            return _report("change-zero-scaling", {"reason": "gamma_theta is not x0^(2L(0))",
                                                   "u": i}, checked)
        if gamma_h(change, v) != power_l0(x0, v, 2):
            return _report("change-zero-scaling", {"reason": "gamma_H is not x0^(2L(0))",
                                                   "v": j}, checked)
        direct = power_l0(x0, vertex_at(space, u, power_l0(x0, v, -2), origin, hi), 2)
        conj = vertex_at(space, power_l0(x0, u, 2), v, conj_point, hi)
        failure = _diff(restrict_window(direct, lo, hi), restrict_window(conj, lo, hi),
                        form="conjugation", u=i, v=j)
        if failure:
            return _report("change-zero-scaling", failure, checked)
        lhs = gamma_h(change, vertex_at(space, u, v, origin, hi))
        rhs = vertex_at(space, gamma_theta(change, u), gamma_h(change, v), change.point, hi)
        failure = _diff(restrict_window(lhs, lo, hi), restrict_window(rhs, lo, hi),
                        form="change", u=i, v=j)
        if failure:
            return _report("change-zero-scaling", failure, checked)
    return _report("change-zero-scaling", None, checked)


def _bracket_terms_zero(data: CoordinateData, t_name: str) -> list:
    root = data.table.gen(t_name)
    a_inv = data.a_sqrt.invert()
    terms = []
    for j in range(1, data.length + 1):
        c = data.even_at(j) * root ** (2 * j) * a_inv ** (2 * j)
        if not c.is_zero():
            terms.append((c, L(j)))
        c = data.odd_at(j) * root ** (2 * j - 1) * a_inv ** (2 * j - 1)
        if not c.is_zero():
            terms.append((c, G(j - half)))
    return terms


def _bracket_terms_infinity(data: CoordinateData, t_name: str) -> list:
    root = data.table.gen(t_name)
    terms = []
    for j in range(1, data.length + 1):
        c = data.even_at(j) * root ** (2 * j)
        if not c.is_zero():
            terms.append((c, L(-j)))
        c = data.odd_at(j) * root ** (2 * j - 1)
        if not c.is_zero():
            terms.append((c, G(-j + half)))
    return terms


def _check_bracket(identity: str, space, operator: list, image_terms: Callable, sign: int,
                   us, vs, window, x_name, phi_name, t_symbolic: bool) -> tuple:
    """Commutator and exponentiated forms for one value of ``t``.

    ``image_terms(u)`` gives the operator ``K`` with ``[D, Y(u)] = Y(K u)``;
    the exponentiated form is ``e^{sD} Y(u) e^{-sD} = Y(e^{sK} u)``.
    """
    lo, hi = window
    origin = Point.origin_chart(space.table, x_name, phi_name)
    checked = 0
    for i, j, u, v in _pairs(us, vs):
        k_terms = image_terms(u)
        lhs = (apply_terms(operator, vertex_at(space, u, v, origin, hi))
               - vertex_at(space, u, apply_terms(operator, v), origin, hi))
        rhs = vertex_at(space, apply_terms(k_terms, u), v, origin, hi)
        checked += 1
        failure = _diff(restrict_window(lhs, lo, hi), restrict_window(rhs, lo, hi),
                        form="bracket", u=i, v=j, symbolic_t=t_symbolic)
        if failure:
            return failure, checked
        scaled = operator if sign > 0 else _negate(operator)
        lhs = exp_modes(scaled, vertex_at(space, u, exp_modes(_negate(scaled), v), origin, hi))
        k_scaled = k_terms if sign > 0 else _negate(k_terms)
        rhs = vertex_at(space, exp_modes(k_scaled, u), v, origin, hi)
        checked += 1
        failure = _diff(restrict_window(lhs, lo, hi), restrict_window(rhs, lo, hi),
                        form="conjugation", u=i, v=j, symbolic_t=t_symbolic)
        if failure:
            return failure, checked
    return None, checked


def verify_bracket_zero(data: CoordinateData, space: FockSpace, us, vs, window=(-4, 4),
                        t_name: str = SQRT_T, x_name: str = "x", phi_name: str = "phi") -> dict:
    """The bracket formula at zero and its exponentiated corollary.

    Checked with ``t`` symbolic and again at ``t = 1``.
    """
    operator = _bracket_terms_zero(data, t_name)
    k_terms = _negate(theta1_lhs_terms(data, t_name, x_name, phi_name))
    total = 0
    for symbolic in (True, False):
        op = operator if symbolic else _at_t_one(operator, t_name)
        kt = k_terms if symbolic else _at_t_one(k_terms, t_name)
        failure, checked = _check_bracket("bracket-zero", space, op, lambda u: kt, -1, us, vs,
                                          window, x_name, phi_name, symbolic)
        total += checked
        if failure:
            return _report("bracket-zero", failure, total)
    return _report("bracket-zero", None, total)


def verify_bracket_infinity(data: CoordinateData, space: FockSpace, us, vs, window=(-4, 4),
                            t_name: str = SQRT_T, x_name: str = "x",
                            phi_name: str = "phi") -> dict:
    """The bracket formula at infinity and its exponentiated corollary."""
    operator = _bracket_terms_infinity(data, t_name)
    bound = space.table.nilpotency_bound()

    def image(u, symbolic):
        terms = theta2_lhs_terms(data, _max_weight(u) + bound + 1, t_name, x_name, phi_name)
        return terms if symbolic else _at_t_one(terms, t_name)

    total = 0
    for symbolic in (True, False):
        op = operator if symbolic else _at_t_one(operator, t_name)
        failure, checked = _check_bracket("bracket-infinity", space, op,
                                          lambda u, s=symbolic: image(u, s), 1, us, vs,
                                          window, x_name, phi_name, symbolic)
        total += checked
        if failure:
            return _report("bracket-infinity", failure, total)
    return _report("bracket-infinity", None, total)


# ---------------------------------------------------------------------------
# Change of variables at infinity


class ChangeAtInfinity:
    """A change of variables ``H o I`` fixing infinity, from data ``(B, N)``.

    ``H o I = exp(-sum(B_j L_(-j) + N G_(-j+1/2)))`` applied to ``(x, phi)``.
    """

    def __init__(self, data: CoordinateData, x_name: str = "x", phi_name: str = "phi",
                 t_name: str = SQRT_T):
        if data.kind != "infinity":
            raise ValueError("ChangeAtInfinity needs data at infinity")
        self.data = data
        self.table = data.table
        self.x_name, self.phi_name, self.t_name = x_name, phi_name, t_name
        cx, cphi = theta2_center(data, t_name, x_name, phi_name)
        self.point = Point(cx, cphi, x_name).substitute({t_name: 1})
        self._theta: dict = {}

    def field_modes(self) -> list:
        """``sum(B_j L(-j) + N_(j-1/2) G(-j+1/2))`` as operator terms."""
        return _modes(self.data.field_terms(1))

    def theta(self, cutoff: int, symbolic_t: bool = False) -> ThetaFamily:
        cutoff = max(cutoff, 1)
        key = (cutoff, symbolic_t)
        if key not in self._theta:
            fam = theta2(self.data, cutoff, self.t_name, self.x_name, self.phi_name)
            self._theta[key] = fam if symbolic_t else fam.specialize({self.t_name: 1})
        return self._theta[key]


def xi_star(change: ChangeAtInfinity, v: ModuleVector, inverse: bool = False) -> ModuleVector:
    """``exp(-sum(B_j L(-j) + N G(-j+1/2)))`` on vectors; it terminates by nilpotency."""
    terms = change.field_modes()
    return exp_modes(terms if inverse else _negate(terms), v)


def _adjoint_apply(terms: Sequence, dual: DualVector) -> DualVector:
    out = DualVector(dual.module)
    for coeff, mode in terms:
        out = out + dual_adjoint_act((mode[0], -mode[1]), dual).scale(coeff)
    return out


def xi_dual(change: ChangeAtInfinity, dual: DualVector) -> DualVector:
    """The map on the graded dual whose adjoint is :func:`xi_star`."""
    terms = _negate(change.field_modes())
    total, term = dual, dual
    for k in range(1, 4 * change.table.nilpotency_bound() + 8):
        term = _adjoint_apply(terms, term).scale(mpq(1, k))
        if term.is_zero():
            return total
        total = total + term
    raise ArithmeticError("dual exponential did not terminate")


def pair(dual: DualVector, vec: ModuleVector) -> SuperScalar:
    """``<dual, vec>`` with the coefficient of the vector written first."""
    total = vec.table.zero()
    for b, c in dual.terms.items():
        v = vec.terms.get(b)
        if v is not None:
            total = total + v * c
    return total


def xi_theta(change: ChangeAtInfinity, u: ModuleVector, inverse: bool = False,
             family: ThetaFamily | None = None) -> ModuleVector:
    """The Theta operator at infinity, forward or inverse, at ``t = 1``."""
    fam = family or change.theta(_max_weight(u) + 1)
    if inverse:
        return power_l0(fam.exp_theta0, exp_modes(fam.mode_terms(1), u), 2)
    return exp_modes(fam.mode_terms(-1), power_l0(fam.exp_theta0, u, -2))


def _dual_basis(space, cap) -> list:
    return [(b, DualVector(space, {b: space.table.one()})) for b in space.basis_upto(cap)]


def verify_change_infinity(change: ChangeAtInfinity, space: FockSpace, us, vs, cap=4,
                           window=(-4, 4)) -> dict:
    """The change formula at infinity through dual pairings up to weight ``cap``.

    The left side is paired directly; the right side ``xi*(W)`` is paired
    through the adjoint map on the dual.  The rewritten form is compared on
    all components of weight at most ``cap``.
    """
    lo, hi = window
    origin = Point.origin_chart(change.table, change.x_name, change.phi_name)
    duals = [(b, d, xi_dual(change, d)) for b, d in _dual_basis(space, cap)]
    below_cap = lambda b: space.weight(b) <= cap  # noqa: E731
    checked = 0
    for i, j, u, v in _pairs(us, vs):
        lhs = restrict_window(vertex_at(space, u, xi_star(change, v), origin, hi), lo, hi)
        inner = restrict_window(vertex_at(space, xi_theta(change, u), v, change.point, hi), lo, hi)
        for b, d, xd in duals:
            checked += 1
            left, right = pair(d, lhs), pair(xd, inner)
            if left != right:
                return _report("change-infinity", {"form": "forward", "u": i, "v": j,
                                                   "dual": space.basis_name(b),
                                                   "difference": repr(left - right)}, checked)
        lhs = vertex_at(space, u, v, change.point, hi)
        inner = vertex_at(space, xi_theta(change, u, inverse=True), xi_star(change, v), origin, hi)
        rhs = xi_star(change, inner, inverse=True)
        checked += 1
        failure = _diff(restrict_window(lhs, lo, hi).project(below_cap),
                        restrict_window(rhs, lo, hi).project(below_cap),
                        form="rewritten", u=i, v=j)
        if failure:
            return _report("change-infinity", failure, checked)
    return _report("change-infinity", None, checked)


# ---------------------------------------------------------------------------
# Isomorphic families


@dataclass
class TransportedVOSA:
    """A vertex operator superalgebra carried over by a module isomorphism.

    ``forward`` maps the original space onto the new one, ``backward`` is
    its inverse and ``vertex(u, v, hi)`` evaluates the new vertex operator.
    """

    name: str
    space: FockSpace
    forward: Callable[[ModuleVector], ModuleVector]
    backward: Callable[[ModuleVector], ModuleVector]
    vertex: Callable[[ModuleVector, ModuleVector, int], ModuleVector]
    x_name: str = "x"
    phi_name: str = "phi"

    @property
    def vacuum(self) -> ModuleVector:
        return self.forward(self.space.vacuum())

    @property
    def tau(self) -> ModuleVector:
        return self.forward(self.space.tau())

    def g_half(self, u: ModuleVector) -> ModuleVector:
        """The transported ``G(-1/2)``."""
        return self.forward(self.space.ns_act(G(-half), self.backward(u)))


def build_iso_family(change, kind: str | None = None) -> TransportedVOSA:
    """The transported algebra attached to a change of variables.

    For a change at zero: ``V_H = gamma_H(V)`` with
    ``Y_H(u) = Y(gamma_Theta gamma_H^{-1} u, H)``.  At infinity the default
    is ``V_{H o I} = (xi*)^{-1}(V)`` with ``Y(xi_Theta xi* u, H o I)``;
    ``kind="inverse"`` builds the family on ``xi*(V)`` whose Theta operator
    is evaluated at the inverse coordinate.
    """
    space = FockSpace(change.table)
    if isinstance(change, ChangeAtZero):
        def vertex(u, v, hi):
            return vertex_at(space, gamma_theta(change, gamma_h(change, u, inverse=True)), v,
                             change.point, hi)

        return TransportedVOSA("zero", space, lambda v: gamma_h(change, v),
                               lambda v: gamma_h(change, v, inverse=True), vertex,
                               change.x_name, change.phi_name)
    if kind in (None, "infinity"):
        def vertex(u, v, hi):
            return vertex_at(space, xi_theta(change, xi_star(change, u)), v, change.point, hi)

        return TransportedVOSA("infinity", space, lambda v: xi_star(change, v, inverse=True),
                               lambda v: xi_star(change, v), vertex,
                               change.x_name, change.phi_name)
    if kind == "inverse":
        inverse_point = _inverse_point_infinity(change)
        assignment = {change.x_name: inverse_point.x, change.phi_name: inverse_point.phi}

        def vertex(u, v, hi):
            w = xi_star(change, u, inverse=True)
            fam = change.theta(_max_weight(w) + 1)
            moved = fam.map_coefficients(lambda c: c.substitute(assignment))
            return vertex_at(space, xi_theta(change, w, inverse=True, family=moved), v,
                             inverse_point, hi)

        return TransportedVOSA("infinity-inverse", space, lambda v: xi_star(change, v),
                               lambda v: xi_star(change, v, inverse=True), vertex,
                               change.x_name, change.phi_name)
    raise ValueError(f"unknown family kind {kind!r}")


def _inverse_point_infinity(change: ChangeAtInfinity) -> Point:
    """``I^{-1} o H^{-1}(x, phi)``, the flow of ``+sum(B L_(-j) + N G)``."""
    from .coords import exp_derivation
    from .superseries import CoordinateMap, promote

    flow = exp_derivation(change.data.field_terms(1), CoordinateMap.identity(change.table))
    return Point(promote(flow.x, change.x_name, change.phi_name),
                 promote(flow.phi, change.x_name, change.phi_name), change.x_name)


def verify_iso_family(family: TransportedVOSA, weight=2, window=(-3, 3),
                      expected_tau: ModuleVector | None = None) -> list[dict]:
    """Transport identity, vacuum, creation and ``G(-1/2)``-derivative checks."""
    space = family.space
    lo, hi = window
    origin = Point.origin_chart(space.table, family.x_name, family.phi_name)
    basis = [space.basis_vector(b) for b in space.basis_upto(weight)]
    images = [family.forward(b) for b in basis]
    reports = []

    failure, checked = None, 0
    for i, j, u, v in _pairs(images, images):
        checked += 1
        lhs = family.vertex(u, v, hi)
        rhs = family.forward(vertex_at(space, family.backward(u), family.backward(v), origin, hi))
        failure = _diff(restrict_window(lhs, lo, hi), restrict_window(rhs, lo, hi), u=i, v=j)
        if failure:
            break
    reports.append(_report(f"iso-{family.name}-transport", failure, checked))

    failure, checked = None, 0
    vac = family.vacuum
    for j, v in enumerate(images):
        checked += 1
        lhs = restrict_window(family.vertex(vac, v, hi), lo, hi)
        failure = _diff(lhs, restrict_window(v, lo, hi), v=j)
        if failure:
            break
    reports.append(_report(f"iso-{family.name}-vacuum", failure, checked))

    failure, checked = None, 0
    for i, u in enumerate(images):
        checked += 1
        image = family.vertex(u, vac, hi)
        singular = restrict_window(image, lo, -1, family.x_name)
        if not singular.is_zero():
            failure = {"u": i, "reason": "negative powers", "difference": repr(singular)}
            break
        constant = image.map_coefficients(
            lambda c: _constant_part(c, family.x_name, family.phi_name))
        failure = _diff(constant, u, u=i, reason="value at zero")
        if failure:
            break
    reports.append(_report(f"iso-{family.name}-creation", failure, checked))

    failure, checked = None, 0
    for i, j, u, v in _pairs(images, images):
        checked += 1
        lhs = family.vertex(family.g_half(u), v, hi + 1)
        rhs = _superderivative(family.vertex(u, v, hi + 1), family.x_name, family.phi_name)
        failure = _diff(restrict_window(lhs, lo, hi), restrict_window(rhs, lo, hi), u=i, v=j)
        if failure:
            break
    reports.append(_report(f"iso-{family.name}-g-derivative", failure, checked))

    if expected_tau is not None:
        failure = _diff(family.tau, expected_tau, reason="tau")
        reports.append(_report(f"iso-{family.name}-tau", failure, 1))
    return reports


def _constant_part(c: SuperScalar, x_name: str, phi_name: str) -> SuperScalar:
    """The part of ``c`` free of both ``x`` and ``phi``."""
    bit = 1 << c.table.odd_index[phi_name]
    free_of_x = c.drop_where(lambda e: e[x_name] != 0)
    return SuperScalar(c.table, {k: v for k, v in free_of_x.terms.items() if not k[1] & bit})


# ---------------------------------------------------------------------------
# Shifted change and annulus


def _shift_point(table, z: SuperScalar, theta: SuperScalar, x_name="x", phi_name="phi") -> Point:
    x, phi = table.gen(x_name), table.gen(phi_name)
    return Point(x - z - phi * theta, phi - theta, x_name)


def shifted_change(change: ChangeAtZero, center: tuple, space: FockSpace, us, vs,
                   window=(-3, 3)) -> dict:
    """The change formula for ``F = H o s_(z, theta)``.

    The direct side evaluates ``Y(u, F(x, phi)) v``.  The other side is
    ``gamma_H(e^{-zL(-1)-theta G(-1/2)} Y(gamma_Theta^{-1}(u)|_{s(x,phi)}, (x, phi))
    e^{zL(-1)+theta G(-1/2)} gamma_H^{-1} v)``.
    """
    z, theta = center
    lo, hi = window
    xn, pn = change.x_name, change.phi_name
    shifted = _shift_point(change.table, z, theta, xn, pn)
    assignment = {xn: shifted.x, pn: shifted.phi}
    f_point = change.point.substitute(assignment)
    origin = Point.origin_chart(change.table, xn, pn)
    translate = [(z, L(-1)), (theta, G(-half))]
    checked = 0
    for i, j, u, v in _pairs(us, vs):
        checked += 1
        lhs = vertex_at(space, u, v, f_point, hi)
        moved = gamma_theta(change, u, inverse=True).map_coefficients(
            lambda c: c.substitute(assignment))
        inner = vertex_at(space, moved, exp_modes(translate, gamma_h(change, v, inverse=True)),
                          origin, hi)
        rhs = gamma_h(change, exp_modes(_negate(translate), inner))
        failure = _diff(restrict_window(lhs, lo, hi), restrict_window(rhs, lo, hi), u=i, v=j)
        if failure:
            return _report("shifted-change", failure, checked)
    return _report("shifted-change", None, checked)


class Annulus:
    """Coordinates ``F1`` at zero and ``F2`` at infinity with ``H = F2^{-1} o F1``."""

    def __init__(self, f1: ChangeAtZero, f2: ChangeAtInfinity):
        if f1.table != f2.table:
            raise ValueError("both coordinates must share a table")
        self.f1, self.f2 = f1, f2
        self.table = f1.table
        self.x_name, self.phi_name = f1.x_name, f1.phi_name
        try:
            f1.point.x.invert()
        except NotInvertibleError as exc:
            raise AnnulusDomainError("F1 does not have an invertible leading term") from exc
        self.assignment = {self.x_name: f1.point.x, self.phi_name: f1.point.phi}
        self.point = f2.point.substitute(self.assignment)
        self._families: dict = {}

    def transform(self, v: ModuleVector) -> ModuleVector:
        """``(xi*)^{-1} o gamma_{F1}``."""
        return xi_star(self.f2, gamma_h(self.f1, v), inverse=True)

    def untransform(self, v: ModuleVector) -> ModuleVector:
        return gamma_h(self.f1, xi_star(self.f2, v), inverse=True)

    def xi_theta_moved(self, u: ModuleVector, inverse: bool = False) -> ModuleVector:
        cutoff = _max_weight(u) + 1
        if cutoff not in self._families:
            fam = self.f2.theta(cutoff)
            self._families[cutoff] = fam.map_coefficients(lambda c: c.substitute(self.assignment))
        return xi_theta(self.f2, u, inverse, self._families[cutoff])

    def theta_operator(self, u: ModuleVector) -> ModuleVector:
        return self.xi_theta_moved(gamma_theta(self.f1, u))

    def theta_operator_inverse(self, u: ModuleVector) -> ModuleVector:
        return gamma_theta(self.f1, self.xi_theta_moved(u, inverse=True), inverse=True)

    def family(self) -> TransportedVOSA:
        space = FockSpace(self.table)

        def vertex(u, v, hi):
            return vertex_at(space, self.theta_operator(self.untransform(u)), v, self.point, hi)

        return TransportedVOSA("annulus", space, self.transform, self.untransform, vertex,
                               self.x_name, self.phi_name)


def annulus_verify(f1: ChangeAtZero, f2: ChangeAtInfinity, space: FockSpace, us, vs, cap=3,
                   window=(-3, 3)) -> dict:
    """Both forms of the annulus change formula, compared up to weight ``cap``."""
    ann = Annulus(f1, f2)
    lo, hi = window
    origin = Point.origin_chart(ann.table, ann.x_name, ann.phi_name)
    below_cap = lambda b: space.weight(b) <= cap  # noqa: E731
    checked = 0
    for i, j, u, v in _pairs(us, vs):
        lhs = ann.transform(vertex_at(space, u, v, origin, hi))
        rhs = vertex_at(space, ann.theta_operator(u), ann.transform(v), ann.point, hi)
        checked += 1
        failure = _diff(restrict_window(lhs, lo, hi).project(below_cap),
                        restrict_window(rhs, lo, hi).project(below_cap),
                        form="forward", u=i, v=j)
        if failure:
            return _report("annulus", failure, checked)
        lhs = vertex_at(space, u, v, ann.point, hi)
        inner = vertex_at(space, ann.theta_operator_inverse(u), ann.untransform(v), origin, hi)
        rhs = ann.transform(inner)
        checked += 1
        failure = _diff(restrict_window(lhs, lo, hi).project(below_cap),
                        restrict_window(rhs, lo, hi).project(below_cap),
                        form="rewritten", u=i, v=j)
        if failure:
            return _report("annulus", failure, checked)
    return _report("annulus", None, checked)


def annulus_scaling_degeneration(a: SuperScalar, space: FockSpace, us, vs,
                                 window=(-3, 3)) -> dict:
    """With ``F1`` a pure scaling and ``F2`` trivial the annulus formula is the scaling case.

    Both sides of the annulus formula must agree term by term with both
    sides of the change formula at zero for the same scaling.
    """
    lo, hi = window
    table = a.table
    f1 = ChangeAtZero(CoordinateData("zero", a, [], []))
    f2 = ChangeAtInfinity(CoordinateData("infinity", None, [table.zero()], [table.zero()]))
    ann = Annulus(f1, f2)
    origin = Point.origin_chart(table)
    checked = 0
    if ann.point.x != f1.point.x or ann.point.phi != f1.point.phi:
        return _report("annulus-scaling", {"reason": "H is not the scaling map"}, checked)
    for i, j, u, v in _pairs(us, vs):
        checked += 1
        annulus_sides = (ann.transform(vertex_at(space, u, v, origin, hi)),
                         vertex_at(space, ann.theta_operator(u), ann.transform(v), ann.point, hi))
        zero_sides = (gamma_h(f1, vertex_at(space, u, v, origin, hi)),
                      vertex_at(space, gamma_theta(f1, u), gamma_h(f1, v), f1.point, hi))
        for side, (left, right) in enumerate(zip(annulus_sides, zero_sides)):
            failure = _diff(restrict_window(left, lo, hi), restrict_window(right, lo, hi),
                            side=side, u=i, v=j)
            if failure:
                return _report("annulus-scaling", failure, checked)
    return _report("annulus-scaling", None, checked)
