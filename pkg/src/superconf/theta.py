"""The Theta families attached to coordinate data at zero and at infinity.

A coordinate change ``H`` is conjugated by the superconformal shifts that
move a generic point ``(x, phi)`` to the origin.  The result is again a
superconformal map fixing the origin, so it has its own ``(a, A, M)``
parameters; those are the Theta series.  Here ``x`` and ``phi`` are ring
generators (not series variables) and a third even generator stands for
the square root of the formal parameter ``t``.

Only ``exp(Theta_0)`` is stored.  Operators use it through integral powers
``exp(Theta_0) ** (-2 L(0))`` so no logarithm is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .coords import (CoordinateData, NotSuperconformalError, compose_all, exp_derivation,
                     ehat_expand, ehat_inverse, half, scaling_map, shift_map)
from .nsmod import G, L, VermaModule, exp_modes, power_l0
from .superring import GeneratorTable, SuperScalar, binomial
from .superseries import CoordinateMap, SuperSeries, demote, promote

__all__ = [
    "SQRT_T",
    "ThetaFamily",
    "theta_table",
    "symbolic_data",
    "shift_inverse",
    "theta1",
    "theta2",
    "theta1_center",
    "theta2_center",
    "theta1_lhs_terms",
    "theta2_lhs_terms",
    "verify_theta_identity",
]

SQRT_T = "sqrt_t"


@dataclass
class ThetaFamily:
    """``exp(Theta_0)`` together with ``Theta_j`` and ``Theta_(j-1/2)`` for ``j <= cutoff``."""

    kind: str
    exp_theta0: SuperScalar
    even: list = field(default_factory=list)
    odd: list = field(default_factory=list)
    x_name: str = "x"
    phi_name: str = "phi"

    @property
    def cutoff(self) -> int:
        return len(self.even)

    @property
    def table(self) -> GeneratorTable:
        return self.exp_theta0.table

    def theta(self, index) -> SuperScalar:
        """``Theta_index`` for a positive integer or half odd integer index."""
        index = mpq(index)
        if index.denominator == 1:
            j = int(index)
            return self.even[j - 1] if 1 <= j <= len(self.even) else self.table.zero()
        j = int(index + half)
        return self.odd[j - 1] if 1 <= j <= len(self.odd) else self.table.zero()

    def mode_terms(self, sign: int = -1) -> list:
        """``sign * sum(Theta_j L(j) + Theta_(j-1/2) G(j-1/2))`` as operator terms."""
        terms = []
        for j, c in enumerate(self.even, start=1):
            if not c.is_zero():
                terms.append((c * sign, L(j)))
        for j, c in enumerate(self.odd, start=1):
            if not c.is_zero():
                terms.append((c * sign, G(j - half)))
        return terms

    def as_data(self) -> CoordinateData:
        return CoordinateData("zero", self.exp_theta0, list(self.even), list(self.odd))

    def map_coefficients(self, func) -> "ThetaFamily":
        return ThetaFamily(self.kind, func(self.exp_theta0), [func(c) for c in self.even],
                           [func(c) for c in self.odd], self.x_name, self.phi_name)

    def specialize(self, assignment) -> "ThetaFamily":
        """Substitute values for generators, for instance ``{SQRT_T: 1}``."""
        return self.map_coefficients(lambda c: c.substitute(assignment))

    def is_trivial(self) -> bool:
        return (self.exp_theta0 == self.table.one()
                and all(c.is_zero() for c in self.even + self.odd))

    def to_json(self) -> dict:
        def series(c):
            return demote(c, self.x_name, self.phi_name).to_json()

        out = {"kind": self.kind, "cutoff": self.cutoff, "expTheta0": series(self.exp_theta0)}
        for j in range(1, self.cutoff + 1):
            out[f"theta:{2 * j - 1}/2"] = series(self.odd[j - 1])
            out[f"theta:{j}"] = series(self.even[j - 1])
        return out


def theta_table(entries=(), caps=None, laurent=(), x_name: str = "x", phi_name: str = "phi",
                t_name: str = SQRT_T) -> GeneratorTable:
    """A table holding ``x``, ``phi`` and the square root of ``t`` plus extra generators."""
    base = [(x_name, "even"), (t_name, "even"), (phi_name, "odd")]
    return GeneratorTable(base + list(entries), caps,
                          laurent=[x_name, t_name] + list(laurent))


def symbolic_data(kind: str, length: int = 1, order: int = 3, scale: bool = False,
                  module_names: tuple = ("c", "h")) -> CoordinateData:
    """Generic coordinate data with formal parameters.

    ``order`` bounds the total degree in the square root of ``t``: a
    parameter paired with ``t^j`` gets the cap ``order // (2 j)``, which is
    exact in the quotient ring.  ``scale`` makes the scale factor a formal
    Laurent generator ``a`` instead of 1.
    """
    even_name, odd_name = ("A", "M") if kind == "zero" else ("B", "N")
    evens = [f"{even_name}{j}" for j in range(1, length + 1) if order // (2 * j) > 0]
    odds = [f"{odd_name}{j}" for j in range(1, length + 1) if 2 * j - 1 <= order]
    caps = {n: order // (2 * int(n[1:])) for n in evens}
    entries = [(n, "even") for n in module_names] + [(n, "even") for n in evens]
    laurent = []
    if scale:
        entries.append(("a", "even"))
        laurent.append("a")
    entries += [(n, "odd") for n in odds]
    table = theta_table(entries, caps, laurent)
    even = [table.gen(f"{even_name}{j}") if f"{even_name}{j}" in table else table.zero()
            for j in range(1, length + 1)]
    odd = [table.gen(f"{odd_name}{j}") if f"{odd_name}{j}" in table else table.zero()
           for j in range(1, length + 1)]
    a = table.gen("a") if scale else (table.one() if kind == "zero" else None)
    return CoordinateData(kind, a, even, odd)


def shift_inverse(center_x: SuperScalar, center_phi: SuperScalar) -> CoordinateMap:
    """``(w, rho) -> (w + z + rho theta, rho + theta)``, undoing :func:`shift_map`."""
    table = center_x.table
    return CoordinateMap(SuperSeries(table, {0: center_x, 1: table.one()}, {0: center_phi}),
                         SuperSeries(table, {0: center_phi}, {0: table.one()}))


def _scale_factor(data: CoordinateData, t_name: str) -> SuperScalar:
    return data.table.gen(t_name).invert() * data.a_sqrt


def theta1_center(data: CoordinateData, t_name: str = SQRT_T, x_name: str = "x",
                  phi_name: str = "phi") -> tuple[SuperScalar, SuperScalar]:
    """The preimage of ``(x, phi)`` under the map at zero with scale ``t^(-1/2) a``."""
    table = data.table
    beta_inv = _scale_factor(data, t_name).invert()
    forward = exp_derivation(data.field_terms(1), CoordinateMap.identity(table))
    center = compose_all([forward, scaling_map(beta_inv)])
    return promote(center.x, x_name, phi_name), promote(center.phi, x_name, phi_name)


def _scaled_infinity(data: CoordinateData, t_name: str) -> CoordinateData:
    table = data.table
    root = table.gen(t_name)
    even = [c * root ** (2 * j) for j, c in enumerate(data.even, start=1)]
    odd = [c * root ** (2 * j - 1) for j, c in enumerate(data.odd, start=1)]
    return CoordinateData("infinity", None, even, odd)


def theta2_center(data: CoordinateData, t_name: str = SQRT_T, x_name: str = "x",
                  phi_name: str = "phi") -> tuple[SuperScalar, SuperScalar]:
    """The point ``(x~, phi~)`` at which the map at infinity is recentred."""
    table = data.table
    scaled = _scaled_infinity(data, t_name)
    center = exp_derivation(scaled.field_terms(-1), CoordinateMap.identity(table))
    return promote(center.x, x_name, phi_name), promote(center.phi, x_name, phi_name)


def _check_leading(composite: CoordinateMap, kind: str, x_name: str, phi_name: str):
    table = composite.table
    lead = composite.phi.coefficient(0, "odd") - table.one()
    xi = table.even_index[x_name]
    bit = 1 << table.odd_index[phi_name]
    for (exps, mask), _ in lead.terms.items():
        bad = (exps[xi] == 0 and not mask & bit) if kind == "first" else exps[xi] >= 0
        if bad:
            raise NotSuperconformalError(
                f"leading rho coefficient is not of the form 1 + higher terms: {lead!r}")


def _family(composite: CoordinateMap, kind: str, cutoff: int, x_name: str,
            phi_name: str) -> ThetaFamily:
    _check_leading(composite, kind, x_name, phi_name)
    data = ehat_inverse(composite, cutoff + 1)
    return ThetaFamily(kind, data.a_sqrt, list(data.even[:cutoff]), list(data.odd[:cutoff]),
                       x_name, phi_name)


def theta1(data: CoordinateData, cutoff: int, t_name: str = SQRT_T, x_name: str = "x",
           phi_name: str = "phi") -> ThetaFamily:
    """Theta series for coordinate data at zero, with scale ``t^(-1/2) a``.

    The parameters must be nilpotent (formal parameters carry caps), so that
    every map in the pipeline is an exact polynomial.
    """
    if data.kind != "zero":
        raise ValueError("theta1 needs data at zero")
    table = data.table
    beta = _scale_factor(data, t_name)
    forward = ehat_expand(CoordinateData("zero", beta, data.even, data.odd))
    cx, cphi = theta1_center(data, t_name, x_name, phi_name)
    composite = compose_all([shift_map(table.gen(x_name), table.gen(phi_name)), forward,
                             shift_inverse(cx, cphi), scaling_map(beta.invert())])
    return _family(composite, "first", cutoff, x_name, phi_name)


def theta2(data: CoordinateData, cutoff: int, t_name: str = SQRT_T, x_name: str = "x",
           phi_name: str = "phi") -> ThetaFamily:
    """Theta series for coordinate data at infinity, parameters weighted by powers of ``t``."""
    if data.kind != "infinity":
        raise ValueError("theta2 needs data at infinity")
    table = data.table
    scaled = _scaled_infinity(data, t_name)
    flow = exp_derivation(scaled.field_terms(1), CoordinateMap.identity(table))
    cx, cphi = theta2_center(data, t_name, x_name, phi_name)
    composite = compose_all([shift_map(table.gen(x_name), table.gen(phi_name)), flow,
                             shift_inverse(cx, cphi)], cutoff + 2)
    return _family(composite, "second", cutoff, x_name, phi_name)


# ---------------------------------------------------------------------------
# The operator identities


def theta1_lhs_terms(data: CoordinateData, t_name: str = SQRT_T, x_name: str = "x",
                     phi_name: str = "phi") -> list:
    """The double sum exponentiated on the left of the first identity, as operator terms."""
    table = data.table
    root = table.gen(t_name)
    root_inv = root.invert()
    a = data.a_sqrt
    a_inv = a.invert()
    x = table.gen(x_name)
    x_inv = x.invert()
    phi = table.gen(phi_name)
    terms = []
    for j in range(1, data.length + 1):
        big_a, big_m = data.even_at(j), data.odd_at(j)
        if big_a.is_zero() and big_m.is_zero():
            continue
        for m in range(-1, j + 1):
            ratio = mpq(j - m, j + 1)
            base = root ** (2 * j) * a_inv ** (2 * j) * x ** (j - m) * binomial(j + 1, m + 1)
            l_coeff = base * (big_a + root_inv * a * x_inv * phi * big_m * (2 * ratio))
            g_coeff = base * x_inv * (root_inv * a * big_m * ratio
                                      + phi * big_a * mpq(j - m, 2))
            if not l_coeff.is_zero():
                terms.append((-l_coeff, L(m)))
            if not g_coeff.is_zero():
                terms.append((-g_coeff, G(m + half)))
    return terms


def theta2_lhs_terms(data: CoordinateData, max_mode: int, t_name: str = SQRT_T,
                     x_name: str = "x", phi_name: str = "phi") -> list:
    """The left side exponent of the second identity, for modes of index up to ``max_mode``.

    The binomial with negative top does not terminate, so the sum is cut
    where the modes annihilate every vector under consideration.
    """
    table = data.table
    root = table.gen(t_name)
    x = table.gen(x_name)
    x_inv = x.invert()
    phi = table.gen(phi_name)
    terms = []
    for j in range(1, data.length + 1):
        big_b = data.even_at(j) * root ** (2 * j)
        big_n = data.odd_at(j) * root ** (2 * j - 1)
        if big_b.is_zero() and big_n.is_zero():
            continue
        for m in range(-1, max_mode + 1):
            coeff = binomial(1 - j, m + 1)
            if coeff == 0:
                continue
            base = x ** (-j - m) * coeff
            l_coeff = base * (big_b + phi * big_n * 2)
            g_coeff = base * (big_n + phi * x_inv * big_b * mpq(-j - m, 2))
            if not l_coeff.is_zero():
                terms.append((l_coeff, L(m)))
            if not g_coeff.is_zero():
                terms.append((g_coeff, G(m + half)))
    return terms


def _first_factor(kind: str, data: CoordinateData, center, corrected: bool, t_name: str,
                  x_name: str, phi_name: str) -> list:
    table = data.table
    x = table.gen(x_name)
    phi = table.gen(phi_name)
    cx, cphi = center
    if kind == "first":
        scale = table.gen(t_name).invert() * data.a_sqrt
        if corrected:
            even = scale * scale * cx - x - scale * cphi * phi
            odd = scale * cphi - phi
        else:
            scale_inv = scale.invert()
            even = cx - scale_inv * scale_inv * x
            odd = cphi - scale_inv * phi
    else:
        even = cx - x - cphi * phi if corrected else cx - x
        odd = cphi - phi
    return [(even, L(-1)), (odd, G(-half))]


def verify_theta_identity(kind: str, data: CoordinateData, module=None, weight=mpq(7, 2),
                          corrected: bool = True, t_name: str = SQRT_T, x_name: str = "x",
                          phi_name: str = "phi") -> dict:
    """Compare both sides of a Theta identity on every basis vector up to ``weight``.

    ``module`` defaults to the Verma module with central charge ``c`` and
    lowest weight ``h`` over the data's table.  The comparison is exact: all
    parameters are nilpotent, so every operator exponential terminates.
    """
    table = data.table
    if module is None:
        module = VermaModule(table)
    weight = mpq(weight)
    reach = weight + table.nilpotency_bound() + 1
    cutoff = int(reach) + 1
    if kind == "first":
        family = theta1(data, cutoff, t_name, x_name, phi_name)
        center = theta1_center(data, t_name, x_name, phi_name)
        lhs_terms = theta1_lhs_terms(data, t_name, x_name, phi_name)
    elif kind == "second":
        family = theta2(data, cutoff, t_name, x_name, phi_name)
        center = theta2_center(data, t_name, x_name, phi_name)
        lhs_terms = theta2_lhs_terms(data, cutoff, t_name, x_name, phi_name)
    else:
        raise ValueError("kind must be 'first' or 'second'")
    first = _first_factor(kind, data, center, corrected, t_name, x_name, phi_name)
    middle = family.mode_terms(-1)
    checked = 0
    failure = None
    for b in module.basis_upto(weight):
        vec = module.basis_vector(b)
        lhs = exp_modes(lhs_terms, vec)
        rhs = exp_modes(first, exp_modes(middle, power_l0(family.exp_theta0, vec, -2)))
        checked += 1
        if lhs != rhs:
            failure = {"vector": module.basis_name(b), "difference": repr(lhs.first_difference(rhs))}
            break
    name = f"theta-identity-{kind}" + ("" if corrected else "-uncorrected")
    return {"identity": name, "status": "pass" if failure is None else "fail",
            "checked": checked, "first_failure": failure}
