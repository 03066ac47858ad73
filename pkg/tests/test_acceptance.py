"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line, which is also
collected into the terminal summary.  All comparisons are exact.
"""

import random
import time

from conftest import ACCEPTANCE_LINES
from gmpy2 import mpq

from superconf.changevars import (ChangeAtInfinity, ChangeAtZero, annulus_scaling_degeneration,
                                  annulus_verify, build_iso_family, shifted_change,
                                  verify_bracket_infinity, verify_change_infinity,
                                  verify_change_zero, verify_iso_family, verify_scaling_reduction)
from superconf.cli import annulus_table
from superconf.coords import (CoordinateData, check_ns_relations_derivations, ehat_expand,
                              ehat_inverse)
from superconf.fockvosa import FockSpace, verify_vosa_axioms
from superconf.nsmod import VermaModule, check_ns_module
from superconf.superring import GeneratorTable
from superconf.superseries import delta_identity_check, is_superconformal
from superconf.theta import symbolic_data, theta_table, verify_theta_identity

half = mpq(1, 2)


def record(number, title, checks, started, budget):
    """Print and collect one line; ``checks`` maps a label to a pass flag."""
    elapsed = time.perf_counter() - started
    failed = [label for label, ok in checks.items() if not ok]
    if elapsed > budget:
        failed.append(f"took {elapsed:.1f}s, budget {budget}s")
    status = "FAIL" if failed else "PASS"
    line = f"criterion {number}: {status}  {title} ({elapsed:.1f}s)"
    if failed:
        line += "  failing: " + "; ".join(failed)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert not failed, line


def passed(report):
    return report["status"] == "pass"


def fock_basis(space, weight):
    return [space.basis_vector(b) for b in space.basis_upto(weight)]


def test_criterion_01_ns_relations_for_derivations():
    start = time.perf_counter()
    ok, checked, failure = check_ns_relations_derivations(4, 6)
    record(1, f"derivation relations, |m|,|n| <= 4, |k| <= 6, {checked} checks",
           {"relations": ok and checked > 0}, start, 10)


def test_criterion_02_ns_relations_on_verma():
    start = time.perf_counter()
    table = GeneratorTable([("c", "even"), ("h", "even")])
    ok, checked, failure = check_ns_module(VermaModule(table), 4, 3)
    record(2, f"Verma relations to weight h+4, |indices| <= 3, {checked} checks",
           {"relations": ok and checked > 0}, start, 30)


def _random_grassmann_data(rng, table, odd_gens):
    def q():
        return mpq(rng.randint(-4, 4), rng.randint(1, 4))

    def even(body):
        value = table.const(q()) if body else table.zero()
        for i, first in enumerate(odd_gens):
            for second in odd_gens[i + 1:]:
                if rng.random() < 0.4:
                    value = value + first * second * q()
        return value

    def odd():
        value = table.zero()
        for gen in odd_gens:
            if rng.random() < 0.6:
                value = value + gen * q()
        if len(odd_gens) >= 3 and rng.random() < 0.4:
            value = value + odd_gens[0] * odd_gens[1] * odd_gens[2] * q()
        return value

    length = rng.randint(1, 3)
    scale = table.const(mpq(rng.choice([1, -1]) * rng.randint(1, 3), rng.randint(1, 3)))
    return CoordinateData("zero", scale + even(False), [even(True) for _ in range(length)],
                          [odd() for _ in range(length)])


def test_criterion_03_ehat_bijection():
    start = time.perf_counter()
    rng = random.Random(2024)
    order = 8
    roundtrips, conformal = True, True
    for _ in range(50):
        count = rng.randint(1, 4)
        table = GeneratorTable([(f"z{i}", "odd") for i in range(1, count + 1)])
        gens = [table.gen(f"z{i}") for i in range(1, count + 1)]
        data = _random_grassmann_data(rng, table, gens)
        h = ehat_expand(data, order)
        conformal = conformal and is_superconformal(h, order)[0]
        back = ehat_inverse(h, order)
        even = (list(data.even) + [table.zero()] * order)[:order - 1]
        odd = (list(data.odd) + [table.zero()] * order)[:order]
        roundtrips = roundtrips and back.a_sqrt == data.a_sqrt and back.even == even \
            and back.odd == odd
    record(3, "50 randomized roundtrips at order 8",
           {"roundtrip": roundtrips, "superconformal": conformal}, start, 60)


def test_criterion_04_delta_identity():
    start = time.perf_counter()
    ok, checked, _ = delta_identity_check(4)
    flipped, _, _ = delta_identity_check(4, flip_sign=True)
    record(4, f"odd delta identity on window 4, {checked} coefficients",
           {"identity": ok, "sign flip rejected": not flipped}, start, 5)


def test_criterion_05_fock_axioms():
    start = time.perf_counter()
    reports = verify_vosa_axioms(3, (-6, 6), mpq(3, 2))
    negative = verify_vosa_axioms(1, (-2, 2), mpq(1))
    checks = {r["identity"]: passed(r) for r in reports}
    checks["rank 1 rejected"] = any(r["status"] == "fail" for r in negative)
    record(5, "Fock axioms at cap 3, window [-6,6], rank 3/2", checks, start, 120)


def test_criterion_06_theta_identities():
    start = time.perf_counter()
    first = symbolic_data("zero", 1, 3, scale=True)
    second = symbolic_data("infinity", 1, 3)
    weight = mpq(7, 2)
    checks = {
        "first": passed(verify_theta_identity("first", first, weight=weight)),
        "second": passed(verify_theta_identity("second", second, weight=weight)),
        "first uncorrected rejected":
            verify_theta_identity("first", first, weight=weight, corrected=False)["status"]
            == "fail",
        "second uncorrected rejected":
            verify_theta_identity("second", second, weight=weight, corrected=False)["status"]
            == "fail",
    }
    record(6, "Theta identities to weight 7/2, t-order 3", checks, start, 180)


def test_criterion_07_change_at_zero():
    start = time.perf_counter()
    data = symbolic_data("zero", 1, 3, scale=True)
    space = FockSpace(data.table)
    vecs = fock_basis(space, mpq(3, 2))
    change = verify_change_zero(ChangeAtZero(data), space, vecs, vecs, (-4, 4))
    scaling = verify_scaling_reduction(data.table.gen("a"), space, vecs, vecs, (-4, 4))
    record(7, f"change formula at zero, {len(vecs)} vectors, window [-4,4]",
           {"forward and rewritten": passed(change), "scaling": passed(scaling)}, start, 180)


def test_criterion_08_change_at_infinity():
    start = time.perf_counter()
    data = symbolic_data("infinity", 1, 3)
    space = FockSpace(data.table)
    vecs = fock_basis(space, mpq(3, 2))
    change = verify_change_infinity(ChangeAtInfinity(data), space, vecs, vecs, 4, (-4, 4))
    bracket = verify_bracket_infinity(data, space, vecs, vecs, (-4, 4))
    record(8, f"change formula at infinity, {len(vecs)} vectors, cap 4, window [-4,4]",
           {"pairings": passed(change), "bracket and corollary": passed(bracket)}, start, 180)


def test_criterion_09_isomorphic_families():
    start = time.perf_counter()
    checks = {}
    data = symbolic_data("zero", 1, 3, scale=True)
    for r in verify_iso_family(build_iso_family(ChangeAtZero(data)), 1, (-3, 3)):
        checks[f"zero {r['identity']}"] = passed(r)
    a = data.table.gen("a")
    scaling = build_iso_family(ChangeAtZero(CoordinateData("zero", a, [], [])))
    expected = scaling.space.tau().scale(a.invert() ** 3)
    for r in verify_iso_family(scaling, 1, (-3, 3), expected_tau=expected):
        checks[f"scaling {r['identity']}"] = passed(r)
    at_infinity = ChangeAtInfinity(symbolic_data("infinity", 1, 3))
    for kind in ("infinity", "inverse"):
        for r in verify_iso_family(build_iso_family(at_infinity, kind), 1, (-3, 3)):
            checks[f"{kind} {r['identity']}"] = passed(r)
    record(9, "transported vacuum, creation, derivative, tau and transport", checks, start, 60)


def test_criterion_10_shift_and_annulus():
    start = time.perf_counter()
    table = theta_table([("A1", "even"), ("z", "even"), ("a", "even"), ("M1", "odd"),
                         ("zeta", "odd")], {"A1": 1, "z": 2}, ["a"])
    g = table.gen
    space = FockSpace(table)
    vecs = fock_basis(space, 1)
    center = (g("z"), g("zeta"))
    change = ChangeAtZero(CoordinateData("zero", g("a"), [g("A1")], [g("M1")]))
    identity = ChangeAtZero(CoordinateData("zero", table.one(), [], []))
    checks = {
        "shifted": passed(shifted_change(change, center, space, vecs, vecs, (-4, 4))),
        "shifted identity": passed(shifted_change(identity, center, space, vecs, vecs, (-4, 4))),
    }
    table = annulus_table(3)
    g = table.gen
    space = FockSpace(table)
    vecs = fock_basis(space, 1)
    f1 = ChangeAtZero(CoordinateData("zero", g("a"), [g("A1")], [g("M1")]))
    f2 = ChangeAtInfinity(CoordinateData("infinity", None, [g("B1")], [g("N1")]))
    checks["annulus"] = passed(annulus_verify(f1, f2, space, vecs, vecs, 3, (-4, 4)))
    checks["scaling degeneration"] = passed(
        annulus_scaling_degeneration(g("a"), space, vecs, vecs, (-4, 4)))
    record(10, "shifted change and annulus at cap 3", checks, start, 180)
