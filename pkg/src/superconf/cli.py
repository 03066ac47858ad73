"""Command line front end.

Coordinate data is given as JSON that names its generators::

    {"generators": [["a", "even"], ["A1", "even"], ["M1", "odd"]],
     "caps": {"A1": 2}, "laurent": ["a"],
     "kind": "zero", "a_sqrt": "a", "even": ["A1"], "odd": ["M1"]}

A scalar may be a number, a rational string such as ``"1/2"``, a generator
name, or the full ``{"terms": [...]}`` form used in the output.  Reports are
written to stdout as JSON lines, and a one-line summary goes to stderr.
"""

from __future__ import annotations

import json
import os
import random
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import click
from gmpy2 import mpq

from .changevars import (Annulus, AnnulusDomainError, ChangeAtInfinity, ChangeAtZero,
                         annulus_scaling_degeneration, annulus_verify, build_iso_family,
                         shifted_change, verify_bracket_infinity, verify_bracket_zero,
                         verify_change_infinity, verify_change_zero, verify_iso_family,
                         verify_scaling_reduction)
from .coords import (CoordinateData, NotSuperconformalError, check_ns_relations_derivations,
                     ehat_expand, ehat_inverse, infinity_flow)
from .fockvosa import FockSpace, verify_vosa_axioms
from .nsmod import ExpansionError, VermaModule, check_ns_module
from .superring import NotInvertibleError, ParityError, RingError, SuperScalar, parse_coeff
from .superseries import (CompositionDomainError, CoordinateMap, SeriesError, TruncationError,
                          delta_identity_check)
from .theta import (SQRT_T, symbolic_data, theta1, theta2, theta_table,
                    verify_theta_identity)

SUITES = {
    "ns-derivations": "Neveu-Schwarz relations for the coordinate derivations L_n(x, phi), G_r(x, phi)",
    "ns-module": "Neveu-Schwarz relations on a Verma or Fock module with symbolic rank",
    "vosa-axioms": "Fock model superalgebra axioms with rank 3/2 (and the rank-1 rejection)",
    "theta1": "first Theta identity: exponential of the moved field equals the Theta factorization",
    "theta2": "second Theta identity, the analogue at infinity",
    "change-zero": "change of variables formula at zero, forward and rewritten, plus L(0) scaling",
    "change-infinity": "change of variables formula at infinity through dual pairings",
    "bracket-zero": "bracket formula at zero and its exponentiated corollary",
    "bracket-infinity": "bracket formula at infinity and its exponentiated corollary",
    "iso-family": "transported superalgebras: vacuum, creation, G(-1/2)-derivative, tau, transport",
    "shifted": "change formula for a coordinate centred at a symbolic point",
    "annulus": "change formula for a pair of coordinates at zero and infinity",
    "delta": "odd formal delta function identity",
}

EXIT_PASS, EXIT_FAIL, EXIT_PARSE, EXIT_DOMAIN = 0, 1, 2, 3
DOMAIN_ERRORS = (NotInvertibleError, CompositionDomainError, NotSuperconformalError,
                 AnnulusDomainError, TruncationError, ExpansionError, ParityError)
_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


class ParseError(ValueError):
    """The input JSON does not describe valid data."""


@dataclass
class RunConfig:
    """Settings shared by every suite; a config file overrides the defaults."""

    order: int = 3
    length: int = 1
    cap: float = 1.5
    window: tuple = (-4, 4)
    seed: int | None = None
    module: str = "fock"
    range: int = 4
    broken: bool = False
    data: dict | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.order <= 0 or self.length <= 0 or self.cap <= 0 or self.range <= 0:
            raise ParseError("all bounds must be positive")
        if self.window[0] > self.window[1]:
            raise ParseError("window must satisfy A <= B")
        if self.module not in ("verma", "fock"):
            raise ParseError("module must be 'verma' or 'fock'")


# ---------------------------------------------------------------------------
# parsing


def _load_json(text: str):
    """Parse a JSON argument; a leading ``@`` or an existing path reads a file."""
    if text.startswith("@"):
        text = text[1:]
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def table_from_json(spec: dict):
    try:
        entries = [tuple(e) for e in spec.get("generators", [])]
        return theta_table(entries, spec.get("caps"), spec.get("laurent", []))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad generator table: {exc}") from exc


def table_to_json(table) -> dict:
    base = {"x", "phi", SQRT_T}
    return {"generators": [list(e) for e in table.entries if e[0] not in base],
            "caps": dict(sorted(table.caps.items())),
            "laurent": sorted(n for n in table.laurent if n not in base)}


def scalar_from_json(table, value) -> SuperScalar:
    if isinstance(value, dict):
        try:
            return SuperScalar.from_json(table, value)
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"bad scalar {value!r}: {exc}") from exc
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return table.const(mpq(value))
    if isinstance(value, str):
        if _RATIONAL.match(value):
            return table.const(parse_coeff(value))
        if value in table:
            return table.gen(value)
    raise ParseError(f"cannot read scalar {value!r}")


def data_from_json(spec: dict) -> CoordinateData:
    if not isinstance(spec, dict) or spec.get("kind") not in ("zero", "infinity"):
        raise ParseError("coordinate data needs kind 'zero' or 'infinity'")
    table = table_from_json(spec)
    a = spec.get("a_sqrt", 1 if spec["kind"] == "zero" else None)
    even = [scalar_from_json(table, c) for c in spec.get("even", [])] or [table.zero()]
    odd = [scalar_from_json(table, c) for c in spec.get("odd", [])] or [table.zero()]
    if a is not None:
        scalar_from_json(table, a).invert()
    try:
        return CoordinateData(spec["kind"], None if a is None else scalar_from_json(table, a),
                              even, odd)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def data_to_json(data: CoordinateData) -> dict:
    return {**table_to_json(data.table), **data.to_json()}


def _window(text: str) -> tuple:
    try:
        lo, hi = (int(p) for p in text.split(","))
    except ValueError as exc:
        raise click.BadParameter("expected A,B") from exc
    return lo, hi


def _emit(obj) -> None:
    click.echo(json.dumps(obj, sort_keys=True, default=str))


# ---------------------------------------------------------------------------
# suites


def _vectors(space, weight, seed):
    basis = [space.basis_vector(b) for b in space.basis_upto(weight)]
    if seed is None:
        return basis
    rng = random.Random(seed)
    combos = []
    for _ in range(2):
        vec = basis[0].scale(mpq(rng.randint(-3, 3)))
        for b in basis[1:]:
            vec = vec + b.scale(mpq(rng.randint(-3, 3), rng.randint(1, 3)))
        combos.append(vec)
    return combos


def _data_or_symbolic(cfg: RunConfig, kind: str, scale: bool = False) -> CoordinateData:
    spec = cfg.data if cfg.data and cfg.data.get("kind") == kind else None
    if spec is not None:
        return data_from_json(spec)
    return symbolic_data(kind, cfg.length, cfg.order, scale=scale)


def _negative(report: dict, name: str) -> dict:
    """A check that must fail; it passes when the inner report fails."""
    ok = report["status"] == "fail"
    return {"identity": name, "status": "pass" if ok else "fail", "checked": report["checked"],
            "first_failure": None if ok else {"reason": "variant was not rejected"}}


def suite_ns_derivations(cfg):
    ok, checked, failure = check_ns_relations_derivations(cfg.range, 6)
    return [{"identity": "ns-derivations", "status": "pass" if ok else "fail",
             "checked": checked, "first_failure": failure}]


def suite_ns_module(cfg):
    table = theta_table([("c", "even"), ("h", "even")])
    module = VermaModule(table) if cfg.module == "verma" else FockSpace(table)
    weight = int(cfg.extra.get("module_weight", 4))
    ok, checked, failure = check_ns_module(module, weight, min(cfg.range, 3))
    return [{"identity": f"ns-module-{cfg.module}", "status": "pass" if ok else "fail",
             "checked": checked, "first_failure": failure}]


def suite_vosa_axioms(cfg):
    reports = verify_vosa_axioms(int(cfg.cap), cfg.window, mpq(3, 2))
    negative = verify_vosa_axioms(1, (-2, 2), mpq(1))
    failed = [r for r in negative if r["status"] == "fail"]
    reports.append({"identity": "vosa-rank-1-rejected", "status": "pass" if failed else "fail",
                    "checked": sum(r["checked"] for r in negative),
                    "first_failure": None if failed else {"reason": "rank 1 was accepted"}})
    return reports


def _theta_suite(cfg, kind):
    zero = kind == "first"
    data = _data_or_symbolic(cfg, "zero" if zero else "infinity", scale=zero)
    builder = theta1 if zero else theta2
    family = builder(data, max(cfg.length, 1))
    reports = [{"identity": f"theta-family-{kind}", "status": "pass", "checked": 1,
                "first_failure": None, "family": family.to_json(),
                "trivial": family.is_trivial()}]
    weight = mpq(cfg.extra.get("weight", "7/2"))
    reports.append(verify_theta_identity(kind, data, weight=weight))
    if any(not c.is_zero() for c in data.even + data.odd):
        reports.append(_negative(verify_theta_identity(kind, data, weight=weight, corrected=False),
                                 f"theta-identity-{kind}-uncorrected-rejected"))
    return reports


def suite_theta1(cfg):
    return _theta_suite(cfg, "first")


def suite_theta2(cfg):
    return _theta_suite(cfg, "second")


def suite_change_zero(cfg):
    data = _data_or_symbolic(cfg, "zero", scale=True)
    space = FockSpace(data.table)
    vecs = _vectors(space, cfg.cap, cfg.seed)
    change = ChangeAtZero(data, flip_theta=cfg.broken)
    reports = [verify_change_zero(change, space, vecs, vecs, cfg.window)]
    a = data.table.gen("a") if "a" in data.table else data.a_sqrt
    reports.append(verify_scaling_reduction(a, space, vecs, vecs, cfg.window))
    return reports


def suite_change_infinity(cfg):
    data = _data_or_symbolic(cfg, "infinity")
    space = FockSpace(data.table)
    vecs = _vectors(space, cfg.cap, cfg.seed)
    change = ChangeAtInfinity(data)
    dual_cap = cfg.extra.get("dual_cap", 4)
    return [verify_change_infinity(change, space, vecs, vecs, dual_cap, cfg.window),
            verify_bracket_infinity(data, space, vecs, vecs, cfg.window)]


def suite_bracket_zero(cfg):
    data = _data_or_symbolic(cfg, "zero", scale=True)
    space = FockSpace(data.table)
    vecs = _vectors(space, cfg.cap, cfg.seed)
    return [verify_bracket_zero(data, space, vecs, vecs, cfg.window)]


def suite_bracket_infinity(cfg):
    data = _data_or_symbolic(cfg, "infinity")
    space = FockSpace(data.table)
    vecs = _vectors(space, cfg.cap, cfg.seed)
    return [verify_bracket_infinity(data, space, vecs, vecs, cfg.window)]


def suite_iso_family(cfg):
    weight = min(cfg.cap, 1)
    window = (max(cfg.window[0], -3), min(cfg.window[1], 3))
    reports = []
    data = _data_or_symbolic(cfg, "zero", scale=True)
    reports += verify_iso_family(build_iso_family(ChangeAtZero(data)), weight, window)
    scaling = symbolic_data("zero", 1, 1, scale=True)
    a = scaling.table.gen("a")
    family = build_iso_family(ChangeAtZero(CoordinateData("zero", a, [], [])))
    reports += [dict(r, identity=r["identity"] + "-scaling")
                for r in verify_iso_family(family, weight, window,
                                           expected_tau=family.space.tau().scale(a.invert() ** 3))]
    change = ChangeAtInfinity(_data_or_symbolic(cfg, "infinity"))
    for kind in ("infinity", "inverse"):
        reports += verify_iso_family(build_iso_family(change, kind), weight, window)
    return reports


def suite_shifted(cfg):
    table = theta_table([("A1", "even"), ("z", "even"), ("a", "even"), ("M1", "odd"),
                         ("zeta", "odd")], {"A1": max(cfg.order // 2, 1), "z": 2}, ["a"])
    g = table.gen
    space = FockSpace(table)
    vecs = _vectors(space, min(cfg.cap, 1), cfg.seed)
    window = (max(cfg.window[0], -3), min(cfg.window[1], 3))
    change = ChangeAtZero(CoordinateData("zero", g("a"), [g("A1")], [g("M1")]))
    identity = ChangeAtZero(CoordinateData("zero", table.one(), [], []))
    center = (g("z"), g("zeta"))
    reports = [shifted_change(change, center, space, vecs, vecs, window)]
    reports.append(dict(shifted_change(identity, center, space, vecs, vecs, window),
                        identity="shifted-change-identity"))
    return reports


def annulus_table(order: int = 2):
    """Parameters for an annulus: ``a, A1, M1`` at zero and ``B1, N1`` at infinity."""
    return theta_table([("A1", "even"), ("B1", "even"), ("a", "even"), ("M1", "odd"),
                        ("N1", "odd")], {"A1": max(order // 2, 1), "B1": max(order // 2, 1)},
                       ["a"])


def suite_annulus(cfg):
    table = annulus_table(cfg.order)
    g = table.gen
    space = FockSpace(table)
    vecs = _vectors(space, min(cfg.cap, 1), cfg.seed)
    window = (max(cfg.window[0], -3), min(cfg.window[1], 3))
    f1 = ChangeAtZero(CoordinateData("zero", g("a"), [g("A1")], [g("M1")]))
    f2 = ChangeAtInfinity(CoordinateData("infinity", None, [g("B1")], [g("N1")]))
    reports = [annulus_verify(f1, f2, space, vecs, vecs, cfg.extra.get("dual_cap", 3), window)]
    family = Annulus(f1, f2).family()
    transport = verify_iso_family(family, mpq(1, 2), window)[0]
    reports.append(transport)
    reports.append(annulus_scaling_degeneration(g("a"), space, vecs, vecs, window))
    return reports


def suite_delta(cfg):
    bound = min(cfg.range, 4)
    ok, checked, failure = delta_identity_check(bound)
    flipped_ok, flipped_checked, _ = delta_identity_check(bound, flip_sign=True)
    return [{"identity": "delta-identity", "status": "pass" if ok else "fail",
             "checked": checked, "first_failure": failure},
            {"identity": "delta-identity-flipped-rejected",
             "status": "fail" if flipped_ok else "pass", "checked": flipped_checked,
             "first_failure": {"reason": "flipped sign accepted"} if flipped_ok else None}]


SUITE_RUNNERS = {
    "ns-derivations": suite_ns_derivations,
    "ns-module": suite_ns_module,
    "vosa-axioms": suite_vosa_axioms,
    "theta1": suite_theta1,
    "theta2": suite_theta2,
    "change-zero": suite_change_zero,
    "change-infinity": suite_change_infinity,
    "bracket-zero": suite_bracket_zero,
    "bracket-infinity": suite_bracket_infinity,
    "iso-family": suite_iso_family,
    "shifted": suite_shifted,
    "annulus": suite_annulus,
    "delta": suite_delta,
}


def run_suite(name: str, cfg: RunConfig) -> list[dict]:
    """Run one suite; domain errors become a report with status ``error``."""
    try:
        reports = SUITE_RUNNERS[name](cfg)
    except DOMAIN_ERRORS + (SeriesError, RingError) as exc:
        reports = [{"identity": name, "status": "error", "checked": 0,
                    "first_failure": {"error": type(exc).__name__, "message": str(exc)}}]
    return [dict(r, suite=name) for r in reports]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SUPERCONF_THREADS", "1")))
    except ValueError:
        return 1


def run_suites(names: list[str], cfg: RunConfig) -> list[dict]:
    """Run suites, in a process pool when ``SUPERCONF_THREADS`` allows, in a fixed order."""
    threads = min(_threads(), len(names))
    if threads <= 1:
        results = [run_suite(n, cfg) for n in names]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_suite, names, [cfg] * len(names)))
    return [r for group in results for r in group]


# ---------------------------------------------------------------------------
# commands


@click.group()
def main():
    """Formal superconformal changes of variables and their verification suites."""


@main.command()
@click.argument("data")
@click.option("--order", type=int, default=6, show_default=True,
              help="Highest power of x kept for maps at zero.")
def expand(data, order):
    """Expand coordinate DATA (JSON text or file) into a coordinate map."""
    try:
        cd = data_from_json(_load_json(data))
        if cd.kind == "zero":
            h = ehat_expand(cd, order)
        else:
            h = infinity_flow(cd, -1)
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    except DOMAIN_ERRORS + (SeriesError, RingError) as exc:
        click.echo(f"domain error: {exc}", err=True)
        sys.exit(EXIT_DOMAIN)
    _emit({**table_to_json(cd.table), "kind": cd.kind, "order": order, "map": h.to_json()})


@main.command()
@click.argument("mapping")
def invert(mapping):
    """Recover data at zero from a MAPPING produced by ``expand``."""
    try:
        spec = _load_json(mapping)
        if spec.get("kind") != "zero":
            raise ParseError("only maps at zero can be inverted")
        table = table_from_json(spec)
        h = CoordinateMap.from_json(table, spec["map"])
        order = int(spec["order"])
        data = ehat_inverse(h, order)
    except (ParseError, KeyError, TypeError, ValueError) as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    except DOMAIN_ERRORS + (SeriesError, RingError) as exc:
        click.echo(f"domain error: {exc}", err=True)
        sys.exit(EXIT_DOMAIN)
    _emit(data_to_json(data))


@main.command()
@click.argument("data")
@click.option("--cutoff", type=int, default=2, show_default=True)
@click.option("--t-one", is_flag=True, help="Specialise the square root of t to 1.")
def theta(data, cutoff, t_one):
    """Print the Theta family of coordinate DATA."""
    try:
        cd = data_from_json(_load_json(data))
        fam = theta1(cd, cutoff) if cd.kind == "zero" else theta2(cd, cutoff)
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    except DOMAIN_ERRORS + (SeriesError, RingError) as exc:
        click.echo(f"domain error: {exc}", err=True)
        sys.exit(EXIT_DOMAIN)
    if t_one:
        fam = fam.specialize({SQRT_T: 1})
    _emit(fam.to_json())


@main.command()
@click.option("--suite", "suites", multiple=True, help="Suite name, repeatable, or 'all'.")
@click.option("--list", "list_suites", is_flag=True, help="List the suites and exit.")
@click.option("--config", type=click.Path(exists=True, dir_okay=False))
@click.option("--order", type=int, help="Total order in the square root of t.")
@click.option("--length", type=int, help="Number of parameter pairs.")
@click.option("--cap", type=str, help="Weight cap for test vectors (may be a fraction).")
@click.option("--window", type=str, help="Exponent window A,B.")
@click.option("--seed", type=int, help="Use random combinations of basis vectors.")
@click.option("--module", type=click.Choice(["verma", "fock"]))
@click.option("--range", "range_", type=int, help="Index bound for relation suites.")
@click.option("--broken", is_flag=True, help="Negate Theta to confirm the check rejects it.")
@click.option("--json/--text", "as_json", default=True)
def verify(suites, list_suites, config, order, length, cap, window, seed, module, range_,
           broken, as_json):
    """Run verification suites and report one line per check."""
    if list_suites:
        for name, text in SUITES.items():
            click.echo(f"{name:18} {text}")
        return
    try:
        settings = {}
        if config:
            with open(config, encoding="utf-8") as fh:
                settings = json.load(fh)
            if not isinstance(settings, dict):
                raise ParseError("config must be a JSON object")
        cfg = _config(settings, order=order, length=length, cap=cap, window=window,
                      seed=seed, module=module, range=range_, broken=broken or None)
        names = list(suites) or list(settings.get("suites", []))
        if not names:
            raise ParseError("no suite given; use --suite or --list")
        if "all" in names:
            names = list(SUITES)
        unknown = [n for n in names if n not in SUITES]
        if unknown:
            raise ParseError(f"unknown suite(s): {', '.join(unknown)}")
        if cfg.data is not None:
            data_from_json(cfg.data)
    except (ParseError, json.JSONDecodeError, click.BadParameter) as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    reports = run_suites(names, cfg)
    for r in reports:
        if as_json:
            _emit(r)
        else:
            detail = "" if r["first_failure"] is None else f"  {r['first_failure']}"
            click.echo(f"{r['status'].upper():5} {r['identity']} ({r['checked']} checks){detail}")
    failed = sum(r["status"] == "fail" for r in reports)
    errors = sum(r["status"] == "error" for r in reports)
    click.echo(f"{len(reports)} checks, {failed} failed, {errors} errors", err=True)
    if errors:
        sys.exit(EXIT_DOMAIN)
    sys.exit(EXIT_FAIL if failed else EXIT_PASS)


def _config(settings: dict, **flags) -> RunConfig:
    truncation = settings.get("truncation", {})
    values = {
        "order": truncation.get("t_order", settings.get("order")),
        "length": settings.get("length"),
        "cap": truncation.get("weight_cap", settings.get("cap")),
        "window": truncation.get("x_window", settings.get("window")),
        "seed": settings.get("seed"),
        "module": settings.get("module"),
        "range": settings.get("range"),
        "data": settings.get("data"),
    }
    for key, value in flags.items():
        if value is not None:
            values[key] = value
    if isinstance(values["window"], str):
        values["window"] = _window(values["window"])
    if values["window"] is not None:
        values["window"] = tuple(int(v) for v in values["window"])
    if values["cap"] is not None:
        values["cap"] = mpq(str(values["cap"]))
    known = {k: v for k, v in values.items() if v is not None}
    extra = {k: v for k, v in settings.items()
             if k not in ("truncation", "suites") and k not in values}
    try:
        return replace(RunConfig(), **known, extra=extra)
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc


if __name__ == "__main__":
    main()
