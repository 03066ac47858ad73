import json

import pytest
from click.testing import CliRunner

from superconf.cli import SUITES, main

SCALING = {"generators": [["a", "even"]], "laurent": ["a"], "kind": "zero", "a_sqrt": "a"}
TRIVIAL = {"kind": "zero", "a_sqrt": 1, "even": [0], "odd": [0]}
FAST = ["--cap", "1/2", "--window", "-2,2"]


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def lines(result):
    return [json.loads(line) for line in result.stdout.splitlines() if line.strip()]


def test_expand_identity():
    result = run("expand", json.dumps(TRIVIAL), "--order", 3)
    assert result.exit_code == 0
    out = lines(result)[0]
    assert out["kind"] == "zero" and out["order"] == 3
    assert "map" in out


def test_expand_scaling_then_invert_roundtrip():
    first = run("expand", json.dumps(SCALING), "--order", 4)
    assert first.exit_code == 0
    inverted = run("invert", first.stdout.strip())
    assert inverted.exit_code == 0
    data = lines(inverted)[0]
    again = run("expand", json.dumps(data), "--order", 4)
    assert again.stdout == first.stdout


def test_expand_roundtrip_with_parameters(tmp_path):
    spec = {"generators": [["A1", "even"], ["M1", "odd"]], "caps": {"A1": 3},
            "kind": "zero", "a_sqrt": "2", "even": ["A1"], "odd": ["M1"]}
    first = run("expand", json.dumps(spec), "--order", 5)
    path = tmp_path / "map.json"
    path.write_text(first.stdout)
    back = run("invert", f"@{path}")
    assert back.exit_code == 0
    assert run("expand", json.dumps(lines(back)[0]), "--order", 5).stdout == first.stdout


def test_parse_and_domain_errors():
    assert run("expand", "{not json").exit_code == 2
    assert run("expand", json.dumps(dict(TRIVIAL, even=["nosuch"]))).exit_code == 2
    assert run("expand", json.dumps(dict(TRIVIAL, a_sqrt=0))).exit_code == 3
    assert run("verify", "--suite", "nonsense").exit_code == 2
    assert run("verify").exit_code == 2


def test_theta_command_on_trivial_data():
    result = run("theta", json.dumps(TRIVIAL), "--t-one")
    assert result.exit_code == 0
    out = lines(result)[0]
    assert out["kind"] == "first"


def test_list_names_every_suite():
    result = run("verify", "--list")
    assert result.exit_code == 0
    for name in SUITES:
        assert name in result.stdout


def test_ns_derivations_suite():
    result = run("verify", "--suite", "ns-derivations", "--range", 4)
    assert result.exit_code == 0
    assert lines(result)[0]["status"] == "pass"
    assert "0 failed" in result.stderr


def test_theta1_with_trivial_data_reports_trivial_family(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"data": TRIVIAL, "truncation": {"t_order": 2}}))
    result = run("verify", "--suite", "theta1", "--config", config)
    assert result.exit_code == 0
    family = lines(result)[0]
    assert family["trivial"] is True


def test_broken_change_zero_fails_with_first_failure():
    result = run("verify", "--suite", "change-zero", "--broken")
    assert result.exit_code == 1
    report = lines(result)[0]
    assert report["status"] == "fail" and report["first_failure"]


@pytest.mark.parametrize("suite", ["delta", "change-zero", "bracket-zero", "bracket-infinity",
                                   "shifted", "theta2"])
def test_suites_pass(suite):
    result = run("verify", "--suite", suite, *FAST)
    assert result.exit_code == 0, result.stdout
    assert all(r["status"] == "pass" and r["suite"] == suite for r in lines(result))


def test_text_output_and_determinism():
    args = ("verify", "--suite", "delta", "--suite", "change-zero", "--seed", 7, *FAST)
    first, second = run(*args), run(*args)
    assert first.stdout == second.stdout
    text = run(*args, "--text")
    assert text.stdout.startswith("PASS")


def test_parallel_run_keeps_order(monkeypatch):
    monkeypatch.setenv("SUPERCONF_THREADS", "2")
    parallel = run("verify", "--suite", "delta", "--suite", "ns-derivations", "--range", 2)
    monkeypatch.setenv("SUPERCONF_THREADS", "1")
    serial = run("verify", "--suite", "delta", "--suite", "ns-derivations", "--range", 2)
    assert parallel.exit_code == 0
    assert parallel.stdout == serial.stdout
