import io
import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riemext import suites
from riemext.cli import run
from riemext.report import Check, Report

MANIFOLDS = Path(__file__).resolve().parent.parent / "manifolds"
HYP = str(MANIFOLDS / "hyperbolic.man")
FLAT = str(MANIFOLDS / "flat.man")


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_curvature_paper_ricci():
    code, out, _ = call("curvature", HYP, "--tensor", "ricci", "--convention", "paper", "--format", "json")
    assert code == 0
    assert json.loads(out)["components"] == {"[1,1]": "1/y^2", "[2,2]": "1/y^2"}


def test_curvature_text_and_latex():
    code, out, _ = call("curvature", HYP, "--tensor", "christoffel")
    assert code == 0 and "[1,1,2] = -1/y" in out
    code, out, _ = call("curvature", HYP, "--tensor", "scalar", "--format", "latex")
    assert code == 0 and out.strip() == "-2"


def test_verify_extension_identities():
    code, out, _ = call("verify", HYP, "--suite", "extension-identities")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == 1 and doc["ok"] is True
    statuses = {c["name"]: c["status"] for c in doc["checks"]}
    assert statuses["ricci-starred"] == "pass"
    assert statuses["printed-extension-metric"] == "discrepancy"


def test_verify_flat_all():
    code, out, _ = call("verify", FLAT, "--suite", "all")
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_extend_output_is_a_manifold_file(tmp_path):
    dest = tmp_path / "ext.man"
    code, _, _ = call("extend", HYP, "--out", str(dest))
    assert code == 0
    code, out, _ = call("curvature", str(dest), "--tensor", "ricci", "--convention", "paper")
    assert code == 0
    assert out.splitlines() == ["[1,1] = 2/y^2", "[2,2] = 2/y^2"]


def test_extend_with_c_file_and_omega():
    code, out, _ = call("extend", HYP, "--c", str(MANIFOLDS / "hyperbolic_c.man"), "--omega", "a,b")
    assert code == 0
    assert "coords x y a b" in out and "g[1,1] = (-2*b + x)/y" in out


def test_flow_extension_family():
    code, out, _ = call("flow", HYP, "--family", "extension")
    doc = json.loads(out)
    assert code == 0
    assert doc["family"]["components"]["[1,1]"] == "(-2*Q*y - 4*t)/y^2"
    assert any(c["name"] == "printed-linear-coefficient" and c["status"] == "discrepancy" for c in doc["checks"])


def test_flow_constant_curvature_paper_mode_fails():
    # the e^{−2t} family is not a solution; the command must say so through its exit status
    code, out, _ = call("flow", HYP, "--family", "constant-curvature")
    assert code == 1
    doc = json.loads(out)
    assert doc["ok"] is False


def test_flow_constant_curvature_standard_mode():
    code, out, _ = call("flow", str(MANIFOLDS / "sphere3.man"), "--family", "constant-curvature",
                        "--convention", "standard", "--format", "text")
    assert code == 1  # exponential family still fails; linear family passes
    assert "[       pass] linear-family-solution" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "missing.man", "--suite", "all"],
        ["verify", HYP, "--suite", "nope"],
        ["curvature", HYP],
        ["bogus"],
        [],
        ["curvature", str(MANIFOLDS / "flat_connection.man"), "--tensor", "weyl"],
        ["verify", HYP, "--suite", "all", "--trials", "0"],
        ["extend", HYP, "--omega", "x,Q"],
    ],
)
def test_usage_errors_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2
    assert out == "" and err


def test_parse_error_exit_2(tmp_path):
    f = tmp_path / "bad.man"
    f.write_text("coords x y\nmetric:\n  g[1,3] = 1\n")
    code, _, err = call("curvature", str(f), "--tensor", "ricci")
    assert code == 2 and "3:" in err and "out of range" in err


def test_output_is_deterministic():
    a = call("verify", str(MANIFOLDS / "sphere3.man"), "--suite", "all")
    b = call("verify", str(MANIFOLDS / "sphere3.man"), "--suite", "all")
    assert a == b


def test_seed_env_fallback(monkeypatch):
    monkeypatch.setenv("RIEMEXT_SEED", "7")
    assert call("verify", HYP, "--suite", "lemma-laplacian")[0] == 0
    monkeypatch.setenv("RIEMEXT_SEED", "seven")
    assert call("verify", HYP, "--suite", "lemma-laplacian")[0] == 2


STATUS_EXIT = {"pass": 0, "skipped": 0, "discrepancy": 0, "info": 0, "fail": 1, "unknown": 1}


@given(st.lists(st.sampled_from(sorted(STATUS_EXIT)), min_size=1, max_size=6),
       st.sampled_from(["json", "text"]))
@settings(max_examples=40, deadline=None)
def test_exit_code_contract(statuses, fmt):
    def fake(mf, cfg):
        rep = Report("fake", "paper")
        for i, s in enumerate(statuses):
            rep.add(Check(f"c{i}", "synthetic", s))
        return rep

    saved = dict(suites.SUITES)
    suites.SUITES["extension-identities"] = fake
    try:
        code, out, _ = call("verify", FLAT, "--suite", "extension-identities", "--format", fmt)
    finally:
        suites.SUITES.clear()
        suites.SUITES.update(saved)
    assert code == max(STATUS_EXIT[s] for s in statuses)
    if fmt == "json":
        assert json.loads(out)["ok"] is (code == 0)
