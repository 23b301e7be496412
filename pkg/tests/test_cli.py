import json
from pathlib import Path

import pytest

from rgk import acceptance
from rgk.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", DATA / "wheel.json")
    assert code == 0 and "valid" in out


@pytest.mark.parametrize("name, needle", [("loop", "loop"), ("degree5", "degree at most 4"),
                                          ("broken", "line 3, column 1")])
def test_validate_invalid(capsys, name, needle):
    code, out, err = run(capsys, "validate", DATA / f"{name}.json")
    assert code == 1 and needle in out + err


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "validate", tmp_path / "nope.json")
    assert code == 3


def test_invariants_torus(capsys):
    code, out, _ = run(capsys, "invariants", DATA / "torus.json", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["genus"] == 1 and data["base_shape"] == "cycle" and data["indices"] == [1, 1]


def test_invariants_circle(capsys):
    code, out, _ = run(capsys, "invariants", DATA / "circle.json", "--json")
    data = json.loads(out)
    assert (data["boundary_components"], data["genus"], data["dualizable"]) == (2, 0, False)


def test_invariants_twisted_theta(capsys):
    _, out, _ = run(capsys, "invariants", DATA / "theta_twisted.json", "--json")
    assert json.loads(out)["genus"] == 1


def test_dualizable(capsys):
    code, out, _ = run(capsys, "dualizable", DATA / "wheel.json", "--json")
    assert code == 0 and json.loads(out)["indices"] == [1, 2]
    code, out, _ = run(capsys, "indices", DATA / "curtain_rod.json", "--json")
    assert json.loads(out)["indices"] == [1, 1, 1]
    code, out, _ = run(capsys, "dualizable", DATA / "circle.json")
    assert code == 2 and "degree 0" in out


def test_export_dot(capsys, tmp_path):
    code, out, _ = run(capsys, "export-dot", DATA / "wheel.json")
    assert code == 0 and out.startswith("graph rgk {")
    dest = tmp_path / "w.dot"
    code, _, _ = run(capsys, "export-dot", DATA / "wheel.json", "-o", dest)
    assert code == 0 and dest.read_text() == out


def test_quiver(capsys):
    code, out, _ = run(capsys, "quiver", DATA / "bot_plus_top.json", "--json")
    data = json.loads(out)
    assert code == 0 and len(data["vertices"]) == 5 and len(data["arrows"]) == 4


def test_hom(capsys):
    code, out, _ = run(capsys, "hom", DATA / "rep_a3.json", DATA / "rep_a3_simple.json", "--json")
    assert code == 0 and json.loads(out) == {"hom": 0, "ext1": 1}


def test_reflect(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, _, _ = run(capsys, "reflect", DATA / "rep_a3.json", "--vertex", 0, "-o", dest)
    assert code == 0 and json.loads(dest.read_text())["dims"] == [0, 1, 1]
    code, _, _ = run(capsys, "reflect", DATA / "rep_a3.json", "--vertex", 7)
    assert code == 1


def test_cpm_hom(capsys):
    code, out, _ = run(capsys, "cpm-hom", DATA / "torus.json", "--json")
    data = json.loads(out)
    assert code == 0 and data["dims"] == [0, 1, 1] and data["euler"] == 0


def test_mirror_check(capsys):
    code, out, _ = run(capsys, "mirror-check", "--indices", "1,1", "--shape", "cycle")
    assert code == 0 and "PASS" in out
    code, _, _ = run(capsys, "mirror-check", "--indices", "1,x")
    assert code == 1


def test_hms_check(capsys):
    code, out, _ = run(capsys, "hms-check", "--graph", DATA / "curtain_rod.json", "--json")
    data = json.loads(out)
    assert code == 0 and data["cpm_hom"]["dims"] == data["perf_hom"]["dims"] == [0, 1, 0]
    code, _, _ = run(capsys, "hms-check", "--graph", DATA / "circle.json")
    assert code == 2


def test_sieve_check(capsys):
    code, out, _ = run(capsys, "sieve-check", DATA / "theta.json", "--json", "--samples", 3)
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["star_sieve_covers"]


def test_grade(capsys):
    code, out, _ = run(capsys, "grade", DATA / "torus.json", "--json")
    data = json.loads(out)
    assert code == 0 and all(u["valid"] for u in data["unwindings"].values())


def test_truncation_flag(capsys, monkeypatch):
    monkeypatch.delenv("RGK_TRUNCATION", raising=False)
    code, _, _ = run(capsys, "--truncation", 9, "validate", DATA / "wheel.json")
    import os
    assert code == 0 and os.environ["RGK_TRUNCATION"] == "9"


def test_verify_all_deterministic(capsys, monkeypatch, tmp_path):
    # the full run is covered by test_acceptance; here two cheap checks suffice
    monkeypatch.setattr(acceptance, "CHECKS", [acceptance.check_quiver_model, acceptance.check_nodal])
    r1, r2 = tmp_path / "a.json", tmp_path / "b.json"
    code, out1, _ = run(capsys, "verify-all", "--report", r1)
    assert code == 0 and out1.strip().endswith("2/2 criteria pass")
    code, out2, _ = run(capsys, "verify-all", "--report", r2)
    assert out1 == out2 and r1.read_text() == r2.read_text()
    code, out3, _ = run(capsys, "verify-all", "--timings")
    assert "s)" in out3


def test_verify_all_failure_exit(capsys, monkeypatch):
    bad = lambda cfg: acceptance.Outcome(1, "always fails", False, "forced", "none")
    monkeypatch.setattr(acceptance, "CHECKS", [bad])
    code, out, _ = run(capsys, "verify-all")
    assert code == 2 and "[FAIL]" in out and "0/1" in out
