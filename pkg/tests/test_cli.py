import io
import json
from pathlib import Path

import pytest

from histloc.cli import main
from histloc.config import Config, read_config_file, resolve_config

ROOT = Path(__file__).resolve().parent.parent
FAMILIES = ROOT / "data" / "families"


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def test_scenario_exit_zero_and_schema():
    code, text = run(["scenario", "spin8"])
    assert code == 0
    d = json.loads(text)
    assert d["schema"] == "histloc/1" and d["passed"]


def test_scenario_all_is_deterministic():
    code1, a = run(["scenario", "all", "--format", "json"])
    code2, b = run(["scenario", "all", "--format", "json"])
    assert code1 == code2 == 0
    assert a == b
    d = json.loads(a)
    assert d["unchecked_claims"] == []
    names = [r["scenario"] for r in d["reports"]]
    assert names == sorted(names)


def test_usage_errors_exit_two(capsys):
    assert run(["frobnicate"])[0] == 2
    assert run(["scenario", "nope"])[0] == 2
    assert run(["scenario", "spin8", "--bogus-flag"])[0] == 2
    assert run(["locate", "--circuit", "teleportation", "--time", "t42"])[0] == 2
    assert run(["locate", "--circuit", "missing.json", "--time", "t1"])[0] == 2
    assert run(["check-family", "missing.json"])[0] == 2


def test_locate_teleportation_t5():
    code, text = run(["locate", "--circuit", "teleportation", "--time", "t5"])
    assert code == 0
    assert json.loads(text)["minimal"] == [["a", "b"], ["a", "c"]]
    code, text = run(["locate", "--circuit", "teleportation", "--time", "t5", "--format", "text"])
    assert "{a,b} {a,c}" in text


def test_locate_from_circuit_file(tmp_path):
    from histloc.circuit import teleportation_circuit

    path = tmp_path / "tele.json"
    path.write_text(teleportation_circuit().to_json())
    code, text = run(["locate", "--circuit", str(path), "--time", "t8", "--lambda-grid-size", "4"])
    assert code == 0 and json.loads(text)["minimal"] == [["c"]]


@pytest.mark.parametrize(
    "name,code",
    [("f2.json", 0), ("f3.json", 0), ("f2_with_b_at_t8.json", 1), ("f3_c_z_at_t7.json", 1)],
)
def test_check_family_files(name, code):
    got, text = run(["check-family", str(FAMILIES / name), "--format", "text"])
    assert got == code
    assert ("INCONSISTENT" in text) == (code == 1)


def test_claim_failure_exits_one(tmp_path, capsys):
    # a support cutoff of 0.9 throws away genuine eigenvalues, so location claims fail
    code, _ = run(["scenario", "teleportation-unitary", "--eps-support", "0.9", "--lambda-grid-size", "4"])
    assert code == 1
    assert "failing claims:" in capsys.readouterr().err


def test_config_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# settings\nseed = 5\nlambda_grid_size = 10\nformat = text\n")
    assert read_config_file(cfg_file) == {"seed": 5, "lambda_grid_size": 10, "format": "text"}
    assert resolve_config(cfg_file, env={}) == Config(seed=5, lambda_grid_size=10, format="text")
    assert resolve_config(cfg_file, {"seed": 9}, env={}).seed == 9
    assert resolve_config(cfg_file, {"seed": 9}, env={"HISTLOC_SEED": "11"}).seed == 11
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    with pytest.raises(ValueError):
        read_config_file(bad)
    with pytest.raises(ValueError):
        Config(eps_norm=0.0)


def test_env_seed_reaches_report(monkeypatch):
    monkeypatch.setenv("HISTLOC_SEED", "7")
    _, text = run(["locate", "--circuit", "teleportation", "--time", "t1", "--seed", "3", "--lambda-grid-size", "2"])
    assert json.loads(text)["grid_seed"] == 7
