import json
import shutil
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from wkac.catalog import FIXTURE_ENV, algebra_names
from wkac.cli import parse_pair, parse_rational, run, UsageError

DATA = Path(__file__).resolve().parents[1] / "src" / "wkac" / "data" / "catalog.json"


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    # setenv first so teardown also undoes anything `run` writes
    monkeypatch.setenv(FIXTURE_ENV, "")
    monkeypatch.delenv(FIXTURE_ENV)


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _json(capsys, *argv):
    code, out, _ = _run(capsys, *argv, "--json")
    assert code == 0
    return json.loads(out)


def _rat(d):
    return F(d["num"], d["den"])


def test_parse_helpers():
    assert parse_rational(" -3/4 ") == F(-3, 4)
    assert parse_pair("1,1/2") == (1, F(1, 2))
    for bad in ("x", "1/0", ""):
        with pytest.raises(UsageError):
            parse_rational(bad)
    with pytest.raises(UsageError):
        parse_pair("1,2,3")


def test_list(capsys):
    rows = _json(capsys, "list")
    assert [r["name"] for r in rows] == algebra_names()
    hv = {r["name"]: _rat(r["h_dual"]) for r in rows}
    assert hv["osp(1|2)"] == F(3, 2) and hv["sl(2|1)"] == 1
    code, out, _ = _run(capsys, "list")
    assert code == 0 and "psl(2|2)" in out


def test_show(capsys):
    data = _json(capsys, "show", "sl(2|1)")
    assert data["name"] == "sl(2|1)"
    assert data["central_charge_computed"] == "-6*k - 3"
    code, out, _ = _run(capsys, "show", "osp(1|2)")
    assert code == 0 and "theta/2" in out


def test_weights(capsys):
    data = _json(capsys, "weights", "sl(2|1)", "--lambda", "1,1/2", "--k", "2")
    assert _rat(data["q"]) == F(-1, 2)
    assert data["h_num"] == "-7" and data["h_den"] == "16"
    data = _json(capsys, "weights", "osp(1|2)", "--lambda", "0,0")
    assert data["h_num"] == "0"


def test_partitions(capsys):
    rows = _json(capsys, "partitions", "osp(1|2)", "--max-level", "2")
    assert [r["count"] for r in rows] == [1, 1, 1, 2, 3]
    assert [_rat(r["level"]) for r in rows] == [F(j, 2) for j in range(5)]
    rows = _json(capsys, "partitions", "sl(2|1)", "--max-level", "1", "--charge", "0")
    assert {_rat(r["level"]): r["count"] for r in rows}[F(1)] == 3
    code, out, _ = _run(capsys, "partitions", "osp(1|2)", "--sector", "ramond", "--gf", "--max-level", "1")
    assert code == 0 and out.startswith("(1 - x^(0) y^(1))^-1")


def test_det(capsys):
    data = _json(capsys, "det", "osp(1|2)", "--eta", "0,3/2")
    assert data["h_degree"] == 3
    assert [f["exponent"] for f in data["factors"]] == [1, 1, 1]
    assert "h" in [f["text"] for f in data["factors"]]
    assert data["prefactor"] == {"base": "k + 3/2", "exponent": 0}
    data = _json(capsys, "det", "sl(2|1)", "--sector", "ramond", "--eta", "1,0", "--k", "1/2")
    (f,) = data["factors"]
    assert f["text"] == "h + 1/4"
    assert f["numerator"] == [{"coef": {"num": 1, "den": 1}, "monomial": {}},
                              {"coef": {"num": 4, "den": 1}, "monomial": {"h": 1}}]
    assert f["denominator"] == [{"coef": {"num": 4, "den": 1}, "monomial": {}}]


def test_det_general_sector(capsys):
    a = _json(capsys, "det", "sl(2|1)", "--sector", "ns", "--eta", "1,1/2")
    b = _json(capsys, "det", "sl(2|1)", "--sector", "general:eps=0", "--eta", "1,1/2")
    assert [f["text"] for f in a["factors"]] == [f["text"] for f in b["factors"]]


def test_oracle(capsys):
    data = _json(capsys, "oracle", "N1", "--max-level", "1", "--compare")
    assert [s["dim"] for s in data["spaces"]] == [1, 1, 1]
    assert all(s["match"] for s in data["spaces"])
    assert data["spaces"][1]["det"] == "2*h"
    code, out, _ = _run(capsys, "oracle", "N2", "--sector", "r", "--max-level", "0", "--compare")
    assert code == 0 and "[PASS]" in out and "[FAIL]" not in out


def test_verify_single_criterion(capsys):
    code, out, _ = _run(capsys, "verify", "--criterion", "1", "--criterion", "2")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("[PASS] criterion 1")
    assert lines[1].startswith("[PASS] criterion 2")
    assert lines[-1] == "all 2 criteria passed"


@pytest.mark.parametrize("argv", [
    ["det", "osp(1|2)", "--eta", "1/0,1"],
    ["det", "osp(1|2)", "--eta", "1"],
    ["show", "bogus"],
    ["partitions", "osp(1|2)", "--sector", "twisted"],
    ["oracle", "N1", "--sector", "general"],
    ["verify", "--criterion", "9"],
])
def test_usage_errors(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == 2
    assert "wkac: error:" in err and out == ""


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["det", "osp(1|2)"])
    assert exc.value.code == 2


def test_fixture_override(capsys, tmp_path):
    raw = json.loads(DATA.read_text())
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps(raw))
    data = _json(capsys, "list", "--fixtures", str(path))
    assert len(data) == len(algebra_names())
    code, _, err = _run(capsys, "list", "--fixtures", str(tmp_path / "missing.json"))
    assert code == 2 and "missing.json" in err


def test_output_is_deterministic():
    exe = shutil.which("wkac")
    cmd = [exe] if exe else [sys.executable, "-m", "wkac.cli"]
    argv = cmd + ["det", "G_2", "--sector", "ramond", "--eta", "0,1", "--json"]
    a = subprocess.run(argv, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, text=True, check=True).stdout
    assert a == b and json.loads(a)["algebra"] == "G_2"


@pytest.mark.parametrize("argv", [["show", "psl(2|2)"], ["det", "osp(3|2)", "--sector", "ramond", "--eta", "0,1"],
                                  ["partitions", "G_2", "--max-level", "1"]])
def test_json_round_trip(capsys, argv):
    code, out, _ = _run(capsys, *argv, "--json")
    assert code == 0
    assert json.dumps(json.loads(out), indent=2, sort_keys=True) + "\n" == out
