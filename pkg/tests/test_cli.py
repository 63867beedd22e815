import json
import subprocess
import sys

import pytest

from qtetra import cli
from qtetra.exactnum import LaurentQ
from qtetra.report import VerifyReport


def test_r_element_prints_value(capsys):
    assert cli.run(["r-element", "--m", "0,1,0", "--n", "0,1,0"]) == 0
    assert capsys.readouterr().out.strip() == "-q"


def test_r_element_json(tmp_path):
    out = tmp_path / "e.json"
    assert cli.run(["r-element", "--m", "0,1,0", "--n", "1,0,1", "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert LaurentQ.from_json(doc["value"]) == LaurentQ({0: 1, 2: -1})


def test_tetrahedron_json_report(tmp_path):
    out = tmp_path / "t.json"
    assert cli.run(["verify", "tetrahedron", "--degree", "3", "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["checked"] == 84
    assert doc["degree"] == 3
    assert doc["mode"] == "constant"
    assert doc["failures"] == []


def test_spectral_seed_reproducible(tmp_path):
    a, b, c = (tmp_path / f"{x}.json" for x in "abc")
    base = ["verify", "spectral", "--degree", "1", "--trials", "2"]
    assert cli.run(base + ["--seed", "3", "--json", str(a)]) == 0
    assert cli.run(base + ["--seed", "3", "--json", str(b)]) == 0
    assert cli.run(base + ["--seed", "4", "--json", str(c)]) == 0
    da, db, dc = (json.loads(p.read_text()) for p in (a, b, c))
    assert da["draws"] == db["draws"] != dc["draws"]
    assert da["mode"] == "spectral"


def test_verification_failure_exit_1(monkeypatch, capsys):
    def failing(check, args):
        rep = VerifyReport(check)
        rep.checked = 1
        rep.fail(state=[0, 0, 0])
        return rep

    monkeypatch.setattr(cli, "run_check", failing)
    assert cli.run(["verify", "involution", "--degree", "1"]) == 1
    assert "[FAIL]" in capsys.readouterr().out


def test_usage_errors_exit_2(capsys):
    assert cli.run(["frobnicate"]) == 2
    assert cli.run(["verify", "involution", "--bogus"]) == 2
    assert cli.run(["verify", "nonsense"]) == 2
    assert cli.run(["verify", "involution", "--degree", "-1"]) == 2
    assert cli.run(["r-element", "--m", "0,1", "--n", "0,1,0"]) == 2
    assert cli.run(["yb", "verify", "--spins", "1/2,1/2"]) == 2
    assert cli.run(["yb", "build", "--q", "1.5"]) == 2


def test_yb_verify(capsys):
    code = cli.run(["yb", "verify", "--spins", "1/2,1/2,1/2", "--q", "0.3", "--u", "0.2", "--v", "0.4"])
    assert code == 0
    assert "residual=" in capsys.readouterr().out


def test_yb_inconclusive_exits_0(capsys):
    code = cli.run(["yb", "verify", "--tol", "1e-30", "--dps", "15"])
    assert code == 0


def test_yb_build_outputs(tmp_path):
    csv_path, json_path = tmp_path / "r.csv", tmp_path / "r.json"
    assert cli.run(["yb", "build", "--csv", str(csv_path), "--json", str(json_path)]) == 0
    assert csv_path.read_text().splitlines()[0] == "m1,m2,n1,n2,value"
    assert json.loads(json_path.read_text())["metadata"]["s2"] == "1/2"


def test_r_table_json(tmp_path):
    out = tmp_path / "r.json"
    assert cli.run(["r-table", "--degree", "1", "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    text = json.dumps(doc)
    assert "terms" in text


def test_decomp_table(tmp_path):
    out = tmp_path / "d.json"
    assert cli.run(["decomp-table", "--algebra", "B3", "--degree", "2", "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["basis_to"].startswith("e3^n6")
    assert all(set(e) == {"m", "n", "value"} for e in doc["entries"])


@pytest.mark.parametrize("check", ["involution", "symmetry", "intertwine", "theorem1", "recursion", "master", "psi", "rules"])
def test_each_check_passes_small(check):
    assert cli.run(["verify", check, "--degree", "2"]) == 0


def test_b3_check_small():
    assert cli.run(["verify", "b3", "--degree", "2", "--oracle-degree", "1"]) == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qtetra", "r-element", "--m", "0,0,0", "--n", "0,0,0"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "1"
