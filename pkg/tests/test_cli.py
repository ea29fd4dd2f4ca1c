import json
import math
import os
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from convproj import fixtures
from convproj.cli import EXIT_ERROR, EXIT_INFEASIBLE, EXIT_OK, EXIT_UNBOUNDED, EXIT_VERIFY, main
from convproj.core import SolutionSet, kappa_under
from convproj.problemfile import ProblemFileError, cp_to_dict, cvop_to_dict, dump, load, loads
from convproj.reductions import cvop_to_cp

DATA = resources.files("convproj") / "data"


def data(name):
    return str(DATA / name)


# ---- problem files ---------------------------------------------------------

def test_problem_file_roundtrip(tmp_path):
    spec = fixtures.segment(3)
    path = tmp_path / "seg.json"
    dump(cp_to_dict(spec, {"p": math.inf, "epsilon": 0.1}), path)
    pf = load(path)
    assert pf.kind == "cp" and pf.p == math.inf and pf.epsilon == 0.1
    assert pf.spec.n == 1 and pf.spec.m == 3
    np.testing.assert_array_equal(pf.spec.eq_matrix, spec.eq_matrix)
    z = np.r_[0.5, 0.5 * fixtures.segment_endpoint(3)]
    assert pf.spec.contains(z)


def test_cvop_file_roundtrip(tmp_path):
    cvop = fixtures.disc_identity_cvop()
    path = tmp_path / "cvop.json"
    dump(cvop_to_dict(cvop), path)
    pf = load(path)
    assert pf.kind == "cvop" and pf.spec.m == 2
    np.testing.assert_allclose(pf.spec.c_dir, cvop.c_dir)


def test_shipped_problem_files_load():
    for name in ("ex52", "ex53", "ellipse3d", "ellipse4d", "ex35", "disjoint"):
        assert load(data(f"{name}.json")).kind == "cp"


@pytest.mark.parametrize("text,line,fragment", [
    ('{\n "kind": "cp",\n "dims": {"n": 0}\n}', 3, "dims"),
    ('{\n "kind": "lp",\n "dims": {"n": 0, "m": 1}\n}', 2, "kind"),
    ('{\n "kind": "cp",\n "dims": {"n": 0, "m": 2},\n "constraints": [{"A": [[-1, 0], [0, 0]], "b": [0, 0]}]\n}', 4,
     "psd"),
    ('{\n "kind": "cp",\n "dims": {"n": 0, "m": 2}\n "constraints": []\n}', 4, "invalid JSON"),
    ('{\n "kind": "cp",\n "schema_version": 7,\n "dims": {"n": 0, "m": 1}\n}', 3, "schema"),
])
def test_line_anchored_errors(text, line, fragment):
    with pytest.raises(ProblemFileError) as info:
        loads(text, "f.json")
    msg = str(info.value)
    assert msg.startswith(f"f.json:{line}:")
    assert fragment.lower() in msg.lower()


# ---- commands --------------------------------------------------------------

def test_multipliers_single(capsys):
    assert main(["multipliers", "--m", "2", "--p", "2"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "κ=2.449490, κ̄=1.290994, ‖Q‖=1.732051"


def test_multipliers_table(capsys):
    assert main(["multipliers"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1 + 3 * 8
    assert lines[1].split() == ["1", "1", "2.000000", "0.500000", "2.000000"]


def test_translate_scales_by_kappa(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert main(["translate", data("ex52.sol"), "--direction", "cp-to-mocp", "--out", str(out)]) == EXIT_OK
    src = SolutionSet.from_dict(json.loads(open(data("ex52.sol")).read()))
    dst = SolutionSet.from_dict(json.loads(out.read_text()))
    assert dst.epsilon == pytest.approx(kappa_under(2, 2.0) * src.epsilon)
    assert dst.kind == "MOCP"


def test_translate_hausdorff(tmp_path):
    out = tmp_path / "t.json"
    assert main(["translate", data("ex52.sol"), "--direction", "cp-to-mocp", "--flavor", "hausdorff",
                 "--out", str(out)]) == EXIT_OK
    dst = json.loads(out.read_text())
    assert dst["flavor"] == "hausdorff"
    assert dst["epsilon"] == pytest.approx(math.sqrt(3.0) * (math.sqrt(2.0) - 1.0) / 2.0 * math.sqrt(2.0))


def test_verify_pass_and_fail(tmp_path, capsys):
    assert main(["verify", data("ex53.json"), data("ex53.sol"), "--grid", "300"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("pass")
    d = json.loads(open(data("ex53.sol")).read())
    d["epsilon"] = 1.5
    bad = tmp_path / "bad.sol"
    bad.write_text(json.dumps(d))
    cert = tmp_path / "cert.json"
    assert main(["verify", data("ex53.json"), str(bad), "--grid", "300", "--out", str(cert)]) == EXIT_VERIFY
    assert "FAIL" in capsys.readouterr().out
    assert json.loads(cert.read_text())["passed"] is False


def test_solve_cp_writes_artifacts_and_roundtrips(tmp_path):
    out = tmp_path / "run"
    assert main(["solve-cp", data("ex52.json"), "--eps", "0.05", "--grid", "300", "--out", str(out)]) == EXIT_OK
    for name in ("solution.json", "certificate.json", "polytope.json", "polytope.off"):
        assert (out / name).exists()
    assert json.loads((out / "certificate.json").read_text())["passed"] is True
    # the emitted solution passes an independent verify run at its emitted epsilon
    assert main(["verify", data("ex52.json"), str(out / "solution.json"), "--grid", "500"]) == EXIT_OK


def test_solve_cp_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["solve-cp", data("ex52.json"), "--eps", "0.1", "--grid", "200", "--out", str(d)]) == EXIT_OK
    for name in ("solution.json", "certificate.json", "polytope.json", "polytope.off"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_solve_mocp(tmp_path):
    out = tmp_path / "m"
    assert main(["solve-mocp", data("ex53.json"), "--eps", "0.1", "--grid", "200", "--out", str(out)]) == EXIT_OK
    sol = json.loads((out / "solution.json").read_text())
    assert sol["kind"] == "MOCP"
    assert (out / "outer.json").exists() and (out / "inner.json").exists()


def test_reduce(tmp_path, capsys):
    assert main(["reduce", data("ex52.json"), "--to", "mocp"]) == EXIT_OK
    d = json.loads(capsys.readouterr().out)
    assert d["objective_matrix"] == [[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]
    path = tmp_path / "cvop.json"
    dump(cvop_to_dict(fixtures.half_line_cvop()), path)
    out = tmp_path / "cp.json"
    assert main(["reduce", str(path), "--to", "cp", "--out", str(out)]) == EXIT_OK
    spec = load(out).spec
    assert spec.contains([1.0, 2.0]) and not spec.contains([1.0, 0.5])
    assert main(["reduce", data("ex52.json"), "--to", "cp"]) == EXIT_ERROR


def test_exit_codes(tmp_path):
    assert main(["solve-cp", data("disjoint.json"), "--out", str(tmp_path / "x")]) == EXIT_INFEASIBLE
    assert main(["solve-cp", data("ex35.json"), "--out", str(tmp_path / "y")]) == EXIT_UNBOUNDED
    assert main(["solve-cp", str(tmp_path / "missing.json")]) == EXIT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["verify", str(bad), data("ex53.sol")]) == EXIT_ERROR


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "convproj", "multipliers", "--m", "3", "--p", "inf"],
                         capture_output=True, text=True, env={**os.environ, "PYTHONIOENCODING": "utf-8"})
    assert res.returncode == 0
    assert "3.000000" in res.stdout
