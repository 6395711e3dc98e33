import json
import subprocess
import sys

import pytest

from dbr.cli import main, parse_atom, parse_number
from dbr.tuples import CirclePoint


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_atoms():
    assert parse_atom("1+2i") == 1 + 2j
    assert abs(parse_atom("1@1.5707963267948966") - 1j) < 1e-15
    z = parse_atom("zeta:8:2")
    assert isinstance(z, CirclePoint) and z.root == (4, 1)
    assert parse_number("3") == 3 and isinstance(parse_number("3"), int)


def test_kernel_example(capsys):
    code, out, _ = run(capsys, "kernel", "--atoms", "1,0", "--weights", "1,1")
    assert code == 0
    doc = json.loads(out)
    assert doc["q"] == [[2.0, 0.0], [-1.0, 0.0]]
    num = doc["atom_kernels"][0]["num"]
    den0 = doc["atom_kernels"][0]["den"][0][0]
    assert abs(num[0][0] / den0 * 2 - 2) < 1e-12 and abs(num[1][0] / den0 * 2 + 0.5) < 1e-12
    assert all("residual" in c and "tolerance" in c for c in doc["verification"]["checks"].values())


def test_tuple_example(capsys):
    code, out, _ = run(capsys, "tuple", "--lambda", "1", "--p", "0,1", "--m", "2", "--kmax", "10")
    assert code == 0
    doc = json.loads(out)
    fourier = [[v[0] for v in e["fourier"]] for e in doc["entries"]]
    assert fourier[1] == [k + 1 for k in range(11)]
    assert fourier[2] == [k + 3 for k in range(11)]
    assert fourier[3] == [2] * 11
    assert doc["entries"][1]["terms"][0]["poly_in_D"] == [[1, 0], [1, 0]]


def test_schur_and_defect(capsys):
    code, out, _ = run(capsys, "schur", "--atoms", "zeta:4:1", "--weights", "2")
    assert code == 0 and "degree_one" in json.loads(out)
    code, out, _ = run(capsys, "defect", "--local", "1", "--p", "0,1", "--m", "2", "--N", "15")
    assert code == 0 and json.loads(out)["summary"]["strict_isometry_order"] == 4
    code, out, _ = run(capsys, "defect", "--atom", "1|1|1", "--atom=-1|2|1", "--annihilate", "1,1,-1,-1", "--N", "15")
    assert code == 0 and json.loads(out)["annihilation"]["annihilated"]


def test_input_errors(capsys):
    assert run(capsys, "kernel", "--atoms", "2", "--weights", "1")[0] == 1
    assert run(capsys, "kernel", "--atoms", "0.5,0.5", "--weights", "1,1")[0] == 1
    assert run(capsys, "tuple", "--lambda", "0.5", "--m", "1")[0] == 1
    assert run(capsys, "tuple", "--lambda", "1", "--p=-1,1", "--m", "2")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["nosuch"])
    assert exc.value.code == 1


def test_tolerance_env_var(capsys, monkeypatch):
    monkeypatch.setenv("DBR_TOL", "1e-30")
    code, out, _ = run(capsys, "verify", "--atoms", "1,0", "--weights", "1,1", "--trials", "5")
    assert code == 2
    assert json.loads(out)["verification"]["checks"]["reproducing"]["tolerance"] == 1e-30
    monkeypatch.setenv("DBR_TOL", "nan-ish")
    assert run(capsys, "verify", "--atoms", "1,0", "--weights", "1,1")[0] == 1


def test_output_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["kernel", "--atoms", "1,0.5i", "--weights", "1,2", "-o", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_subset_exit_codes(capsys):
    code, out, err = run(capsys, "verify", "--only", "AC6,AC7")
    assert code == 0 and "PASS AC6" in err
    doc = json.loads(out)
    assert [c["key"] for c in doc["criteria"]] == ["AC6", "AC7"]
    assert run(capsys, "verify", "--only", "AC99")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dbr", "tuple", "--closed-form", "--lambda", "-1", "--m", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 2
