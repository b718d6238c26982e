import csv
import io
import json
import subprocess
import sys

import pytest

from hhtlattice.cli import run


@pytest.fixture(autouse=True)
def _one_worker(monkeypatch):
    monkeypatch.setenv("HHTLATTICE_WORKERS", "1")


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_single(capsys):
    code, out, _ = invoke(capsys, "verify", "--n", "3", "--g", "2", "--mu", "1,1,1,1,1,1")
    assert code == 0
    data = json.loads(out)
    r = data["results"][0]
    assert r["lambda_dot_K"]["computed"] == "0"
    assert r["lambda_self"]["computed"] == "6"
    assert r["pullback"]["match"] is True
    assert data["canonical"]["match"] is True
    assert data["all_match"] is True


def test_verify_sweep(capsys):
    code, out, _ = invoke(capsys, "verify", "--n", "4", "--g", "2")
    data = json.loads(out)
    assert code == 0
    assert data["checked"] == data["admissible"] == 337
    assert data["failures"] == [] and not data["truncated"]


def test_verify_sweep_limit(capsys):
    code, out, _ = invoke(capsys, "verify", "--n", "4", "--g", "2", "--limit", "10", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows == [["n", "g", "checked", "failures", "all_match"], ["4", "2", "10", "0", "true"]]


def test_verify_mismatch_exits_1(capsys, monkeypatch):
    import hhtlattice.cli as cli
    from hhtlattice.cover import CanonicalReport

    real = cli.verify_canonical_pullback

    def broken(model):
        r = real(model)
        return CanonicalReport(r.g, r.lhs, r.rhs, False)

    monkeypatch.setattr(cli, "verify_canonical_pullback", broken)
    code, out, _ = invoke(capsys, "verify", "--n", "3", "--g", "2", "--mu", "1,1,1,1,1,1")
    assert code == 1
    assert json.loads(out)["all_match"] is False


def test_verify_text(capsys):
    code, out, _ = invoke(capsys, "verify", "--n", "3", "--g", "2", "--mu", "3,3,1,1,1,1", "--format", "text")
    assert code == 0
    assert "lambda^2  = -2" in out and out.rstrip().endswith("OK")


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--n", "3", "--g", "2", "--mu", "2,2,2,2,2,2"],
        ["verify", "--n", "3", "--g", "2", "--mu", "1,1,1"],
        ["genus", "--n", "2", "--g", "2", "--mu", "0,0,0,0,0,0"],
        ["dim", "--n", "2", "--g", "2"],
        ["enumerate", "--n", "3", "--g", "1"],
    ],
)
def test_invalid_inputs_exit_2(capsys, argv):
    code, _, err = invoke(capsys, *argv)
    assert code == 2
    assert "usage" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--g", "2"],
        ["bogus"],
        ["enumerate", "--n", "3", "--g", "2", "--mode", "sideways"],
        ["genus", "--n", "3", "--g", "2", "--mu", "a,b"],
        ["cocycle", "--kind", "affine"],
    ],
)
def test_bad_flags_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        run(argv)
    assert exc.value.code == 2


def test_enumerate_multiset(capsys):
    code, out, _ = invoke(capsys, "enumerate", "--n", "3", "--g", "2", "--mode", "multiset")
    data = json.loads(out)
    assert code == 0 and data["count"] == 3
    assert data["types"] == [[1] * 6, [3, 1, 1, 1, 1, 1], [3, 3, 1, 1, 1, 1]]
    assert data["bound"] == 22


def test_enumerate_json_round_trip(tmp_path, capsys):
    path = tmp_path / "types.json"
    assert run(["enumerate", "--n", "4", "--g", "2", "--output", str(path)]) == 0
    data = json.loads(path.read_text())
    assert data["count"] == len(data["types"]) == 337


def test_enumerate_limit_keeps_count(capsys):
    _, out, _ = invoke(capsys, "enumerate", "--n", "4", "--g", "2", "--limit", "5")
    data = json.loads(out)
    assert data["count"] == 337 and len(data["types"]) == 5 and data["truncated"]


def test_enumerate_csv(capsys):
    _, out, _ = invoke(capsys, "enumerate", "--n", "3", "--g", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["mu_1", "mu_2", "mu_3", "mu_4", "mu_5", "mu_6", "mu2", "genus"]
    assert len(rows) == 23
    assert rows[1] == ["1", "1", "1", "1", "1", "1", "6", "4"]


def test_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["enumerate", "--n", "5", "--g", "2", "--output", str(a)])
    run(["enumerate", "--n", "5", "--g", "2", "--output", str(b)])
    assert a.read_bytes() == b.read_bytes()
    run(["lattice", "--g", "3", "--output", str(a)])
    run(["lattice", "--g", "3", "--output", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_genus(capsys):
    code, out, _ = invoke(capsys, "genus", "--n", "3", "--g", "2", "--mu", "3,3,1,1,1,1")
    data = json.loads(out)
    assert code == 0 and data["genus"] == 0 and data["admissible"] is True


def test_dim(capsys):
    code, out, _ = invoke(capsys, "dim", "--n", "3", "--g", "2", "--format", "text")
    assert code == 0 and out == "7\n"
    _, out, _ = invoke(capsys, "dim", "--n", "3", "--g", "3")
    assert json.loads(out)["moduli_dimension"] == 15


def test_lattice_dump(capsys):
    _, out, _ = invoke(capsys, "lattice", "--g", "2")
    data = json.loads(out)
    assert len(data["top"]["basis"]) == 16
    assert data["K_dagger_pullback"][:4] == ["-2", "2", "1", "1"]
    _, out, _ = invoke(capsys, "lattice", "--g", "2", "--format", "text")
    assert out.startswith("S~perp: rank 16")


def test_cocycle_command(capsys):
    code, out, _ = invoke(capsys, "cocycle", "--charts", "3")
    data = json.loads(out)
    assert code == 0
    assert data["kind"] == "rank2" and data["m"] == 3 and data["failures"] == []
    code, out, _ = invoke(capsys, "cocycle", "--charts", "4", "--kind", "affine", "--g", "3", "--format", "text")
    assert code == 0 and "affine(3)" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hhtlattice", "dim", "--n", "4", "--g", "2", "--format", "text"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout == "14\n"
