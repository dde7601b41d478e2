import csv
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbitness import cli, reproduce
from orbitness.cli import ParseError, main, parse_matrix, serialize_matrix
from orbitness.errors import PartitionError, TraceFreeError
from orbitness.sl2 import build_standard_triple

SHORTHANDS = [
    "diag:2,0,-2",
    "diag:1,i,-1-i",
    "diag:0.5+1.5i,-0.5-1.5i",
    "e:3",
    "x:4",
    "std:3,1:1,2,0.5i",
    "std:2^2",
    "jordan:2@1,1@-2",
    "jordan:3",
]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_parse_examples():
    assert np.allclose(parse_matrix("diag:2,0,-2"), np.diag([2, 0, -2]))
    e3 = parse_matrix("e:3")
    assert np.allclose(np.diag(e3, 1), [np.sqrt(2), np.sqrt(2)])
    assert np.allclose(parse_matrix("jordan:2@1,1@-2"), [[1, 0, 0], [1, 1, 0], [0, 0, -2]])
    t = build_standard_triple((3, 1))
    assert np.allclose(parse_matrix("std:3,1:1,2,0.5i"), t.E + 2 * t.Etilde + 0.5j * t.X)


def test_parse_errors():
    with pytest.raises(TraceFreeError) as info:
        parse_matrix("diag:1,1,-1")
    assert info.value.trace == pytest.approx(1.0)
    for bad in ["foo:1", "diag:1,x", "e:three", "{not json", '{"n": 2, "re": [[1]]}', "std:3,1:1,2"]:
        with pytest.raises((ParseError, ValueError)):
            parse_matrix(bad)
    with pytest.raises(PartitionError):
        parse_matrix("std:1,3:1,0,0")


@pytest.mark.parametrize("spec", SHORTHANDS)
def test_round_trip(spec):
    a = parse_matrix(spec)
    b = parse_matrix(serialize_matrix(a))
    assert np.array_equal(a, b)
    assert serialize_matrix(b) == serialize_matrix(a)


@given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=5))
def test_round_trip_arbitrary(vals):
    v = np.array(vals, dtype=complex)
    a = np.diag(v - v.mean())
    if np.linalg.norm(a) == 0:
        return
    try:
        a = parse_matrix(serialize_matrix(a))
    except TraceFreeError:
        return
    assert np.array_equal(parse_matrix(serialize_matrix(a)), a)


def test_json_file_input(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(serialize_matrix(np.diag([1.0, -1.0])))
    assert np.allclose(parse_matrix(str(p)), np.diag([1, -1]))


def test_k_command(capsys):
    code, doc, _ = run(capsys, "k", "e:2")
    assert code == 0
    assert doc["k"]["k_value"] == pytest.approx(2.0)
    assert doc["k"]["curvature"]["sectional"] == pytest.approx(-1.0)
    m = doc["manifest"]
    assert m["command"] == "k" and m["input"]["spec"] == "e:2"
    assert {"version", "timestamp", "config", "seed"} <= set(m)


def test_k_in_z(capsys):
    code, doc, _ = run(capsys, "k", "diag:1,-1")
    assert code == 0 and doc["k"]["in_Z"] and doc["k"]["k_value"] is None


def test_trace_error_exit(capsys):
    code, doc, err = run(capsys, "k", "diag:1,1,-1")
    assert code == 2 and doc is None and "trace = 1" in err


def test_classify_command(capsys):
    code, doc, _ = run(capsys, "classify", "diag:2,0,-2")
    c = doc["classification"]
    assert c["case"] == 2 and c["infimum"] == 0.5 and c["achieved"]
    assert c["extra_critical"]["value"] == 2.0
    assert c["provenance"]
    assert doc["candidates"]["infinity"] == 0.5


def test_tolerance_flags_reach_profile(capsys):
    _, doc, _ = run(capsys, "spectral", "diag:1,1.001,-2.001")
    assert len(doc["spectral"]["clusters"]) == 3
    # a loose cluster tolerance alone contradicts the rank data
    code, doc, err = run(capsys, "spectral", "diag:1,1.001,-2.001", "--tol-cluster", "0.01")
    assert code == 2 and "eigenspace" in err
    code, doc, _ = run(capsys, "spectral", "diag:1,1.001,-2.001", "--tol-cluster", "0.01",
                       "--tol-rank", "0.01")
    assert code == 0 and len(doc["spectral"]["clusters"]) == 2


def test_spectral_command(capsys):
    _, doc, _ = run(capsys, "spectral", "jordan:2@1,1@-2")
    assert doc["spectral"]["invariant_partition"] == [3]
    assert doc["witness"]["predicted_type"] == [3]


def test_partition_command(capsys):
    _, doc, _ = run(capsys, "partition", "3,1^2", "--compare", "2^2,1")
    p = doc["partition"]
    assert p["C"] == "1/2" and p["parity"] == "even"
    assert p["dominance"]["relation"] == "greater"
    _, doc, _ = run(capsys, "partition", "--n", "4")
    assert len(doc["partitions"]) == 5


def test_residual_command(capsys):
    _, doc, _ = run(capsys, "residual", "e:3")
    r = doc["residual"]
    assert r["critical_residual"] < 1e-12
    assert r["ness"]["satisfied"] and r["ness"]["a"] < 0


def test_minimize_command(capsys, tmp_path):
    out = tmp_path / "rep.json"
    code, _, _ = run(capsys, "minimize", "e:3", "--restarts", "2", "--max-iters", "200",
                     "--thin", "10", "--seed", "7", "-o", str(out))
    doc = json.loads(out.read_text())
    assert code == 0
    assert doc["minimization"]["best_k"] == pytest.approx(0.5, abs=1e-3)
    assert doc["manifest"]["seed"] == 7
    assert doc["prediction"]["case"] == 6


def test_rerun_identical_except_timestamp(capsys):
    docs = []
    for _ in range(2):
        _, doc, _ = run(capsys, "minimize", "std:3,1", "--restarts", "1", "--max-iters", "100")
        doc["manifest"].pop("timestamp")
        docs.append(doc)
    assert docs[0] == docs[1]


def test_verify_exit_contract(capsys, tmp_path, monkeypatch):
    # a fixture with a wrong expected case must make the suite fail
    good = reproduce.fixtures()[:1]
    monkeypatch.setattr(reproduce, "fixtures", lambda: good)
    code, doc, _ = run(capsys, "verify", "--out-dir", str(tmp_path / "ok"), "--samples", "20")
    assert code == 0 and doc["verify"]["failures"] == []
    bad = [reproduce.Fixture("wrong", np.diag([2.0, 0.0, -2.0]), 3, 0.5, True)]
    monkeypatch.setattr(reproduce, "fixtures", lambda: bad)
    code, doc, err = run(capsys, "verify", "--out-dir", str(tmp_path / "bad"), "--samples", "20")
    assert code != 0 and doc["verify"]["failures"] == ["fixture wrong"]
    assert "FAILED: fixture wrong" in err


def test_verify_output_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setattr(reproduce, "fixtures", lambda: [])
    monkeypatch.setattr(reproduce, "_write_csv", lambda path, rows: path.write_text("x") if rows else path.write_text(""))
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "env"))
    code, doc, _ = run(capsys, "verify", "--samples", "20")
    assert (tmp_path / "env" / "constants.csv").exists()


@pytest.mark.slow
def test_verify_full(capsys, tmp_path):
    code, doc, _ = run(capsys, "verify", "--out-dir", str(tmp_path))
    assert code == 0
    rows = list(csv.DictReader((tmp_path / "constants.csv").open()))
    assert {"n": "3", "C": "1/2"}.items() <= rows[1].items()
    fx = {r["fixture"]: r for r in csv.DictReader((tmp_path / "fixtures.csv").open())}
    assert fx["diag(2,0,-2)"]["case"] == "2" and float(fx["diag(2,0,-2)"]["extra_critical"]) == 2.0
    assert float(fx["diag(3,-1,-2)"]["infimum"]) == pytest.approx(1 / 14)
