import json
import os
import subprocess
import sys

import pytest

from normhom.cli import (
    canonical_json,
    main,
    parse_complex,
    parse_space,
    parse_tower,
    serialize_complex,
    serialize_space,
    serialize_tower,
)

SAMPLES = os.path.join(os.path.dirname(__file__), "..", "samples")


def sample(name):
    return os.path.join(SAMPLES, name)


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ucf_check_rp2(capsys):
    code, out, _ = run_cli(["ucf-check", sample("rp2.cplx.json"),
                            "--coeff", "Z", "--degree", "1"], capsys)
    assert code == 0
    assert "Ext=Z/2" in out
    assert "Hom=0" in out
    assert "H_1=Z/2" in out


def test_dimension_check_table(capsys):
    code, out, _ = run_cli(["dimension-check", "--coeff", "Z/4"], capsys)
    assert code == 0
    assert "H_0(point;Z/4) = Z/4" in out
    assert "H_1(point;Z/4) = 0" in out
    assert "H_-1(point;Z/4) = 0" in out


def test_tower_lim1_dyadic(capsys):
    code, out, _ = run_cli(["tower-lim1", sample("dyadic.tower.json")], capsys)
    assert code == 0
    assert "Mittag-Leffler: false" in out
    assert "lim¹ nonzero (not finitely generated)" in out


def test_tower_lim_dyadic(capsys):
    code, out, _ = run_cli(["tower-lim", sample("dyadic.tower.json")], capsys)
    assert code == 0
    assert "lim = 0" in out


def test_cohomology_circle(capsys):
    code, out, _ = run_cli(["cohomology", sample("circle.cplx.json")], capsys)
    assert code == 0
    assert "H^0 = Z" in out and "H^1 = Z" in out


def test_homology_json_output(capsys):
    code, out, _ = run_cli(["--json", "homology", sample("circle.cplx.json"),
                            "--coeff", "Z/6", "--degree", "1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["groups"]["1"] == "Z/6"


def test_dowker_check_cli(capsys):
    code, out, _ = run_cli(["dowker-check", sample("circle.space.json"),
                            "--cover", "arcs3", "--degree", "0..1"], capsys)
    assert code == 0
    assert "isomorphic" in out


def test_pair_check_cli(capsys):
    code, out, _ = run_cli(["pair-check", sample("disk_pair.json"), "--coeff", "Z"], capsys)
    assert code == 0
    assert "exact at every junction: True" in out


def test_milnor_check_cli(capsys):
    code, out, _ = run_cli(["milnor-check", sample("solenoid.milnor.json")], capsys)
    # the claimed limit in degree 0 sits under the dyadic tower in degree 1:
    # lim^1 nonzero, so the report is non-verifiable, not a failure
    assert code == 0
    assert "not desk-verifiable" in out


def test_coefficient_les_cli(capsys):
    code, out, _ = run_cli(["coefficient-les", sample("circle.cplx.json"),
                            "--ses", "bockstein:2"], capsys)
    assert code == 0
    assert "exact at every junction: True" in out


def test_modulus_cap_flag(capsys):
    code1, out1, _ = run_cli(["--json", "homology", sample("rp2.cplx.json"),
                              "--coeff", "Z", "--degree", "1"], capsys)
    code2, out2, _ = run_cli(["--json", "--modulus-cap", "64", "homology",
                              sample("rp2.cplx.json"), "--coeff", "Z", "--degree", "1"], capsys)
    assert code1 == code2 == 0
    assert json.loads(out1)["groups"] == json.loads(out2)["groups"]


# --- error paths -------------------------------------------------------------


def test_invariant_error_exit_3(tmp_path, capsys):
    bad = {"ranks": {"0": 1, "1": 1, "2": 1}, "deltas": {"0": [[1]], "1": [[1]]}}
    path = tmp_path / "bad.cplx.json"
    path.write_text(canonical_json(bad))
    code, _, err = run_cli(["cohomology", str(path)], capsys)
    assert code == 3
    assert "invariant" in err


def test_schema_error_exit_2(tmp_path, capsys):
    bad = {"points": [0, 1, 2], "covers": {"c": [[0, 1]]}}  # union misses 2
    path = tmp_path / "bad.space.json"
    path.write_text(canonical_json(bad))
    code, _, err = run_cli(["dowker-check", str(path), "--cover", "c"], capsys)
    assert code == 2
    assert "schema" in err


def test_parse_error_exit_4(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run_cli(["cohomology", str(path)], capsys)
    assert code == 4
    assert "parse error" in err


def test_missing_file_exit_2(capsys):
    code, _, _ = run_cli(["cohomology", "/nonexistent/file.json"], capsys)
    assert code == 2


def test_failed_math_check_exit_1(tmp_path, capsys):
    doc = {
        "towers": {"1": {"kind": "periodic", "group": {"rank": 1, "torsion": []},
                         "map": [[1]], "prefix": []}},
        "limits": {"1": {"rank": 0, "torsion": [5]}},  # wrong claim: lim = Z
    }
    path = tmp_path / "wrong.milnor.json"
    path.write_text(canonical_json(doc))
    code, out, _ = run_cli(["milnor-check", str(path)], capsys)
    assert code == 1
    assert "fail" in out


# --- round trips -------------------------------------------------------------


@pytest.mark.parametrize("name,parse,serialize", [
    ("circle.cplx.json", parse_complex, serialize_complex),
    ("rp2.cplx.json", parse_complex, serialize_complex),
    ("circle.space.json", parse_space, serialize_space),
    ("dyadic.tower.json", parse_tower, serialize_tower),
])
def test_round_trip_byte_identical(name, parse, serialize):
    with open(sample(name), "r", encoding="utf-8") as fh:
        text = fh.read()
    obj = parse(json.loads(text), name)
    assert serialize(obj) == text


def test_subprocess_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "normhom", "dimension-check", "--coeff", "Z"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "H_0(point;Z) = Z" in proc.stdout


def test_deterministic_reports(capsys):
    a = run_cli(["ucf-check", sample("rp2.cplx.json"), "--coeff", "Z"], capsys)
    b = run_cli(["ucf-check", sample("rp2.cplx.json"), "--coeff", "Z"], capsys)
    assert a == b
