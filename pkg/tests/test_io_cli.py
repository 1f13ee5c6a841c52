import json
import subprocess
import sys

import numpy as np
import pytest

from qgalois import cli, csalg, errors, io
from qgalois import coaction as co
from qgalois import examples as ex


def write(path, obj):
    path.write_text(io.dumps(obj))
    return str(path)


@pytest.fixture(scope="module")
def bundles(tmp_path_factory):
    d = tmp_path_factory.mktemp("bundles")
    b = ex.crossed_product(ex.group("Z2"))
    flat = ex.projective_cocycle_algebra(ex.trivial_cocycle(ex.group_table("Z2")))
    return {
        "crossed": write(d / "crossed.json", io.biaction_to_dict(b)),
        "dual": write(d / "dual.json", io.biaction_to_dict(ex.crossed_product(b.G2))),
        "flat": write(d / "flat.json", io.biaction_to_dict(flat)),
        "free": write(d / "free.json", io.coaction_to_dict(co.comultiplication_coaction(ex.group("Z3"), "right"))),
        "hopf": write(d / "hopf.json", io.hopf_to_dict(ex.group("S3"))),
        "fixed": write(d / "fixed.json", io.coaction_to_dict(
            ex.permutation_coaction(ex.group("Z2"), [[0, 1, 2], [1, 0, 2]]))),
    }


def test_algebra_round_trip(rng):
    A = csalg.multimatrix_algebra([1, 2])
    B = io.algebra_from_dict(json.loads(io.dumps(io.algebra_to_dict(A))))
    assert np.allclose(B.mult, A.mult) and np.allclose(B.star_matrix, A.star_matrix)
    assert sorted(B.blocks) == [1, 2]


def test_hopf_round_trip_and_group_tables():
    G = ex.group("S3")
    H = io.hopf_from_dict(json.loads(io.dumps(io.hopf_to_dict(G))))
    assert np.allclose(H.comul, G.comul) and np.allclose(H.haar.coeffs, G.haar.coeffs)
    t = ex.symmetric_table(3).tolist()
    assert io.hopf_from_dict({"order": 6, "table": t}).dim == 6
    cg = io.hopf_from_dict({"order": 6, "table": t, "kind": "group_algebra"})
    assert sorted(cg.H.blocks) == [1, 1, 2]


def test_coaction_and_biaction_round_trip(bundles):
    c = io.load(bundles["free"], "coaction")
    assert c.side == "right" and c.fixed_basis.shape[1] == 1
    b = io.load(bundles["crossed"], "biaction")
    assert sorted(b.A.blocks) == [2]
    assert np.allclose(b.left.map, ex.crossed_product(ex.group("Z2")).left.map)


def test_coaction_with_relative_paths(tmp_path):
    G = ex.group("Z2")
    write(tmp_path / "alg.json", io.algebra_to_dict(G.H))
    write(tmp_path / "grp.json", io.hopf_to_dict(G))
    c = co.comultiplication_coaction(G, "left")
    p = write(tmp_path / "c.json", {"algebra": "alg.json", "hopf": "grp.json", "side": "left",
                                    "map": io._sparse_list(c.map)})
    assert np.allclose(io.load(p, "coaction").map, c.map)


def test_parse_error_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 2,\n  "mult": [}')
    with pytest.raises(errors.ParseError) as info:
        io.read_json(p)
    assert f"{p}:2:" in str(info.value)
    with pytest.raises(errors.ParseError):
        io.read_json(tmp_path / "missing.json")


@pytest.mark.parametrize("obj", [
    {"mult": [], "star": [], "unit": []},
    {"dim": 0, "mult": [], "star": [], "unit": []},
    {"dim": 1, "mult": [[0, 0, 1, 1.0, 0.0]], "star": [[[1, 0]]], "unit": [[1, 0]]},
    {"dim": 1, "mult": [[0, 0, 0, 1.0]], "star": [[[1, 0]]], "unit": [[1, 0]]},
    {"dim": 1, "mult": [[0, 0, 0, 1.0, 0.0]], "star": [[["a", 0]]], "unit": [[1, 0]]},
])
def test_schema_errors(obj):
    with pytest.raises(errors.SchemaError):
        io.algebra_from_dict(obj)


def test_bad_side_is_a_schema_error():
    G = ex.group("Z2")
    obj = io.coaction_to_dict(co.comultiplication_coaction(G, "left"))
    obj["side"] = "up"
    with pytest.raises(errors.SchemaError):
        io.coaction_from_dict(obj)


def test_jsonable_handles_numpy_and_non_finite():
    out = io.jsonable({"a": np.float64(np.inf), "b": np.arange(2), "c": 1 + 2j, "d": np.bool_(True)})
    assert out == {"a": "inf", "b": [0, 1], "c": [1.0, 2.0], "d": True}


# ---------------------------------------------------------------------------
# command line


def run(*argv):
    code, text, _ = cli.run(list(argv))
    return code, text


def test_morita_pass_and_fail(bundles):
    code, text = run("morita", "--bundle", bundles["crossed"])
    rec = json.loads(text)
    assert code == 0 and rec["verdict"] and rec["certificates"]["lambda"] == pytest.approx(2.0)
    code, text = run("morita", "--bundle", bundles["flat"])
    assert code == 1 and json.loads(text)["certificates"]["first_failure"] == "commutants"


def test_input_errors_exit_2(bundles, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run("morita", "--bundle", str(bad))[0] == 2
    assert run("morita", "--bundle", bundles["crossed"], "--tol", "0.5")[0] == 2
    assert run("morita")[0] == 2
    code, text = run("freeness", "--coaction", bundles["crossed"])  # a bundle is not a coaction
    assert code == 2 and json.loads(text)["certificates"]["error"] == "SchemaError"


def test_output_is_deterministic(bundles):
    a = run("exchange", "--bundle", bundles["crossed"])
    b = run("exchange", "--bundle", bundles["crossed"])
    assert a == b and a[0] == 0


def test_tolerance_from_environment(bundles, monkeypatch):
    monkeypatch.setenv("QGALOIS_TOL", "1e-7")
    assert json.loads(run("haar", "--hopf", bundles["hopf"])[1])["tolerance"] == 1e-7
    monkeypatch.setenv("QGALOIS_TOL", "1")
    assert run("freeness", "--coaction", bundles["free"])[0] == 2


def test_freeness_and_jobs(bundles):
    code, text = run("freeness", "--coaction", bundles["free"], bundles["fixed"], "--jobs", "2")
    recs = json.loads(text)
    assert code == 1 and [r["verdict"] for r in recs] == [True, False]
    assert all(r["certificates"]["oracles_agree"] for r in recs)
    serial = run("freeness", "--coaction", bundles["free"], bundles["fixed"])
    assert serial == (code, text)


def test_text_format(bundles):
    code, text = run("canonical-state", "--coaction", bundles["free"], "--format", "text")
    assert code == 0
    assert "verdict: True" in text.splitlines()


def test_cotensor_emit(bundles, tmp_path):
    out = tmp_path / "ct.json"
    code, text = run("cotensor", "--bundle", bundles["crossed"], "--bundle2", bundles["dual"], "--emit", str(out))
    rec = json.loads(text)
    assert code == 0 and rec["certificates"]["dim"] == 8 == rec["certificates"]["expected_dim"]
    assert io.load(out, "biaction").A.dim == 8
    assert run("morita", "--bundle", str(out))[0] == 0
    assert run("cotensor", "--bundle", bundles["crossed"], "--bundle2", bundles["flat"])[0] == 1


def test_onesided(bundles):
    assert run("onesided", "--coaction", bundles["free"])[0] == 0
    code, text = run("onesided", "--bundle", bundles["crossed"])
    assert code == 0 and json.loads(text)["certificates"]["lambda"] == pytest.approx(2.0)
    assert run("onesided")[0] == 2


def test_examples_and_validate(tmp_path):
    code, text = run("examples", "cocycle", "--n", "3")
    s = json.loads(text)
    assert code == 0 and s["order"] == 9 and s["values"][1][3] == pytest.approx([-0.5, np.sqrt(3) / 2])
    p = tmp_path / "heis.json"
    code, _ = run("examples", "projective", "--n", "2", "--output", str(p))
    assert code == 0
    assert cli.main(["examples", "projective", "--n", "2", "--output", str(p)]) == 0
    assert run("validate", "--biaction", str(p))[0] == 0
    assert run("morita", "--bundle", str(p))[0] == 0


def test_module_entry_point(bundles, tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "qgalois", "morita", "--bundle", bundles["crossed"],
                           "--output", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == ""
    assert json.loads(out.read_text())["verdict"]
