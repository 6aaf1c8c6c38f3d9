import json

import numpy as np
import pytest

from qplex import interchange
from qplex.cli import main
from qplex.designs import CATALOG, catalog_build, catalog_povm, cube, sic_d2
from qplex.errors import FormatError, PovmValidationError
from qplex.povm import Povm


def _catalog_exports():
    for name, entry in sorted(CATALOG.items()):
        params = {"sic-d3": [0.3], "mub": [3], "disphenoid": [0.4], "pvm": [3]}.get(name, [])
        yield name, params


@pytest.mark.parametrize("name,params", list(_catalog_exports()))
def test_save_load_bit_exact(tmp_path, name, params):
    obj = catalog_build(name, params)
    povm = obj if isinstance(obj, Povm) else obj.povm()
    path = tmp_path / "p.json"
    interchange.save_povm(povm, path)
    back = interchange.load_povm(path)
    assert np.array_equal(back.effects, povm.effects)
    if not isinstance(obj, Povm):
        interchange.save_design(obj, tmp_path / "d.json")
        design = interchange.load(tmp_path / "d.json")
        assert np.array_equal(design.vectors, obj.vectors)


def test_bloch_shorthand_cube():
    bloch = [(1, 1, -1), (-1, 1, -1), (-1, -1, -1), (1, -1, -1)]
    bloch = [list(np.array(b) / np.sqrt(3)) for b in bloch]
    bloch += [[-x for x in b] for b in bloch]
    P = interchange.parse({"dim": 2, "bloch": bloch})
    assert P.n == 8
    assert np.allclose(P.traces, 1 / 4)
    assert np.allclose(P.effects, cube().povm().effects, atol=1e-15)


def test_missing_effect_is_a_sum_violation():
    payload = interchange.povm_to_json(sic_d2().povm())
    payload["effects"] = payload["effects"][:3]
    with pytest.raises(PovmValidationError, match="sum"):
        interchange.parse(payload)


@pytest.mark.parametrize(
    "payload,where",
    [
        ({"effects": []}, "dim"),
        ({"dim": 2, "effects": [[[1, 0]] * 3]}, "effects[0]"),
        ({"dim": 2, "effects": [[[1, 0], [0, 0], [0, 0], "x"]]}, "effects[0][3]"),
        ({"dim": 2, "effects": [[[1, 0], [1, 0], [0, 0], [1, 0]]]}, "effects[0]"),
        ({"dim": 2, "bloch": [[1, 0, 0], [0.5, 0, 0]]}, "bloch[1]"),
        ({"dim": 2, "bloch": [[1, 0, 0]], "weights": [1, 2]}, "weights"),
        ({"dim": 3, "bloch": [[1, 0, 0]]}, "dim"),
        ({"dim": 2, "vectors": [[[1, 0]]]}, "vectors[0]"),
        ({"dim": 2, "vectors": [[[0, 0], [0, 0]]]}, "vectors[0]"),
    ],
)
def test_format_errors_name_the_field(payload, where):
    with pytest.raises(FormatError) as err:
        interchange.parse(payload)
    assert err.value.where == where
    assert str(err.value).startswith(where)


def test_format_error_kinds():
    with pytest.raises(FormatError, match="exactly one"):
        interchange.parse({"dim": 2})
    with pytest.raises(FormatError):
        interchange.parse([1, 2])


def test_invalid_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 2,\n "effects": [}')
    with pytest.raises(FormatError) as err:
        interchange.load(path)
    assert err.value.where.endswith(":2:14")


def test_load_state_and_vectors(tmp_path):
    (tmp_path / "s.json").write_text(json.dumps({"dim": 2, "vector": [[1, 0], [0, 0]]}))
    assert np.allclose(interchange.load_state(tmp_path / "s.json"), np.diag([1, 0]))
    (tmp_path / "p.json").write_text(json.dumps({"p": [0.25] * 4}))
    assert interchange.load_vectors(tmp_path / "p.json").shape == (1, 4)
    (tmp_path / "bad.json").write_text(json.dumps({"dim": 2, "state": [[1, 0], [1, 0], [0, 0], [0, 0]]}))
    with pytest.raises(FormatError, match="Hermitian"):
        interchange.load_state(tmp_path / "bad.json")


def test_polytope_csv():
    text = interchange.polytope_csv(np.array([[0.5, 0.5], [1.0, 0.0]]))
    assert text == "p1,p2\n0.5,0.5\n1.0,0.0\n"


# --- CLI ----------------------------------------------------------------------


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "--format", "json")
    assert code == 0
    names = json.loads(out)["catalog"]
    assert set(names) == set(CATALOG)


def test_cli_catalog_export_roundtrip(capsys, tmp_path):
    path = tmp_path / "mub.json"
    code, _, _ = run(capsys, "catalog", "mub", "--param", "3", "--output", str(path))
    assert code == 0
    assert np.array_equal(interchange.load_povm(path).effects, catalog_povm("mub", (3,)).effects)


def test_cli_verify(capsys):
    code, out, _ = run(capsys, "verify", "catalog:sic-d2", "--require", "morphophoric", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["morphophoricity"]["alpha"] == pytest.approx(1 / 6)
    assert rep["design_level"] == 2
    code, _, _ = run(capsys, "verify", "catalog:bipyramid", "--require", "tight-ic")
    assert code == 1
    code, _, _ = run(capsys, "verify", "catalog:disphenoid:0.7853981633974483", "--require", "two-design")
    assert code == 1


def test_cli_verify_corrupted_sum(capsys, tmp_path):
    payload = interchange.povm_to_json(sic_d2().povm())
    payload["effects"] = [[[0.99 * re, 0.99 * im] for re, im in E] for E in payload["effects"]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    code, out, err = run(capsys, "verify", str(path))
    assert code == 2 and out == ""
    assert err.startswith("error:") and "sum" in err


def test_cli_unknown_catalog_name(capsys):
    code, _, err = run(capsys, "verify", "catalog:dodecahedron")
    assert code == 2 and "dodecahedron" in err


def test_cli_geometry(capsys, tmp_path):
    csv_path = tmp_path / "delta.csv"
    vec = tmp_path / "v.json"
    vec.write_text(json.dumps([[1 / 6] * 6, [1, 0, 0, 0, 0, 0]]))
    code, out, _ = run(
        capsys, "geometry", "catalog:mub:2", "--samples", "200", "--polytope-csv", str(csv_path),
        "--vectors", str(vec), "--format", "json",
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["duality"]["passed"]
    assert rep["polytope"]["vertices"] == 8
    assert len(csv_path.read_text().splitlines()) == 9
    assert [m["in_range"] for m in rep["membership"]] == [True, False]


def test_cli_graph(capsys, tmp_path):
    adj = tmp_path / "adj.txt"
    code, out, _ = run(capsys, "graph", "catalog:two-distance-d5", "--adjacency", str(adj), "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert [rep["row"][k] for k in ("n", "kappa", "lambda", "mu", "d", "r", "q", "psi", "c")] == [45, 12, 3, 3, 5, 3, 3, 1, 1]
    assert rep["bases"] == 27 and rep["reduced_equations"] == 21
    assert len(adj.read_text().splitlines()) == 270
    code, _, err = run(capsys, "graph", "catalog:sic-d2")
    assert code == 2 and "expected exactly" in err


def test_cli_primal(capsys, tmp_path):
    joint = tmp_path / "joint.csv"
    code, out, _ = run(capsys, "primal", "catalog:cube", "--ground", "catalog:sic-d2", "--joint-csv", str(joint), "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["residual"] < 1e-10 and rep["fit"]["holds"]
    assert len(joint.read_text().splitlines()) == 9
    code, _, _ = run(capsys, "primal", "catalog:disphenoid:0.7853981633974483")
    assert code == 1


def test_cli_tomography(capsys, tmp_path):
    from qplex.povm import measurement_map

    P = catalog_povm("mub", (3,))
    p = measurement_map(P, np.diag([0.5, 0.3, 0.2]))
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"p": p.tolist()}))
    code, out, _ = run(capsys, "tomography", "catalog:mub:3", str(path), "--format", "json")
    assert code == 0
    rec = json.loads(out)["reconstructions"][0]
    assert rec["is_state"] and rec["roundtrip"] < 1e-12
    diag = [rec["state"][i][i][0] for i in range(3)]
    assert np.allclose(diag, [0.5, 0.3, 0.2], atol=1e-12)
    path.write_text(json.dumps([1.0] + [0.0] * 11))
    code, _, err = run(capsys, "tomography", "catalog:mub:3", str(path))
    assert code == 2 and "error:" in err


def test_cli_json_deterministic(capsys):
    a = run(capsys, "geometry", "catalog:cube", "--samples", "100", "--seed", "7", "--format", "json")[1]
    b = run(capsys, "geometry", "catalog:cube", "--samples", "100", "--seed", "7", "--format", "json")[1]
    assert a == b


def test_cli_text_format_and_output(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "catalog:cube")
    assert code == 0 and "morphophoricity.alpha: " in out
    target = tmp_path / "rep.json"
    code, out, _ = run(capsys, "verify", "catalog:cube", "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["n"] == 8


def test_cli_rejects_bad_arguments(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2
    capsys.readouterr()
