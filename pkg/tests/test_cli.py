import io
import json
import subprocess
import sys

import numpy as np
import pytest

from minkowski.cli import levelset_rows, run
from minkowski import EuclideanNorm, Polytope, WeightedPNorm, distance

SQUARE = '{"type":"polytope","vertices":[[1,1],[1,-1],[-1,1],[-1,-1]]}'
ABS_X1 = '{"type":"max_affine","pieces":[{"phi":[1,0]},{"phi":[-1,0]}]}'


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv)
    return code, (json.loads(out) if out else None), err


def test_legendre_example():
    code, res, _ = call_json("legendre", "--norm", "euclidean", "--x", "3,4")
    assert code == 0 and res == {"L": [3.0, 4.0], "dual_norm": 5.0}


def test_legendre_inverse():
    code, res, _ = call_json("legendre", "--norm", '{"type":"p","p":4}', "--phi", "[1, 1]")
    assert code == 0
    assert np.allclose(res["x"], np.array([1, 1]) * 2 ** 0.75 / 2 ** 0.25)


def test_project_example():
    code, res, _ = call_json("project", "--norm", '{"type":"p","p":4}', "--body", SQUARE, "--x", "3,0")
    assert code == 0
    assert np.allclose(res["point"], [1, 0]) and res["distance"] == pytest.approx(2)
    assert res["certified"] is True


def test_project_output_round_trips():
    _, res, _ = call_json("project", "--norm", "euclidean", "--body", SQUARE, "--x", "2,3")
    # the emitted point re-parses as input and lies in the body
    code, again, _ = call_json("distance", "--norm", "euclidean", "--body", SQUARE,
                               "--x", json.dumps(res["point"]))
    assert code == 0 and again["distance"] == 0


def test_norm_and_birkhoff():
    code, res, _ = call_json("norm", "--norm", "euclidean", "--x", "3,4")
    assert res["value"] == 5 and np.allclose(res["gradient"], [0.6, 0.8])
    code, res, _ = call_json("birkhoff", "--norm", '{"type":"p","p":4}', "--x", "1,1", "--y", "1,-1")
    assert code == 0 and res["holds"]
    code, res, _ = call_json("birkhoff", "--norm", "euclidean", "--x", "1,0", "--normal", "1,-1")
    assert code == 0 and not res["holds"]


def test_subdiff_commands():
    base = ("--norm", "euclidean", "--function", ABS_X1, "--x", "0,0")
    code, res, _ = call_json("subdiff", "check", *base, "--v", "0.5,0")
    assert code == 0 and res["verdict"] == "member"
    code, res, _ = call_json("subdiff", "check", *base, "--v", "2,0")
    assert code == 1 and res["verdict"] != "member"
    code, res, _ = call_json("subdiff", "construct", *base, "--u", "1,0")
    assert code == 0 and np.allclose(res["w"], [1, 0])
    code, res, err = call_json("subdiff", "gradient", *base)
    assert code == 2 and "differentiable" in err
    code, res, _ = call_json("subdiff", "gradient", "--norm", "euclidean", "--x", "3,4",
                             "--function", '{"type":"norm"}')
    assert code == 0 and np.allclose(res["gradient"], [0.6, 0.8])


def test_rockafellar_command():
    good = '{"pairs":[{"x":[0,0],"w":[0,0]},{"x":[1,0],"w":[1,0]}]}'
    code, res, _ = call_json("rockafellar", "--norm", "euclidean", "--data", good)
    assert code == 0 and res["monotone"]
    # the potential is itself a valid function scenario
    code, chk, _ = call_json("subdiff", "check", "--norm", "euclidean", "--x", "1,0", "--v", "1,0",
                             "--function", json.dumps(res["potential"]))
    assert code == 0 and chk["verdict"] == "member"
    bad = '{"pairs":[{"x":[0,0],"w":[1,0]},{"x":[1,0],"w":[-1,0]}]}'
    code, res, _ = call_json("rockafellar", "--norm", "euclidean", "--data", bad)
    assert code == 1 and not res["monotone"] and sorted(res["cycle"]) == [0, 1]


def test_scenario_file(tmp_path):
    sc = {"norm": {"type": "ellipsoid", "A": [[1, 0], [0, 4]]}, "body": json.loads(SQUARE),
          "points": {"x": [3, 0]}, "tolerances": {"opt_gap": 1e-9}}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(sc))
    code, res, _ = call_json("project", "--scenario", str(path))
    assert code == 0 and res["distance"] == pytest.approx(2)
    # flags override the file
    code, res, _ = call_json("project", "--scenario", str(path), "--x", "0,3")
    assert res["distance"] == pytest.approx(4)


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["legendre", "--norm", "euclidean", "--x", "3,four"],
    ["legendre", "--norm", '{"type":"sup"}', "--x", "3,4"],
    ["legendre", "--norm", "{bad json", "--x", "3,4"],
    ["project", "--norm", "euclidean", "--x", "3,4"],
    ["project", "--norm", "euclidean", "--body", SQUARE, "--x", "3,4,5"],
    ["birkhoff", "--norm", "euclidean", "--x", "0,0", "--y", "1,0"],
    ["levelset", "--norm", "euclidean", "--x", "1,1", "--levels", "-1"],
])
def test_parse_errors_exit_2(argv, capsys):
    code, _, _ = call(*argv)
    assert code == 2


def test_nonconvergence_exit_3(tmp_path):
    sc = {"norm": {"type": "p", "p": 1.5}, "body": {"type": "polytope",
          "vertices": np.random.default_rng(0).standard_normal((30, 3)).tolist()},
          "x": [0.3, 0.2, 5], "tolerances": {"max_iter": 2}}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(sc))
    code, res, _ = call_json("project", "--scenario", str(path))
    assert code == 3 and res["certified"] is False


def test_determinism():
    argv = ("project", "--norm", '{"type":"p","p":1.5}', "--body", SQUARE, "--x", "2.5,1.7")
    assert call(*argv)[1] == call(*argv)[1]
    v = ("verify", "--suite", "rockafellar", "--seed", "3", "--scale", "0.05")
    assert call(*v)[1] == call(*v)[1]


def test_levelset_csv():
    code, out, _ = call("levelset", "--norm", "euclidean", "--body", SQUARE, "--levels", "0.5,1",
                        "--samples", "16")
    lines = out.strip().split("\n")
    assert code == 0 and lines[0] == "level,ray_index,x1,x2" and len(lines) == 33
    N, K = EuclideanNorm(2), Polytope(json.loads(SQUARE)["vertices"])
    for row in lines[1:]:
        level, k, *x = map(float, row.split(","))
        assert distance(N, K, x) == pytest.approx(level, abs=1e-9)


def test_levelset_default_rays_and_norm_only():
    N = WeightedPNorm(4, [1, 1])
    rows = levelset_rows(N, None, [2.0])
    assert len(rows) == 720
    assert all(float(N.evaluate(r[2:])) == pytest.approx(2) for r in rows)
    rows3 = levelset_rows(EuclideanNorm(3), None, [1.0], rays=5, seed=1)
    assert len(rows3) == 5 and len(rows3[0]) == 5


def test_verify_suite_example():
    code, res, _ = call_json("verify", "--suite", "legendre", "--seed", "7")
    assert code == 0 and res["failures"] == []
    assert res["cases_run"] > 0


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "minkowski", "legendre", "--norm", "euclidean",
                        "--x", "3,4"], capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["dual_norm"] == 5
