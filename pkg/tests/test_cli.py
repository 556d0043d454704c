"""End-to-end CLI: exit codes, file formats, manifests, reproducibility."""

import json
import math

import numpy as np
import pytest

from horocvx.cli import main
from horocvx.sphere_grid import load_field, make_grid, save_field

MANIFEST_KEYS = {"command", "parameters", "inputs", "outputs", "seed", "version", "grid"}


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def mkball(tmp_path, name, radius, grid="s1:64"):
    out = tmp_path / name
    rc = main(
        ["mkfield", "--grid", grid, "--ball", "--radius", str(radius), "--out", str(out)]
    )
    assert rc == 0
    return out


# ---------------------------------------------------------------------------
# mkfield and the field file format


def test_mkfield_ball_schema_and_manifest(tmp_path):
    out = mkball(tmp_path, "ball.json", math.log(2.0))
    obj = read_json(out)
    assert obj["n"] == 1
    assert obj["grid"] == {"type": "uniform_s1", "nodes": 64}
    assert obj["kind"] == "support"
    assert np.allclose(obj["values"], 2.0, atol=1e-15)
    manifest = read_json(str(out) + ".manifest.json")
    assert set(manifest) == MANIFEST_KEYS
    assert manifest["command"] == "mkfield"
    assert manifest["outputs"] == [str(out)]
    assert manifest["inputs"] == {}
    assert manifest["grid"] == {"type": "uniform_s1", "nodes": 64}


def test_mkfield_s2_and_center(tmp_path):
    out = tmp_path / "ball2.json"
    rc = main(
        [
            "mkfield",
            "--grid",
            "s2:8x16",
            "--ball",
            "--center",
            "0.3,0.0,0.1",
            "--radius",
            "0.5",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    grid, values, kind = load_field(out)
    assert grid.resolution == (8, 16)
    assert kind == "support"
    assert np.all(values > 0.0)


def test_mkfield_random_is_seeded(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    c = tmp_path / "c.json"
    for out, seed in ((a, "5"), (b, "5"), (c, "6")):
        rc = main(
            ["mkfield", "--grid", "s1:64", "--random", "--seed", seed, "--out", str(out)]
        )
        assert rc == 0
    assert read_json(a)["values"] == read_json(b)["values"]
    assert read_json(a)["values"] != read_json(c)["values"]


def test_mkfield_usage_errors(tmp_path):
    out = str(tmp_path / "x.json")
    assert main(["mkfield", "--grid", "s1:64", "--out", out]) == 2  # no mode
    assert main(["mkfield", "--grid", "s1:63", "--ball", "--radius", "1", "--out", out]) == 2
    assert main(["mkfield", "--grid", "s2:8x20", "--ball", "--radius", "1", "--out", out]) == 2
    assert main(["mkfield", "--grid", "huh", "--ball", "--radius", "1", "--out", out]) == 2
    assert main(["mkfield", "--grid", "s1:64", "--ball", "--out", out]) == 2  # no radius
    assert (
        main(["mkfield", "--grid", "s1:64", "--constant", "-1.0", "--out", out]) == 2
    )


def test_cli_arg_parsing_exit_codes(tmp_path):
    assert main([]) == 2
    assert main(["not-a-command"]) == 2
    assert main(["--version"]) == 0


# ---------------------------------------------------------------------------
# pipelines through files


def test_psum_pipeline_closed_form(tmp_path):
    K = mkball(tmp_path, "K.json", 0.4)
    L = mkball(tmp_path, "L.json", 0.9)
    out = tmp_path / "sum.json"
    rc = main(
        ["psum", "--a", "0.7", "--K", str(K), "--p", "1.5", "--b", "0.6", "--L", str(L), "--out", str(out)]
    )
    assert rc == 0
    _, values, _ = load_field(out)
    want = (0.7 * math.exp(1.5 * 0.4) + 0.6 * math.exp(1.5 * 0.9)) ** (1.0 / 1.5)
    assert np.allclose(values, want, atol=1e-12)
    manifest = read_json(str(out) + ".manifest.json")
    assert set(manifest["inputs"]) == {str(K), str(L)}
    for digest in manifest["inputs"].values():
        assert len(digest) == 64


def test_dilate_pipeline(tmp_path):
    K = mkball(tmp_path, "K.json", 0.5)
    out = tmp_path / "dilated.json"
    assert main(["dilate", "--a", "2.0", "--p", "1.0", "--K", str(K), "--out", str(out)]) == 0
    _, values, _ = load_field(out)
    assert np.allclose(values, 2.0 * math.exp(0.5), atol=1e-13)


def test_quermass_report(tmp_path):
    r = math.log(2.0)
    K = mkball(tmp_path, "K.json", r)
    out = tmp_path / "quermass.json"
    assert main(["quermass", "--K", str(K), "--out", str(out)]) == 0
    rep = read_json(out)
    assert rep["n"] == 1
    # n=1 ball: W_0 = 2 pi (cosh r - 1), W_1 = 2 pi (1 - e^{-r}).
    assert rep["quermass"]["W0"]["value"] == pytest.approx(
        2.0 * math.pi * (math.cosh(r) - 1.0), abs=1e-10
    )
    assert rep["quermass"]["W1"]["value"] == pytest.approx(math.pi, abs=1e-10)
    assert rep["quermass"]["W0"]["mean_radius"] == pytest.approx(r, abs=1e-10)
    assert rep["quermass"]["W1"]["method"] in ("ball-closed-form", "closed-form-k=n")


def test_steiner_kinds(tmp_path):
    K = mkball(tmp_path, "K.json", 0.6, grid="s2:8x16")
    for kind in ("shifted", "classical", "weighted"):
        out = tmp_path / f"steiner-{kind}.json"
        assert main(
            ["steiner", "--K", str(K), "--rho", "0.3", "--kind", kind, "--out", str(out)]
        ) == 0
        rep = read_json(out)
        assert rep["kind"] == kind
        if kind == "weighted":
            assert abs(rep["residual_integral_form"]) < 1e-8
            assert abs(rep["residual_closed_form"]) < 1e-8
        else:
            assert all(abs(v) < 1e-8 for v in rep["shifted_residuals"])
            assert abs(rep["classical_residual"]) < 1e-8


def test_weighted_report(tmp_path):
    r = 0.5
    K = mkball(tmp_path, "K.json", r)
    out = tmp_path / "weighted.json"
    assert main(["weighted", "--K", str(K), "--out", str(out)]) == 0
    rep = read_json(out)
    assert rep["weighted_volume"] == pytest.approx(
        math.pi * math.sinh(r) ** 2, abs=1e-10
    )
    assert rep["S"] == pytest.approx(math.sinh(r), abs=1e-10)
    assert all(abs(v) < 1e-10 for v in rep["minkowski_classical_residuals"])


def test_measure_report(tmp_path):
    K = mkball(tmp_path, "K.json", math.log(2.0))
    out = tmp_path / "measure.json"
    assert main(["measure", "--K", str(K), "--p", "1.0", "--k", "0", "--out", str(out)]) == 0
    rep = read_json(out)
    assert rep["kind"] == "measure-density"
    assert rep["p"] == 1.0 and rep["k"] == 0
    # phi = 2, n = 1, p = 1, k = 0: density 2^{-1} (3/4) = 3/8 everywhere.
    assert np.allclose(rep["values"], 0.375, atol=1e-12)
    assert rep["total"] == pytest.approx(2.0 * math.pi * 0.375, abs=1e-10)


def test_kw_report(tmp_path):
    K = mkball(tmp_path, "K.json", math.log(2.0))
    grid = make_grid(1, 64)
    theta = grid._cache["theta"]
    fpath = tmp_path / "f.json"
    save_field(fpath, grid, 1.0 + 0.5 * np.cos(theta), kind="data")
    out = tmp_path / "kw.json"
    assert main(["kw", "--K", str(K), "--f", str(fpath), "--k", "0", "--out", str(out)]) == 0
    rep = read_json(out)
    assert rep["coordinate_integrals"][0] == pytest.approx(math.pi / 4.0, abs=1e-8)
    assert rep["general_identity_residual"] < 1e-10
    assert rep["max_abs_coordinate_integral"] == pytest.approx(math.pi / 4.0, abs=1e-8)


def test_ballsolve_report(tmp_path):
    out = tmp_path / "balls.json"
    rc = main(
        ["ballsolve", "--n", "2", "--k", "0", "--p", "4.0", "--gamma", "0.02", "--out", str(out)]
    )
    assert rc == 0
    rep = read_json(out)
    assert rep["case"] == "two-roots"
    assert rep["gamma0"] == pytest.approx(1.0 / 27.0, abs=1e-12)
    assert rep["t0"] == pytest.approx(math.sqrt(3.0), abs=1e-12)
    c1, c2 = rep["c_values"]
    assert c1 < math.sqrt(3.0) < c2
    assert all(r <= 1e-12 for r in rep["residuals"])


def test_assumption_h_report(tmp_path):
    grid = make_grid(2, 8)
    z = grid.nodes
    fpath = tmp_path / "f.json"
    save_field(fpath, grid, 1.0 + 0.05 * (3.0 * z[:, 2] ** 2 - 1.0), kind="data")
    out = tmp_path / "assumption.json"
    assert main(["assumption-h", "--f", str(fpath), "--k", "1", "--p", "1.0", "--out", str(out)]) == 0
    rep = read_json(out)
    assert rep["passes"] is True
    assert rep["regime"] == 5


def test_project_report(tmp_path):
    K = mkball(tmp_path, "K.json", math.log(2.0))
    out = tmp_path / "hat.json"
    assert main(["project", "--K", str(K), "--out", str(out)]) == 0
    rep = read_json(out)
    assert rep["kind"] == "euclidean-support"
    assert rep["euclidean_volume"] == pytest.approx(4.0 * math.pi, abs=1e-10)


# ---------------------------------------------------------------------------
# flow subcommand


def test_flow_converged_run(tmp_path):
    grid = make_grid(1, 32)
    theta = grid._cache["theta"]
    phi0 = tmp_path / "phi0.json"
    save_field(phi0, grid, 2.0 * (1.0 + 0.04 * np.cos(2 * theta)), kind="support")
    cfg = {
        "n": 1,
        "k": 0,
        "p": 0.0,
        "initial": str(phi0),
        "eps_stop": 1e-4,
        "max_steps": 50000,
    }
    cfg_path = tmp_path / "flow.json"
    cfg_path.write_text(json.dumps(cfg))
    trace = tmp_path / "trace.csv"
    terminal = tmp_path / "terminal.json"
    rc = main(
        ["flow", "--config", str(cfg_path), "--out", str(trace), "--terminal", str(terminal)]
    )
    assert rc == 0
    rep = read_json(terminal)
    assert rep["status"] == "converged"
    assert rep["gamma_variation"] <= 1e-3
    assert rep["kind"] == "support"
    header = trace.read_text().splitlines()[0]
    assert header.startswith("t,dt,Wk,Jp")
    manifest = read_json(str(trace) + ".manifest.json")
    assert sorted(manifest["outputs"]) == sorted([str(trace), str(terminal)])
    assert str(phi0) in manifest["inputs"]


def test_flow_unconverged_exit_code(tmp_path):
    grid = make_grid(1, 32)
    theta = grid._cache["theta"]
    phi0 = tmp_path / "phi0.json"
    save_field(phi0, grid, 2.0 * (1.0 + 0.04 * np.cos(2 * theta)), kind="support")
    cfg = {"n": 1, "k": 0, "p": 0.0, "initial": str(phi0), "max_steps": 3}
    cfg_path = tmp_path / "flow.json"
    cfg_path.write_text(json.dumps(cfg))
    rc = main(["flow", "--config", str(cfg_path), "--out", str(tmp_path / "t.csv")])
    assert rc == 1


def test_flow_config_errors(tmp_path):
    missing = tmp_path / "nope.json"
    assert main(["flow", "--config", str(missing), "--out", str(tmp_path / "t.csv")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["flow", "--config", str(bad), "--out", str(tmp_path / "t.csv")]) == 2
    nokeys = tmp_path / "nokeys.json"
    nokeys.write_text(json.dumps({"n": 1}))
    assert main(["flow", "--config", str(nokeys), "--out", str(tmp_path / "t.csv")]) == 2


# ---------------------------------------------------------------------------
# verify subcommand


def test_verify_suite_exit_and_csv(tmp_path):
    out = tmp_path / "records.csv"
    rc = main(["verify", "bm_balls", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "suite,case,lhs,rhs,gap,equality_expected,pass"
    assert all(line.split(",")[-1] == "true" for line in lines[1:])
    manifest = read_json(str(out) + ".manifest.json")
    assert manifest["command"] == "verify"


def test_verify_failure_exit_code(tmp_path):
    # An impossible tolerance forces failures and exit code 1.
    rc = main(["verify", "bm_balls", "--tol", "-1.0"])
    assert rc == 1


def test_verify_rejects_unknown_suite():
    assert main(["verify", "nonsense"]) == 2


# ---------------------------------------------------------------------------
# error paths and reproducibility


def test_missing_input_file(tmp_path):
    out = str(tmp_path / "out.json")
    rc = main(["quermass", "--K", str(tmp_path / "missing.json"), "--out", out])
    assert rc == 2


def test_corrupt_input_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert main(["quermass", "--K", str(bad), "--out", str(tmp_path / "o.json")]) == 2


def test_nonconvex_input_is_a_runtime_error(tmp_path):
    grid = make_grid(1, 64)
    theta = grid._cache["theta"]
    bad = tmp_path / "bad.json"
    save_field(bad, grid, 2.2 * (1.0 + 0.05 * np.cos(3 * theta)), kind="support")
    rc = main(["steiner", "--K", str(bad), "--rho", "0.3", "--out", str(tmp_path / "o.json")])
    assert rc == 1


def test_reruns_are_bit_identical(tmp_path):
    args = [
        "mkfield", "--grid", "s1:64", "--random", "--seed", "3",
        "--out", str(tmp_path / "f.json"),
    ]
    assert main(args) == 0
    first = (tmp_path / "f.json").read_bytes()
    first_manifest = (tmp_path / "f.json.manifest.json").read_bytes()
    assert main(args) == 0
    assert (tmp_path / "f.json").read_bytes() == first
    assert (tmp_path / "f.json.manifest.json").read_bytes() == first_manifest
