import csv
import json

import pytest

from bubblekit.cli import EXIT_CONFIG, EXIT_IO, EXIT_SOLVER, RunManifest, main, manifest_path, sha256_file

WELL = {"r0": 1, "c": 1, "m": 2, "delta": 0.9}


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "flat.json").write_text(json.dumps({"N": 5, "p": 7 / 3, "q": 7 / 3}))
    (d / "well.json").write_text(json.dumps({"N": 5, "p": 7 / 3, "q": 7 / 3, "potential1": WELL, "potential2": WELL}))
    (d / "off.json").write_text(json.dumps({"N": 5, "p": 2.25, "q": 2.25}))
    (d / "broken.json").write_text("{not json")
    assert main(["ground-state", "--config", str(d / "flat.json"), "--out", str(d / "gs.table")]) == 0
    return d


def run(*args):
    return main([str(a) for a in args])


def load(path):
    with open(path) as fh:
        return json.load(fh)


# ground-state ---------------------------------------------------------------


def test_ground_state_writes_table_and_manifest(work):
    man = load(manifest_path(work / "gs.table"))
    assert man["command"] == "ground-state" and man["format_version"] == 1
    assert man["outputs"][str(work / "gs.table")] == sha256_file(work / "gs.table")
    assert man["config_hash"] and man["version"]


def test_ground_state_rerun_is_byte_identical(work, tmp_path):
    out = tmp_path / "again.table"
    assert run("ground-state", "--config", work / "flat.json", "--out", out) == 0
    assert sha256_file(out) == sha256_file(work / "gs.table")


def test_off_hyperbola_config(work, capsys, tmp_path):
    assert run("ground-state", "--config", work / "off.json", "--out", tmp_path / "x.table") == EXIT_CONFIG
    assert "defect" in capsys.readouterr().err


def test_unreachable_tolerance(work, tmp_path):
    assert run("ground-state", "--config", work / "flat.json", "--tol", "1e-10", "--out", tmp_path / "x.table") == EXIT_SOLVER


@pytest.mark.parametrize(
    "name,code",
    [("missing.json", EXIT_IO), ("broken.json", EXIT_CONFIG)],
)
def test_bad_config_files(work, tmp_path, name, code):
    assert run("ground-state", "--config", work / name, "--out", tmp_path / "x.table") == code


def test_missing_ground_state_table(work, tmp_path):
    rc = run("ansatz", "--config", work / "flat.json", "--gs", tmp_path / "none.table", "-k", 2, "--out", tmp_path / "a.csv")
    assert rc == EXIT_IO


# ansatz / energy ----------------------------------------------------------------


def test_ansatz_outputs_and_determinism(work, tmp_path):
    paths = []
    for i in range(2):
        out, rep = tmp_path / f"a{i}.csv", tmp_path / f"a{i}.json"
        args = ("ansatz", "--config", work / "flat.json", "--gs", work / "gs.table", "-k", 3, "--r", 10)
        assert run(*args, "--random-samples", 20, "--seed", 7, "--symmetric", "--out", out, "--report", rep) == 0
        paths.append((out, rep))
    assert sha256_file(paths[0][0]) == sha256_file(paths[1][0])
    summary = load(paths[0][1])
    assert summary["format_version"] == 1 and summary["star_norm"] > 0
    man = load(manifest_path(paths[0][0]))
    assert set(man["outputs"]) == {str(paths[0][0]), str(paths[0][1])}


def test_energy_with_lambda_sweep(work, tmp_path):
    out = tmp_path / "e.json"
    assert run("energy", "--config", work / "well.json", "--gs", work / "gs.table", "-k", 8, "--out", out, "--sweep-lambda", "0.5:3:0.25") == 0
    data = load(out)
    assert data["format_version"] == 1
    assert data["critical_point"]["lam"] == pytest.approx(data["constants"]["lambda0"], rel=1e-8)
    with open(tmp_path / "e.sweep.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["lambda", "F"] and len(rows) == 1 + data["lambda_sweep"]["points"] == 12


@pytest.mark.parametrize("spec", ["3:1:0.5", "a:b:c", "0:1:0"])
def test_energy_rejects_bad_sweep(work, tmp_path, spec):
    rc = run("energy", "--config", work / "well.json", "--gs", work / "gs.table", "-k", 4, "--out", tmp_path / "e.json", "--sweep-lambda", spec)
    assert rc == EXIT_CONFIG


# reduce / pohozaev ----------------------------------------------------------------


@pytest.fixture(scope="module")
def reduced(work):
    out = work / "phi.csv"
    rep = work / "red.json"
    assert main(["reduce", "--config", str(work / "well.json"), "--gs", str(work / "gs.table"), "-k", "2", "--out", str(out), "--report", str(rep)]) == 0
    return out, rep


def test_reduce_outputs(reduced):
    out, rep = reduced
    data = load(rep)
    assert data["format_version"] == 1
    assert data["contraction_factor"] < 1 and data["decay_bound"]["passed"]
    assert len(data["multipliers"]) == 2
    man = load(manifest_path(out))
    assert str(out) + ".grid.json" in man["outputs"]


def test_reduce_rejects_large_k(work, tmp_path):
    assert run("reduce", "--config", work / "well.json", "--gs", work / "gs.table", "-k", 17, "--out", tmp_path / "p.csv") == EXIT_CONFIG


def test_pohozaev_on_reduced_fields(work, reduced, tmp_path):
    out = tmp_path / "poh.json"
    assert run("pohozaev", "--gs", work / "gs.table", "--fields", reduced[0], "--domain", "ball:8.3,0.5,0.2:1.5", "--level", 6, "--out", out) == 0
    data = load(out)
    imbalance = data["translation"]["lhs"] - data["translation"]["rhs"]
    assert abs(imbalance - data["translation_defect"]["defect"]) <= 0.01 * data["translation_defect"]["bound"]


def test_pohozaev_self_check(work, tmp_path):
    out = tmp_path / "poh.json"
    assert run("pohozaev", "--gs", work / "gs.table", "--domain", "ball:0.5:3", "--level", 8, "--out", out) == 0
    data = load(out)
    assert data["translation"]["residual"] <= 1e-4 and data["dilation"]["residual"] <= 1e-4


@pytest.mark.parametrize("extra", [("--domain", "cube:1"), ("--axis", "6"), ("--axis", "0")])
def test_pohozaev_usage_errors(work, tmp_path, extra):
    assert run("pohozaev", "--gs", work / "gs.table", *extra, "--out", tmp_path / "p.json") == EXIT_CONFIG


def test_pohozaev_missing_fields(work, tmp_path):
    assert run("pohozaev", "--gs", work / "gs.table", "--fields", tmp_path / "none.csv", "--out", tmp_path / "p.json") == EXIT_IO


# sweep ----------------------------------------------------------------------------


def read_sweep(path):
    with open(path) as fh:
        return list(csv.reader(fh))


@pytest.mark.parametrize("ks", ["", ",", "a,b"])
def test_sweep_bad_k_list(work, tmp_path, ks):
    assert run("sweep", "--config", work / "flat.json", "--gs", work / "gs.table", "--which", "Rk_norm", "--ks", ks, "--out", tmp_path / "s.csv") == EXIT_CONFIG


def test_sweep_flat_single_bubble_is_zero(work, tmp_path):
    out = tmp_path / "s.csv"
    assert run("sweep", "--config", work / "flat.json", "--gs", work / "gs.table", "--which", "Rk_norm", "--ks", "1", "--out", out) == 0
    rows = read_sweep(out)
    assert rows[0] == ["k", "mu", "x", "value"]
    assert float(rows[1][3]) == 0.0
    assert rows[-1][:2] == ["# slope", "undefined"]


def test_sweep_interaction_rows(work, tmp_path):
    out = tmp_path / "s.csv"
    assert run("sweep", "--config", work / "well.json", "--gs", work / "gs.table", "--which", "interaction", "--ks", "8,16,32", "--out", out) == 0
    rows = read_sweep(out)
    body = [r for r in rows[1:] if not r[0].startswith("#")]
    assert [int(r[0]) for r in body] == [8, 16, 32]
    assert all(float(r[3]) > 0 for r in body)
    slope = float(rows[-1][1])
    assert slope < 0


# report ---------------------------------------------------------------------------


def test_report_aggregates_verdicts(work, tmp_path):
    res = tmp_path / "verdicts.json"
    res.write_text(json.dumps({"format_version": 1, "verdicts": [{"name": "toy", "passed": True, "detail": "ok"}]}))
    man = RunManifest("toy", None, None, {})
    man.add_output(res)
    man.write(manifest_path(res))
    out = tmp_path / "report.json"
    assert run("report", manifest_path(res), manifest_path(work / "gs.table"), "--out", out) == 0
    data = load(out)
    assert data["format_version"] == 1 and data["verdicts"][0]["passed"]
    assert all("manifest" in r for r in data["runs"])
    assert "PASS toy" in (tmp_path / "report.md").read_text()


def test_report_detects_corruption(tmp_path, capsys):
    f = tmp_path / "x.csv"
    f.write_text("a,b\n1,2\n")
    man = RunManifest("toy", None, None, {})
    man.add_output(f)
    man.write(manifest_path(f))
    f.write_text("a,b\n1,3\n")
    assert run("report", tmp_path, "--out", tmp_path / "r.json") == EXIT_IO
    assert "checksum mismatch" in capsys.readouterr().err


def test_report_lists_missing_inputs(tmp_path, capsys):
    rc = run("report", tmp_path / "nope.manifest.json", "--gs", tmp_path / "gs.table", "--out", tmp_path / "r.json")
    assert rc == EXIT_IO
    err = capsys.readouterr().err
    assert "nope.manifest.json" in err and "gs.table" in err
