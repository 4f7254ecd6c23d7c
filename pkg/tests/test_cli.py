import json

import pytest

from alphamod.cli import default_config_path, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l.strip()]
    return code, out, json.loads(lines[-1])


# -- index --------------------------------------------------------------------------


def test_hardy_to_mod_example(capsys):
    code, out, doc = run(capsys, "index", "--stmt", "hardy-to-mod", "--p1", "1", "--p2", "1", "--q2", "inf",
                         "--alpha", "0", "--s2", "0", "--n", "1")
    assert code == 0 and doc["holds"] and doc["threshold"] == "0"


def test_index_B_example(capsys):
    code, out, doc = run(capsys, "index", "--stmt", "B", "--p", "1", "--q", "inf", "--n", "1")
    assert code == 0 and doc["value"] == "1"


def test_sequence_embedding_example_fails(capsys):
    code, out, doc = run(capsys, "index", "--stmt", "seq-embed", "--q1", "inf", "--s1", "0", "--q2", "1",
                         "--s2", "0", "--alpha", "0", "--n", "1")
    assert code == 3 and doc["holds"] is False


def test_negative_smoothness_is_accepted(capsys):
    code, out, doc = run(capsys, "index", "--stmt", "hardy-to-mod", "--p1", "2", "--p2", "2", "--q2", "inf",
                         "--alpha", "1/2", "--s2", "-1/4")
    assert code == 0 and doc["holds"]


@pytest.mark.parametrize("argv", [
    ["index", "--stmt", "A", "--p", "abc", "--q", "1"],
    ["index", "--stmt", "hardy-to-mod", "--p1", "1", "--p2", "1", "--q2", "1", "--alpha", "1", "--s2", "0"],
    ["index", "--stmt", "nonsense"],
])
def test_bad_index_input_exits_2(capsys, argv):
    assert main(argv) == 2


# -- verify-covering -----------------------------------------------------------------


def test_verify_covering_default(capsys):
    code, out, doc = run(capsys, "verify-covering", "--alpha", "0.5", "--kmax", "64")
    assert code == 0 and doc["passed"]
    assert sum(1 for line in out.splitlines() if " pass " in line) == 4


def test_verify_covering_gap(capsys):
    assert main(["verify-covering", "--c", "0.9", "--C", "0.91"]) == 3


def test_verify_covering_uniform_slope(capsys):
    code, out, doc = run(capsys, "verify-covering", "--alpha", "0")
    assert code == 0
    assert abs(doc["report"]["metrics"]["slope_first"]) <= 0.1


# -- norm -----------------------------------------------------------------------------


def test_norm_of_gaussian(capsys):
    code, out, doc = run(capsys, "norm", "--function", '{"kind": "gaussian"}', "--p", "2", "--L", "32",
                         "--N", "4096")
    assert code == 0 and doc["value"] == pytest.approx(2 ** -0.25, abs=1e-6)


# -- experiment ------------------------------------------------------------------------


def test_experiment_dilation(capsys, tmp_path):
    code, out, doc = run(capsys, "experiment", "--only", "dilation-scaling", "--out", str(tmp_path))
    assert code == 0 and doc["passed"]
    run_dir = tmp_path / next(p.name for p in tmp_path.iterdir())
    assert (run_dir / "report.json").exists() and (run_dir / "measurements.csv").exists()
    assert run_dir.name.startswith("dilation-scaling_") and run_dir.name.endswith("_seed0")


def test_corrupted_config_names_field(capsys, tmp_path):
    cfg = json.loads(default_config_path().read_text())
    cfg["covering"]["alpha"] = "1"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cfg))
    code = main(["experiment", str(path), "--out", str(tmp_path)])
    captured = capsys.readouterr()
    assert code == 2 and "alpha" in captured.out + captured.err


def test_unknown_experiment_is_usage_error(capsys, tmp_path):
    assert main(["experiment", "--only", "nope", "--out", str(tmp_path)]) == 2


def test_atom_runs_are_byte_identical(capsys, tmp_path):
    # a reduced sweep keeps this quick; determinism does not depend on the atom count
    cfg = json.loads(default_config_path().read_text())
    cfg["experiments"]["atom-bounds"].update({"num_atoms": 8, "size_range": [0.25, 4.0],
                                              "cases": {"0": [["sup", "1"]]}})
    path = tmp_path / "small.json"
    path.write_text(json.dumps(cfg))
    docs = []
    for label in ("a", "b"):
        main(["experiment", str(path), "--only", "atom-bounds", "--seed", "7", "--out", str(tmp_path / label)])
        capsys.readouterr()
        run_dir = next((tmp_path / label).iterdir())
        docs.append(((run_dir / "report.json").read_bytes(), (run_dir / "measurements.csv").read_bytes()))
    assert docs[0] == docs[1]
