import json

import pytest

from roughiso.libs.utils import read_ndjson
from roughiso.main import main


def _write(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def _output(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


@pytest.fixture
def markov_instance(tmp_path):
    return _write(
        tmp_path / "instance.json",
        {
            "A": {"points": [0, 1]},
            "B": {"points": [0, 5]},
            "constants": {"M": 5, "F": 0, "R": 0},
            "mapping": {"domain": [0, 1], "image": [0, 5], "codomain": [0, 5]},
        },
    )


def test_sample_is_deterministic(capsys):
    assert main(["sample", "--seed", "1", "--points", "10"]) == 0
    first = _output(capsys)
    assert main(["sample", "--seed", "1", "--points", "10"]) == 0
    assert _output(capsys) == first
    assert len(first["points"]) == 10 and first["points"][0] == 0


def test_usage_errors_exit_with_two():
    assert main(["sample"]) == 2
    assert main(["sample", "--seed", "-1"]) == 2
    assert main(["no-such-command"]) == 2


def test_verify_accepts_and_rejects(markov_instance, capsys):
    assert main(["verify", "--kind", "markov", "--instance", markov_instance]) == 0
    assert _output(capsys)["ok"] is True
    assert main(["verify", "--kind", "markov", "--instance", markov_instance, "--M", "4"]) == 1
    report = _output(capsys)
    assert report["violation"]["kind"] == "AdjacencyDistortion"
    assert report["cut_point"] == "0"


def test_invalid_instance_is_a_usage_error(tmp_path):
    path = _write(tmp_path / "bad.json", {"A": {"points": [0]}, "B": {"points": [0]}, "constants": {"M": 1, "Q": 2}})
    assert main(["verify", "--kind", "ri", "--instance", path]) == 2


def test_construct_then_verify(tmp_path):
    out = tmp_path / "construction.json"
    stages = tmp_path / "stages.ndjson"
    argv = ["construct", "--n", "16", "--M", "8", "--F", "8", "--R", "8", "--K", "8"]
    code = main(argv + ["--seed", "3", "--out", str(out), "--stages", str(stages)])
    assert code in (0, 1)
    result = json.loads(out.read_text())
    assert result["success"] == (code == 0)
    assert read_ndjson(stages)[0]["stage"] == 0
    if code == 0:
        assert main(["verify", "--kind", "markov", "--instance", str(out)]) == 0
    else:
        assert result["failure_reason"] in {"E0", "comb", "bound", "residual"}


def test_oracle_minimal_and_exists(markov_instance, capsys):
    assert main(["oracle", "minimal-M", "--instance", markov_instance, "--family", "markov"]) == 0
    assert _output(capsys) == {"family": "markov", "M": "5"}
    assert main(["oracle", "exists", "--instance", markov_instance, "--family", "markov"]) == 0
    assert _output(capsys)["mapping"]["image"] == [0, 5]


def test_oracle_counterexample(capsys):
    assert main(["oracle", "counterexample", "--L", "1"]) == 0
    payload = _output(capsys)
    assert payload["A"]["points"] == [0, 1, 2, 3]
    assert payload["witness"]["image"] == [0, 1, 3, 2]


def test_lattice_dump(tmp_path, capsys):
    path = _write(
        tmp_path / "lattice.json",
        {"A": {"points": [0, 1]}, "B": {"points": [0, 1]}, "constants": {"M": 2, "D": 1, "R": 1}},
    )
    assert main(["lattice", "--instance", path, "--x", "0", "--y", "1"]) == 0
    payload = _output(capsys)
    assert payload["elements"] == [[0, 0], [0, 1]]
    assert payload["covariance"] == "0"
    assert "samples" not in payload

    assert main(["lattice", "--instance", path, "--samples", "5", "--seed", "3"]) == 0
    sampled = _output(capsys)
    assert len(sampled["samples"]) == 5
    assert all(s in sampled["elements"] for s in sampled["samples"])


def test_decompose_input(tmp_path, capsys):
    path = _write(tmp_path / "points.json", {"points": [0, 1, 4, 5, 6, 7, 12, 13, 14]})
    assert main(["decompose", "--input", path, "--M", "2", "--K", "2"]) == 0
    payload = _output(capsys)
    assert len(payload["blocks"]) == 2 and payload["structure"] is None


def test_experiment_run(tmp_path, capsys):
    spec = _write(
        tmp_path / "spec.json",
        {"name": "comb", "kind": "comb_tails", "grid": [{"m": 1, "a": 2, "s": 1}], "trials": 20, "seed": 4},
    )
    assert main(["experiment", "run", spec]) == 0
    record = _output(capsys)
    assert record["trials"] == 20 and "wall_time" not in record

    report = tmp_path / "out" / "comb.ndjson"
    assert main(["experiment", "run", spec, "--out", str(report)]) == 0
    assert read_ndjson(report)[0]["successes"] == record["successes"]
    assert report.with_suffix(".csv").exists()


def test_experiment_defaults_fill_missing_fields(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "conf").mkdir()
    (tmp_path / "conf" / "settings.yaml").write_text("EXPERIMENT_DEFAULTS:\n  trials: 7\n  seed: 3\n")
    spec = _write(tmp_path / "spec.json", {"name": "comb", "kind": "comb_tails", "grid": [{"m": 1, "a": 2, "s": 1}]})
    assert main(["experiment", "run", spec]) == 0
    assert _output(capsys)["trials"] == 7
