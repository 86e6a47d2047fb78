import json

import pytest
import yaml

from qgnn_lab.cli import main
from qgnn_lab.config import ConfigError, RunConfig, emit_config, parse_config
from qgnn_lab.experiments import DynamicsConfig, GhzConfig


def test_minimal_config_fills_defaults():
    rc = parse_config("seed: 4\n", experiment="dynamics")
    assert rc == RunConfig("dynamics", seed=4, settings=DynamicsConfig())
    echoed = yaml.safe_load(emit_config(rc))
    assert echoed["settings"]["batch"] == 15 and echoed["settings"]["optimizer"]["lr"] == 0.02


@pytest.mark.parametrize("experiment", ["dynamics", "ghz", "cluster", "isomorphism"])
def test_emit_and_reload_is_a_fixpoint(experiment):
    rc = parse_config("seed: 9\nthreads: 2\n", experiment=experiment)
    text = emit_config(rc)
    again = parse_config(text)
    assert again == rc
    assert emit_config(again) == text


@pytest.mark.parametrize("text,fragment", [
    ("experiment: cluster\nsettings:\n  shots: -1\n", "line 3: field 'settings.shots'"),
    ("experiment: ghz\nsettings:\n  optimizer:\n    lr: 0\n", "line 4: field 'settings.optimizer.lr'"),
    ("experiment: ghz\ncolour: red\n", "line 2: unknown key 'colour'"),
    ("experiment: ghz\nsettings:\n  graph:\n    shape: ring\n", "unknown key 'settings.graph.shape'"),
    ("experiment: ghz\nsettings:\n  graph:\n    kind: star\n", "field 'settings.graph.kind'"),
    ("experiment: ghz\nseed: -2\n", "line 2: field 'seed'"),
    ("experiment: ghz\nseed: 1.5\n", "field 'seed' expects int"),
    ("experiment: ghz\nsettings:\n  depth: 2\n  depth: 3\n", "duplicate key 'settings.depth'"),
    ("experiment: warp\n", "field 'experiment'"),
    ("seed: 1\n", "missing required field 'experiment'"),
    ("- 1\n- 2\n", "must be a mapping"),
    ("experiment: [ghz\n", "malformed"),
])
def test_config_errors_name_field_and_line(text, fragment):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert fragment in str(info.value)


def test_flag_overrides_and_conflicts():
    rc = parse_config("experiment: ghz\nseed: 1\nout: a\n", seed=5, out="b", threads=0)
    assert (rc.seed, rc.out, rc.threads) == (5, "b", 0)
    with pytest.raises(ConfigError, match="command line"):
        parse_config("experiment: ghz\n", experiment="cluster")
    with pytest.raises(ConfigError, match="seed"):
        parse_config("", experiment="ghz", seed=-1)


def test_exponent_floats_and_edges():
    rc = parse_config("experiment: ghz\nsettings:\n  optimizer: {eps: 1e-7}\n"
                      "  graph: {kind: edges, n: 3, edges: [[0, 1], [1, 2, 0.5]]}\n")
    assert rc.settings.optimizer.eps == 1e-7
    assert rc.settings.graph.build().weights == {(0, 1): 1.0, (1, 2): 0.5}
    assert isinstance(rc.settings, GhzConfig)


def test_cli_ghz_smoke(tmp_path, capsys):
    cfg = tmp_path / "ghz.yaml"
    cfg.write_text("settings:\n  graph: {kind: path, n: 3}\n  depth: 2\n  optimizer: {steps: 5}\n")
    out = tmp_path / "run"
    assert main(["ghz", "--config", str(cfg), "--out", str(out), "--seed", "1"]) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("ghz: final_loss=") and "fidelity=" in line
    rec = json.loads((out / "result.json").read_text())
    assert "fidelity" in rec["metrics"] and rec["seed"] == 1
    assert rec["config"]["settings"]["depth"] == 2
    assert set(rec["meta"]) >= {"timestamp", "host"}
    assert (out / "trace.csv").read_text().startswith("iteration,loss,wall_ms,p0")
    assert sorted(p.name for p in out.iterdir()) == ["result.json", "trace.csv"]


def test_cli_isomorphism_is_byte_identical_modulo_meta(tmp_path):
    cfg = tmp_path / "iso.yaml"
    cfg.write_text("experiment: isomorphism\nsettings:\n  n: 5\n  n_train: 6\n  n_val: 4\n"
                   "  n_test: 4\n  optimizer: {max_evals: 15}\n")
    texts = []
    for name in ("a", "b"):
        assert main(["isomorphism", "--config", str(cfg), "--out", str(tmp_path / name)]) == 0
        rec = json.loads((tmp_path / name / "result.json").read_text())
        rec.pop("meta")
        rec["config"].pop("out")
        texts.append(json.dumps(rec, sort_keys=True))
    assert texts[0] == texts[1]
    assert (tmp_path / "a" / "pairs.csv").read_text() == (tmp_path / "b" / "pairs.csv").read_text()


def test_cli_cluster_writes_histogram(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("settings:\n  optimizer: {steps: 2}\n")
    assert main(["cluster", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "histogram.csv").read_text().startswith("energy,probability\n")


def test_cli_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["teleport"])
    assert info.value.code == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("settings:\n  shots: -3\n")
    assert main(["cluster", "--config", str(bad)]) == 2
    assert "shots" in capsys.readouterr().err
    assert main(["ghz", "--config", str(tmp_path / "missing.yaml")]) == 2


def test_cli_experiment_failure_exit_code(tmp_path, capsys):
    cfg = tmp_path / "g.yaml"
    cfg.write_text("settings:\n  graph: {kind: path, n: 16}\n")
    assert main(["dynamics", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "dense" in capsys.readouterr().err


def test_print_config(capsys):
    assert main(["ghz", "--print-config", "--seed", "3"]) == 0
    assert yaml.safe_load(capsys.readouterr().out)["seed"] == 3
