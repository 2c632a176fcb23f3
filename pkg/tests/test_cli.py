import json
import os

import pytest

from helpers import MAX_METHOD, TOY_CORPUS
from hierarchynet.cli import main
from hierarchynet.modules.runStore import get_runs_dir, new_run_dir, resolve_run_dir
from hierarchynet.utils.config import PRESETS, RunConfig, resolve_run_config
from hierarchynet.utils.env import env_int, load_env_from_known_locations, read_env_file
from hierarchynet.utils.errors import ConfigError

TINY_FLAGS = ["--preset", "toy", "--dims", "8", "--layers", "1", "--heads", "2", "--epochs", "1",
              "--batch-size", "2", "--max-steps", "1"]


@pytest.fixture
def method_file(tmp_path):
    path = tmp_path / "Max.java"
    path.write_text(MAX_METHOD, encoding="utf-8")
    return path


def json_output(capsys):
    return json.loads(capsys.readouterr().out)


# ---------------------------------------------------------------------------------------
# commands

def test_version(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip()


@pytest.mark.parametrize("argv", [["train"], ["inspect", "x", "--layer", "tokens"], ["bogus"]])
def test_usage_errors_exit_1(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1


def test_extract_toy_corpus(tmp_path, capsys):
    out = tmp_path / "hcr.jsonl"
    assert main(["extract", str(TOY_CORPUS), str(out)]) == 0
    records = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
    assert len(records) == 32
    assert records[0]["id"] == "toy-01"
    assert records[0]["summary"] == "returns the larger of two integers."
    assert {"linear", "subtrees", "graph", "alignment"} <= set(records[0])
    assert all(not e["type"].endswith("_rev") for e in records[0]["graph"]["edges"])
    manifest = json.loads((tmp_path / "hcr.manifest.json").read_text(encoding="utf-8"))
    assert manifest["accepted"] == 32 and manifest["skipped"] == 0
    assert "32 records" in capsys.readouterr().out


def test_extract_in_worker_pool(tmp_path):
    out = tmp_path / "hcr.jsonl"
    assert main(["extract", str(TOY_CORPUS), str(out), "--workers", "2", "--edges", "ast,cd",
                 "--reverse-edges"]) == 0
    record = json.loads(out.read_text(encoding="utf-8").splitlines()[0])
    assert {e["type"] for e in record["graph"]["edges"]} <= {"AST", "CD", "AST_rev", "CD_rev"}


def test_inspect_ast(method_file, capsys):
    assert main(["inspect", str(method_file)]) == 0
    tree = json_output(capsys)
    assert tree["root"] == 0
    assert tree["nodes"][0]["node_type"] == "method_declaration"


def test_inspect_subtrees(method_file, capsys):
    assert main(["inspect", str(method_file), "--layer", "subtrees"]) == 0
    data = json_output(capsys)
    assert len(data["subtrees"]) == 5
    part = data["partition"]
    assert sum(part["subtree_sizes"]) + part["reduced_tree_size"] == part["tree_size"]

    assert main(["inspect", str(method_file), "--layer", "subtrees", "--format", "dot"]) == 0
    assert capsys.readouterr().out.startswith("digraph")


def test_inspect_graph(method_file, capsys):
    assert main(["inspect", str(method_file), "--layer", "graph"]) == 0
    assert capsys.readouterr().out.startswith("digraph hcr {")
    assert main(["inspect", str(method_file), "--layer", "graph", "--format", "json", "--edges", "ast,df"]) == 0
    data = json_output(capsys)
    assert not any(e["type"].startswith(("CD", "NS")) for e in data["edges"])


def test_inspect_gates_needs_a_run(method_file, tmp_path):
    assert main(["inspect", str(method_file), "--layer", "gates"]) == 2
    assert main(["inspect", str(method_file), "--layer", "gates", "--run", str(tmp_path / "absent")]) == 2


def test_unsupported_method_exits_2(tmp_path):
    path = tmp_path / "Lambda.java"
    path.write_text("void f() { Runnable r = () -> run(); }", encoding="utf-8")
    assert main(["inspect", str(path)]) == 2


@pytest.mark.parametrize("argv,code", [
    (["extract", "missing.jsonl", "out.jsonl"], 2),
    (["train", str(TOY_CORPUS), "--preset", "no-such-preset"], 1),
    (["extract", str(TOY_CORPUS), "out.jsonl", "--edges", "ast,xyz"], 1),
    (["ablate", str(TOY_CORPUS), "--rows", "one,two"], 1),
    (["evaluate", "no-such-run", str(TOY_CORPUS)], 2),
])
def test_error_exit_codes(tmp_path, monkeypatch, argv, code):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == code


def test_train_evaluate_and_gates(toy_file, method_file, tmp_path, capsys):
    run_dir = tmp_path / "run"
    assert main(["train", str(toy_file), "--run-dir", str(run_dir), *TINY_FLAGS]) == 0
    assert (run_dir / "best.ckpt.json").exists()
    capsys.readouterr()

    assert main(["evaluate", str(run_dir), str(toy_file), "--split", "train", "--format", "json"]) == 0
    report = json_output(capsys)
    assert report["count"] == 4
    assert (run_dir / "eval_train.json").exists()

    assert main(["inspect", str(method_file), "--layer", "gates", "--run", str(run_dir)]) == 0
    out = capsys.readouterr().out
    gates = json.loads(out[:out.rindex("}") + 1])
    assert gates["mode"] == "scalar"
    assert 0.0 < gates["gates"][0]["lambda"] < 1.0


def test_ablate_selected_rows(toy_file, tmp_path, capsys):
    out_dir = tmp_path / "ablation"
    assert main(["ablate", str(toy_file), "--rows", "1,3", "--out-dir", str(out_dir), *TINY_FLAGS]) == 0
    rows = json.loads((out_dir / "ablation.json").read_text(encoding="utf-8"))
    assert [r["row"] for r in rows] == [1, 3]
    assert "representation" in capsys.readouterr().out


def test_convert_command(tmp_path):
    src = tmp_path / "deepcom"
    src.mkdir()
    (src / "train.code").write_text(MAX_METHOD + "\n", encoding="utf-8")
    (src / "train.comment").write_text("returns the max\n", encoding="utf-8")
    assert main(["convert", "deepcom", str(src), str(tmp_path / "out.jsonl")]) == 0
    assert main(["convert", "deepcom", str(tmp_path / "empty"), str(tmp_path / "out.jsonl")]) == 2


def test_runs_listing(tmp_path, capsys):
    parent = tmp_path / "parent"
    (parent / "first").mkdir(parents=True)
    (parent / "first" / "run_config.json").write_text("{}", encoding="utf-8")
    assert main(["runs", "--parent", str(parent)]) == 0
    info = json_output(capsys)
    assert [r["name"] for r in info["runs"]] == ["first"]
    assert info["runs"][0]["has_config"] and info["runs"][0]["checkpoint"] is None


# ---------------------------------------------------------------------------------------
# configuration resolution

def test_defaults_without_preset():
    config = resolve_run_config()
    assert config.model.d == 64 and config.train.patience == 20 and config.train.seed == 0


def test_environment_then_preset_then_file_then_flags(tmp_path, monkeypatch):
    monkeypatch.setenv("HIERARCHYNET_SEED", "11")
    config = resolve_run_config("toy")
    assert config.train.seed == 11 and config.model.seed == 11
    assert config.model.max_tgt_len == PRESETS["toy"]["model"]["max_tgt_len"]

    path = tmp_path / "run.json"
    path.write_text(json.dumps({"model": {"d": 32, "heads": 4}, "train": {"seed": 2}}), encoding="utf-8")
    config = resolve_run_config("toy", path)
    assert config.model.d == 32 and config.train.seed == 2
    assert config.model.seed == 11
    assert config.model.max_tgt_len == PRESETS["toy"]["model"]["max_tgt_len"]

    config = resolve_run_config("toy", path, {"model": {"d": 16, "heads": None}, "train": {"seed": None}})
    assert config.model.d == 16 and config.model.heads == 4 and config.train.seed == 2


def test_saved_run_config_round_trips(tmp_path):
    config = resolve_run_config("tl-codesum")
    back = RunConfig.load(config.save(tmp_path / "run_config.json"))
    assert back.to_dict() == config.to_dict()
    assert back.model.d == 768 and back.optim.warmup_steps == 30000


@pytest.mark.parametrize("content", [
    '{"model": {"width": 3}}',
    '{"unknown": 1}',
    "[1, 2]",
    "{broken",
])
def test_bad_config_files(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigError):
        resolve_run_config(config_path=path)


def test_invalid_resolved_values(monkeypatch, tmp_path):
    with pytest.raises(ConfigError):
        resolve_run_config(config_path=tmp_path / "absent.json")
    with pytest.raises(ConfigError):
        resolve_run_config(overrides={"optim": {"lr": 0.0}})
    monkeypatch.setenv("HIERARCHYNET_DTYPE", "float16")
    with pytest.raises(ConfigError):
        resolve_run_config()


def test_run_directories(tmp_path):
    first = new_run_dir("toy run", tmp_path)
    second = new_run_dir("toy run", tmp_path)
    assert first != second and first.is_dir() and second.is_dir()
    assert first.name.startswith("toy-run-")
    assert resolve_run_dir(first) == first
    assert resolve_run_dir("named") == get_runs_dir() / "named"
    assert get_runs_dir() == tmp_path / "runs"


# ---------------------------------------------------------------------------------------
# environment files

def test_env_file_parsing(tmp_path):
    path = tmp_path / "hierarchynetEnv"
    path.write_text('# comment\nexport HIERARCHYNET_SEED=7\nHIERARCHYNET_DTYPE="float32"\nnot a pair\n=x\n',
                    encoding="utf-8")
    assert read_env_file(path) == {"HIERARCHYNET_SEED": "7", "HIERARCHYNET_DTYPE": "float32"}
    assert read_env_file(tmp_path / "absent") == {}


def test_env_loading_never_overrides(tmp_path, monkeypatch):
    path = tmp_path / "custom.env"
    path.write_text("HIERARCHYNET_SEED=7\nHIERARCHYNET_DTYPE=float32\nOTHER_KEY=1\n", encoding="utf-8")
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.setenv("HIERARCHYNET_ENV_PATH", str(path))
    monkeypatch.setenv("HIERARCHYNET_DTYPE", "float64")
    monkeypatch.delenv("OTHER_KEY", raising=False)
    assert load_env_from_known_locations() == path
    assert env_int("HIERARCHYNET_SEED") == 7
    assert resolve_run_config().train.dtype == "float64"
    assert "OTHER_KEY" not in os.environ


def test_env_int_falls_back_on_garbage(monkeypatch):
    monkeypatch.setenv("HIERARCHYNET_SEED", "seven")
    assert env_int("HIERARCHYNET_SEED", 3) == 3
