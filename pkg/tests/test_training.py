import json

import numpy as np
import pytest

from helpers import TOY_CORPUS
from hierarchynet.modules.corpus.dataset import read_jsonl
from hierarchynet.modules.model.hierarchyNet import HierarchyNet
from hierarchynet.modules.numeric.checkpoint import read_checkpoint
from hierarchynet.modules.numeric.optim import AdamW
from hierarchynet.modules.training.ablation import (
    ABLATION_ROWS, ablation_config, ablation_table, run_ablation,
)
from hierarchynet.modules.training.trainer import (
    CHECKPOINT_NAME, CONFIG_NAME, evaluate_run, load_run, prepare_run, train, train_step,
)
from hierarchynet.utils.config import resolve_run_config
from hierarchynet.utils.errors import ConfigError, MissingCheckpoint


def same_checkpoints(a, b) -> bool:
    left, right = read_checkpoint(a)["arrays"], read_checkpoint(b)["arrays"]
    return left.keys() == right.keys() and all(np.array_equal(left[k], right[k]) for k in left)


# ---------------------------------------------------------------------------------------
# ablation rows

def test_ablation_rows_switch_layers_and_edges(tiny_run_config):
    base = tiny_run_config()
    assert sorted(ABLATION_ROWS) == list(range(1, 11))
    tokens = ablation_config(base, 1).model
    assert not tokens.use_subtrees and not tokens.use_graph
    subtrees = ablation_config(base, 2).model
    assert subtrees.use_subtrees and not subtrees.use_graph
    assert ablation_config(base, 4).model.edges.enabled() == ["AST", "CD"]
    assert ablation_config(base, 10).model.edges.enabled() == ["AST", "NS", "CD", "DF"]
    assert base.model.use_subtrees and base.model.edges.enabled() == ["AST", "NS", "CD", "DF"]
    with pytest.raises(ConfigError):
        ablation_config(base, 11)


def test_every_ablation_row_trains_a_step(tiny_run_config, toy_raw, tmp_path):
    results = run_ablation(tiny_run_config(), toy_raw, tmp_path, max_steps=1)
    assert [r.row for r in results] == list(range(1, 11))
    for r in results:
        assert (tmp_path / f"row-{r.row}" / CHECKPOINT_NAME).exists()
        assert r.report.count == len(toy_raw)
    table = ablation_table(results).splitlines()
    assert len(table) == 11 and table[-1].startswith("10")


# ---------------------------------------------------------------------------------------
# training runs

def test_training_fills_run_directory(tiny_run_config, toy_raw, tmp_path):
    run_dir = tmp_path / "run"
    result = train(tiny_run_config(), toy_raw, run_dir, max_steps=2)
    for name in (CONFIG_NAME, CHECKPOINT_NAME, "manifest.json", "train.log", "history.json",
                 "vocab/source.merges", "vocab/target.vocab"):
        assert (run_dir / name).exists(), name
    assert result.best_epoch == 1 and len(result.history) == 1
    assert np.isfinite(result.history[0].loss)
    assert result.manifest["accepted"] == len(toy_raw)
    saved = json.loads((run_dir / CONFIG_NAME).read_text(encoding="utf-8"))
    assert saved["model"]["src_vocab"] > 0 and saved["preset"] == "toy"
    assert "epoch=1" in (run_dir / "train.log").read_text(encoding="utf-8")


def test_training_is_deterministic(tiny_run_config, toy_raw, tmp_path):
    first = train(tiny_run_config(), toy_raw, tmp_path / "a", max_steps=3)
    second = train(tiny_run_config(), toy_raw, tmp_path / "b", max_steps=3)
    assert [h.loss for h in first.history] == [h.loss for h in second.history]
    assert same_checkpoints(first.checkpoint, second.checkpoint)


def test_different_seed_changes_the_model(tiny_run_config, toy_raw, tmp_path):
    first = train(tiny_run_config(), toy_raw, tmp_path / "a", max_steps=1)
    second = train(tiny_run_config(model={"seed": 5}), toy_raw, tmp_path / "b", max_steps=1)
    assert not same_checkpoints(first.checkpoint, second.checkpoint)


def test_loss_trends_down_when_overfitting(tiny_run_config, toy_raw, tmp_path):
    config = tiny_run_config(train={"epochs": 30, "batch_size": 4, "eval_every": 30, "patience": 0})
    result = train(config, toy_raw, tmp_path / "run")
    losses = [h.loss for h in result.history]
    assert len(losses) == 30
    assert np.mean(losses[-3:]) < np.mean(losses[:3])


def test_train_step_updates_parameters(tiny_run_config, toy_raw, tmp_path):
    run = prepare_run(tiny_run_config(), toy_raw, tmp_path)
    model = HierarchyNet(run.config.model)
    before = {k: p.values.copy() for k, p in model.parameters().items()}
    optimizer = AdamW(model.parameters(), lr=1e-2)
    loss = train_step(model, optimizer, run.inputs[:2], lr=1e-2, pad_to=max(i.k for i in run.inputs[:2]) + 3)
    assert np.isfinite(loss) and loss > 0
    moved = [k for k, p in model.parameters().items() if not np.array_equal(p.values, before[k])]
    assert "out.W" in moved and "embed.type" in moved


def test_no_training_examples(tiny_run_config, toy_raw, tmp_path):
    for ex in toy_raw:
        ex.split = "test"
    with pytest.raises(ConfigError):
        train(tiny_run_config(), toy_raw, tmp_path / "run", max_steps=1)


# ---------------------------------------------------------------------------------------
# trained runs

def test_load_and_evaluate_run(tiny_run_config, toy_raw, toy_file, tmp_path):
    run_dir = tmp_path / "run"
    train(tiny_run_config(), toy_raw, run_dir, max_steps=1)
    config, vocabs, model = load_run(run_dir)
    assert config.model.d == 8 and vocabs.target.vocab_size == config.model.tgt_vocab
    assert isinstance(model, HierarchyNet)

    report = evaluate_run(run_dir, toy_file, "train")
    assert report.count == len(toy_raw)
    assert 0.0 <= report.bleu4 <= 100.0
    with pytest.raises(ConfigError):
        evaluate_run(run_dir, toy_file, "test")


def test_missing_run_files(tiny_run_config, toy_raw, tmp_path):
    with pytest.raises(MissingCheckpoint):
        load_run(tmp_path / "nothing-here")
    run_dir = tmp_path / "run"
    train(tiny_run_config(), toy_raw, run_dir, max_steps=1)
    (run_dir / CHECKPOINT_NAME).unlink()
    with pytest.raises(MissingCheckpoint):
        load_run(run_dir)


# ---------------------------------------------------------------------------------------
# full toy runs

@pytest.mark.slow
def test_toy_corpus_is_learned(tmp_path):
    config = resolve_run_config("toy", overrides={"train": {"deterministic": True}})
    raw = read_jsonl(TOY_CORPUS)
    result = train(config, raw, tmp_path / "run")
    assert result.best_bleu >= 95.0

    report = evaluate_run(tmp_path / "run", TOY_CORPUS, "train")
    assert report.bleu4 >= 95.0
    assert any(e["hypothesis"] == e["reference"] for e in report.per_example)


@pytest.mark.slow
def test_toy_training_is_bit_identical(tmp_path):
    raw = read_jsonl(TOY_CORPUS)
    a = train(resolve_run_config("toy"), raw, tmp_path / "a")
    b = train(resolve_run_config("toy"), raw, tmp_path / "b")
    assert (tmp_path / "a" / CHECKPOINT_NAME).read_bytes() == (tmp_path / "b" / CHECKPOINT_NAME).read_bytes()
    assert [h.loss for h in a.history] == [h.loss for h in b.history]
