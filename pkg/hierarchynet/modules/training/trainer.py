"""
Training Module
Runs corpus preparation, the epoch loop with warm-up and early stopping on
validation BLEU-4, and evaluation of a trained run directory.

Run directory layout:

    run_config.json        resolved RunConfig (written before training starts)
    manifest.json          extraction manifest (accepted / skipped with reasons)
    vocab/                 source.* and target.* BPE files
    train.log              one line per epoch: epoch, lr, loss, valid_bleu
    best.ckpt.json         parameters of the best validation epoch
    history.json           per-epoch records and the early-stopping state
"""
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from hierarchynet.modules.corpus.dataset import (
    Manifest, RawExample, Vocabularies, build_examples, build_vocabularies,
    make_batches, read_jsonl, to_model_inputs,
)
from hierarchynet.modules.corpus.earlyStopping import EarlyStopping
from hierarchynet.modules.evaluation.metrics import EvalReport, evaluate_corpus
from hierarchynet.modules.model.hierarchyNet import HierarchyNet
from hierarchynet.modules.model.inputs import TYPE_VOCAB, ModelInput
from hierarchynet.modules.numeric.checkpoint import load_into, save_checkpoint
from hierarchynet.modules.numeric.diffArray import set_default_dtype
from hierarchynet.modules.numeric.optim import AdamW, linear_warmup_lr
from hierarchynet.utils.config import RunConfig
from hierarchynet.utils.errors import ConfigError, MissingCheckpoint, NanLossError
from hierarchynet.utils.log import add_file_handler, remove_handler

logger = logging.getLogger(__name__)

CHECKPOINT_NAME = "best.ckpt.json"
CONFIG_NAME = "run_config.json"


@dataclass
class EpochRecord:
    epoch: int
    lr: float
    loss: float
    valid_bleu: float


@dataclass
class TrainResult:
    run_dir: str
    best_epoch: int
    best_bleu: float
    stopped_early: bool
    checkpoint: str
    history: List[EpochRecord] = field(default_factory=list)
    manifest: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["history"] = [asdict(h) for h in self.history]
        return data


@dataclass
class PreparedRun:
    config: RunConfig
    vocabs: Vocabularies
    inputs: List[ModelInput]
    manifest: Manifest


# ---------------------------------------------------------------------------------------
# preparation

def prepare_run(config: RunConfig, raw: Sequence[RawExample], run_dir: Union[str, Path]) -> PreparedRun:
    """Extract, build vocabularies from the training split and fill in vocabulary sizes."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    model_cfg = config.model
    prepared, manifest = build_examples(raw, model_cfg.edges, config.train.max_summary_len,
                                        model_cfg.max_src_len)
    (run_dir / "manifest.json").write_text(json.dumps(manifest.to_dict(), indent=2), encoding="utf-8")
    train = [ex for ex in prepared if ex.split == "train"]
    if not train:
        raise ConfigError("the corpus has no usable training examples")
    vocabs = build_vocabularies(train, config.train.src_vocab_size, config.train.tgt_vocab_size)
    vocabs.save(run_dir / "vocab")

    model_cfg.src_vocab = vocabs.source.vocab_size
    model_cfg.tgt_vocab = vocabs.target.vocab_size
    model_cfg.type_vocab = len(TYPE_VOCAB)
    config.run_dir = str(run_dir)
    config.validate().save(run_dir / CONFIG_NAME)

    inputs = to_model_inputs(prepared, vocabs, model_cfg.max_tgt_len, model_cfg.edges, model_cfg.reverse_edges)
    return PreparedRun(config, vocabs, inputs, manifest)


def _split(inputs: Sequence[ModelInput], split: str) -> List[ModelInput]:
    return [inp for inp in inputs if inp.meta.get("split") == split]


# ---------------------------------------------------------------------------------------
# training

def train_step(model: HierarchyNet, optimizer: AdamW, batch_inputs: Sequence[ModelInput],
               lr: float, pad_to: Optional[int] = None) -> float:
    """
    One optimizer step on a batch: per-example losses are back-propagated one at a
    time, the accumulated gradients averaged, then AdamW applied. Returns the mean loss.
    """
    optimizer.zero_grad()
    total = 0.0
    for inp in batch_inputs:
        loss = model.forward_loss(inp, pad_to=pad_to)
        value = float(loss.values)
        if not np.isfinite(value):
            raise NanLossError(f"non-finite loss {value} on example {inp.meta.get('id', '?')} at lr={lr:.3g}")
        loss.backward()
        total += value
    n = len(batch_inputs)
    for p in optimizer.params.values():
        if p.grad is not None:
            p.grad /= n
    optimizer.step(lr)
    return total / n


def evaluate_model(model: HierarchyNet, inputs: Sequence[ModelInput], vocabs: Vocabularies,
                   max_len: Optional[int] = None) -> EvalReport:
    """Greedy-decode every input and score it against its preprocessed summary."""
    references, hypotheses = [], []
    for inp in inputs:
        hypotheses.append(vocabs.target.decode(model.greedy_decode(inp, max_len)))
        references.append(inp.summary)
    return evaluate_corpus(references, hypotheses)


def train(config: RunConfig, raw: Sequence[RawExample], run_dir: Union[str, Path],
          max_steps: Optional[int] = None) -> TrainResult:
    """
    Full training run into `run_dir`. `max_steps` stops after that many optimizer
    steps (smoke runs); early stopping watches validation BLEU-4, falling back to the
    training split when the corpus has no validation examples.
    """
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    handler = add_file_handler(run_dir / "train.log")
    try:
        return _train(config, raw, run_dir, max_steps)
    finally:
        remove_handler(handler)


def _train(config: RunConfig, raw: Sequence[RawExample], run_dir: Path,
           max_steps: Optional[int]) -> TrainResult:
    set_default_dtype(config.train.dtype)
    run = prepare_run(config, raw, run_dir)
    tc, oc = config.train, config.optim
    train_inputs = _split(run.inputs, "train")
    valid_inputs = _split(run.inputs, tc.valid_split)
    if not valid_inputs:
        logger.warning("⚠️ no validation examples; early stopping watches the training split")
        valid_inputs = train_inputs

    model = HierarchyNet(config.model)
    optimizer = AdamW(model.parameters(), lr=oc.lr, betas=oc.betas, eps=oc.eps,
                      weight_decay=oc.weight_decay)
    rng = np.random.default_rng(tc.seed)
    stopper = EarlyStopping(tc.patience)
    history: List[EpochRecord] = []
    checkpoint = run_dir / CHECKPOINT_NAME
    logger.info(f"🔨 training {model.store.count()} parameters on {len(train_inputs)} examples "
                f"({len(valid_inputs)} for validation)")

    step = 0
    stopped_early = False
    best_epoch = 0
    for epoch in range(1, tc.epochs + 1):
        losses = []
        lr = oc.lr
        for batch in make_batches(train_inputs, "train", tc.batch_size, rng):
            step += 1
            lr = linear_warmup_lr(step, oc.warmup_steps, oc.lr, oc.lr_decay)
            losses.append(train_step(model, optimizer, batch.examples, lr, pad_to=batch.src_len))
            if max_steps is not None and step >= max_steps:
                break
        mean_loss = float(np.mean(losses)) if losses else float("nan")
        last = epoch == tc.epochs or (max_steps is not None and step >= max_steps)
        if epoch % tc.eval_every and not last:
            history.append(EpochRecord(epoch, lr, mean_loss, float("nan")))
            logger.info(f"epoch={epoch} lr={lr:.6g} loss={mean_loss:.6f}")
            continue

        bleu = evaluate_model(model, valid_inputs, run.vocabs).bleu4
        history.append(EpochRecord(epoch, lr, mean_loss, bleu))
        logger.info(f"epoch={epoch} lr={lr:.6g} loss={mean_loss:.6f} valid_bleu={bleu:.2f}")
        if stopper.update(bleu):
            best_epoch = epoch
            save_checkpoint(checkpoint, model.parameters(), extra={"epoch": epoch, "valid_bleu": bleu})
        if stopper.should_stop:
            stopped_early = True
            logger.info(f"⚠️ early stop after epoch {epoch}; best epoch {best_epoch}")
            break
        if last:
            break

    result = TrainResult(str(run_dir), best_epoch, stopper.best or 0.0, stopped_early,
                         str(checkpoint), history, run.manifest.to_dict())
    (run_dir / "history.json").write_text(
        json.dumps({"epochs": [asdict(h) for h in history], "early_stopping": stopper.to_dict()}, indent=2),
        encoding="utf-8",
    )
    logger.info(f"✅ best valid BLEU-4 {result.best_bleu:.2f} at epoch {result.best_epoch}")
    return result


# ---------------------------------------------------------------------------------------
# trained runs

def load_run(run_dir: Union[str, Path], checkpoint: Optional[Union[str, Path]] = None
             ) -> Tuple[RunConfig, Vocabularies, HierarchyNet]:
    run_dir = Path(run_dir)
    config_path = run_dir / CONFIG_NAME
    if not config_path.exists():
        raise MissingCheckpoint(str(config_path))
    config = RunConfig.load(config_path)
    set_default_dtype(config.train.dtype)
    vocabs = Vocabularies.load(run_dir / "vocab")
    model = HierarchyNet(config.model)
    load_into(checkpoint or run_dir / CHECKPOINT_NAME, model.parameters())
    return config, vocabs, model


def split_inputs(config: RunConfig, vocabs: Vocabularies, raw: Sequence[RawExample],
                 split: str) -> List[ModelInput]:
    """Model inputs of one split, encoded with an existing run's vocabularies."""
    prepared, _ = build_examples([ex for ex in raw if ex.split == split], config.model.edges,
                                 config.train.max_summary_len, config.model.max_src_len)
    return to_model_inputs(prepared, vocabs, config.model.max_tgt_len, config.model.edges,
                           config.model.reverse_edges)


def evaluate_run(run_dir: Union[str, Path], corpus: Union[str, Path], split: str = "test",
                 checkpoint: Optional[Union[str, Path]] = None) -> EvalReport:
    config, vocabs, model = load_run(run_dir, checkpoint)
    inputs = split_inputs(config, vocabs, read_jsonl(corpus), split)
    if not inputs:
        raise ConfigError(f"no usable '{split}' examples in {corpus}")
    report = evaluate_model(model, inputs, vocabs)
    logger.info(f"📦 {split}: BLEU-4 {report.bleu4:.2f}, ROUGE-L {report.rouge_l:.2f}, F1 {report.f1:.2f}")
    return report
