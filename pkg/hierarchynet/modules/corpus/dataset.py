"""
Corpus ingestion: JSONL reading, preprocessing, HCR extraction with a skip manifest,
vocabulary training and padded batching per split.
"""
import json
import logging
import multiprocessing as mpp
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from hierarchynet.modules.buildHcr import HcrBundle, build_hcr
from hierarchynet.modules.corpus.bpe import NOTOKEN, PAD_ID, BpeTokenizer, train_bpe
from hierarchynet.modules.corpus.preprocess import preprocess_code, preprocess_summary
from hierarchynet.modules.graph.dependences import EdgeFlags
from hierarchynet.modules.model.inputs import ModelInput, prepare_input
from hierarchynet.utils.errors import (
    ConfigError, CorpusFormatError, DataError, SequenceTooLong,
)

logger = logging.getLogger(__name__)

SPLITS = ("train", "valid", "test")


@dataclass
class RawExample:
    code: str
    summary: str
    split: str = "train"
    id: Optional[str] = None

    def __post_init__(self):
        if self.split not in SPLITS:
            raise CorpusFormatError(f"unknown split '{self.split}'")

    def to_dict(self) -> dict:
        data = {"code": self.code, "summary": self.summary, "split": self.split}
        if self.id is not None:
            data["id"] = self.id
        return data


@dataclass
class Manifest:
    total: int = 0
    accepted: int = 0
    skipped: Counter = field(default_factory=Counter)
    skipped_examples: List[dict] = field(default_factory=list)

    def skip(self, index: int, reason: str, message: str) -> None:
        self.skipped[reason] += 1
        self.skipped_examples.append({"index": index, "reason": reason, "message": message})

    @property
    def n_skipped(self) -> int:
        return sum(self.skipped.values())

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "accepted": self.accepted,
            "skipped": self.n_skipped,
            "skipped_by_reason": dict(sorted(self.skipped.items())),
            "skipped_examples": self.skipped_examples,
        }


@dataclass
class PreparedExample:
    raw: RawExample
    code: str
    summary: str
    bundle: HcrBundle

    @property
    def split(self) -> str:
        return self.raw.split


def read_jsonl(path: Union[str, Path], default_split: str = "train") -> List[RawExample]:
    path = Path(path)
    if not path.exists():
        raise CorpusFormatError(f"corpus file not found: {path}")
    out: List[RawExample] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(f"{path}:{lineno}: invalid JSON ({e.msg})") from e
            if not isinstance(rec, dict) or not rec.get("code") or not rec.get("summary"):
                raise CorpusFormatError(f"{path}:{lineno}: expected non-empty 'code' and 'summary'")
            out.append(RawExample(rec["code"], rec["summary"], rec.get("split", default_split),
                                  None if rec.get("id") is None else str(rec["id"])))
    return out


def write_jsonl(path: Union[str, Path], records: Iterable[dict]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            n += 1
    return n


def _extract_one(job) -> Tuple[int, Optional[PreparedExample], Optional[Tuple[str, str]]]:
    index, ex, flags, max_summary_len, max_src_len, reverse_edges = job
    try:
        code = preprocess_code(ex.code)
        summary = preprocess_summary(ex.summary, max_summary_len)
        bundle = build_hcr(code, flags, reverse_edges)
        if max_src_len is not None and bundle.k > max_src_len:
            raise SequenceTooLong(bundle.k, max_src_len)
    except (DataError, SequenceTooLong) as e:
        # plain strings: custom exception signatures do not survive pickling
        return index, None, (type(e).__name__, str(e))
    return index, PreparedExample(ex, code, summary, bundle), None


def build_examples(raw: Sequence[RawExample], flags: Optional[EdgeFlags] = None,
                   max_summary_len: Optional[int] = None, max_src_len: Optional[int] = None,
                   workers: int = 1, progress: bool = False,
                   reverse_edges: bool = True) -> Tuple[List[PreparedExample], Manifest]:
    """
    Preprocess and extract every example; data errors skip the example and are counted.
    With `workers` > 1 extraction runs in a process pool; output order follows the input.
    """
    manifest = Manifest(total=len(raw))
    jobs = [(index, ex, flags, max_summary_len, max_src_len, reverse_edges) for index, ex in enumerate(raw)]
    if workers > 1 and len(jobs) > 1:
        with mpp.Pool(processes=workers) as pool:
            results = list(tqdm(pool.imap(_extract_one, jobs, chunksize=16), total=len(jobs),
                                desc="extracting", disable=not progress))
    else:
        results = [_extract_one(job) for job in tqdm(jobs, desc="extracting", disable=not progress)]

    prepared: List[PreparedExample] = []
    for index, example, failure in results:
        if failure is not None:
            logger.debug(f"skipping example {index}: {failure[1]}")
            manifest.skip(index, *failure)
            continue
        prepared.append(example)
    manifest.accepted = len(prepared)
    if manifest.n_skipped:
        logger.info(f"⚠️ skipped {manifest.n_skipped} of {manifest.total} methods: {dict(manifest.skipped)}")
    return prepared, manifest


def assign_splits(raw: List[RawExample], valid_ratio: float = 0.1, test_ratio: float = 0.1,
                  seed: int = 0) -> List[RawExample]:
    """Deterministically re-split examples that all arrived as 'train'."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(raw))
    n_valid = int(round(len(raw) * valid_ratio))
    n_test = int(round(len(raw) * test_ratio))
    for rank, idx in enumerate(order):
        raw[idx].split = "valid" if rank < n_valid else "test" if rank < n_valid + n_test else "train"
    return raw


# ---------------------------------------------------------------------------------------
# vocabularies

@dataclass
class Vocabularies:
    source: BpeTokenizer
    target: BpeTokenizer

    def save(self, directory: Union[str, Path]) -> None:
        self.source.save(directory, "source")
        self.target.save(directory, "target")

    @classmethod
    def load(cls, directory: Union[str, Path]) -> "Vocabularies":
        return cls(BpeTokenizer.load(directory, "source"), BpeTokenizer.load(directory, "target"))


def build_vocabularies(train: Sequence[PreparedExample], src_size: int, tgt_size: int) -> Vocabularies:
    """Source BPE over node tokens of L, target BPE over summaries; training split only."""
    if not train:
        raise ConfigError("no training examples to build vocabularies from")
    src_corpus = [" ".join(t for t in ex.bundle.linear.tokens if t) for ex in train]
    tgt_corpus = [ex.summary for ex in train]
    source = train_bpe(src_corpus, src_size, extra_reserved=(NOTOKEN,))
    target = train_bpe(tgt_corpus, tgt_size)
    logger.info(f"📦 vocabularies: source {source.vocab_size}, target {target.vocab_size}")
    return Vocabularies(source, target)


# ---------------------------------------------------------------------------------------
# model inputs and batches

def to_model_inputs(examples: Sequence[PreparedExample], vocabs: Vocabularies, max_tgt_len: int,
                    flags: Optional[EdgeFlags] = None, reverse_edges: bool = True) -> List[ModelInput]:
    out = []
    for ex in examples:
        inp = prepare_input(ex.bundle, vocabs.source, vocabs.target, ex.summary,
                            max_tgt_len=max_tgt_len, flags=flags, reverse_edges=reverse_edges)
        inp.meta["split"] = ex.split
        inp.meta["id"] = ex.raw.id
        out.append(inp)
    return out


@dataclass
class Batch:
    split: str
    examples: List[ModelInput]
    type_ids: np.ndarray        # [B x K] padded with PAD_ID
    src_mask: np.ndarray        # [B x K] True on real positions
    target_ids: np.ndarray      # [B x T] padded with PAD_ID
    tgt_mask: np.ndarray        # [B x T]

    @property
    def src_len(self) -> int:
        return self.type_ids.shape[1]

    def __len__(self) -> int:
        return len(self.examples)


def _pad(rows: Sequence[np.ndarray], fill: int):
    width = max((len(r) for r in rows), default=0)
    arr = np.full((len(rows), width), fill, dtype=np.int64)
    mask = np.zeros((len(rows), width), dtype=bool)
    for i, r in enumerate(rows):
        arr[i, :len(r)] = r
        mask[i, :len(r)] = True
    return arr, mask


def make_batches(inputs: Sequence[ModelInput], split: str, batch_size: int,
                 rng: Optional[np.random.Generator] = None) -> List[Batch]:
    """Batches of one split; order is shuffled when `rng` is given."""
    if batch_size < 1:
        raise ConfigError(f"batch size must be >= 1, got {batch_size}")
    chosen = [inp for inp in inputs if inp.meta.get("split", "train") == split]
    order = rng.permutation(len(chosen)) if rng is not None else np.arange(len(chosen))
    batches = []
    for start in range(0, len(chosen), batch_size):
        members = [chosen[i] for i in order[start:start + batch_size]]
        type_ids, src_mask = _pad([m.type_ids for m in members], PAD_ID)
        targets, tgt_mask = _pad([m.target_ids if m.target_ids is not None else np.zeros(0, np.int64)
                                  for m in members], PAD_ID)
        batches.append(Batch(split, members, type_ids, src_mask, targets, tgt_mask))
    return batches
