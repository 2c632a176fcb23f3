import copy

import numpy as np
import pytest

from helpers import COLLECT_METHOD, MAX_METHOD, TINY_RUN, TOY_CORPUS
from hierarchynet.modules.buildHcr import build_hcr
from hierarchynet.modules.corpus.bpe import NOTOKEN, train_bpe
from hierarchynet.modules.corpus.dataset import Vocabularies, read_jsonl, write_jsonl
from hierarchynet.modules.model.inputs import TYPE_VOCAB, prepare_input
from hierarchynet.modules.model.modelConfig import ModelConfig
from hierarchynet.modules.numeric.diffArray import set_default_dtype
from hierarchynet.utils.config import resolve_run_config

SUMMARIES = ["returns the larger of two integers", "collects and prints the positive numbers"]


@pytest.fixture(autouse=True)
def float64():
    set_default_dtype("float64")
    yield
    set_default_dtype("float64")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for key in ("HIERARCHYNET_SEED", "HIERARCHYNET_DTYPE", "HIERARCHYNET_LOG_LEVEL", "HIERARCHYNET_ENV_PATH"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("HIERARCHYNET_RUNS_DIR", str(tmp_path / "runs"))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def max_bundle():
    return build_hcr(MAX_METHOD)


@pytest.fixture
def collect_bundle():
    return build_hcr(COLLECT_METHOD)


@pytest.fixture
def vocabs(max_bundle, collect_bundle):
    corpus = [" ".join(t for t in b.linear.tokens if t) for b in (max_bundle, collect_bundle)]
    return Vocabularies(train_bpe(corpus, 80, extra_reserved=(NOTOKEN,)), train_bpe(SUMMARIES, 40))


@pytest.fixture
def tiny_config(vocabs):
    """Factory for a small model over the fixture vocabularies."""
    def make(**overrides):
        base = dict(d=8, heads=2, enc_layers=1, dec_layers=1, tbcnn_layers=1, hgt_layers=1,
                    ffn_mult=2, max_src_len=256, max_tgt_len=12, seed=3,
                    src_vocab=vocabs.source.vocab_size, tgt_vocab=vocabs.target.vocab_size,
                    type_vocab=len(TYPE_VOCAB))
        base.update(overrides)
        return ModelConfig(**base)
    return make


@pytest.fixture
def max_input(max_bundle, vocabs):
    return prepare_input(max_bundle, vocabs.source, vocabs.target, SUMMARIES[0], max_tgt_len=12)


@pytest.fixture
def collect_input(collect_bundle, vocabs):
    return prepare_input(collect_bundle, vocabs.source, vocabs.target, SUMMARIES[1], max_tgt_len=12)


@pytest.fixture
def toy_raw():
    """First four toy methods, all in the training split."""
    return read_jsonl(TOY_CORPUS)[:4]


@pytest.fixture
def toy_file(tmp_path, toy_raw):
    path = tmp_path / "toy4.jsonl"
    write_jsonl(path, (ex.to_dict() for ex in toy_raw))
    return path


@pytest.fixture
def tiny_run_config():
    """Factory for a resolved toy run config shrunk to TINY_RUN, plus section overrides."""
    def make(**sections):
        overrides = copy.deepcopy(TINY_RUN)
        for section, values in sections.items():
            overrides.setdefault(section, {}).update(values)
        return resolve_run_config("toy", overrides=overrides)
    return make
