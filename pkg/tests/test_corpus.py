import json

import numpy as np
import pytest

from helpers import COLLECT_METHOD, MAX_METHOD
from hierarchynet.modules.corpus.bpe import STR_ID, UNK_ID, BpeTokenizer, train_bpe
from hierarchynet.modules.corpus.converters import convert_corpus
from hierarchynet.modules.corpus.dataset import (
    RawExample, Vocabularies, assign_splits, build_examples, build_vocabularies, make_batches,
    read_jsonl,
)
from hierarchynet.modules.corpus.earlyStopping import EarlyStopping, early_stopping
from hierarchynet.modules.corpus.preprocess import preprocess_code, preprocess_summary
from hierarchynet.utils.errors import (
    ConfigError, CorpusFormatError, EmptyAfterPreprocess, VocabTooSmall,
)


# ---------------------------------------------------------------------------------------
# preprocessing

def test_string_literals_replaced():
    code = 'String s = "hi \\"there\\""; char c = \'"\'; // "kept"\n'
    assert preprocess_code(code) == 'String s = <str>; char c = \'"\'; // "kept"\n'


def test_text_block_replaced():
    assert preprocess_code('s = """\n  multi\n  line""";') == "s = <str>;"


@pytest.mark.parametrize("text,max_len,expected", [
    ("Returns the max. Uses loops.", None, "returns the max."),
    ("Returns the largest. Also does more.", None, "returns the largest."),
    ("Compares a vs. b and returns min. Then exits.", None, "compares a vs. b and returns min."),
    ("E.g. returns   foo.\nBar baz", None, "e.g. returns foo."),
    ("Gets the value of the field", 3, "gets the value"),
    ("No terminal punctuation here", None, "no terminal punctuation here"),
    ("Version 1.5 is parsed. Next", None, "version 1.5 is parsed."),
])
def test_preprocess_summary(text, max_len, expected):
    assert preprocess_summary(text, max_len) == expected


def test_empty_summary_rejected():
    with pytest.raises(EmptyAfterPreprocess):
        preprocess_summary("   \n ")


@pytest.mark.parametrize("code", [MAX_METHOD, COLLECT_METHOD, 'log("hi " + name); s = """\n  block""";'])
def test_preprocess_code_is_idempotent(code):
    once = preprocess_code(code)
    assert preprocess_code(once) == once


@pytest.mark.parametrize("text", [
    "Returns the max. Uses loops.",
    "CHECK the external storage and notify user on error",
    "E.g. returns   foo.\nBar baz",
])
def test_preprocess_summary_is_idempotent(text):
    once = preprocess_summary(text)
    assert preprocess_summary(once) == once


# ---------------------------------------------------------------------------------------
# byte-pair encoding

def test_bpe_merges_follow_frequency_then_lexical_order():
    tok = train_bpe(["ab ab cd cd"], 14)
    assert tok.merges[0] == ("a", "b")


def test_bpe_first_merge_is_most_frequent_pair():
    tok = train_bpe(["aaab"] * 100, 9)
    assert tok.merges == [("a", "a")]


def test_bpe_without_merge_budget_keeps_base_symbols():
    tok = train_bpe(["aaab"] * 100, 8)
    assert tok.merges == []
    assert tok.symbols == ["<pad>", "<bos>", "<eos>", "<unk>", "<str>", "</w>", "a", "b"]


def test_bpe_training_is_deterministic():
    corpus = ["returns the larger value", "gets the item count", "sets the larger item"]
    first = train_bpe(corpus, 40)
    assert train_bpe(corpus, 40).merges == first.merges
    assert train_bpe(corpus[::-1], 40).merges == first.merges


def test_bpe_encode_decode():
    tok = train_bpe(["lower lowest low slow"], 30)
    ids = tok.encode("low lowest")
    assert all(i != UNK_ID for i in ids)
    assert tok.decode(ids) == "low lowest"
    assert tok.encode("xyz")[0] == UNK_ID
    assert tok.encode("<str>") == [STR_ID]


def test_bpe_respects_vocab_size():
    tok = train_bpe(["aaa bbb aaab abab"], 12)
    assert tok.vocab_size <= 12
    assert tok.symbols[:5] == ["<pad>", "<bos>", "<eos>", "<unk>", "<str>"]


def test_bpe_vocab_too_small():
    with pytest.raises(VocabTooSmall):
        train_bpe(["a b"], 5)
    with pytest.raises(VocabTooSmall):
        train_bpe(["a b"], 6, extra_reserved=("<notoken>",))


def test_bpe_save_and_load(tmp_path):
    tok = train_bpe(["returns the larger value", "returns the smaller value"], 40, extra_reserved=("<notoken>",))
    tok.save(tmp_path, "source")
    back = BpeTokenizer.load(tmp_path, "source")
    assert back.merges == tok.merges and back.symbols == tok.symbols
    assert back.reserved == tok.reserved
    assert back.encode("returns the value") == tok.encode("returns the value")
    with pytest.raises(CorpusFormatError):
        BpeTokenizer.load(tmp_path, "target")


# ---------------------------------------------------------------------------------------
# corpus files

def test_read_jsonl(tmp_path):
    path = tmp_path / "corpus.jsonl"
    path.write_text(
        json.dumps({"code": MAX_METHOD, "summary": "max", "split": "test", "id": 7}) + "\n\n"
        + json.dumps({"code": COLLECT_METHOD, "summary": "collect"}) + "\n",
        encoding="utf-8",
    )
    records = read_jsonl(path)
    assert [(r.split, r.id) for r in records] == [("test", "7"), ("train", None)]


@pytest.mark.parametrize("line", [
    "{not json",
    json.dumps({"code": "int f() { return 1; }"}),
    json.dumps({"code": "", "summary": "empty code"}),
    json.dumps({"code": "int f() { return 1; }", "summary": "s", "split": "dev"}),
    json.dumps(["a", "list"]),
])
def test_read_jsonl_rejects_bad_records(tmp_path, line):
    path = tmp_path / "bad.jsonl"
    path.write_text(line + "\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError):
        read_jsonl(path)


def test_read_jsonl_missing_file(tmp_path):
    with pytest.raises(CorpusFormatError):
        read_jsonl(tmp_path / "absent.jsonl")


# ---------------------------------------------------------------------------------------
# extraction and batching

BAD_EXAMPLES = [
    RawExample(MAX_METHOD, "Returns the larger value."),
    RawExample("void f() { Runnable r = () -> run(); }", "runs later"),
    RawExample("int f( { return 1; }", "broken"),
    RawExample(COLLECT_METHOD, "   "),
    RawExample(COLLECT_METHOD, "Collects positive numbers.", "valid"),
]


def test_build_examples_skips_with_manifest():
    prepared, manifest = build_examples(BAD_EXAMPLES, max_summary_len=5)
    assert [p.raw.code for p in prepared] == [MAX_METHOD, COLLECT_METHOD]
    assert [p.summary for p in prepared] == ["returns the larger value.", "collects positive numbers."]
    report = manifest.to_dict()
    assert report["total"] == 5 and report["accepted"] == 2 and report["skipped"] == 3
    assert report["skipped_by_reason"] == {
        "EmptyAfterPreprocess": 1, "JavaSyntaxError": 1, "UnsupportedConstruct": 1,
    }
    assert [e["index"] for e in report["skipped_examples"]] == [1, 2, 3]


def test_build_examples_source_length_limit():
    prepared, manifest = build_examples(BAD_EXAMPLES[:1], max_src_len=5)
    assert not prepared
    assert manifest.to_dict()["skipped_by_reason"] == {"SequenceTooLong": 1}


def test_build_examples_in_worker_pool_keeps_order():
    serial, _ = build_examples(BAD_EXAMPLES)
    pooled, manifest = build_examples(BAD_EXAMPLES, workers=2)
    assert [p.bundle.to_record() for p in pooled] == [p.bundle.to_record() for p in serial]
    assert manifest.n_skipped == 3


def test_assign_splits_is_deterministic():
    def fresh():
        return [RawExample(MAX_METHOD, f"summary {i}") for i in range(10)]

    first = [r.split for r in assign_splits(fresh(), seed=4)]
    second = [r.split for r in assign_splits(fresh(), seed=4)]
    assert first == second
    assert (first.count("train"), first.count("valid"), first.count("test")) == (8, 1, 1)


def test_vocabularies_from_training_split(tmp_path):
    prepared, _ = build_examples(BAD_EXAMPLES)
    vocabs = build_vocabularies([p for p in prepared if p.split == "train"], 60, 30)
    vocabs.save(tmp_path)
    back = Vocabularies.load(tmp_path)
    assert back.source.symbols == vocabs.source.symbols
    assert back.target.merges == vocabs.target.merges
    with pytest.raises(ConfigError):
        build_vocabularies([], 60, 30)


def test_batches_are_padded(max_input, collect_input):
    (batch,) = make_batches([max_input, collect_input], "train", batch_size=4)
    assert len(batch) == 2
    assert batch.src_len == max(max_input.k, collect_input.k)
    lengths = [max_input.k, collect_input.k]
    assert batch.src_mask.sum(axis=1).tolist() == lengths
    assert np.all(batch.type_ids[~batch.src_mask] == 0)
    assert batch.tgt_mask.sum(axis=1).tolist() == [len(max_input.target_ids), len(collect_input.target_ids)]


def test_batches_shuffle_and_split(max_input, collect_input, rng):
    batches = make_batches([max_input, collect_input], "train", batch_size=1, rng=rng)
    assert len(batches) == 2
    assert make_batches([max_input, collect_input], "valid", batch_size=1) == []
    with pytest.raises(ConfigError):
        make_batches([max_input], "train", batch_size=0)


# ---------------------------------------------------------------------------------------
# converters

def test_convert_json_lines(tmp_path):
    src = tmp_path / "tl"
    src.mkdir()
    (src / "train.json").write_text(
        json.dumps({"code": MAX_METHOD, "comment": "max"}) + "\n"
        + json.dumps({"code": COLLECT_METHOD, "comment": "collect"}) + "\n",
        encoding="utf-8",
    )
    (src / "test.json").write_text(json.dumps({"code": MAX_METHOD, "comment": "max again"}) + "\n",
                                   encoding="utf-8")
    out = tmp_path / "canonical.jsonl"
    assert convert_corpus("tl-codesum", src, out) == 3
    records = read_jsonl(out)
    assert [(r.split, r.id) for r in records] == [("train", "train-1"), ("train", "train-2"), ("test", "test-1")]


def test_convert_parallel(tmp_path):
    src = tmp_path / "deepcom"
    src.mkdir()
    (src / "valid.code").write_text(MAX_METHOD + "\n", encoding="utf-8")
    (src / "valid.comment").write_text("returns the max\n", encoding="utf-8")
    out = tmp_path / "canonical.jsonl"
    assert convert_corpus("deepcom", src, out) == 1
    assert read_jsonl(out)[0].summary == "returns the max"

    (src / "train.code").write_text("a\nb\n", encoding="utf-8")
    (src / "train.comment").write_text("only one\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError):
        convert_corpus("deepcom", src, out)


def test_convert_id_maps(tmp_path):
    src = tmp_path / "funcom"
    src.mkdir()
    (src / "functions.json").write_text(json.dumps({"1": MAX_METHOD, "2": COLLECT_METHOD, "3": MAX_METHOD}),
                                        encoding="utf-8")
    (src / "comments.json").write_text(json.dumps({"1": "max", "2": "collect"}), encoding="utf-8")
    (src / "splits.json").write_text(json.dumps({"test": ["2"]}), encoding="utf-8")
    out = tmp_path / "canonical.jsonl"
    assert convert_corpus("funcom", src, out) == 2
    assert [(r.id, r.split) for r in read_jsonl(out)] == [("1", "train"), ("2", "test")]


def test_convert_errors(tmp_path):
    with pytest.raises(ConfigError):
        convert_corpus("unknown-corpus", tmp_path, tmp_path / "out.jsonl")
    with pytest.raises(CorpusFormatError):
        convert_corpus("tl-codesum", tmp_path, tmp_path / "out.jsonl")
    with pytest.raises(CorpusFormatError):
        convert_corpus("funcom", tmp_path, tmp_path / "out.jsonl")


# ---------------------------------------------------------------------------------------
# early stopping

def test_early_stopping_counts_stale_epochs():
    stopper = EarlyStopping(patience=2)
    assert stopper.update(1.0)
    assert not stopper.update(0.5)
    assert not stopper.should_stop
    assert not stopper.update(1.0)
    assert stopper.should_stop
    assert stopper.best_epoch == 0


@pytest.mark.parametrize("history,patience,stops", [
    ([1.0, 2.0, 3.0], 2, False),
    ([3.0, 1.0, 1.0], 2, True),
    ([3.0, 1.0, 4.0, 1.0], 2, False),
    ([1.0, 1.0], 0, True),
    ([1.0, 2.0], 0, False),
])
def test_early_stopping_over_history(history, patience, stops):
    assert early_stopping(history, patience) is stops
