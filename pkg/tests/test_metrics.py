import json
import math

import pytest

from hierarchynet.modules.evaluation.metrics import (
    ROUGE_BETA, bleu4, evaluate_corpus, lcs_length, rouge_l, sentence_bleu4, sentence_f1,
    sentence_rouge_l, token_f1,
)
from hierarchynet.utils.errors import LengthMismatch


@pytest.mark.parametrize("metric", [sentence_bleu4, sentence_rouge_l, sentence_f1])
@pytest.mark.parametrize("text", ["returns the larger value", "the cat", "x"])
def test_identical_pairs_score_100(metric, text):
    assert metric(text, text) == pytest.approx(100.0)


def test_bleu_brevity_penalty():
    assert sentence_bleu4("the cat sat", "the cat") == pytest.approx(100 * math.exp(-0.5))
    assert sentence_bleu4("the cat sat", "the cat") == pytest.approx(60.653, abs=1e-3)


def test_bleu_smooths_missing_higher_order_matches():
    expected = 100 * (0.75 * (1 / 3) * (1 / 3) * 0.5) ** 0.25
    assert sentence_bleu4("a b c d", "a b x d") == pytest.approx(expected)


def test_bleu_without_unigram_overlap_is_zero():
    assert sentence_bleu4("a b c", "x y z") == 0.0
    assert sentence_bleu4("a b c", "") == 0.0


def test_corpus_bleu_pools_counts():
    refs = ["the cat sat", "a b c d"]
    hyps = ["the cat", "a b c d"]
    assert bleu4(refs, hyps) == pytest.approx(100 * math.exp(1 - 7 / 6))
    mean_sentence = sum(sentence_bleu4(r, h) for r, h in zip(refs, hyps)) / 2
    assert bleu4(refs, hyps) != pytest.approx(mean_sentence)


def test_rouge_l_recall_weighted():
    assert ROUGE_BETA == 1.2
    assert sentence_rouge_l("a b c d", "a b c") == pytest.approx(83.562, abs=1e-3)
    assert sentence_rouge_l("the cat sat", "the cat") == pytest.approx(77.215, abs=1e-3)
    assert sentence_rouge_l("a b c d", "a b c", beta=1.0) == pytest.approx(100 * 1.5 / 1.75)
    assert sentence_rouge_l("a b", "c d") == 0.0


def test_lcs_length():
    assert lcs_length("a b c d e".split(), "a c e x".split()) == 3
    assert lcs_length([], ["a"]) == 0


def test_token_f1():
    assert sentence_f1("the cat sat", "the cat") == pytest.approx(80.0)
    assert sentence_f1("a a b", "a a a") == pytest.approx(200 / 3)
    assert sentence_f1("a", "") == 0.0
    assert token_f1(["the cat sat", "a"], ["the cat", "b"]) == pytest.approx(40.0)


def test_corpus_metrics_accept_token_lists():
    assert rouge_l([["a", "b", "c", "d"]], [["a", "b", "c"]]) == pytest.approx(83.562, abs=1e-3)
    assert rouge_l([], []) == 0.0


@pytest.mark.parametrize("metric", [bleu4, rouge_l, token_f1, evaluate_corpus])
def test_length_mismatch(metric):
    with pytest.raises(LengthMismatch):
        metric(["a b", "c"], ["a b"])


def test_evaluation_report():
    report = evaluate_corpus(["the cat sat"], ["the cat"])
    assert report.count == 1
    assert report.bleu4 == pytest.approx(60.653, abs=1e-3)
    assert report.f1 == pytest.approx(80.0)
    data = json.loads(report.to_json())
    assert data["per_example"][0]["hypothesis"] == "the cat"
    assert "smoothing" in data["variant"]
    table = report.to_table()
    assert "BLEU-4" in table and "60.65" in table and "77.22" in table
