"""
Summary metrics: corpus BLEU-4, ROUGE-L and token-level F1, all on a 0..100 scale.

BLEU-4 uses clipped n-gram precision for n = 1..4 aggregated over the corpus, the
brevity penalty, and add-one smoothing for orders n >= 2 whose clipped match count
is zero (p_n = 1 / (count_n + 1)). ROUGE-L is the sentence-level LCS F-measure with
beta = 1.2, averaged over examples.
"""
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import List, Sequence, Tuple, Union

from hierarchynet.utils.errors import LengthMismatch

Text = Union[str, Sequence[str]]

BLEU_VARIANT = "corpus BLEU-4, brevity penalty, add-one smoothing on zero counts for n>=2"
ROUGE_BETA = 1.2


def _tokens(text: Text) -> List[str]:
    return text.split() if isinstance(text, str) else list(text)


def _check(references: Sequence[Text], hypotheses: Sequence[Text]) -> Tuple[List[List[str]], List[List[str]]]:
    if len(references) != len(hypotheses):
        raise LengthMismatch(len(references), len(hypotheses))
    return [_tokens(r) for r in references], [_tokens(h) for h in hypotheses]


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _bleu_from_counts(matches: Sequence[int], totals: Sequence[int], hyp_len: int, ref_len: int) -> float:
    if hyp_len == 0 or matches[0] == 0:
        return 0.0
    log_p = 0.0
    for n, (m, c) in enumerate(zip(matches, totals), 1):
        p = m / c if m > 0 else (1.0 / (c + 1) if n > 1 else 0.0)
        log_p += math.log(p) / 4.0
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * bp * math.exp(log_p)


def _counts(ref: List[str], hyp: List[str]):
    matches, totals = [], []
    for n in range(1, 5):
        h = ngrams(hyp, n)
        r = ngrams(ref, n)
        matches.append(sum(min(c, r[g]) for g, c in h.items()))
        totals.append(max(len(hyp) - n + 1, 0))
    return matches, totals


def bleu4(references: Sequence[Text], hypotheses: Sequence[Text]) -> float:
    refs, hyps = _check(references, hypotheses)
    matches = [0] * 4
    totals = [0] * 4
    for ref, hyp in zip(refs, hyps):
        m, t = _counts(ref, hyp)
        matches = [a + b for a, b in zip(matches, m)]
        totals = [a + b for a, b in zip(totals, t)]
    return _bleu_from_counts(matches, totals, sum(map(len, hyps)), sum(map(len, refs)))


def sentence_bleu4(reference: Text, hypothesis: Text) -> float:
    ref, hyp = _tokens(reference), _tokens(hypothesis)
    m, t = _counts(ref, hyp)
    return _bleu_from_counts(m, t, len(hyp), len(ref))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, 1):
            cur[j] = prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def sentence_rouge_l(reference: Text, hypothesis: Text, beta: float = ROUGE_BETA) -> float:
    ref, hyp = _tokens(reference), _tokens(hypothesis)
    lcs = lcs_length(ref, hyp)
    if lcs == 0:
        return 0.0
    p = lcs / len(hyp)
    r = lcs / len(ref)
    return 100.0 * ((1 + beta ** 2) * p * r) / (r + beta ** 2 * p)


def rouge_l(references: Sequence[Text], hypotheses: Sequence[Text]) -> float:
    refs, hyps = _check(references, hypotheses)
    if not refs:
        return 0.0
    return sum(sentence_rouge_l(r, h) for r, h in zip(refs, hyps)) / len(refs)


def sentence_f1(reference: Text, hypothesis: Text) -> float:
    ref, hyp = _tokens(reference), _tokens(hypothesis)
    if not ref or not hyp:
        return 0.0
    common = sum((Counter(ref) & Counter(hyp)).values())
    if common == 0:
        return 0.0
    p = common / len(hyp)
    r = common / len(ref)
    return 100.0 * 2 * p * r / (p + r)


def token_f1(references: Sequence[Text], hypotheses: Sequence[Text]) -> float:
    refs, hyps = _check(references, hypotheses)
    if not refs:
        return 0.0
    return sum(sentence_f1(r, h) for r, h in zip(refs, hyps)) / len(refs)


@dataclass
class EvalReport:
    bleu4: float
    rouge_l: float
    f1: float
    count: int
    per_example: List[dict] = field(default_factory=list)
    variant: str = BLEU_VARIANT

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(asdict(self), indent=indent, ensure_ascii=False)

    def to_table(self) -> str:
        lines = [
            f"# {self.variant}; ROUGE-L beta={ROUGE_BETA}",
            f"{'metric':<10}{'score':>10}",
            f"{'BLEU-4':<10}{self.bleu4:>10.2f}",
            f"{'ROUGE-L':<10}{self.rouge_l:>10.2f}",
            f"{'F1':<10}{self.f1:>10.2f}",
            f"{'examples':<10}{self.count:>10d}",
        ]
        return "\n".join(lines) + "\n"


def evaluate_corpus(references: Sequence[Text], hypotheses: Sequence[Text]) -> EvalReport:
    refs, hyps = _check(references, hypotheses)
    per_example = [
        {
            "reference": " ".join(r),
            "hypothesis": " ".join(h),
            "bleu4": sentence_bleu4(r, h),
            "rouge_l": sentence_rouge_l(r, h),
            "f1": sentence_f1(r, h),
        }
        for r, h in zip(refs, hyps)
    ]
    return EvalReport(bleu4(refs, hyps), rouge_l(refs, hyps), token_f1(refs, hyps), len(refs), per_example)
