"""
Byte-pair encoding over characters of whitespace-separated words.

Training repeatedly merges the most frequent adjacent symbol pair (ties go to the
lexicographically smallest pair) until the vocabulary reaches the requested size.
Words end with an end-of-word marker so decoding restores spacing.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from hierarchynet.modules.syntax.javaLexer import STR_TOKEN
from hierarchynet.utils.errors import CorpusFormatError, VocabTooSmall

logger = logging.getLogger(__name__)

PAD, BOS, EOS, UNK = "<pad>", "<bos>", "<eos>", "<unk>"
NOTOKEN = "<notoken>"
RESERVED = (PAD, BOS, EOS, UNK, STR_TOKEN)
PAD_ID, BOS_ID, EOS_ID, UNK_ID, STR_ID = range(5)
END_OF_WORD = "</w>"

Pair = Tuple[str, str]


def _get_pair_counts(words: Dict[Tuple[str, ...], int]) -> Counter:
    counts: Counter = Counter()
    for symbols, freq in words.items():
        for pair in zip(symbols, symbols[1:]):
            counts[pair] += freq
    return counts


def _merge(symbols: Tuple[str, ...], pair: Pair) -> Tuple[str, ...]:
    out: List[str] = []
    i = 0
    while i < len(symbols):
        if i < len(symbols) - 1 and symbols[i] == pair[0] and symbols[i + 1] == pair[1]:
            out.append(pair[0] + pair[1])
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


def _word_symbols(word: str) -> Tuple[str, ...]:
    return tuple(word) + (END_OF_WORD,)


@dataclass
class BpeTokenizer:
    merges: List[Pair] = field(default_factory=list)
    symbols: List[str] = field(default_factory=list)     # id -> symbol
    reserved: Tuple[str, ...] = RESERVED

    def __post_init__(self):
        self._ids = {s: i for i, s in enumerate(self.symbols)}
        self._ranks = {p: i for i, p in enumerate(self.merges)}
        self._cache: Dict[str, List[int]] = {}

    @property
    def vocab_size(self) -> int:
        return len(self.symbols)

    @property
    def alphabet(self) -> List[str]:
        merged = {a + b for a, b in self.merges}
        return [s for s in self.symbols if s not in self.reserved and s not in merged]

    def id_of(self, symbol: str) -> int:
        return self._ids.get(symbol, UNK_ID)

    def encode_word(self, word: str) -> List[int]:
        if word in self._ids and word in self.reserved:
            return [self._ids[word]]
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        symbols = _word_symbols(word)
        while len(symbols) >= 2:
            candidates = [p for p in zip(symbols, symbols[1:]) if p in self._ranks]
            if not candidates:
                break
            best = min(candidates, key=self._ranks.__getitem__)
            symbols = _merge(symbols, best)
        ids = [self._ids.get(s, UNK_ID) for s in symbols]
        self._cache[word] = ids
        return ids

    def encode(self, text: str) -> List[int]:
        ids: List[int] = []
        for word in text.split():
            ids.extend(self.encode_word(word))
        return ids

    def decode(self, ids: Iterable[int]) -> str:
        pieces: List[str] = []
        for i in ids:
            i = int(i)
            if i in (PAD_ID, BOS_ID, EOS_ID):
                continue
            sym = self.symbols[i] if 0 <= i < len(self.symbols) else UNK
            if sym in self.reserved:
                pieces.append(sym + END_OF_WORD)
            else:
                pieces.append(sym)
        text = "".join(pieces).replace(END_OF_WORD, " ")
        return " ".join(text.split())

    # ---------------------------------------------------------------------------------
    def save(self, directory: Union[str, Path], prefix: str) -> Tuple[Path, Path]:
        """Write `<prefix>.merges` (one pair per line, rank order) and `<prefix>.vocab`."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        merges_path = directory / f"{prefix}.merges"
        vocab_path = directory / f"{prefix}.vocab"
        merges_path.write_text("".join(f"{a} {b}\n" for a, b in self.merges), encoding="utf-8")
        header = "#reserved " + " ".join(self.reserved) + "\n"
        vocab_path.write_text(header + "".join(f"{s}\n" for s in self.symbols), encoding="utf-8")
        return merges_path, vocab_path

    @classmethod
    def load(cls, directory: Union[str, Path], prefix: str) -> "BpeTokenizer":
        directory = Path(directory)
        merges_path = directory / f"{prefix}.merges"
        vocab_path = directory / f"{prefix}.vocab"
        if not merges_path.exists() or not vocab_path.exists():
            raise CorpusFormatError(f"tokenizer files for '{prefix}' not found in {directory}")
        merges = []
        for line in merges_path.read_text(encoding="utf-8").splitlines():
            if not line:
                continue
            parts = line.split(" ")
            if len(parts) != 2:
                raise CorpusFormatError(f"bad merge rule line: {line!r}")
            merges.append((parts[0], parts[1]))
        lines = vocab_path.read_text(encoding="utf-8").split("\n")
        reserved = RESERVED
        if lines and lines[0].startswith("#reserved "):
            reserved = tuple(lines[0][len("#reserved "):].split(" "))
            lines = lines[1:]
        symbols = [s for s in lines if s != ""]
        return cls(merges, symbols, reserved)


def train_bpe(corpus: Sequence[str], vocab_size: int,
              extra_reserved: Sequence[str] = ()) -> BpeTokenizer:
    """
    Learn merges from `corpus` (iterable of texts) until the vocabulary holds
    `vocab_size` symbols: reserved symbols, then the alphabet (sorted), then merges.
    """
    reserved = tuple(RESERVED) + tuple(s for s in extra_reserved if s not in RESERVED)
    if vocab_size <= len(reserved):
        raise VocabTooSmall(vocab_size, len(reserved))
    word_freq: Counter = Counter()
    for text in corpus:
        for word in text.split():
            if word in reserved:
                continue
            word_freq[word] += 1
    words: Dict[Tuple[str, ...], int] = {_word_symbols(w): f for w, f in word_freq.items()}
    alphabet = sorted({s for symbols in words for s in symbols})
    symbols = list(reserved) + alphabet
    if vocab_size < len(symbols):
        logger.warning(f"⚠️ vocab size {vocab_size} below alphabet size {len(symbols)}; keeping the full alphabet")
    merges: List[Pair] = []
    seen = set(symbols)
    while len(symbols) < vocab_size:
        counts = _get_pair_counts(words)
        if not counts:
            break
        best_freq = max(counts.values())
        best = min(p for p, c in counts.items() if c == best_freq)
        merges.append(best)
        words = {_merge(s, best): f for s, f in words.items()}
        token = best[0] + best[1]
        if token not in seen:
            seen.add(token)
            symbols.append(token)
    logger.debug(f"trained BPE: {len(merges)} merges, {len(symbols)} symbols")
    return BpeTokenizer(merges, symbols, reserved)
