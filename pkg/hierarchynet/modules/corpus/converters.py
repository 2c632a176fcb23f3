"""
Converters from the distributed layouts of the public code-summarization corpora to
the canonical JSONL ({code, summary, split, id}).

    json-lines   <dir>/<split>.json           one {"code", "comment"} object per line
    parallel     <dir>/<split>.code + <dir>/<split>.comment, aligned line by line
    id-maps      <dir>/functions.json + <dir>/comments.json ({id: text} maps),
                 optional <dir>/splits.json ({split: [ids]})
"""
import json
import logging
from pathlib import Path
from typing import Callable, Dict, List, Union

from hierarchynet.modules.corpus.dataset import SPLITS, RawExample, write_jsonl
from hierarchynet.utils.errors import ConfigError, CorpusFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _load_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CorpusFormatError(f"cannot read {path}: {e}") from e


def convert_json_lines(directory: PathLike, code_key: str = "code",
                       summary_key: str = "comment") -> List[RawExample]:
    directory = Path(directory)
    out: List[RawExample] = []
    for split in SPLITS:
        path = directory / f"{split}.json"
        if not path.exists():
            continue
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(f"{path}:{lineno}: {e.msg}") from e
            if code_key not in rec or summary_key not in rec:
                raise CorpusFormatError(f"{path}:{lineno}: missing '{code_key}' or '{summary_key}'")
            out.append(RawExample(rec[code_key], rec[summary_key], split, f"{split}-{lineno}"))
    return out


def convert_parallel(directory: PathLike) -> List[RawExample]:
    directory = Path(directory)
    out: List[RawExample] = []
    for split in SPLITS:
        code_path = directory / f"{split}.code"
        summary_path = directory / f"{split}.comment"
        if not code_path.exists() and not summary_path.exists():
            continue
        if not (code_path.exists() and summary_path.exists()):
            raise CorpusFormatError(f"{split}: need both {code_path.name} and {summary_path.name}")
        codes = code_path.read_text(encoding="utf-8").splitlines()
        summaries = summary_path.read_text(encoding="utf-8").splitlines()
        if len(codes) != len(summaries):
            raise CorpusFormatError(f"{split}: {len(codes)} code lines but {len(summaries)} comment lines")
        for i, (code, summary) in enumerate(zip(codes, summaries), 1):
            out.append(RawExample(code, summary, split, f"{split}-{i}"))
    return out


def convert_id_maps(directory: PathLike) -> List[RawExample]:
    directory = Path(directory)
    functions = _load_json(directory / "functions.json")
    comments = _load_json(directory / "comments.json")
    split_of: Dict[str, str] = {}
    splits_path = directory / "splits.json"
    if splits_path.exists():
        for split, ids in _load_json(splits_path).items():
            if split not in SPLITS:
                raise CorpusFormatError(f"unknown split '{split}' in {splits_path}")
            for fid in ids:
                split_of[str(fid)] = split
    out: List[RawExample] = []
    missing = 0
    for fid in sorted(functions, key=str):
        comment = comments.get(fid, comments.get(str(fid)))
        if comment is None:
            missing += 1
            continue
        out.append(RawExample(functions[fid], comment, split_of.get(str(fid), "train"), str(fid)))
    if missing:
        logger.warning(f"⚠️ {missing} functions without a comment were dropped")
    return out


# corpus name -> converter for its distributed layout
CONVERTERS: Dict[str, Callable[[PathLike], List[RawExample]]] = {
    "tl-codesum": convert_json_lines,
    "deepcom": convert_parallel,
    "funcom": convert_id_maps,
    "funcom-50": convert_id_maps,
}


def convert_corpus(name: str, directory: PathLike, out_path: PathLike) -> int:
    """Convert a corpus directory and write the canonical JSONL; returns the record count."""
    try:
        converter = CONVERTERS[name]
    except KeyError:
        raise ConfigError(f"unknown corpus format '{name}'; choose from {sorted(CONVERTERS)}") from None
    examples = converter(directory)
    if not examples:
        raise CorpusFormatError(f"no examples found under {directory} for format '{name}'")
    n = write_jsonl(out_path, (ex.to_dict() for ex in examples))
    logger.info(f"✅ converted {n} examples from {directory} ({name})")
    return n
