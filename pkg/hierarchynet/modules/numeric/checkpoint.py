"""
Checkpoint files: a versioned JSON map name -> (shape, row-major values).
Values are written with float.hex so 64-bit arrays round-trip bit-exactly.
"""
import json
import logging
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from hierarchynet.modules.numeric.diffArray import DiffArray, get_default_dtype
from hierarchynet.utils.errors import CorpusFormatError, MissingCheckpoint, ShapeMismatch

logger = logging.getLogger(__name__)

FORMAT_NAME = "hierarchynet-checkpoint"
FORMAT_VERSION = 1


def _encode(values: np.ndarray) -> list:
    return [float(x).hex() for x in values.reshape(-1)]


def save_checkpoint(path: Union[str, Path], params: Dict[str, DiffArray],
                    extra: Optional[dict] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dtype = np.dtype(get_default_dtype()).name
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "dtype": dtype,
        "params": {
            name: {"shape": list(p.shape), "values_hex": _encode(p.values)}
            for name, p in sorted(params.items())
        },
    }
    if extra:
        doc["extra"] = extra
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(doc), encoding="utf-8")
    tmp.replace(path)
    logger.debug(f"saved {len(params)} arrays to {path}")
    return path


def read_checkpoint(path: Union[str, Path]) -> dict:
    path = Path(path)
    if not path.exists():
        raise MissingCheckpoint(str(path))
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise CorpusFormatError(f"checkpoint {path} is not valid JSON: {e}") from e
    if doc.get("format") != FORMAT_NAME or doc.get("version") != FORMAT_VERSION:
        raise CorpusFormatError(f"{path} is not a version-{FORMAT_VERSION} {FORMAT_NAME} file")
    arrays = {}
    for name, rec in doc["params"].items():
        flat = np.array([float.fromhex(h) for h in rec["values_hex"]], dtype=doc.get("dtype", "float64"))
        arrays[name] = flat.reshape(rec["shape"])
    return {"arrays": arrays, "extra": doc.get("extra", {}), "dtype": doc.get("dtype")}


def load_into(path: Union[str, Path], params: Dict[str, DiffArray], strict: bool = True) -> dict:
    """Copy stored arrays into existing parameters; returns the checkpoint's `extra` map."""
    loaded = read_checkpoint(path)
    arrays = loaded["arrays"]
    if strict:
        missing = sorted(set(params) - set(arrays))
        if missing:
            raise CorpusFormatError(f"checkpoint lacks parameters: {', '.join(missing[:5])}")
    for name, p in params.items():
        if name not in arrays:
            continue
        arr = arrays[name]
        if arr.shape != p.shape:
            raise ShapeMismatch(f"load {name}", arr.shape, p.shape)
        p.values[...] = arr
    return loaded["extra"]
