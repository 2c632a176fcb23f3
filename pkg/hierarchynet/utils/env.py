"""
Environment files and typed access to the HIERARCHYNET_* variables.
"""
import logging
import os
from pathlib import Path
from typing import Dict, Iterator, Optional, Sequence

logger = logging.getLogger("hierarchynet.env")

ENV_PATH_VAR = "HIERARCHYNET_ENV_PATH"
ENV_FILE_NAMES = (".env", "hierarchynetEnv")

KNOWN_KEYS = (
    "HIERARCHYNET_LOG_LEVEL",
    "HIERARCHYNET_SEED",
    "HIERARCHYNET_RUNS_DIR",
    "HIERARCHYNET_DTYPE",
)


def read_env_file(path: Path) -> Dict[str, str]:
    """KEY=value lines; blank lines, comments and lines without '=' are skipped."""
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        logger.debug("unreadable env file %s: %s", path, e)
        return {}
    pairs: Dict[str, str] = {}
    for line in map(str.strip, text.splitlines()):
        if line.startswith("export "):
            line = line[len("export "):].lstrip()
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key or key.startswith("#"):
            continue
        pairs[key] = value.strip().strip("\"'")
    return pairs


def env_file_candidates() -> Iterator[Path]:
    custom = os.environ.get(ENV_PATH_VAR)
    if custom:
        yield Path(custom).expanduser()
    for base in (Path.cwd(), Path.home()):
        for name in ENV_FILE_NAMES:
            yield base / name


def load_env_from_known_locations(keys: Optional[Sequence[str]] = KNOWN_KEYS) -> Optional[Path]:
    """
    Copy variables from the first env file that supplies any of `keys` into
    os.environ, never replacing a variable that is already set. Later files
    are consulted only for keys still missing. `keys=None` imports everything
    from the first existing file.

    Returns:
        Path of the first file that contributed a value, or None
    """
    wanted = {k.upper() for k in keys} if keys is not None else None
    missing = set(wanted or ())
    first: Optional[Path] = None
    for path in env_file_candidates():
        if not path.is_file():
            continue
        applied = 0
        for key, value in read_env_file(path).items():
            if wanted is not None and key.upper() not in wanted:
                continue
            missing.discard(key.upper())
            if key not in os.environ:
                os.environ[key] = value
                applied += 1
        if applied:
            logger.debug("loaded %d variable(s) from %s", applied, path)
            first = first or path
        if wanted is None or not missing:
            break
    return first


def env_int(name: str, default: Optional[int] = None) -> Optional[int]:
    raw = os.environ.get(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning("ignoring %s=%r: not an integer", name, raw)
        return default


def env_str(name: str, default: Optional[str] = None) -> Optional[str]:
    raw = os.environ.get(name, "").strip()
    return raw or default
