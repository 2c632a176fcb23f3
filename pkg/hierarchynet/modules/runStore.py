"""
Run Store Module
Locates run directories (training outputs) and lists what they contain.
"""

import os
import re
import time
from pathlib import Path
from typing import Optional, Union

from hierarchynet.modules.training.trainer import CHECKPOINT_NAME, CONFIG_NAME


def get_runs_dir():
    """
    Get the directory holding run directories

    Returns:
        Path: $HIERARCHYNET_RUNS_DIR, or the per-user cache location (created if missing)
    """
    custom = os.environ.get("HIERARCHYNET_RUNS_DIR")
    if custom:
        runs_dir = Path(custom).expanduser()
    else:
        home = Path.home()
        if os.name == 'nt':  # Windows
            runs_dir = home / 'AppData' / 'Local' / 'hierarchynet' / 'runs'
        else:  # macOS/Linux
            runs_dir = home / '.cache' / 'hierarchynet' / 'runs'

    runs_dir.mkdir(parents=True, exist_ok=True)
    return runs_dir


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", text).strip("-") or "run"


def new_run_dir(name: Optional[str] = None, parent: Optional[Union[str, Path]] = None) -> Path:
    """
    A fresh run directory `<parent>/<name>-<timestamp>`; an explicit name that is
    already taken gets a numeric suffix.
    """
    parent = Path(parent) if parent is not None else get_runs_dir()
    stem = _slug(name) if name else "run"
    candidate = parent / f"{stem}-{time.strftime('%Y%m%d-%H%M%S')}"
    n = 1
    while candidate.exists():
        n += 1
        candidate = parent / f"{stem}-{time.strftime('%Y%m%d-%H%M%S')}-{n}"
    candidate.mkdir(parents=True)
    return candidate


def resolve_run_dir(run: Union[str, Path]) -> Path:
    """A path as given if it exists, otherwise a run name under the runs directory."""
    path = Path(run).expanduser()
    if path.exists():
        return path
    return get_runs_dir() / str(run)


def get_runs_info(parent: Optional[Union[str, Path]] = None):
    """
    Get information about the runs directory

    Returns:
        dict: runs directory and one entry per run (config / checkpoint presence)
    """
    runs_dir = Path(parent) if parent is not None else get_runs_dir()

    info = {
        "runs_directory": str(runs_dir),
        "exists": runs_dir.exists(),
        "runs": []
    }

    if runs_dir.exists():
        for item in sorted(runs_dir.iterdir()):
            if item.is_dir():
                checkpoint = item / CHECKPOINT_NAME
                info["runs"].append({
                    "name": item.name,
                    "path": str(item),
                    "has_config": (item / CONFIG_NAME).exists(),
                    "checkpoint": str(checkpoint) if checkpoint.exists() else None,
                })

    return info
