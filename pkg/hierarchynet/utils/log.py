import logging
import os
from pathlib import Path
from typing import Optional, Union

CONSOLE_FORMAT = "%(message)s"
FILE_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

logger = logging.getLogger("hierarchynet")


def setup_logging(level: Optional[Union[int, str]] = None,
                  log_file: Optional[Union[str, Path]] = None) -> logging.Logger:
    """
    Configure the package logger once. Level comes from the argument, then
    HIERARCHYNET_LOG_LEVEL, then INFO.
    """
    if log_file is not None:
        add_file_handler(log_file)
    if level is None:
        level = os.environ.get("HIERARCHYNET_LOG_LEVEL", "INFO")
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO
    logger.setLevel(level)
    if not any(getattr(h, "_hierarchynet_console", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(CONSOLE_FORMAT))
        handler._hierarchynet_console = True
        logger.addHandler(handler)
    logger.propagate = False
    return logger


def add_file_handler(path: Union[str, Path]) -> logging.Handler:
    handler = logging.FileHandler(str(path), encoding="utf-8")
    handler.setFormatter(logging.Formatter(FILE_FORMAT))
    if logger.level == logging.NOTSET:
        # run logs record INFO even when setup_logging was never called
        logger.setLevel(logging.INFO)
    logger.addHandler(handler)
    return handler


def remove_handler(handler: logging.Handler) -> None:
    logger.removeHandler(handler)
    handler.close()
