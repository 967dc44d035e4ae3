# skipless/utils.py
from __future__ import annotations

import logging
import os
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

from .errors import ParameterOutOfRange

# Config
REPO_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_DATA_DIR = REPO_ROOT / "data" / "tables"
DEFAULT_SQS_BOUND = 100
LOG_FORMAT = "%(asctime)s %(levelname)s %(message)s"


def now_iso() -> str:
    return datetime.now().isoformat(timespec="seconds")


def data_dir() -> Path:
    """Directory holding the embedded table assets (SKIPLESS_DATA_DIR overrides)."""
    override = os.environ.get("SKIPLESS_DATA_DIR")
    return Path(override) if override else DEFAULT_DATA_DIR


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ParameterOutOfRange(f"{name} must be an integer, got {raw!r}") from None


def sqs_bound() -> int:
    return _env_int("SKIPLESS_SQS_BOUND", DEFAULT_SQS_BOUND)


def default_jobs() -> int:
    return max(1, _env_int("SKIPLESS_JOBS", 1))


def diag_log_path() -> Optional[Path]:
    raw = os.environ.get("SKIPLESS_DIAG_LOG")
    return Path(raw) if raw else None


def configure_logging(level: Optional[str] = None) -> None:
    level_name = (level or os.environ.get("SKIPLESS_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(level=getattr(logging, level_name, logging.INFO), format=LOG_FORMAT)


def append_diag(msg: str):
    path = diag_log_path()
    if path is None:
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(f"{now_iso()} {msg}\n")
    except Exception:
        pass


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Write text to path via a temp file in the same directory and os.replace."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp_name, target)
    except Exception:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return target
