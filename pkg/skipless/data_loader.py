# skipless/data_loader.py
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

from .errors import DescriptorError
from .utils import data_dir

logger = logging.getLogger(__name__)

# Config
ASSET_VERSION = 1
DESCRIPTOR_KINDS = ("zigzag-code", "design", "fr-code", "repair-plan")


def dump_json(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"{path}: not valid JSON ({exc})") from exc


def read_asset(name: str) -> Dict[str, Any]:
    """
    Load an embedded table (e.g. 'sqs26') from the data directory.
    SKIPLESS_DATA_DIR overrides the location.
    """
    path = data_dir() / f"{name}.json"
    if not path.exists():
        raise DescriptorError(f"data asset {name!r} not found in {path.parent}")
    asset = read_json(path)
    version = asset.get("version")
    if version != ASSET_VERSION:
        raise DescriptorError(f"data asset {name!r} has version {version!r}, expected {ASSET_VERSION}")
    logger.debug("loaded asset %s from %s", name, path)
    return asset


def load_descriptor(path: Union[str, Path]):
    """Read a descriptor file and rebuild the object its 'kind' names."""
    data = read_json(path)
    kind = data.get("kind") if isinstance(data, dict) else None
    if kind == "zigzag-code":
        from .zigzag import ZigzagCode
        return ZigzagCode.from_dict(data)
    if kind == "design":
        from .steiner import Design
        return Design.from_dict(data)
    if kind == "fr-code":
        from .fr_codes import FRCode
        return FRCode.from_dict(data)
    raise DescriptorError(f"{path}: unsupported descriptor kind {kind!r} (expected one of {', '.join(DESCRIPTOR_KINDS[:3])})")
