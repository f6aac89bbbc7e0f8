"""File utilities for atomic writes and JSON operations."""
import json
import os
from typing import Any

from src.core.logger import logger


def atomic_write(file_path: str, content: str) -> bool:
    """
    Atomically write text to a file so readers never see a half-written output.
    Uses a temporary file in the same directory and a rename.
    """
    temp_path = file_path + ".tmp"
    try:
        directory = os.path.dirname(file_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        # newline="" keeps the exact line endings of the content
        with open(temp_path, "w", encoding="utf-8", newline="") as f:
            f.write(content)
        os.replace(temp_path, file_path)
        return True
    except OSError as e:
        logger.error(f"[files] Failed to write {file_path}: {e}")
        try:
            if os.path.exists(temp_path):
                os.remove(temp_path)
        except OSError:
            pass
        return False


def dump_json(data: Any) -> str:
    """Canonical JSON text: 2-space indent, shortest round-trip floats, no NaN/Infinity."""
    return json.dumps(data, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def atomic_write_json(file_path: str, data: Any) -> bool:
    """Atomically write JSON data to a file."""
    try:
        content = dump_json(data)
    except (TypeError, ValueError) as e:
        logger.error(f"[files] Failed to serialize JSON for {file_path}: {e}")
        return False
    return atomic_write(file_path, content)


def load_json_file(file_path: str, default=None):
    """Load JSON from file; missing or unparsable files give ``default``."""
    if not os.path.exists(file_path):
        return default
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, ValueError) as e:
        logger.error(f"[files] Error loading {file_path}: {e}")
        return default
