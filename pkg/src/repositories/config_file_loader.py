"""Config File Loader - Loads ``key = value`` files (run config, tag classes, D-level rules, syllables)."""
import os
from typing import Optional

from dotenv import dotenv_values

from src.core.logger import logger
from src.core.validators import ValidationError
from src.services.density import TagClassMap
from src.services.dlevel import DLevelRules
from src.services.readability import SyllableCounter


def _validate_file_path(file_path: str) -> None:
    """Raise ValidationError unless the path names a readable file."""
    if not file_path or not isinstance(file_path, str):
        raise ValidationError(f"Invalid file path: {file_path!r}")
    if not os.path.isfile(file_path):
        raise ValidationError(f"Config file not found: {file_path}")
    if not os.access(file_path, os.R_OK):
        raise ValidationError(f"Config file not readable: {file_path}")


class ConfigFileLoader:
    """Reads ``key = value`` lines with ``#`` comments; values are kept verbatim (no interpolation)."""

    def load(self, file_path: str) -> dict[str, Optional[str]]:
        """
        Load a key=value file.

        Args:
            file_path: Path to the file

        Returns:
            Mapping of keys to raw string values (None for a bare key)
        """
        _validate_file_path(file_path)
        try:
            values = dotenv_values(file_path, interpolate=False, encoding="utf-8")
        except UnicodeDecodeError as e:
            raise ValidationError(f"Config file {file_path} is not valid UTF-8 ({e.reason})")
        logger.debug(f"[config] Loaded {len(values)} entries from {file_path}")
        return dict(values)

    def load_tag_map(self, file_path: Optional[str]) -> TagClassMap:
        return TagClassMap.from_mapping(self.load(file_path)) if file_path else TagClassMap()

    def load_dlevel_rules(self, file_path: Optional[str]) -> DLevelRules:
        return DLevelRules.from_mapping(self.load(file_path)) if file_path else DLevelRules()

    def load_syllable_counter(self, file_path: Optional[str]) -> SyllableCounter:
        return SyllableCounter.from_mapping(self.load(file_path)) if file_path else SyllableCounter()
