"""Run settings: defaults, config-file values and flag overrides resolved into a RunConfig."""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Mapping, Optional

from src.core.constants import (
    DEFAULT_FAMILY,
    DEFAULT_INPUT_FORMAT,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_OUTPUT_FORMATS,
    DEFAULT_READABILITY_SAMPLE,
    DEFAULT_SEED,
    DEFAULT_SEGMENT_SIZE,
    DEFAULT_TYPE_DEF,
    SENTENCE_END_TAG,
)
from src.core.logger import add_file_sink, logger
from src.core.types import InputFormat, ModelFamily, TypeDefinition
from src.core.validators import ValidationError

FAMILY_CHOICES = {f.value for f in ModelFamily} | {"all"}
OUTPUT_FORMAT_CHOICES = {"json", "csv", "svg"}

# Fields that do not change any computed number and are left out of the config hash
_NON_ANALYTIC_FIELDS = {"output_dir", "output_formats"}


@dataclass(frozen=True)
class RunConfig:
    """One fully resolved run. Defaults are exactly the documented CLI defaults."""

    corpus_a: tuple[str, ...] = ()
    corpus_b: tuple[str, ...] = ()
    trees_a: Optional[str] = None
    trees_b: Optional[str] = None
    input_format: InputFormat = InputFormat(DEFAULT_INPUT_FORMAT)
    segment_size: int = DEFAULT_SEGMENT_SIZE
    readability_sample: int = DEFAULT_READABILITY_SAMPLE
    family: str = DEFAULT_FAMILY
    type_definition: TypeDefinition = TypeDefinition(DEFAULT_TYPE_DEF)
    tags_path: Optional[str] = None
    rules_path: Optional[str] = None
    syllables_path: Optional[str] = None
    seed: int = DEFAULT_SEED
    equalize_tokens: bool = False
    sentence_tag: str = SENTENCE_END_TAG
    output_dir: str = DEFAULT_OUTPUT_DIR
    output_formats: tuple[str, ...] = field(default=DEFAULT_OUTPUT_FORMATS)

    def __post_init__(self):
        if self.segment_size < 1:
            raise ValidationError(f"segment_size must be >= 1 (got {self.segment_size})")
        if self.readability_sample < 1:
            raise ValidationError(f"readability_sample must be >= 1 (got {self.readability_sample})")
        if self.family not in FAMILY_CHOICES:
            raise ValidationError(f"Unknown LNRE family: {self.family} (valid: {sorted(FAMILY_CHOICES)})")
        unknown = set(self.output_formats) - OUTPUT_FORMAT_CHOICES
        if unknown:
            raise ValidationError(f"Unknown output formats: {sorted(unknown)}")

    @property
    def families(self) -> tuple[ModelFamily, ...]:
        if self.family == "all":
            return (ModelFamily.GIGP, ModelFamily.ZM, ModelFamily.FZM)
        return (ModelFamily(self.family),)

    def input_paths(self) -> list[str]:
        """Every file the run reads."""
        paths = [*self.corpus_a, *self.corpus_b]
        paths += [p for p in (self.trees_a, self.trees_b, self.tags_path, self.rules_path, self.syllables_path) if p]
        return paths

    def validate_paths(self) -> None:
        """Fail before any computation if an input is missing or unreadable."""
        for path in self.input_paths():
            if not os.path.isfile(path):
                raise ValidationError(f"Input file not found: {path}")
            if not os.access(path, os.R_OK):
                raise ValidationError(f"Input file not readable: {path}")

    def config_hash(self) -> str:
        """SHA-256 over the canonical JSON of the analysis-relevant settings."""
        payload = {k: v for k, v in self.to_dict().items() if k not in _NON_ANALYTIC_FIELDS}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["input_format"] = str(self.input_format)
        data["type_definition"] = str(self.type_definition)
        data["corpus_a"] = list(self.corpus_a)
        data["corpus_b"] = list(self.corpus_b)
        data["output_formats"] = list(self.output_formats)
        return data


def _coerce(name: str, raw: Any) -> Any:
    """Convert a config-file string (or flag value) into the RunConfig field type."""
    if raw is None:
        return None
    if name in {"segment_size", "readability_sample", "seed"}:
        try:
            return int(raw)
        except (TypeError, ValueError):
            raise ValidationError(f"{name} must be an integer (got {raw!r})")
    if name == "equalize_tokens":
        if isinstance(raw, bool):
            return raw
        return str(raw).strip().lower() in {"1", "true", "yes", "on"}
    if name in {"corpus_a", "corpus_b", "output_formats"}:
        if isinstance(raw, str):
            return tuple(p.strip() for p in raw.split(",") if p.strip())
        return tuple(raw)
    if name == "input_format":
        try:
            return InputFormat(str(raw))
        except ValueError:
            raise ValidationError(f"Unknown input format: {raw}")
    if name == "type_definition":
        try:
            return TypeDefinition(str(raw))
        except ValueError:
            raise ValidationError(f"Unknown type definition: {raw}")
    return raw


class Settings:
    """Resolves run settings with precedence defaults < config file < flags."""

    _file_sink: Optional[int] = None

    @staticmethod
    def resolve(config_values: Optional[Mapping[str, str]] = None, **overrides: Any) -> RunConfig:
        """
        Build a RunConfig.

        Args:
            config_values: key=value pairs from a config file (keys are RunConfig field names)
            **overrides: flag values; None means "not given"

        Returns:
            The resolved, validated RunConfig
        """
        known = {f.name for f in fields(RunConfig)}
        changes: dict[str, Any] = {}
        for key, raw in (config_values or {}).items():
            if key not in known:
                raise ValidationError(f"Unknown config key: {key}")
            changes[key] = _coerce(key, raw)
        for key, raw in overrides.items():
            if key not in known:
                raise ValidationError(f"Unknown setting: {key}")
            if raw is None or raw == ():
                continue
            changes[key] = _coerce(key, raw)
        config = replace(RunConfig(), **changes)
        logger.debug(f"[Settings] Resolved run config {config.config_hash()[:12]}")
        return config

    @staticmethod
    def create_output_directory(path: str) -> str:
        """Create the output directory (and parents) and return it."""
        try:
            os.makedirs(path, exist_ok=True)
        except OSError as e:
            raise ValidationError(f"Cannot create output directory {path}: {e.strerror}")
        return path

    @classmethod
    def setup_logging(cls) -> Optional[int]:
        """Attach the rotating file log once per process; stderr logging is configured at import."""
        if cls._file_sink is not None:
            return cls._file_sink
        try:
            cls._file_sink = add_file_sink()
            return cls._file_sink
        except OSError as e:
            # Proceed without file logging rather than abort the run.
            logger.warning(f"[Settings] File logging disabled: {e}")
            return None
