"""Model Repository - fitted LNRE models as JSON."""
from src.core.logger import logger
from src.core.validators import ArgumentError, IngestionError, ValidationError
from src.repositories.file_utils import atomic_write_json, load_json_file
from src.services.lnre import LnreModel


class ModelRepository:
    """Persists ``LnreModel.to_dict()``; population size S is null for infinite populations."""

    def save(self, file_path: str, model: LnreModel) -> None:
        if not atomic_write_json(file_path, model.to_dict()):
            raise ValidationError(f"Cannot write model file: {file_path}")
        logger.debug(f"[model] Saved {model.family.label} model to {file_path}")

    def load(self, file_path: str) -> LnreModel:
        data = load_json_file(file_path)
        if not isinstance(data, dict):
            raise IngestionError("not a model description", path=file_path)
        try:
            return LnreModel.from_dict(data)
        except ArgumentError as e:
            raise IngestionError(str(e), path=file_path)
