"""Repositories Package - file persistence for configs, spectra, models and reports."""
from src.repositories.config_file_loader import ConfigFileLoader
from src.repositories.model_repository import ModelRepository
from src.repositories.report_repository import ReportRepository, WriteResult
from src.repositories.spectrum_repository import SpectrumRepository

__all__ = [
    "ConfigFileLoader",
    "ModelRepository",
    "ReportRepository",
    "SpectrumRepository",
    "WriteResult",
]
