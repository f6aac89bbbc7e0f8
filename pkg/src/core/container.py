"""Dependency Injection Container for corplex runs."""
from dependency_injector import containers, providers

from src.core.settings import RunConfig
from src.repositories.config_file_loader import ConfigFileLoader
from src.repositories.model_repository import ModelRepository
from src.repositories.report_repository import ReportRepository
from src.repositories.spectrum_repository import SpectrumRepository
from src.services.report_builder import ReportBuilder


def _tag_map(loader: ConfigFileLoader, config: RunConfig):
    return loader.load_tag_map(config.tags_path)


def _dlevel_rules(loader: ConfigFileLoader, config: RunConfig):
    return loader.load_dlevel_rules(config.rules_path)


def _syllable_counter(loader: ConfigFileLoader, config: RunConfig):
    return loader.load_syllable_counter(config.syllables_path)


class AnalysisContainer(containers.DeclarativeContainer):
    """DI Container wiring one resolved run configuration to services and repositories."""

    # ═══════════════════════════════════════════════════════════
    # RUN CONFIGURATION - supplied per invocation
    # ═══════════════════════════════════════════════════════════

    run_config = providers.Dependency(instance_of=RunConfig)

    # ═══════════════════════════════════════════════════════════
    # SINGLETONS - loaded once per run
    # ═══════════════════════════════════════════════════════════

    config_loader = providers.Singleton(ConfigFileLoader)

    tag_map = providers.Singleton(_tag_map, loader=config_loader, config=run_config)

    dlevel_rules = providers.Singleton(_dlevel_rules, loader=config_loader, config=run_config)

    syllable_counter = providers.Singleton(_syllable_counter, loader=config_loader, config=run_config)

    spectrum_repository = providers.Singleton(SpectrumRepository)

    model_repository = providers.Singleton(ModelRepository)

    # ═══════════════════════════════════════════════════════════
    # FACTORIES - stateless per use
    # ═══════════════════════════════════════════════════════════

    report_builder = providers.Factory(
        ReportBuilder,
        config=run_config,
        tag_map=tag_map,
        dlevel_rules=dlevel_rules,
        syllable_counter=syllable_counter,
    )

    report_repository = providers.Factory(
        ReportRepository,
        output_dir=run_config.provided.output_dir,
        formats=run_config.provided.output_formats,
    )


def create_container(config: RunConfig) -> AnalysisContainer:
    """Container bound to one run configuration."""
    return AnalysisContainer(run_config=providers.Object(config))
