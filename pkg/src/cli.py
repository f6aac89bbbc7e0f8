"""CLI interface for corplex - corpus language-complexity analysis.

Usage:
    corplex analyze corpus.txt --trees corpus.trees
    corplex compare narrow.vrt broad.vrt --equalize-tokens --seed 7
    corplex fit spectrum.csv --family all
    corplex dlevel parses.trees
    corplex sample corpus.vrt --tokens 250000

Exit codes: 0 complete, 2 partial (some measure or output unavailable), 1 fatal.
"""

import sys
from contextlib import contextmanager
from typing import Iterator, NoReturn, Optional

try:
    import typer
except ImportError:
    print("Error: typer is not installed. Install it with: pip install typer")
    sys.exit(1)

from src.core.constants import (
    APP_VERSION,
    DEFAULT_FAMILY,
    DEFAULT_INPUT_FORMAT,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_OUTPUT_FORMATS,
    DEFAULT_READABILITY_SAMPLE,
    DEFAULT_SEED,
    DEFAULT_SEGMENT_SIZE,
    DEFAULT_TYPE_DEF,
    EXIT_FATAL,
    EXIT_OK,
    EXIT_PARTIAL,
)
from src.core.container import AnalysisContainer, create_container
from src.core.logger import logger
from src.core.settings import RunConfig, Settings
from src.core.types import InputFormat, ModelFamily
from src.core.validators import ComplexityError, NumericError
from src.repositories.config_file_loader import ConfigFileLoader
from src.services.corpus import (
    TokenStream,
    read_corpus,
    sample_sentences,
    write_plain,
    write_vertical,
)
from src.services.diversity import frequency_spectrum, observed_growth
from src.services.dlevel import TreeBank, dlevel_distribution, read_bracketed
from src.services.lnre import LnreModel, extrapolate_growth, fit, growth_checkpoints
from src.services.report_builder import ComplexityReport, CorpusInput, curve_points
from src.services.svg_renderer import render_growth

app = typer.Typer(
    name="corplex",
    help="corplex - lexical diversity, LNRE growth, readability and D-level complexity of corpora",
    add_completion=False,
)

# ---------------------------------------------------------------------------
# Shared options (None means "not given", so config-file values can apply)
# ---------------------------------------------------------------------------

_FORMATS = ", ".join(f.value for f in InputFormat)
_FAMILIES = ", ".join(f.value for f in ModelFamily) + ", all"

FormatOption = typer.Option(None, "--format", help=f"Input format: {_FORMATS} [default: {DEFAULT_INPUT_FORMAT}]")
SegmentOption = typer.Option(
    None, "--segment-size", help=f"Word tokens per TTR segment [default: {DEFAULT_SEGMENT_SIZE}]"
)
ReadabilityOption = typer.Option(
    None, "--readability-sample", help=f"Word tokens per readability sample [default: {DEFAULT_READABILITY_SAMPLE}]"
)
FamilyOption = typer.Option(None, "--family", help=f"LNRE model family: {_FAMILIES} [default: {DEFAULT_FAMILY}]")
TypeDefOption = typer.Option(None, "--type-def", help=f"Type definition: surface, lemma [default: {DEFAULT_TYPE_DEF}]")
TagsOption = typer.Option(None, "--tags", help="Tag-class map file (key = value) [default: built-in Penn/TreeTagger]")
RulesOption = typer.Option(None, "--rules", help="D-level rules file (key = value) [default: built-in Penn Treebank]")
SyllablesOption = typer.Option(None, "--syllables", help="Extra syllable exceptions (word = count) [default: none]")
SeedOption = typer.Option(None, "--seed", help=f"Random seed for sampling [default: {DEFAULT_SEED}]")
OutOption = typer.Option(None, "--out", "-o", help=f"Output directory [default: {DEFAULT_OUTPUT_DIR}]")
EmitOption = typer.Option(
    None, "--emit", help=f"Comma-separated output formats [default: {','.join(DEFAULT_OUTPUT_FORMATS)}]"
)
ConfigOption = typer.Option(None, "--config", "-c", help="Config file (key = value); flags override it")


def _fail(message: object) -> NoReturn:
    typer.echo(f"❌ Error: {message}", err=True)
    raise typer.Exit(EXIT_FATAL)


@contextmanager
def _fatal_errors() -> Iterator[None]:
    """Turn toolkit errors into exit code 1 with a one-line message."""
    try:
        yield
    except ComplexityError as e:
        logger.debug(f"[cli] fatal: {e!r}")
        if isinstance(e, NumericError) and e.diagnostics:
            for key, value in e.diagnostics.items():
                typer.echo(f"   {key}: {value}", err=True)
        _fail(e)


def _init(config_path: Optional[str], **flags) -> tuple[RunConfig, AnalysisContainer]:
    """Resolve settings (defaults < config file < flags), validate every input path, wire services."""
    Settings.setup_logging()
    values = ConfigFileLoader().load(config_path) if config_path else None
    config = Settings.resolve(values, **flags)
    config.validate_paths()
    Settings.create_output_directory(config.output_dir)
    return config, create_container(config)


def _emit_formats(emit: Optional[str]) -> Optional[tuple[str, ...]]:
    return tuple(f.strip() for f in emit.split(",") if f.strip()) if emit else None


def _trees(path: Optional[str], container: AnalysisContainer) -> Optional[TreeBank]:
    return read_bracketed(path, container.dlevel_rules()) if path else None


def _finish(report: ComplexityReport, container: AnalysisContainer) -> None:
    written = container.report_repository().write_report(report)
    for path in written.paths:
        typer.echo(f"   📄 {path}")
    problems = report.unavailable + written.failures
    if problems:
        typer.echo(f"⚠️  Partial report: {len(problems)} item(s) unavailable")
        for item in problems:
            typer.echo(f"   - {item}")
        raise typer.Exit(EXIT_PARTIAL)
    typer.echo("✅ Report complete")


def _equalize(a: TokenStream, b: TokenStream, seed: int) -> tuple[TokenStream, TokenStream]:
    """Sample the larger corpus down to the smaller one's token count."""
    if len(a) == len(b):
        return a, b
    if len(a) > len(b):
        return sample_sentences(a, len(b), seed).stream, b
    return a, sample_sentences(b, len(a), seed).stream


@app.command()
def analyze(
    corpus: list[str] = typer.Argument(..., help="Corpus file(s); several files form one corpus"),
    trees: Optional[str] = typer.Option(None, "--trees", help="Bracketed parses for D-level analysis"),
    fmt: Optional[str] = FormatOption,
    segment_size: Optional[int] = SegmentOption,
    readability_sample: Optional[int] = ReadabilityOption,
    family: Optional[str] = FamilyOption,
    type_def: Optional[str] = TypeDefOption,
    tags: Optional[str] = TagsOption,
    rules: Optional[str] = RulesOption,
    syllables: Optional[str] = SyllablesOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    emit: Optional[str] = EmitOption,
    config_file: Optional[str] = ConfigOption,
):
    """Analyze one corpus: report.json, tables.csv and plots."""
    with _fatal_errors():
        config, container = _init(
            config_file,
            corpus_a=tuple(corpus),
            trees_a=trees,
            input_format=fmt,
            segment_size=segment_size,
            readability_sample=readability_sample,
            family=family,
            type_definition=type_def,
            tags_path=tags,
            rules_path=rules,
            syllables_path=syllables,
            seed=seed,
            output_dir=out,
            output_formats=_emit_formats(emit),
        )
        typer.echo(f"📋 Analyzing {', '.join(config.corpus_a)}")
        stream = read_corpus(config.corpus_a, config.input_format, config.sentence_tag)
        corpus_input = CorpusInput("A", stream, _trees(config.trees_a, container), config.corpus_a)
        report = container.report_builder().build(corpus_input)
    _finish(report, container)


@app.command()
def compare(
    corpus_a: str = typer.Argument(..., help="First corpus file"),
    corpus_b: str = typer.Argument(..., help="Second corpus file"),
    trees_a: Optional[str] = typer.Option(None, "--trees-a", help="Bracketed parses of the first corpus"),
    trees_b: Optional[str] = typer.Option(None, "--trees-b", help="Bracketed parses of the second corpus"),
    equalize_tokens: bool = typer.Option(
        False, "--equalize-tokens", help="Sample the larger corpus down to the smaller one's token count"
    ),
    fmt: Optional[str] = FormatOption,
    segment_size: Optional[int] = SegmentOption,
    readability_sample: Optional[int] = ReadabilityOption,
    family: Optional[str] = FamilyOption,
    type_def: Optional[str] = TypeDefOption,
    tags: Optional[str] = TagsOption,
    rules: Optional[str] = RulesOption,
    syllables: Optional[str] = SyllablesOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    emit: Optional[str] = EmitOption,
    config_file: Optional[str] = ConfigOption,
):
    """Compare two corpora: per-corpus measures plus KS and Z tests."""
    with _fatal_errors():
        config, container = _init(
            config_file,
            corpus_a=(corpus_a,),
            corpus_b=(corpus_b,),
            trees_a=trees_a,
            trees_b=trees_b,
            equalize_tokens=equalize_tokens or None,
            input_format=fmt,
            segment_size=segment_size,
            readability_sample=readability_sample,
            family=family,
            type_definition=type_def,
            tags_path=tags,
            rules_path=rules,
            syllables_path=syllables,
            seed=seed,
            output_dir=out,
            output_formats=_emit_formats(emit),
        )
        typer.echo(f"📋 Comparing {', '.join(config.corpus_a)} with {', '.join(config.corpus_b)}")
        a = read_corpus(config.corpus_a, config.input_format, config.sentence_tag)
        b = read_corpus(config.corpus_b, config.input_format, config.sentence_tag)
        if config.equalize_tokens:
            a, b = _equalize(a, b, config.seed)
            typer.echo(f"⚖️  Equalized to {len(a)} and {len(b)} tokens (seed {config.seed})")
        report = container.report_builder().build(
            CorpusInput("A", a, _trees(config.trees_a, container), config.corpus_a),
            CorpusInput("B", b, _trees(config.trees_b, container), config.corpus_b),
        )
    _finish(report, container)


def _load_spectrum(path: str, config: RunConfig, container: AnalysisContainer):
    """Spectrum plus observed growth points (none when the input is already a spectrum)."""
    as_spectrum = config.input_format is InputFormat.SPECTRUM or (
        config.input_format is InputFormat.AUTO and path.lower().endswith(".csv")
    )
    if as_spectrum:
        return container.spectrum_repository().load(path), []
    stream = read_corpus((path,), config.input_format, config.sentence_tag)
    spectrum = frequency_spectrum(stream, config.type_definition)
    return spectrum, curve_points(observed_growth(stream, type_definition=config.type_definition))


@app.command("fit")
def fit_command(
    source: str = typer.Argument(..., help="Spectrum CSV (m,Vm) or corpus file"),
    family: Optional[str] = FamilyOption,
    fmt: Optional[str] = FormatOption,
    type_def: Optional[str] = TypeDefOption,
    out: Optional[str] = OutOption,
    emit: Optional[str] = EmitOption,
    config_file: Optional[str] = ConfigOption,
):
    """Fit LNRE model(s) to a frequency spectrum; writes model JSON and a growth plot."""
    with _fatal_errors():
        config, container = _init(
            config_file,
            corpus_a=(source,),
            family=family,
            input_format=fmt,
            type_definition=type_def,
            output_dir=out,
            output_formats=_emit_formats(emit),
        )
        spectrum, observed = _load_spectrum(source, config, container)
        typer.echo(f"📋 Spectrum: N={spectrum.N}, V={spectrum.V}, V1={spectrum.vm(1)}")

        fits: dict[str, Optional[LnreModel]] = {}
        errors: dict[str, str] = {}
        for model_family in config.families:
            if len(config.families) == 1:
                fits[model_family.value] = fit(spectrum, model_family)
                continue
            try:
                fits[model_family.value] = fit(spectrum, model_family)
            except NumericError as e:
                fits[model_family.value], errors[model_family.value] = None, str(e)
                logger.warning(f"[cli] {model_family.label} fit failed: {e}")

        fitted = {name: model for name, model in fits.items() if model is not None}
        if not fitted:
            _fail("no model family converged: " + "; ".join(f"{k}: {v}" for k, v in errors.items()))

        repository = container.report_repository()
        written = repository.write_fits(fits, errors)
        for name, model in fitted.items():
            assert model.fit is not None
            typer.echo(f"   {model.family.label}: {model.params} chisq={model.fit.chisq:.4g} df={model.fit.df}")
            if "svg" in config.output_formats:
                expected = curve_points(extrapolate_growth(model, growth_checkpoints(spectrum.N)))
                svg = render_growth(f"Vocabulary growth: {model.family.label}", observed, expected)
                written.paths.append(repository.write_text(f"growth_{name}.svg", svg))
    for path in written.paths:
        typer.echo(f"   📄 {path}")
    if errors:
        typer.echo(f"⚠️  {len(errors)} famil{'y' if len(errors) == 1 else 'ies'} did not converge")
        raise typer.Exit(EXIT_PARTIAL)
    typer.echo("✅ Fit complete")


@app.command()
def dlevel(
    trees: str = typer.Argument(..., help="Bracketed parses, one per line"),
    rules: Optional[str] = RulesOption,
    out: Optional[str] = OutOption,
    config_file: Optional[str] = ConfigOption,
):
    """Score sentences on the D-level scale; writes dlevel.csv and dlevel.json."""
    with _fatal_errors():
        config, container = _init(config_file, trees_a=trees, rules_path=rules, output_dir=out)
        assert config.trees_a is not None
        bank = read_bracketed(config.trees_a, container.dlevel_rules())
        distribution = dlevel_distribution(bank, container.dlevel_rules())
        written = container.report_repository().write_dlevel(distribution, bank.skipped)
    typer.echo(f"📊 {distribution.classified} sentences classified, {distribution.skipped} skipped")
    typer.echo(f"   Mean level {distribution.mean:.3f} (SD {distribution.sd:.3f})")
    for level, count in enumerate(distribution.counts):
        typer.echo(f"   Level {level}: {count}")
    for path in written.paths:
        typer.echo(f"   📄 {path}")
    if distribution.skipped:
        raise typer.Exit(EXIT_PARTIAL)


@app.command()
def sample(
    corpus: list[str] = typer.Argument(..., help="Corpus file(s)"),
    tokens: int = typer.Option(..., "--tokens", "-n", help="Token budget of the sample"),
    fmt: Optional[str] = FormatOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    config_file: Optional[str] = ConfigOption,
):
    """Draw whole sentences at random up to a token budget; writes the sample as plain or vertical text."""
    with _fatal_errors():
        config, container = _init(config_file, corpus_a=tuple(corpus), input_format=fmt, seed=seed, output_dir=out)
        stream = read_corpus(config.corpus_a, config.input_format, config.sentence_tag)
        sampled = sample_sentences(stream, tokens, config.seed)
        if sampled.stream.is_tagged:
            name, text = "sample.vrt", write_vertical(sampled.stream, config.sentence_tag)
        else:
            name, text = "sample.txt", write_plain(sampled.stream)
        path = container.report_repository().write_text(name, text)
    if sampled.short:
        typer.echo(f"⚠️  Corpus has only {len(stream)} tokens, below the budget of {tokens}")
    typer.echo(f"✅ Sampled {len(sampled.stream)} tokens, {sampled.stream.sentence_count} sentences")
    typer.echo(f"   📄 {path}")


@app.command()
def version():
    """Show corplex version."""
    typer.echo(f"corplex v{APP_VERSION}")


def main():
    """Entry point for CLI."""
    try:
        app()
    except KeyboardInterrupt:
        typer.echo("\n⚠️  Interrupted by user")
        sys.exit(130)
    except Exception as e:
        logger.exception("CLI error")
        typer.echo(f"❌ Error: {e}", err=True)
        sys.exit(EXIT_FATAL)


if __name__ == "__main__":
    main()
