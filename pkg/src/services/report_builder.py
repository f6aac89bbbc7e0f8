"""
Report assembly.

Runs every measure over one corpus (or two, with a comparison block) and
collects the results in a ``ComplexityReport``. A measure that cannot be
computed for the input is kept in the report as "unavailable" with the
error message as its reason; it never aborts the rest of the report.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from src.core.constants import APP_VERSION, FAMILY_FALLBACK_ORDER
from src.core.logger import logger
from src.core.settings import RunConfig
from src.core.types import ModelFamily, ReadabilityMeasure
from src.core.validators import ArgumentError, ComplexityError, RenderError, UndefinedMeasureError
from src.services.corpus import TokenStream, word_tokens
from src.services.density import TagClassMap, lexical_density
from src.services.diversity import (
    FrequencySpectrum,
    GrowthCurve,
    SampleSeries,
    corrected_indices,
    frequency_spectrum,
    growth_rate,
    interpolated_growth,
    msttr,
    observed_growth,
    ttr,
)
from src.services.dlevel import DLevelRules, TreeBank, dlevel_distribution
from src.services.lnre import (
    LnreModel,
    compare_growth_z,
    compare_vocabulary_z,
    extrapolate_growth,
    fit_with_fallback,
    growth_checkpoints,
)
from src.services.readability import (
    FLESCH_BANDS,
    SyllableCounter,
    classify_flesch,
    mean_sentence_length,
    readability_series,
)
from src.services.stats import KdeCurve, kde, ks_two_sample, mean_sd

AVAILABLE = "ok"
UNAVAILABLE = "unavailable"

# Table each measure is listed under in the flat CSV export
MEASURE_TABLES = {
    "ttr": "diversity",
    "msttr": "diversity",
    "vocabulary": "diversity",
    "corrected_indices": "diversity",
    "growth_rate": "diversity",
    "lnre": "lnre",
    "density": "density",
    "flesch": "readability",
    "flesch_kincaid": "readability",
    "sentence_length": "readability",
    "dlevel": "dlevel",
    "ks_ttr": "comparison",
    "ks_flesch": "comparison",
    "growth_rate_z": "comparison",
    "vocabulary_z": "comparison",
}

# Series a KDE plot or export can be drawn from: measure name -> field holding the values
KDE_SOURCES = {"ttr": "msttr", "flesch": "flesch"}


@dataclass(frozen=True)
class Measure:
    """One reported measure: a JSON-ready value, or the reason it is unavailable."""

    value: Optional[dict[str, Any]] = None
    reason: Optional[str] = None

    def __post_init__(self):
        if (self.value is None) == (self.reason is None):
            raise ArgumentError("a measure has either a value or a reason")

    @property
    def available(self) -> bool:
        return self.value is not None

    def to_dict(self) -> dict[str, Any]:
        if self.value is not None:
            return {"status": AVAILABLE, "value": self.value}
        return {"status": UNAVAILABLE, "reason": self.reason}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Measure":
        if data.get("status") == AVAILABLE:
            return cls(value=data["value"])
        return cls(reason=data.get("reason") or "unavailable")


@dataclass(frozen=True)
class CorpusInput:
    label: str
    stream: TokenStream
    trees: Optional[TreeBank] = None
    files: tuple[str, ...] = ()


@dataclass
class CorpusReport:
    label: str
    source: str
    tokens: int
    words: int
    sentences: int
    measures: dict[str, Measure] = field(default_factory=dict)

    def value(self, name: str) -> dict[str, Any]:
        """Value of an available measure; RenderError names the missing series otherwise."""
        measure = self.measures.get(name)
        if measure is None or measure.value is None:
            raise RenderError(f"{self.label}.{name}")
        return measure.value

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "source": self.source,
            "tokens": self.tokens,
            "words": self.words,
            "sentences": self.sentences,
            "measures": {name: m.to_dict() for name, m in self.measures.items()},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CorpusReport":
        return cls(
            label=data["label"],
            source=data["source"],
            tokens=data["tokens"],
            words=data["words"],
            sentences=data["sentences"],
            measures={name: Measure.from_dict(m) for name, m in data["measures"].items()},
        )


@dataclass(frozen=True)
class Provenance:
    input_files: tuple[str, ...]
    config_hash: str
    tool_version: str
    seed: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "input_files": list(self.input_files),
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "seed": self.seed,
        }


@dataclass
class ComplexityReport:
    corpora: list[CorpusReport]
    provenance: Provenance
    comparison: Optional[dict[str, Measure]] = None

    def corpus(self, label: str) -> CorpusReport:
        for report in self.corpora:
            if report.label == label:
                return report
        raise RenderError(label, f"no corpus labelled {label!r} in the report")

    @property
    def unavailable(self) -> list[str]:
        """Qualified names of every measure that could not be computed."""
        names = [f"{c.label}.{n}" for c in self.corpora for n, m in c.measures.items() if not m.available]
        names += [f"comparison.{n}" for n, m in (self.comparison or {}).items() if not m.available]
        return names

    @property
    def is_partial(self) -> bool:
        return bool(self.unavailable)

    def to_dict(self) -> dict[str, Any]:
        return {
            "provenance": self.provenance.to_dict(),
            "flesch_bands": [band.to_dict() for band in FLESCH_BANDS],
            "corpora": [c.to_dict() for c in self.corpora],
            "comparison": None
            if self.comparison is None
            else {name: m.to_dict() for name, m in self.comparison.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ComplexityReport":
        prov = data["provenance"]
        comparison = data.get("comparison")
        return cls(
            corpora=[CorpusReport.from_dict(c) for c in data["corpora"]],
            provenance=Provenance(
                input_files=tuple(prov["input_files"]),
                config_hash=prov["config_hash"],
                tool_version=prov["tool_version"],
                seed=prov["seed"],
            ),
            comparison=None if comparison is None else {n: Measure.from_dict(m) for n, m in comparison.items()},
        )

    def table_rows(self) -> list[tuple[str, str, str, str, Any]]:
        """(table, corpus, measure, field, value) for every scalar of every available measure."""
        rows = []
        blocks = [(c.label, c.measures) for c in self.corpora]
        if self.comparison is not None:
            blocks.append(("comparison", self.comparison))
        for label, measures in blocks:
            for name, measure in measures.items():
                if measure.value is None:
                    continue
                table = MEASURE_TABLES.get(name, name)
                for key, value in _scalars(measure.value):
                    rows.append((table, label, name, key, value))
        return rows


def _scalars(value: dict[str, Any], prefix: str = ""):
    for key, item in value.items():
        name = f"{prefix}{key}"
        if isinstance(item, dict):
            yield from _scalars(item, f"{name}.")
        elif isinstance(item, (int, float, str)) and not isinstance(item, bool):
            yield name, item


def curve_points(curve: GrowthCurve) -> list[dict[str, Any]]:
    return [{"N": p.N, "V": p.V, "V1": p.V1, "V2": p.V2, "kind": str(p.kind)} for p in curve.checkpoints]


def kde_curves(report: ComplexityReport, measure: str) -> dict[str, KdeCurve]:
    """KDE of one sample series per corpus, computed from the series stored in the report."""
    if measure not in KDE_SOURCES:
        raise ArgumentError(f"no sample series for {measure!r} (valid: {sorted(KDE_SOURCES)})")
    return {c.label: kde(c.value(KDE_SOURCES[measure])["series"]) for c in report.corpora}


@dataclass
class _Analysis:
    """Intermediate objects shared between measures of one corpus."""

    spectrum: Optional[FrequencySpectrum] = None
    model: Optional[LnreModel] = None
    ttr_series: Optional[SampleSeries] = None
    flesch_series: Optional[SampleSeries] = None


def _needed(value, what: str):
    if value is None:
        raise UndefinedMeasureError(f"{what} is not available")
    return value


class ReportBuilder:
    """Computes every measure of a run configuration over one or two corpora."""

    def __init__(
        self,
        config: RunConfig,
        tag_map: Optional[TagClassMap] = None,
        dlevel_rules: Optional[DLevelRules] = None,
        syllable_counter: Optional[SyllableCounter] = None,
    ):
        self.config = config
        self.tag_map = tag_map or TagClassMap()
        self.dlevel_rules = dlevel_rules or DLevelRules()
        self.syllable_counter = syllable_counter or SyllableCounter()

    def build(self, corpus_a: CorpusInput, corpus_b: Optional[CorpusInput] = None) -> ComplexityReport:
        inputs = [corpus_a] if corpus_b is None else [corpus_a, corpus_b]
        with ThreadPoolExecutor(max_workers=len(inputs)) as executor:
            results = list(executor.map(self._analyze, inputs))

        comparison = None
        if corpus_b is not None:
            comparison = self._compare(results[0][1], results[1][1])

        files = tuple(f for corpus in inputs for f in corpus.files)
        files += tuple(c.trees.source_id for c in inputs if c.trees is not None and c.trees.source_id)
        report = ComplexityReport(
            corpora=[r for r, _ in results],
            provenance=Provenance(files, self.config.config_hash(), APP_VERSION, self.config.seed),
            comparison=comparison,
        )
        if report.is_partial:
            logger.warning(f"[report] unavailable: {', '.join(report.unavailable)}")
        return report

    @staticmethod
    def _measure(name: str, compute: Callable[[], dict[str, Any]]) -> Measure:
        try:
            return Measure(value=compute())
        except (ComplexityError, ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
            reason = str(e) or type(e).__name__
            logger.warning(f"[report] {name} unavailable: {reason}")
            return Measure(reason=reason)

    def _families(self) -> list[ModelFamily]:
        if self.config.family == "all":
            return [ModelFamily(f) for f in FAMILY_FALLBACK_ORDER]
        first = ModelFamily(self.config.family)
        return [first] + [ModelFamily(f) for f in FAMILY_FALLBACK_ORDER if ModelFamily(f) is not first]

    def _analyze(self, corpus: CorpusInput) -> tuple[CorpusReport, _Analysis]:
        cfg = self.config
        stream = corpus.stream
        typedef = cfg.type_definition
        state = _Analysis()
        words = word_tokens(stream)
        logger.info(f"[report] corpus {corpus.label}: {len(stream)} tokens, {len(words)} words")

        def vocabulary() -> dict[str, Any]:
            state.spectrum = frequency_spectrum(stream, typedef)
            s = state.spectrum
            return {"N": s.N, "V": s.V, "V1": s.vm(1), "V2": s.vm(2)}

        def msttr_block() -> dict[str, Any]:
            mean, series = msttr(stream, cfg.segment_size, typedef)
            state.ttr_series = series
            return {
                "mean": mean,
                "segment_size": cfg.segment_size,
                "segments": len(series),
                "series": list(series.values),
            }

        def corrected() -> dict[str, Any]:
            c = corrected_indices(_needed(state.spectrum, "frequency spectrum"))
            return {"herdan_c": c.herdan_c, "guiraud_r": c.guiraud_r, "yule_k": c.yule_k}

        def lnre() -> dict[str, Any]:
            state.model = fit_with_fallback(_needed(state.spectrum, "frequency spectrum"), self._families())
            return state.model.to_dict()

        def growth() -> dict[str, Any]:
            spectrum = _needed(state.spectrum, "frequency spectrum")
            observed = observed_growth(stream, type_definition=typedef)
            checkpoints = growth_checkpoints(spectrum.N)
            if state.model is not None:
                expected = extrapolate_growth(state.model, checkpoints)
            else:
                expected = interpolated_growth(spectrum, checkpoints)
            return {"observed": curve_points(observed), "expected": curve_points(expected)}

        def density() -> dict[str, Any]:
            r = lexical_density(stream, self.tag_map)
            return {
                "noun_ratio": r.noun_ratio,
                "verb_ratio": r.verb_ratio,
                "adj_ratio": r.adj_ratio,
                "lexical_ratio": r.lexical_ratio,
            }

        def flesch() -> dict[str, Any]:
            series = readability_series(
                stream, cfg.readability_sample, ReadabilityMeasure.FLESCH, self.syllable_counter
            )
            state.flesch_series = series
            summary = mean_sd(series)
            return {
                "mean": summary.mean,
                "sd": summary.sd,
                "band": classify_flesch(summary.mean).band_name,
                "sample_size": cfg.readability_sample,
                "samples": len(series),
                "series": list(series.values),
            }

        def flesch_kincaid() -> dict[str, Any]:
            series = readability_series(
                stream, cfg.readability_sample, ReadabilityMeasure.FLESCH_KINCAID, self.syllable_counter
            )
            summary = mean_sd(series)
            return {"mean": summary.mean, "sd": summary.sd, "sample_size": cfg.readability_sample}

        def sentence_length() -> dict[str, Any]:
            summary = mean_sentence_length(stream)
            return {"mean": summary.mean, "sd": summary.sd}

        steps: list[tuple[str, Callable[[], dict[str, Any]]]] = [
            ("ttr", lambda: {"value": ttr(stream, typedef)}),
            ("msttr", msttr_block),
            ("vocabulary", vocabulary),
            ("corrected_indices", corrected),
            ("growth_rate", lambda: {"value": growth_rate(_needed(state.spectrum, "frequency spectrum"))}),
            ("lnre", lnre),
            ("growth", growth),
            ("density", density),
            ("flesch", flesch),
            ("flesch_kincaid", flesch_kincaid),
            ("sentence_length", sentence_length),
        ]
        if corpus.trees is not None:
            trees = corpus.trees
            steps.append(("dlevel", lambda: dlevel_distribution(trees, self.dlevel_rules).to_dict()))

        measures = {name: self._measure(f"{corpus.label}.{name}", compute) for name, compute in steps}
        report = CorpusReport(
            label=corpus.label,
            source=stream.source_id,
            tokens=len(stream),
            words=len(words),
            sentences=stream.sentence_count,
            measures=measures,
        )
        return report, state

    def _compare(self, a: _Analysis, b: _Analysis) -> dict[str, Measure]:
        def ks(series_a: Optional[SampleSeries], series_b: Optional[SampleSeries], what: str) -> dict[str, Any]:
            result = ks_two_sample(_needed(series_a, f"{what} series"), _needed(series_b, f"{what} series"))
            return {"d": result.d, "p": result.p, "n1": result.n1, "n2": result.n2}

        def z(test) -> Callable[[], dict[str, Any]]:
            def run() -> dict[str, Any]:
                result = test(
                    _needed(a.model, "LNRE model"),
                    _needed(a.spectrum, "frequency spectrum"),
                    _needed(b.model, "LNRE model"),
                    _needed(b.spectrum, "frequency spectrum"),
                )
                return {"z": result.z, "p": result.p}

            return run

        steps: list[tuple[str, Callable[[], dict[str, Any]]]] = [
            ("ks_ttr", lambda: ks(a.ttr_series, b.ttr_series, "TTR")),
            ("ks_flesch", lambda: ks(a.flesch_series, b.flesch_series, "Flesch")),
            ("growth_rate_z", z(compare_growth_z)),
            ("vocabulary_z", z(compare_vocabulary_z)),
        ]
        return {name: self._measure(f"comparison.{name}", compute) for name, compute in steps}


def build_report(
    corpus_a: CorpusInput,
    corpus_b: Optional[CorpusInput] = None,
    config: Optional[RunConfig] = None,
    tag_map: Optional[TagClassMap] = None,
    dlevel_rules: Optional[DLevelRules] = None,
    syllable_counter: Optional[SyllableCounter] = None,
) -> ComplexityReport:
    return ReportBuilder(config or RunConfig(), tag_map, dlevel_rules, syllable_counter).build(corpus_a, corpus_b)


def format_value(value: Any) -> str:
    """Exact text form used in CSV cells: repr for floats, so CSV and JSON agree digit for digit."""
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ArgumentError(f"non-finite value {value} cannot be exported")
        return repr(value)
    return str(value)

