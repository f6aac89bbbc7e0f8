"""Report Repository - writes report JSON, CSV tables, KDE exports, SVG plots and D-level outputs."""
import csv
import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from src.core.constants import DEFAULT_OUTPUT_FORMATS, DLEVEL_CSV, DLEVEL_JSON, FITS_CSV, REPORT_JSON, TABLES_CSV
from src.core.logger import logger
from src.core.types import PlotKind
from src.core.validators import ComplexityError, ValidationError
from src.repositories.file_utils import atomic_write, dump_json
from src.repositories.model_repository import ModelRepository
from src.services.dlevel import DLevelDistribution, SkippedLine
from src.services.lnre import LnreModel
from src.services.report_builder import KDE_SOURCES, ComplexityReport, format_value, kde_curves
from src.services.svg_renderer import plot_filename, render_svg

TABLE_HEADER = ("table", "corpus", "measure", "field", "value")


def _csv(rows: Iterable[Sequence], header: Sequence[str]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return out.getvalue()


@dataclass
class WriteResult:
    """Files written, plus outputs that could not be produced (each with its reason)."""

    paths: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    def merge(self, other: "WriteResult") -> "WriteResult":
        self.paths.extend(other.paths)
        self.failures.extend(other.failures)
        return self


class ReportRepository:
    """Writes run outputs into one directory; every file is written atomically."""

    def __init__(self, output_dir: str, formats: Sequence[str] = DEFAULT_OUTPUT_FORMATS):
        self.output_dir = output_dir
        self.formats = tuple(formats)
        self.models = ModelRepository()

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def write_text(self, name: str, content: str) -> str:
        target = self.path(name)
        if not atomic_write(target, content):
            raise ValidationError(f"Cannot write output file: {target}")
        logger.debug(f"[output] Wrote {target}")
        return target

    def write_report(self, report: ComplexityReport) -> WriteResult:
        result = WriteResult()
        if "json" in self.formats:
            result.paths.append(self.write_text(REPORT_JSON, report.to_json()))
        if "csv" in self.formats:
            result.paths.append(self.write_text(TABLES_CSV, _csv(report.table_rows(), TABLE_HEADER)))
            for measure in KDE_SOURCES:
                self._attempt(result, f"kde_{measure}.csv", lambda m=measure: self._kde_csv(report, m))
        if "svg" in self.formats:
            for corpus in report.corpora:
                name = plot_filename(PlotKind.GROWTH, corpus.label)
                self._attempt(result, name, lambda c=corpus.label: render_svg(report, PlotKind.GROWTH, c))
            for kind in (PlotKind.TTR_KDE, PlotKind.FLESCH_KDE):
                self._attempt(result, plot_filename(kind), lambda k=kind: render_svg(report, k))
            if any("dlevel" in c.measures for c in report.corpora):
                self._attempt(result, plot_filename(PlotKind.DLEVEL), lambda: render_svg(report, PlotKind.DLEVEL))
        return result

    def _attempt(self, result: WriteResult, name: str, produce) -> None:
        try:
            content = produce()
        except ComplexityError as e:
            logger.warning(f"[output] {name} not written: {e}")
            result.failures.append(f"{name}: {e}")
            return
        result.paths.append(self.write_text(name, content))

    @staticmethod
    def _kde_csv(report: ComplexityReport, measure: str) -> str:
        rows = [(label, x, d) for label, curve in kde_curves(report, measure).items() for x, d in curve.points()]
        return _csv(rows, ("corpus", "x", "density"))

    def write_dlevel(self, distribution: DLevelDistribution, skipped: Sequence[SkippedLine] = ()) -> WriteResult:
        rows = [
            (s.line, s.result.level, ";".join(str(t) for t in sorted(s.result.triggers)))
            for s in distribution.sentences
        ]
        summary = {
            **distribution.to_dict(),
            "skipped_lines": [{"line": s.line, "reason": s.reason} for s in skipped],
        }
        return WriteResult(
            paths=[
                self.write_text(DLEVEL_CSV, _csv(rows, ("line", "level", "triggers"))),
                self.write_text(DLEVEL_JSON, dump_json(summary)),
            ]
        )

    def write_fits(self, fits: dict[str, Optional[LnreModel]], errors: Optional[dict[str, str]] = None) -> WriteResult:
        """``model_<family>.json`` per fitted family and a ``fits.csv`` chi-square comparison table."""
        errors = errors or {}
        result = WriteResult()
        rows = []
        for family, model in fits.items():
            if model is None:
                rows.append((family, "failed", "", "", "", errors.get(family, "")))
                continue
            target = self.path(f"model_{family}.json")
            self.models.save(target, model)
            result.paths.append(target)
            fit = model.fit
            rows.append(
                (
                    family,
                    "ok",
                    fit.chisq if fit else "",
                    fit.df if fit else "",
                    fit.p if fit and fit.p is not None else "",
                    "",
                )
            )
        if len(fits) > 1:
            header = ("family", "status", "chisq", "df", "p", "reason")
            result.paths.append(self.write_text(FITS_CSV, _csv(rows, header)))
        return result
