"""Spectrum Repository - frequency spectra as ``m,Vm`` CSV with ``#N=`` / ``#V=`` header comments."""
import csv
import io
from typing import Optional

from src.core.logger import logger
from src.core.validators import ArgumentError, IngestionError, ValidationError
from src.repositories.file_utils import atomic_write
from src.services.diversity import FrequencySpectrum

HEADER = ("m", "Vm")


class SpectrumRepository:
    """Reads and writes frequency spectra; N and V in the header must agree with the rows."""

    def dumps(self, spectrum: FrequencySpectrum) -> str:
        out = io.StringIO()
        out.write(f"#N={spectrum.N}\n#V={spectrum.V}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(HEADER)
        for m in sorted(spectrum.spectrum):
            writer.writerow((m, spectrum.spectrum[m]))
        return out.getvalue()

    def save(self, file_path: str, spectrum: FrequencySpectrum) -> None:
        if not atomic_write(file_path, self.dumps(spectrum)):
            raise ValidationError(f"Cannot write spectrum file: {file_path}")
        logger.debug(f"[spectrum] Saved N={spectrum.N} V={spectrum.V} to {file_path}")

    def loads(self, text: str, source: Optional[str] = None) -> FrequencySpectrum:
        declared: dict[str, int] = {}
        counts: dict[int, int] = {}
        header_seen = False
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                if key.strip() in ("N", "V"):
                    declared[key.strip()] = self._integer(value, source, lineno)
                continue
            cells = next(csv.reader([line]))
            if not header_seen and [c.strip() for c in cells] == list(HEADER):
                header_seen = True
                continue
            if len(cells) != 2:
                raise IngestionError(f"expected 2 columns, got {len(cells)}", path=source, line=lineno)
            m, vm = self._integer(cells[0], source, lineno), self._integer(cells[1], source, lineno)
            if m < 1 or vm < 0:
                raise IngestionError(f"class m={m} with V(m)={vm} is out of range", path=source, line=lineno)
            if m in counts:
                raise IngestionError(f"frequency class {m} listed twice", path=source, line=lineno)
            counts[m] = vm

        try:
            N = sum(m * vm for m, vm in counts.items())
            spectrum = FrequencySpectrum(N=N, V=sum(counts.values()), spectrum=counts)
        except ArgumentError as e:
            raise IngestionError(str(e), path=source)
        for key, value in declared.items():
            actual = spectrum.N if key == "N" else spectrum.V
            if value != actual:
                raise IngestionError(f"header declares {key}={value} but the rows give {key}={actual}", path=source)
        return spectrum

    def load(self, file_path: str) -> FrequencySpectrum:
        try:
            with open(file_path, encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise IngestionError(f"cannot read file: {e.strerror}", path=file_path)
        except UnicodeDecodeError as e:
            raise IngestionError(f"invalid UTF-8 ({e.reason})", path=file_path, offset=e.start)
        return self.loads(text, source=file_path)

    @staticmethod
    def _integer(value: str, source: Optional[str], lineno: int) -> int:
        try:
            return int(value.strip())
        except ValueError:
            raise IngestionError(f"not an integer: {value.strip()!r}", path=source, line=lineno)
