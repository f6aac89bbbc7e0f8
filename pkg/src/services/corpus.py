"""
Corpus ingestion.

Reads plain UTF-8 text and TreeTagger-style vertical files into immutable
token streams, filters punctuation for lexical measures, cuts word segments
and samples whole sentences to a token budget.
"""

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from src.core.constants import (
    ABBREVIATIONS,
    DOC_MARKUP,
    PUNCTUATION_TAGS,
    SENTENCE_CLOSE_MARKUP,
    SENTENCE_END_TAG,
    SENTENCE_FINAL_PUNCTUATION,
    UNKNOWN_LEMMA,
)
from src.core.logger import logger
from src.core.types import InputFormat, TypeDefinition
from src.core.validators import ArgumentError, IngestionError, require_positive


@dataclass(frozen=True, slots=True)
class Token:
    """One running word or punctuation mark."""

    surface: str
    pos: Optional[str] = None
    lemma: Optional[str] = None
    is_word: bool = True

    def __post_init__(self):
        if not self.surface:
            raise ArgumentError("token surface must be non-empty")
        if self.pos is not None and not self.pos:
            raise ArgumentError(f"empty POS tag on token {self.surface!r}")


@dataclass(frozen=True)
class TokenStream:
    """
    Ordered tokens with sentence and document boundaries.

    ``sentence_bounds`` and ``doc_bounds`` hold exclusive end indices; every
    document bound is also a sentence bound and both end at ``len(tokens)``.
    """

    tokens: tuple[Token, ...]
    sentence_bounds: tuple[int, ...]
    source_id: str = ""
    doc_bounds: tuple[int, ...] = ()

    def __post_init__(self):
        n = len(self.tokens)
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "sentence_bounds", tuple(self.sentence_bounds))
        _check_bounds("sentence_bounds", self.sentence_bounds, n)
        if n and not self.doc_bounds:
            object.__setattr__(self, "doc_bounds", (n,))
        else:
            object.__setattr__(self, "doc_bounds", tuple(self.doc_bounds))
        _check_bounds("doc_bounds", self.doc_bounds, n)
        if not set(self.doc_bounds) <= set(self.sentence_bounds):
            raise ArgumentError("document bounds must coincide with sentence bounds")

    def __len__(self) -> int:
        return len(self.tokens)

    @classmethod
    def empty(cls, source_id: str = "") -> "TokenStream":
        return cls((), (), source_id)

    @property
    def sentence_count(self) -> int:
        return len(self.sentence_bounds)

    @property
    def word_count(self) -> int:
        return sum(1 for t in self.tokens if t.is_word)

    @property
    def is_tagged(self) -> bool:
        return bool(self.tokens) and all(t.pos is not None for t in self.tokens)

    def sentence_spans(self) -> list[tuple[int, int]]:
        """(start, end) index pairs, one per sentence."""
        starts = (0,) + self.sentence_bounds[:-1]
        return list(zip(starts, self.sentence_bounds))

    def doc_spans(self) -> list[tuple[int, int]]:
        starts = (0,) + self.doc_bounds[:-1]
        return list(zip(starts, self.doc_bounds))


@dataclass(frozen=True)
class Segment:
    """A run of exactly ``word_count`` word tokens, [start, end) in stream indices."""

    start: int
    end: int
    word_count: int

    def __post_init__(self):
        if not self.start < self.end:
            raise ArgumentError(f"segment start {self.start} must precede end {self.end}")
        if self.word_count > self.end - self.start:
            raise ArgumentError("segment word count exceeds its span")


@dataclass(frozen=True)
class SampledStream:
    """Result of sentence sampling; ``short`` flags a corpus smaller than the budget."""

    stream: TokenStream
    short: bool = False


def _check_bounds(name: str, bounds: Sequence[int], n: int) -> None:
    if n == 0:
        if bounds:
            raise ArgumentError(f"{name} must be empty for an empty stream")
        return
    previous = 0
    for b in bounds:
        if b <= previous:
            raise ArgumentError(f"{name} must be strictly increasing and leave no empty span")
        previous = b
    if not bounds or bounds[-1] != n:
        raise ArgumentError(f"{name} must end at the token count {n}")


# ---------------------------------------------------------------------------
# Plain text
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _token_pattern(abbreviations: tuple[str, ...]) -> re.Pattern:
    alternatives = "|".join(re.escape(a) for a in sorted(abbreviations, key=len, reverse=True))
    abbr = rf"(?P<abbr>(?<!\w)(?:{alternatives})(?!\w))|" if alternatives else ""
    return re.compile(abbr + r"(?P<num>\d+(?:[.,]\d+)*)|(?P<word>\w+(?:['’-]\w+)*)|(?P<punct>[^\w\s])")


def decode_utf8(data: bytes, path: Optional[str] = None) -> str:
    """Decode strictly, reporting the first bad byte offset."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise IngestionError(f"invalid UTF-8 ({e.reason})", path=path, offset=e.start)
    return text.lstrip("\ufeff")


def tokenize_plain(
    text: str | bytes,
    source_id: str = "",
    abbreviations: Iterable[str] = ABBREVIATIONS,
) -> TokenStream:
    """
    Tokenize plain text and place sentence boundaries.

    A boundary follows ``.``, ``!`` or ``?`` when whitespace and a capital
    letter come next, and at the end of the text. Abbreviations in
    ``abbreviations`` are single word tokens and never end a sentence.
    """
    if isinstance(text, bytes):
        text = decode_utf8(text, source_id or None)
    pattern = _token_pattern(tuple(abbreviations))
    matches = list(pattern.finditer(text))
    tokens = [Token(m.group(0), is_word=m.lastgroup != "punct") for m in matches]

    bounds: list[int] = []
    for i, match in enumerate(matches[:-1]):
        if match.group(0) not in SENTENCE_FINAL_PUNCTUATION:
            continue
        following = matches[i + 1]
        gap = text[match.end() : following.start()]
        if gap and not gap.strip() and following.group(0)[0].isupper():
            bounds.append(i + 1)
    if tokens:
        bounds.append(len(tokens))
    return TokenStream(tuple(tokens), tuple(bounds), source_id)


def read_plain(path: str, abbreviations: Iterable[str] = ABBREVIATIONS) -> TokenStream:
    """Read and tokenize a UTF-8 text file (any newline convention)."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise IngestionError(f"cannot read file: {e.strerror}", path=path)
    stream = tokenize_plain(decode_utf8(data, path), source_id=path, abbreviations=abbreviations)
    logger.debug(f"[corpus] {path}: {len(stream)} tokens, {stream.sentence_count} sentences")
    return stream


def write_plain(stream: TokenStream) -> str:
    """One sentence per line, tokens joined by single spaces; blank line between documents."""
    doc_ends = set(stream.doc_bounds[:-1])
    lines = []
    for start, end in stream.sentence_spans():
        lines.append(" ".join(t.surface for t in stream.tokens[start:end]))
        if end in doc_ends:
            lines.append("")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Vertical (tagged) text
# ---------------------------------------------------------------------------


def parse_vertical(
    lines: Iterable[str],
    source_id: str = "",
    sentence_tag: str = SENTENCE_END_TAG,
    punctuation_tags: Iterable[str] = PUNCTUATION_TAGS,
) -> TokenStream:
    """
    Parse ``surface<TAB>pos<TAB>lemma`` lines.

    Blank lines are ignored. Markup lines without TABs are structural:
    ``<text ...>``/``<doc ...>`` start a document, ``</s>`` ends a sentence,
    anything else is skipped.
    """
    punctuation = frozenset(punctuation_tags)
    tokens: list[Token] = []
    sentence_bounds: list[int] = []
    doc_bounds: list[int] = []

    def close_sentence():
        if tokens and (not sentence_bounds or sentence_bounds[-1] < len(tokens)):
            sentence_bounds.append(len(tokens))

    def close_doc():
        close_sentence()
        if tokens and (not doc_bounds or doc_bounds[-1] < len(tokens)):
            doc_bounds.append(len(tokens))

    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if "\t" not in line and line.startswith("<") and line.endswith(">"):
            markup = line.lower()
            if markup.startswith(DOC_MARKUP):
                close_doc()
            elif markup.startswith(SENTENCE_CLOSE_MARKUP):
                close_sentence()
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise IngestionError(
                f"expected 3 TAB-separated fields (surface, pos, lemma), got {len(fields)}",
                path=source_id or None,
                line=lineno,
            )
        surface, pos, lemma = fields
        if not surface or not pos:
            raise IngestionError("empty surface or POS field", path=source_id or None, line=lineno)
        tokens.append(Token(surface, pos, lemma or None, is_word=pos not in punctuation))
        if pos == sentence_tag:
            close_sentence()
    close_doc()

    if not sentence_bounds:
        raise IngestionError("no sentences found", path=source_id or None)
    return TokenStream(tuple(tokens), tuple(sentence_bounds), source_id, tuple(doc_bounds))


def read_vertical(
    path: str,
    sentence_tag: str = SENTENCE_END_TAG,
    punctuation_tags: Iterable[str] = PUNCTUATION_TAGS,
) -> TokenStream:
    """Read a vertical tagged file; errors carry the path and line number."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise IngestionError(f"cannot read file: {e.strerror}", path=path)
    text = decode_utf8(data, path)
    stream = parse_vertical(text.splitlines(), path, sentence_tag, punctuation_tags)
    logger.debug(f"[corpus] {path}: {len(stream)} tagged tokens, {len(stream.doc_bounds)} documents")
    return stream


def write_vertical(stream: TokenStream, sentence_tag: str = SENTENCE_END_TAG) -> str:
    """Serialize a tagged stream so that ``parse_vertical`` reproduces it."""
    doc_starts = set(stream.doc_bounds[:-1])
    sentence_ends = set(stream.sentence_bounds)
    lines = []
    for idx, token in enumerate(stream.tokens):
        if token.pos is None:
            raise ArgumentError(f"token {idx} ({token.surface!r}) has no POS tag")
        if idx in doc_starts:
            lines.append("<doc>")
        lines.append(f"{token.surface}\t{token.pos}\t{token.lemma or ''}")
        if idx + 1 in sentence_ends and token.pos != sentence_tag:
            lines.append(SENTENCE_CLOSE_MARKUP)
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Stream transforms
# ---------------------------------------------------------------------------


def _restrict(stream: TokenStream, keep: Sequence[int]) -> TokenStream:
    """Keep the given token indices (ascending), dropping emptied sentences and documents."""
    tokens = tuple(stream.tokens[i] for i in keep)
    sentence_bounds: list[int] = []
    doc_bounds: list[int] = []
    doc_ends = set(stream.doc_bounds)
    pos = 0
    for _, end in stream.sentence_spans():
        while pos < len(keep) and keep[pos] < end:
            pos += 1
        if pos and (not sentence_bounds or sentence_bounds[-1] < pos):
            sentence_bounds.append(pos)
        if end in doc_ends and sentence_bounds and (not doc_bounds or doc_bounds[-1] < sentence_bounds[-1]):
            doc_bounds.append(sentence_bounds[-1])
    return TokenStream(tokens, tuple(sentence_bounds), stream.source_id, tuple(doc_bounds))


def word_tokens(stream: TokenStream) -> TokenStream:
    """Restrict to word tokens (punctuation removed); idempotent."""
    keep = [i for i, t in enumerate(stream.tokens) if t.is_word]
    if len(keep) == len(stream):
        return stream
    return _restrict(stream, keep)


def type_keys(stream: TokenStream, type_definition: TypeDefinition = TypeDefinition.SURFACE) -> list[str]:
    """Type key of every word token: lowercased surface, or lowercased lemma when available."""
    if type_definition is TypeDefinition.LEMMA:
        return [
            (t.lemma if t.lemma and t.lemma != UNKNOWN_LEMMA else t.surface).lower() for t in stream.tokens if t.is_word
        ]
    return [t.surface.lower() for t in stream.tokens if t.is_word]


def segment(stream: TokenStream, size: int) -> list[Segment]:
    """
    Consecutive non-overlapping runs of exactly ``size`` word tokens.

    Segments restart at every document boundary; trailing partial segments
    are discarded.
    """
    require_positive("size", size)
    segments = []
    for doc_start, doc_end in stream.doc_spans():
        words = [i for i in range(doc_start, doc_end) if stream.tokens[i].is_word]
        for k in range(len(words) // size):
            chunk = words[k * size : (k + 1) * size]
            segments.append(Segment(chunk[0], chunk[-1] + 1, size))
    return segments


def concat_streams(streams: Sequence[TokenStream], source_id: str = "") -> TokenStream:
    """Join streams; each input keeps its own document boundaries."""
    tokens: list[Token] = []
    sentence_bounds: list[int] = []
    doc_bounds: list[int] = []
    for s in streams:
        offset = len(tokens)
        tokens.extend(s.tokens)
        sentence_bounds.extend(b + offset for b in s.sentence_bounds)
        doc_bounds.extend(b + offset for b in s.doc_bounds)
    source = source_id or "+".join(s.source_id for s in streams if s.source_id)
    return TokenStream(tuple(tokens), tuple(sentence_bounds), source, tuple(doc_bounds))


def sample_sentences(stream: TokenStream, budget: int, seed: int) -> SampledStream:
    """
    Draw whole sentences without replacement until the next one would exceed ``budget`` tokens.

    The draw order comes from a seeded permutation; the selected sentences
    keep their original order and document membership.
    """
    require_positive("budget", budget)
    total = len(stream)
    if total <= budget:
        if total < budget:
            logger.warning(f"[corpus] {stream.source_id or 'stream'} has {total} tokens, below budget {budget}")
        return SampledStream(stream, short=total < budget)

    spans = stream.sentence_spans()
    order = np.random.default_rng(seed).permutation(len(spans))
    chosen = []
    used = 0
    for s in order:
        length = spans[s][1] - spans[s][0]
        if used + length > budget:
            break
        chosen.append(int(s))
        used += length
    chosen.sort()

    doc_of = np.searchsorted(np.asarray(stream.doc_bounds), [end for _, end in spans], side="left")
    tokens: list[Token] = []
    sentence_bounds: list[int] = []
    doc_bounds: list[int] = []
    for rank, s in enumerate(chosen):
        start, end = spans[s]
        tokens.extend(stream.tokens[start:end])
        sentence_bounds.append(len(tokens))
        is_last = rank == len(chosen) - 1
        if is_last or doc_of[chosen[rank + 1]] != doc_of[s]:
            doc_bounds.append(len(tokens))
    logger.debug(f"[corpus] sampled {len(chosen)}/{len(spans)} sentences, {used} tokens (budget {budget})")
    return SampledStream(TokenStream(tuple(tokens), tuple(sentence_bounds), stream.source_id, tuple(doc_bounds)))


def detect_format(path: str) -> InputFormat:
    """Vertical when the first token line holds a TAB, plain otherwise."""
    try:
        with open(path, "rb") as f:
            head = f.read(64 * 1024)
    except OSError as e:
        raise IngestionError(f"cannot read file: {e.strerror}", path=path)
    for raw in head.splitlines():
        line = raw.strip()
        if not line or (line.startswith(b"<") and b"\t" not in line):
            continue
        return InputFormat.VERTICAL if b"\t" in line else InputFormat.PLAIN
    return InputFormat.PLAIN


def read_corpus(
    paths: Sequence[str],
    input_format: InputFormat = InputFormat.AUTO,
    sentence_tag: str = SENTENCE_END_TAG,
) -> TokenStream:
    """Read one or more files into a single stream, one document per file."""
    if not paths:
        raise ArgumentError("no corpus files given")
    streams = []
    for path in paths:
        fmt = detect_format(path) if input_format is InputFormat.AUTO else input_format
        if fmt is InputFormat.VERTICAL:
            streams.append(read_vertical(path, sentence_tag))
        elif fmt is InputFormat.PLAIN:
            streams.append(read_plain(path))
        else:
            raise ArgumentError(f"{fmt} files are not corpora: {path}")
    return streams[0] if len(streams) == 1 else concat_streams(streams)
