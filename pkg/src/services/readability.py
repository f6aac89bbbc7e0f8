"""
Readability.

Syllable counting, Flesch Reading Ease and Flesch-Kincaid grade, the
published Flesch band table, per-sample readability series and mean
sentence length.
"""

import bisect
import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

from src.core.types import ReadabilityMeasure
from src.core.validators import ArgumentError, UndefinedMeasureError, ValidationError
from src.services.corpus import TokenStream, segment, word_tokens
from src.services.diversity import SampleSeries
from src.services.stats import MeanSd, mean_sd

_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_NON_LETTER = re.compile(r"[^a-z]")
_VOWELS = frozenset("aeiouy")

# Words the vowel-group rule gets wrong.
DEFAULT_SYLLABLE_EXCEPTIONS = {
    "area": 3,
    "business": 2,
    "create": 2,
    "created": 3,
    "every": 2,
    "idea": 3,
    "ideas": 3,
    "maybe": 2,
    "naive": 2,
    "poem": 2,
    "poet": 2,
    "quiet": 2,
    "science": 2,
    "something": 2,
    "sometimes": 2,
}


@dataclass(frozen=True)
class ReadabilityCounts:
    words: int
    sentences: int
    syllables: int

    def __post_init__(self):
        if self.sentences < 1:
            raise ArgumentError(f"readability needs at least one sentence (got {self.sentences})")
        if self.words < self.sentences:
            raise ArgumentError(f"every sentence needs a word ({self.words} words, {self.sentences} sentences)")
        if self.syllables < self.words:
            raise ArgumentError(f"every word has a syllable ({self.syllables} syllables, {self.words} words)")


@dataclass(frozen=True)
class FleschBand:
    """Scores in (lower, upper] fall in this band."""

    band_name: str
    lower: float
    upper: float

    def to_dict(self) -> dict:
        return {
            "band_name": self.band_name,
            "lower": None if math.isinf(self.lower) else self.lower,
            "upper": None if math.isinf(self.upper) else self.upper,
        }


FLESCH_BANDS: tuple[FleschBand, ...] = (
    FleschBand("very difficult", -math.inf, 30.0),
    FleschBand("difficult", 30.0, 50.0),
    FleschBand("fairly difficult", 50.0, 60.0),
    FleschBand("standard", 60.0, 70.0),
    FleschBand("fairly easy", 70.0, 80.0),
    FleschBand("easy", 80.0, 90.0),
    FleschBand("very easy", 90.0, math.inf),
)


@dataclass(frozen=True)
class SyllableCounter:
    """Vowel-group syllable heuristic with an exception lexicon."""

    exceptions: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_SYLLABLE_EXCEPTIONS))

    def __post_init__(self):
        lexicon = {}
        for word, count in self.exceptions.items():
            if int(count) < 1:
                raise ValidationError(f"syllable count for {word!r} must be >= 1")
            lexicon[word.lower()] = int(count)
        object.__setattr__(self, "exceptions", MappingProxyType(lexicon))

    @classmethod
    def from_mapping(cls, values: Mapping[str, Optional[str]]) -> "SyllableCounter":
        """Default lexicon extended by ``word = count`` entries."""
        lexicon = dict(DEFAULT_SYLLABLE_EXCEPTIONS)
        for word, count in values.items():
            try:
                lexicon[word] = int(count or "")
            except ValueError:
                raise ValidationError(f"syllable count for {word!r} must be an integer (got {count!r})")
        return cls(lexicon)

    def count(self, word: str) -> int:
        """Syllables in a word; hyphenated words sum their parts."""
        if not word:
            raise ArgumentError("cannot count syllables of an empty word")
        parts = [p for p in word.lower().split("-") if p]
        return max(1, sum(self._count_part(p) for p in parts))

    def _count_part(self, part: str) -> int:
        if part in self.exceptions:
            return self.exceptions[part]
        letters = _NON_LETTER.sub("", part)
        if not letters:
            return 1
        groups = len(_VOWEL_GROUP.findall(letters))
        if groups > 1 and letters.endswith("e") and not letters.endswith(("ee", "ye")):
            consonant_le = letters.endswith("le") and len(letters) > 2 and letters[-3] not in _VOWELS
            if not consonant_le:
                groups -= 1
        return max(1, groups)


_DEFAULT_COUNTER = SyllableCounter()


def count_syllables(word: str) -> int:
    return _DEFAULT_COUNTER.count(word)


def flesch_reading_ease(c: ReadabilityCounts) -> float:
    """206.835 - 1.015 * words/sentences - 84.6 * syllables/words."""
    return 206.835 - 1.015 * (c.words / c.sentences) - 84.6 * (c.syllables / c.words)


def flesch_kincaid(c: ReadabilityCounts) -> float:
    """0.39 * words/sentences + 11.8 * syllables/words - 15.59."""
    return 0.39 * (c.words / c.sentences) + 11.8 * (c.syllables / c.words) - 15.59


_SCORERS = {
    ReadabilityMeasure.FLESCH: flesch_reading_ease,
    ReadabilityMeasure.FLESCH_KINCAID: flesch_kincaid,
}


def classify_flesch(score: float) -> FleschBand:
    if math.isnan(score):
        raise ArgumentError("cannot classify a NaN score")
    for band in FLESCH_BANDS:
        if band.lower < score <= band.upper:
            return band
    return FLESCH_BANDS[-1]


def readability_counts(stream: TokenStream, syllable_counter: Optional[SyllableCounter] = None) -> ReadabilityCounts:
    """Word, sentence and syllable totals; sentences without words are not counted."""
    counter = syllable_counter or _DEFAULT_COUNTER
    words = word_tokens(stream)
    if not len(words):
        raise UndefinedMeasureError("readability is undefined for a stream without words")
    syllables = sum(counter.count(t.surface) for t in words.tokens)
    return ReadabilityCounts(words=len(words), sentences=words.sentence_count, syllables=syllables)


def readability_series(
    stream: TokenStream,
    sample_size: int,
    measure: ReadabilityMeasure = ReadabilityMeasure.FLESCH,
    syllable_counter: Optional[SyllableCounter] = None,
) -> SampleSeries:
    """
    Score every consecutive sample of ``sample_size`` word tokens.

    Sentences are counted within the sample: a sentence cut by a sample edge
    counts once on each side where it contributes at least one word.
    """
    counter = syllable_counter or _DEFAULT_COUNTER
    score = _SCORERS[ReadabilityMeasure(measure)]
    samples = segment(stream, sample_size)
    if not samples:
        raise UndefinedMeasureError(f"no full sample of {sample_size} word tokens")
    bounds = stream.sentence_bounds
    values = []
    for sample in samples:
        sentences = set()
        syllables = 0
        for i in range(sample.start, sample.end):
            token = stream.tokens[i]
            if token.is_word:
                sentences.add(bisect.bisect_right(bounds, i))
                syllables += counter.count(token.surface)
        values.append(score(ReadabilityCounts(sample.word_count, len(sentences), syllables)))
    return SampleSeries(str(ReadabilityMeasure(measure)), sample_size, tuple(values))


def mean_sentence_length(stream: TokenStream) -> MeanSd:
    """Mean and population SD of word tokens per sentence."""
    words = word_tokens(stream)
    if not words.sentence_count:
        raise UndefinedMeasureError("mean sentence length is undefined for an empty stream")
    return mean_sd([end - start for start, end in words.sentence_spans()])
