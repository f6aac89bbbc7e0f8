"""Lexical density over POS-tagged streams."""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Mapping, Optional

from src.core.validators import UndefinedMeasureError, ValidationError
from src.services.corpus import TokenStream, word_tokens

NOUN = "noun"
PROPER_NOUN = "proper_noun"
VERB = "verb"
ADJECTIVE = "adjective"
OTHER_LEXICAL = "other_lexical"

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _prefixes(value: str) -> frozenset[str]:
    return frozenset(p.strip() for p in value.split(",") if p.strip())


def _flag(key: str, value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValidationError(f"{key} must be a boolean (got {value!r})")


@dataclass(frozen=True)
class DensityRatios:
    noun_ratio: float
    verb_ratio: float
    adj_ratio: float
    lexical_ratio: float


@dataclass(frozen=True)
class TagClassMap:
    """
    Tag prefixes per lexical class.

    A tag belongs to a class when it starts with one of the class prefixes.
    Proper-noun prefixes win over noun prefixes (``NNP`` is proper even though
    it starts with ``NN``); every other pair of classes must be disjoint.
    The defaults target Penn-style and TreeTagger English tags: modals (MD)
    are not verbs and adverbs (RB*) are not lexical unless switched on.
    """

    noun_tags: frozenset[str] = frozenset({"NN"})
    proper_noun_tags: frozenset[str] = frozenset({"NP", "NNP"})
    verb_tags: frozenset[str] = frozenset({"V"})
    adjective_tags: frozenset[str] = frozenset({"JJ"})
    other_lexical_tags: frozenset[str] = frozenset()

    def __post_init__(self):
        classes = {
            NOUN: self.noun_tags,
            VERB: self.verb_tags,
            ADJECTIVE: self.adjective_tags,
            OTHER_LEXICAL: self.other_lexical_tags,
            PROPER_NOUN: self.proper_noun_tags,
        }
        for name, prefixes in classes.items():
            object.__setattr__(self, f"{name}_tags", frozenset(prefixes))
        for (a, pa), (b, pb) in combinations(classes.items(), 2):
            if {a, b} == {NOUN, PROPER_NOUN}:
                continue
            clash = sorted(p for p in pa for q in pb if p.startswith(q) or q.startswith(p))
            if clash:
                raise ValidationError(f"tag classes {a} and {b} overlap on {', '.join(clash)}")

    @classmethod
    def default(cls, include_modals: bool = False, include_adverbs: bool = False) -> "TagClassMap":
        return cls(
            verb_tags=frozenset({"V", "MD"}) if include_modals else frozenset({"V"}),
            other_lexical_tags=frozenset({"RB"}) if include_adverbs else frozenset(),
        )

    @classmethod
    def from_mapping(cls, values: Mapping[str, Optional[str]]) -> "TagClassMap":
        """Build from ``class = prefix, prefix`` entries; unset classes keep their defaults."""
        base = cls.default(
            include_modals=_flag("include_modals", values.get("include_modals") or "false"),
            include_adverbs=_flag("include_adverbs", values.get("include_adverbs") or "false"),
        )
        classes = {NOUN, PROPER_NOUN, VERB, ADJECTIVE, OTHER_LEXICAL}
        unknown = sorted(set(values) - classes - {"include_modals", "include_adverbs"})
        if unknown:
            raise ValidationError(f"unknown tag classes: {', '.join(unknown)}")
        tags = {f"{name}_tags": getattr(base, f"{name}_tags") for name in classes}
        tags.update({f"{name}_tags": _prefixes(values[name] or "") for name in values if name in classes})
        return cls(**tags)

    def classify(self, tag: str) -> Optional[str]:
        """Lexical class of a tag, or None for function words."""
        return _tag_class(self, tag)

    def _lookup(self, tag: str) -> Optional[str]:
        if any(tag.startswith(p) for p in self.proper_noun_tags):
            return PROPER_NOUN
        for name, prefixes in (
            (NOUN, self.noun_tags),
            (VERB, self.verb_tags),
            (ADJECTIVE, self.adjective_tags),
            (OTHER_LEXICAL, self.other_lexical_tags),
        ):
            if any(tag.startswith(p) for p in prefixes):
                return name
        return None


@lru_cache(maxsize=4096)
def _tag_class(tag_map: TagClassMap, tag: str) -> Optional[str]:
    return tag_map._lookup(tag)


def lexical_density(stream: TokenStream, tag_map: Optional[TagClassMap] = None) -> DensityRatios:
    """Noun (proper nouns excluded), verb, adjective and all-lexical proportions of word tokens."""
    tag_map = tag_map or TagClassMap()
    words = word_tokens(stream)
    if not len(words):
        raise UndefinedMeasureError("lexical density is undefined for an empty stream")
    counts = {NOUN: 0, VERB: 0, ADJECTIVE: 0, OTHER_LEXICAL: 0}
    for i, token in enumerate(words.tokens):
        if token.pos is None:
            raise UndefinedMeasureError(
                f"lexical density needs POS tags; word token {i} ({token.surface!r}) is untagged"
            )
        cls = tag_map.classify(token.pos)
        if cls in counts:
            counts[cls] += 1
    n = len(words)
    return DensityRatios(
        noun_ratio=counts[NOUN] / n,
        verb_ratio=counts[VERB] / n,
        adj_ratio=counts[ADJECTIVE] / n,
        lexical_ratio=sum(counts.values()) / n,
    )
