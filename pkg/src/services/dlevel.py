"""
D-level syntactic complexity.

Reads one Penn Treebank style bracketed parse per line and scores each
sentence on the 0-7 developmental scale:

    1  non-finite complement sharing the main subject     (I want to go)
    2  coordination: S CC S, VP CC VP, conjoined subject    (John and Mary left)
    3  relative clause on an object, finite object clause   (I know that he left)
    4  non-finite complement with its own subject,
       apposition, comparative clause                     (I made him go)
    5  subordinate or non-finite adjunct clause             (I left because it rained)
    6  relative clause on the subject, clausal subject      (To err is human)
    7  two or more of the above

Every category name, tag and cue word the rules look at lives in
``DLevelRules`` so the scorer can follow tagset variants.
"""

import math
import re
from collections import Counter
from dataclasses import dataclass, field, fields, replace
from typing import Iterable, Mapping, Optional, Sequence

from src.core.constants import DLEVEL_LENGTH_CAP, DLEVEL_MAX
from src.core.logger import logger
from src.core.validators import ArgumentError, IngestionError, UndefinedMeasureError, ValidationError
from src.services.stats import mean_sd

_BRACKET_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_FUNCTION_TAG = re.compile(r"[-=]")


def _labels(*names: str) -> frozenset[str]:
    return frozenset(names)


@dataclass(frozen=True)
class ParseTree:
    """A constituent; preterminals carry the surface token in ``leaf`` and have no children."""

    label: str
    children: tuple["ParseTree", ...] = ()
    leaf: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if self.leaf is not None and self.children:
            raise ArgumentError(f"leaf node {self.label!r} cannot have children")

    @property
    def category(self) -> str:
        """Label without function tags or indices (``NP-SBJ-1`` -> ``NP``); ``-NONE-`` style labels are kept."""
        if self.label.startswith("-"):
            return self.label
        return _FUNCTION_TAG.split(self.label, maxsplit=1)[0]

    @property
    def is_preterminal(self) -> bool:
        return self.leaf is not None

    def preterminals(self) -> list["ParseTree"]:
        found, stack = [], [self]
        while stack:
            node = stack.pop()
            if node.is_preterminal:
                found.append(node)
            else:
                stack.extend(reversed(node.children))
        return found

    def leaves(self) -> list[str]:
        return [node.leaf for node in self.preterminals()]  # type: ignore[misc]

    def __str__(self) -> str:
        if self.is_preterminal:
            return f"({self.label} {self.leaf})"
        return f"({self.label} {' '.join(str(c) for c in self.children)})"


@dataclass(frozen=True)
class DLevelRules:
    """Category names, tags and cue words driving trigger detection (Penn Treebank defaults)."""

    clause_labels: frozenset[str] = _labels("S", "SINV", "SQ", "SBARQ", "SBAR", "FRAG")
    sentence_labels: frozenset[str] = _labels("S", "SINV", "SQ")
    subject_clause_labels: frozenset[str] = _labels("S")
    subordinate_label: str = "SBAR"
    vp_label: str = "VP"
    np_label: str = "NP"
    pp_label: str = "PP"
    coordinator_tags: frozenset[str] = _labels("CC")
    nominal_tags: frozenset[str] = _labels("NN", "NNS", "NNP", "NNPS", "NP", "NPS", "PRP")
    gerund_tags: frozenset[str] = _labels("VBG")
    finite_tags: frozenset[str] = _labels("VBD", "VBZ", "VBP", "MD")
    nonfinite_tags: frozenset[str] = _labels("TO", "VB", "VBG", "VBN")
    complementizers: frozenset[str] = _labels("that", "whether")
    comparative_markers: frozenset[str] = _labels("than", "as")
    wh_noun_labels: frozenset[str] = _labels("WHNP")
    wh_adverb_labels: frozenset[str] = _labels("WHADVP", "WHPP")
    modifier_labels: frozenset[str] = _labels("ADJP", "ADVP")
    adjunct_cue_labels: frozenset[str] = _labels("PP", "ADVP")
    subject_skip_labels: frozenset[str] = _labels(",", ":", "``", "''", "-LRB-", "-RRB-", "ADVP", "RB")
    empty_tag: str = "-NONE-"
    wrapper_labels: frozenset[str] = _labels("", "ROOT", "TOP")
    length_cap: int = DLEVEL_LENGTH_CAP

    def __post_init__(self):
        if self.length_cap < 1:
            raise ValidationError(f"length_cap must be >= 1 (got {self.length_cap})")

    @classmethod
    def from_mapping(cls, values: Mapping[str, Optional[str]]) -> "DLevelRules":
        """Override defaults from ``name = value`` entries; set-valued entries are comma-separated."""
        known = {f.name: f for f in fields(cls)}
        overrides = {}
        for key, raw in values.items():
            if key not in known:
                raise ValidationError(f"unknown D-level rule: {key}")
            raw = raw or ""
            default = known[key].default
            if isinstance(default, frozenset):
                overrides[key] = frozenset(v.strip() for v in raw.split(",") if v.strip())
            elif isinstance(default, int):
                try:
                    overrides[key] = int(raw)
                except ValueError:
                    raise ValidationError(f"{key} must be an integer (got {raw!r})")
            else:
                overrides[key] = raw.strip()
        return replace(cls(), **overrides)


@dataclass(frozen=True)
class DLevelResult:
    level: int
    triggers: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "triggers", frozenset(self.triggers))
        if not self.triggers <= set(range(1, DLEVEL_MAX)):
            raise ArgumentError(f"trigger categories must lie in 1..{DLEVEL_MAX - 1}")
        if self.level != _level_for(self.triggers):
            raise ArgumentError(f"level {self.level} disagrees with triggers {sorted(self.triggers)}")

    @classmethod
    def from_triggers(cls, triggers: Iterable[int]) -> "DLevelResult":
        found = frozenset(triggers)
        return cls(_level_for(found), found)


def _level_for(triggers: frozenset[int]) -> int:
    if len(triggers) >= 2:
        return DLEVEL_MAX
    return max(triggers, default=0)


@dataclass(frozen=True)
class SkippedLine:
    line: int
    reason: str


@dataclass(frozen=True)
class TreeBank:
    """Parsed trees with their 1-based source line numbers, plus the lines that could not be used."""

    entries: tuple[tuple[int, ParseTree], ...]
    skipped: tuple[SkippedLine, ...] = ()
    source_id: str = ""

    @property
    def trees(self) -> list[ParseTree]:
        return [tree for _, tree in self.entries]

    @property
    def input_lines(self) -> int:
        return len(self.entries) + len(self.skipped)


@dataclass(frozen=True)
class SentenceLevel:
    line: int
    result: DLevelResult


@dataclass(frozen=True)
class DLevelDistribution:
    counts: tuple[int, ...]
    mean: float
    sd: float
    skipped: int
    long_sentences: int = 0
    sentences: tuple[SentenceLevel, ...] = field(default=(), repr=False)

    @property
    def classified(self) -> int:
        return sum(self.counts)

    def to_dict(self) -> dict:
        return {
            "counts": {str(level): n for level, n in enumerate(self.counts)},
            "mean": self.mean,
            "sd": self.sd,
            "classified": self.classified,
            "skipped": self.skipped,
            "long_sentences": self.long_sentences,
        }


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------


def parse_bracketed(text: str, line: Optional[int] = None) -> ParseTree:
    """Parse one ``(LABEL child ...)`` expression."""
    stack: list[tuple[Optional[str], list]] = []
    root: Optional[ParseTree] = None
    for token in _BRACKET_TOKEN.findall(text):
        if token == "(":
            if root is not None:
                raise IngestionError("text after the end of the tree", line=line)
            stack.append((None, []))
        elif token == ")":
            if not stack:
                raise IngestionError("unbalanced ')'", line=line)
            label, items = stack.pop()
            node = _build(label or "", items, line)
            if stack:
                stack[-1][1].append(node)
            else:
                root = node
        else:
            if not stack:
                raise IngestionError(f"token {token!r} outside brackets", line=line)
            label, items = stack[-1]
            if label is None and not items:
                stack[-1] = (token, items)
            else:
                items.append(token)
    if stack:
        raise IngestionError(f"{len(stack)} unclosed '('", line=line)
    if root is None:
        raise IngestionError("no tree", line=line)
    return root


def _build(label: str, items: list, line: Optional[int]) -> ParseTree:
    words = [i for i in items if isinstance(i, str)]
    if not words:
        if not items:
            raise IngestionError(f"empty constituent ({label})", line=line)
        return ParseTree(label, tuple(items))
    if len(words) == 1 and len(items) == 1:
        return ParseTree(label, (), words[0])
    raise IngestionError(f"constituent ({label}) mixes words and phrases", line=line)


def _unwrap(tree: ParseTree, rules: DLevelRules) -> ParseTree:
    while not tree.is_preterminal and tree.category in rules.wrapper_labels and len(tree.children) == 1:
        tree = tree.children[0]
    return tree


def parse_treebank(lines: Iterable[str], rules: Optional[DLevelRules] = None, source_id: str = "") -> TreeBank:
    """Parse one tree per non-blank line; malformed or non-clausal lines are recorded, not raised."""
    rules = rules or DLevelRules()
    entries: list[tuple[int, ParseTree]] = []
    skipped: list[SkippedLine] = []
    for lineno, raw in enumerate(lines, 1):
        text = raw.strip()
        if not text:
            continue
        try:
            tree = _unwrap(parse_bracketed(text, lineno), rules)
        except IngestionError as e:
            skipped.append(SkippedLine(lineno, str(e)))
            continue
        if tree.category not in rules.clause_labels:
            skipped.append(SkippedLine(lineno, f"line {lineno}: non-clausal root {tree.label!r}"))
            continue
        entries.append((lineno, tree))
    for skip in skipped:
        logger.warning(f"[dlevel] {source_id or 'trees'}: skipped {skip.reason}")
    return TreeBank(tuple(entries), tuple(skipped), source_id)


def read_bracketed(path: str, rules: Optional[DLevelRules] = None) -> TreeBank:
    """Read a UTF-8 file holding one bracketed tree per line."""
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise IngestionError(f"cannot read file: {e.strerror}", path=path)
    except UnicodeDecodeError as e:
        raise IngestionError(f"invalid UTF-8 ({e.reason})", path=path, offset=e.start)
    return parse_treebank(lines, rules, source_id=path)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


class DLevelClassifier:
    """Structure-driven trigger detection; only the cue words listed in the rules are lexical."""

    def __init__(self, rules: Optional[DLevelRules] = None):
        self.rules = rules or DLevelRules()

    def classify(self, tree: ParseTree) -> DLevelResult:
        parents: dict[int, ParseTree] = {}
        nodes: list[ParseTree] = []
        stack = [tree]
        while stack:
            node = stack.pop()
            nodes.append(node)
            for child in node.children:
                parents[id(child)] = node
                stack.append(child)

        triggers: set[int] = set()
        for node in nodes:
            if node.is_preterminal or self._is_empty(node):
                continue
            parent = parents.get(id(node))
            category = node.category
            if category in self.rules.sentence_labels:
                triggers |= self._clause_triggers(node, parent)
            elif category == self.rules.subordinate_label:
                triggers |= self._subordinate_triggers(node, parents)
            elif category == self.rules.vp_label:
                if self._is_coordination(node, {self.rules.vp_label}):
                    triggers.add(2)
            elif category == self.rules.np_label and self._is_apposition(node):
                triggers.add(4)
        return DLevelResult.from_triggers(triggers)

    # -- structure helpers -------------------------------------------------

    def _is_empty(self, node: ParseTree) -> bool:
        return all(p.category == self.rules.empty_tag for p in node.preterminals())

    def _overt(self, node: ParseTree) -> list[ParseTree]:
        return [c for c in node.children if not self._is_empty(c)]

    def _predicate(self, clause: ParseTree) -> Optional[ParseTree]:
        return next((c for c in self._overt(clause) if c.category == self.rules.vp_label), None)

    def _verb_head(self, vp: ParseTree) -> Optional[str]:
        rules = self.rules
        for child in self._overt(vp):
            category = child.category
            if child.is_preterminal and (
                category in rules.finite_tags or category in rules.nonfinite_tags or category.startswith("VB")
            ):
                return category
            if not child.is_preterminal and category == rules.vp_label:
                return self._verb_head(child)
        return None

    def _is_nonfinite(self, clause: ParseTree) -> bool:
        predicate = self._predicate(clause)
        return predicate is not None and self._verb_head(predicate) in self.rules.nonfinite_tags

    def _is_finite(self, clause: ParseTree) -> bool:
        predicate = self._predicate(clause)
        return predicate is not None and self._verb_head(predicate) in self.rules.finite_tags

    def _subject(self, clause: ParseTree) -> Optional[ParseTree]:
        """The overt NP, S or SBAR right before the predicate VP of an S clause."""
        if clause.category not in self.rules.subject_clause_labels:
            return None
        kids = self._overt(clause)
        predicate = self._predicate(clause)
        if predicate is None:
            return None
        for child in reversed(kids[: kids.index(predicate)]):
            category = child.category
            if category in self.rules.subject_skip_labels:
                continue
            clausal = category == self.rules.subordinate_label or category in self.rules.sentence_labels
            if category == self.rules.np_label or clausal:
                return child
            return None
        return None

    def _has_np_subject(self, clause: ParseTree) -> bool:
        if clause.category not in self.rules.subject_clause_labels:
            return True
        subject = self._subject(clause)
        return subject is not None and subject.category == self.rules.np_label

    def _is_coordination(self, node: ParseTree, conjunct_labels: set[str] | frozenset[str]) -> bool:
        kids = self._overt(node)
        has_cc = any(c.category in self.rules.coordinator_tags for c in kids)
        return has_cc and sum(1 for c in kids if c.category in conjunct_labels) >= 2

    def _is_conjoined_np(self, np: ParseTree) -> bool:
        return self._is_coordination(np, {self.rules.np_label} | self.rules.nominal_tags)

    def _is_apposition(self, np: ParseTree) -> bool:
        kids = [c.category for c in self._overt(np)]
        while kids and kids[-1] == ",":
            kids.pop()
        return kids == [self.rules.np_label, ",", self.rules.np_label]

    def _is_nominalization(self, np: ParseTree) -> bool:
        kids = self._overt(np)
        if not kids:
            return False
        first = kids[0]
        return (first.is_preterminal and first.category in self.rules.gerund_tags) or any(
            c.category in self.rules.sentence_labels for c in kids
        )

    def _subjectless_complement_level(self, node: ParseTree, parent: ParseTree) -> int:
        """5 after an adverbial cue, 4 after an object NP (object control), otherwise 1."""
        siblings = self._overt(parent)
        before = {s.category for s in siblings[: next(i for i, s in enumerate(siblings) if s is node)]}
        if before & self.rules.adjunct_cue_labels:
            return 5
        if self.rules.np_label in before:
            return 4
        return 1

    def _np_role(self, np: ParseTree, parents: dict[int, ParseTree]) -> str:
        """'subject', 'object' or 'other', climbing through nested NP and PP."""
        rules = self.rules
        child, ancestor = np, parents.get(id(np))
        while ancestor is not None and ancestor.category in (rules.np_label, rules.pp_label):
            child, ancestor = ancestor, parents.get(id(ancestor))
        if ancestor is None:
            return "other"
        if ancestor.category == rules.vp_label:
            return "object"
        if ancestor.category in rules.sentence_labels and self._subject(ancestor) is child:
            return "subject"
        return "other"

    # -- triggers ------------------------------------------------------------

    def _clause_triggers(self, clause: ParseTree, parent: Optional[ParseTree]) -> set[int]:
        rules = self.rules
        found: set[int] = set()
        if self._is_coordination(clause, rules.sentence_labels):
            found.add(2)

        subject = self._subject(clause)
        if subject is not None:
            if subject.category != rules.np_label:
                found.add(6)
            elif self._is_conjoined_np(subject):
                found.add(2)
            elif self._is_nominalization(subject):
                found.add(6)

        if parent is None:
            return found
        own_subject = self._has_np_subject(clause)
        nonfinite = self._is_nonfinite(clause)
        parent_category = parent.category
        if parent_category == rules.vp_label:
            if own_subject and nonfinite:
                found.add(4)
            elif own_subject and self._is_finite(clause):
                found.add(3)
            elif not own_subject and nonfinite:
                found.add(self._subjectless_complement_level(clause, parent))
        elif parent_category == rules.pp_label:
            if not own_subject and nonfinite:
                found.add(5)
        elif parent_category in rules.sentence_labels:
            if not own_subject and nonfinite and self._subject(parent) is not clause:
                found.add(5)
        return found

    def _subordinate_triggers(self, sbar: ParseTree, parents: dict[int, ParseTree]) -> set[int]:
        rules = self.rules
        kids = self._overt(sbar)
        if not kids:
            return set()
        kind = self._introducer(kids[0])

        child, context = sbar, parents.get(id(sbar))
        while context is not None and context.category == rules.subordinate_label:
            child, context = context, parents.get(id(context))
        if context is None:
            return {5} if kind in ("subordinator", "wh-adverb", "as") else set()

        category = context.category
        if category == rules.np_label:
            return {6} if self._np_role(context, parents) == "subject" else {3}
        if kind == "than":
            return {4}
        if category in rules.modifier_labels:
            return {4} if kind == "as" else {5}
        if category == rules.vp_label:
            return {3} if kind in ("complementizer", "bare", "wh-noun") else {5}
        if category in rules.sentence_labels:
            return set() if self._subject(context) is child else {5}
        if category == rules.pp_label:
            return {5}
        return set()

    def _introducer(self, first: ParseTree) -> str:
        rules = self.rules
        category = first.category
        if category in rules.wh_noun_labels:
            return "wh-noun"
        if category in rules.wh_adverb_labels:
            return "wh-adverb"
        if category in rules.sentence_labels:
            return "bare"
        if first.is_preterminal:
            word = (first.leaf or "").lower()
            if word in rules.complementizers:
                return "complementizer"
            if word in rules.comparative_markers:
                return "than" if word == "than" else "as"
        return "subordinator"


def classify_dlevel(tree: ParseTree, rules: Optional[DLevelRules] = None) -> DLevelResult:
    return DLevelClassifier(rules).classify(tree)


def dlevel_distribution(
    trees: TreeBank | Sequence[ParseTree], rules: Optional[DLevelRules] = None
) -> DLevelDistribution:
    """Per-level counts, mean and population SD over the classified sentences."""
    if isinstance(trees, TreeBank):
        bank = trees
    else:
        bank = TreeBank(tuple((i, t) for i, t in enumerate(trees, 1)))
    if not bank.entries:
        raise UndefinedMeasureError(f"no classifiable sentence ({len(bank.skipped)} skipped)")

    classifier = DLevelClassifier(rules)
    cap = classifier.rules.length_cap
    sentences = []
    long_sentences = 0
    for line, tree in bank.entries:
        if len(tree.preterminals()) > cap:
            long_sentences += 1
            logger.debug(f"[dlevel] line {line}: {len(tree.preterminals())} leaves exceed cap {cap}; classified anyway")
        sentences.append(SentenceLevel(line, classifier.classify(tree)))

    levels = [s.result.level for s in sentences]
    histogram = Counter(levels)
    summary = mean_sd(levels)
    return DLevelDistribution(
        counts=tuple(histogram.get(level, 0) for level in range(DLEVEL_MAX + 1)),
        mean=summary.mean,
        sd=summary.sd if math.isfinite(summary.sd) else 0.0,
        skipped=len(bank.skipped),
        long_sentences=long_sentences,
        sentences=tuple(sentences),
    )
