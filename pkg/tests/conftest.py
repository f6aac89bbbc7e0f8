"""Shared fixtures: seeded synthetic corpora, a tagged sample and an annotated treebank."""

from unittest.mock import patch

import numpy as np
import pytest

from src.core.settings import RunConfig
from src.services.corpus import Token, TokenStream, parse_vertical, tokenize_plain
from src.services.lnre import FitRecord, ZipfMandelbrot
from src.services.report_builder import CorpusInput, build_report

# (expected level, bracketed parse); the expected levels are hand-annotated
ANNOTATED_TREES = [
    (0, "(S (NP (DT The) (NN dog)) (VP (VBD barked)) (. .))"),
    (0, "(S (NP (PRP She)) (VP (VBZ likes) (NP (NN tea))) (. .))"),
    (0, "(S (NP (DT The) (NN sun)) (VP (VBD rose) (PP (IN over) (NP (DT the) (NNS hills)))) (. .))"),
    (0, "(ROOT (S (NP (NNP Mary)) (VP (VBD slept)) (. .)))"),
    (1, "(S (NP (PRP I)) (VP (VBP want) (S (VP (TO to) (VP (VB go))))) (. .))"),
    (1, "(S (NP-SBJ-1 (PRP He)) (VP (VBD tried) (S (NP-SBJ (-NONE- *-1)) (VP (TO to) (VP (VB sleep))))) (. .))"),
    (1, "(S (NP (PRP They)) (VP (VBD began) (S (VP (VBG singing)))) (. .))"),
    (2, "(S (NP (NNP John) (CC and) (NNP Mary)) (VP (VBD left)) (. .))"),
    (2, "(S (NP (PRP He)) (VP (VP (VBD came)) (CC and) (VP (VBD went))) (. .))"),
    (2, "(S (S (NP (PRP I)) (VP (VBD ran))) (CC and) (S (NP (PRP she)) (VP (VBD walked))) (. .))"),
    (2, "(S (NP (NP (DT The) (NN cat)) (CC and) (NP (DT the) (NN dog))) (VP (VBD played)) (. .))"),
    (3, "(S (NP (PRP I)) (VP (VBP know) (SBAR (IN that) (S (NP (PRP he)) (VP (VBD left))))) (. .))"),
    (3, "(S (NP (PRP I)) (VP (VBD saw) (NP (NP (DT the) (NN man)) (SBAR (WHNP (WP who)) (S (VP (VBD came)))))) (. .))"),
    (3, "(S (NP (PRP She)) (VP (VBD said) (SBAR (S (NP (PRP it)) (VP (VBD rained))))) (. .))"),
    (
        3,
        "(S (NP (PRP We)) (VP (VBP wonder) (SBAR (IN whether) (S (NP (PRP he)) (VP (MD will) (VP (VB come)))))) (. .))",
    ),
    (4, "(S (NP (PRP I)) (VP (VBD made) (S (NP (PRP him)) (VP (VB go)))) (. .))"),
    (4, "(S (NP (NP (NNP Bill)) (, ,) (NP (PRP$ my) (NN friend)) (, ,)) (VP (VBD left)) (. .))"),
    (
        4,
        "(S (NP (PRP He)) (VP (VBZ is) (ADJP (JJR taller) (SBAR (IN than) (S (NP (PRP I)) (VP (VBP am)))))) (. .))",
    ),
    (4, "(S (NP (PRP She)) (VP (VBD heard) (S (NP (PRP them)) (VP (VB laugh)))) (. .))"),
    (
        4,
        "(S (NP-SBJ-1 (PRP I)) (VP (VBD persuaded) (NP-2 (PRP him)) "
        "(S (NP-SBJ (-NONE- *-2)) (VP (TO to) (VP (VB go))))) (. .))",
    ),
    (5, "(S (NP (PRP I)) (VP (VBD left) (SBAR (IN because) (S (NP (PRP it)) (VP (VBD rained))))) (. .))"),
    (5, "(S (SBAR (IN When) (S (NP (PRP he)) (VP (VBD arrived)))) (, ,) (NP (PRP we)) (VP (VBD ate)) (. .))"),
    (5, "(S (NP (PRP He)) (VP (VBD left) (PP (IN after) (S (VP (VBG eating))))) (. .))"),
    (5, "(S (NP (PRP She)) (VP (VBD came) (SBAR (WHADVP (WRB when)) (S (NP (PRP I)) (VP (VBD called))))) (. .))"),
    (6, "(S (S (VP (TO To) (VP (VB err)))) (VP (VBZ is) (ADJP (JJ human))) (. .))"),
    (6, "(S (NP (NP (DT The) (NN man)) (SBAR (WHNP (WP who)) (S (VP (VBD came))))) (VP (VBD left)) (. .))"),
    (6, "(S (SBAR (IN That) (S (NP (PRP he)) (VP (VBD lied)))) (VP (VBD surprised) (NP (PRP me))) (. .))"),
    (6, "(S (NP (VBG Swimming) (NNS laps)) (VP (VBZ is) (ADJP (JJ tiring))) (. .))"),
    (
        7,
        "(S (NP (PRP I)) (VP (VBP know) (SBAR (IN that) (S (NP (PRP he)) (VP (VBD left) "
        "(SBAR (IN because) (S (NP (PRP it)) (VP (VBD rained)))))))) (. .))",
    ),
    (
        7,
        "(S (S (NP (PRP I)) (VP (VBP want) (S (VP (TO to) (VP (VB go)))))) (CC and) "
        "(S (NP (PRP she)) (VP (VBD left))) (. .))",
    ),
    (
        7,
        "(S (NP (NP (DT The) (NN man)) (SBAR (WHNP (WP who)) (S (VP (VBD came))))) "
        "(VP (VBD said) (SBAR (IN that) (S (NP (PRP he)) (VP (VBD knew))))) (. .))",
    ),
]

VERTICAL_SAMPLE = """<doc id="1">
The\tDT\tthe
cats\tNNS\tcat
sat\tVVD\tsit
quietly\tRB\tquietly
.\tSENT\t.
Big\tJJ\tbig
dogs\tNNS\tdog
bark\tVVP\tbark
.\tSENT\t.
</doc>
<doc id="2">
London\tNP\tLondon
is\tVBZ\tbe
old\tJJ\told
.\tSENT\t.
</doc>
"""

SYLLABLE_WORDS = {
    "cat": 1,
    "the": 1,
    "table": 2,
    "water": 2,
    "make": 1,
    "beautiful": 3,
    "banana": 3,
    "syllable": 3,
    "computer": 3,
    "rhythm": 1,
    "strengths": 1,
    "queue": 1,
    "tree": 1,
}


def zipf_stream(n_tokens: int, exponent: float, vocabulary: int, seed: int, sentence_length: int = 12) -> TokenStream:
    """Word tokens drawn from a finite Zipf law, cut into equal sentences ending in a period."""
    rng = np.random.default_rng(seed)
    ranks = np.arange(1, vocabulary + 1, dtype=float)
    weights = ranks**-exponent
    draws = rng.choice(vocabulary, size=n_tokens, p=weights / weights.sum())
    tokens: list[Token] = []
    bounds: list[int] = []
    for i, draw in enumerate(draws, 1):
        # one to three syllables per word so readability samples differ
        word = "ba" * (1 + draw % 3) + str(draw)
        tokens.append(Token(word, "NN" if draw % 3 else "VV", word))
        if i % sentence_length == 0 or i == n_tokens:
            tokens.append(Token(".", "SENT", ".", is_word=False))
            bounds.append(len(tokens))
    return TokenStream(tuple(tokens), tuple(bounds), f"zipf-{exponent}-{seed}")


@pytest.fixture
def narrow_stream():
    """Steep Zipf law: low lexical diversity."""
    return zipf_stream(6000, 1.3, 2000, seed=1)


@pytest.fixture
def broad_stream():
    """Flat Zipf law: high lexical diversity."""
    return zipf_stream(6000, 0.9, 8000, seed=2)


@pytest.fixture
def plain_stream():
    return tokenize_plain("The cat sat on the mat. It was happy! Was the dog there? No.", source_id="plain")


@pytest.fixture
def vertical_stream():
    return parse_vertical(VERTICAL_SAMPLE.splitlines(), source_id="sample.vrt")


@pytest.fixture
def annotated_trees():
    return ANNOTATED_TREES


@pytest.fixture
def corpus_file(tmp_path):
    """A small plain-text corpus on disk."""
    path = tmp_path / "corpus.txt"
    sentences = [
        "The quick brown fox jumps over the lazy dog.",
        "A cat sleeps on the warm windowsill every afternoon.",
        "Children played happily in the park near the river.",
        "Dr. Smith arrived early and opened the small clinic.",
    ]
    path.write_text(" ".join(sentences * 40) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def vertical_file(tmp_path):
    path = tmp_path / "sample.vrt"
    path.write_text(VERTICAL_SAMPLE, encoding="utf-8")
    return path


@pytest.fixture
def trees_file(tmp_path):
    path = tmp_path / "parses.trees"
    path.write_text("\n".join(tree for _, tree in ANNOTATED_TREES) + "\n", encoding="utf-8")
    return path


def fake_fit(spectrum, families=None):
    """Stands in for model fitting: a fixed ZM model fitted at the spectrum's N."""
    return ZipfMandelbrot(alpha=0.5, B=0.05, N=float(spectrum.N), fit=FitRecord(chisq=1.0, df=5, p=0.96))


@pytest.fixture
def fitted_lnre():
    with patch("src.services.report_builder.fit_with_fallback", side_effect=fake_fit) as mock_fit:
        yield mock_fit


@pytest.fixture
def report_config():
    return RunConfig(segment_size=100, readability_sample=200, seed=3)


@pytest.fixture
def single_report(fitted_lnre, narrow_stream, report_config):
    return build_report(CorpusInput("A", narrow_stream, files=("narrow.vrt",)), config=report_config)


@pytest.fixture
def pair_report(fitted_lnre, narrow_stream, broad_stream, report_config):
    return build_report(CorpusInput("A", narrow_stream), CorpusInput("B", broad_stream), config=report_config)
