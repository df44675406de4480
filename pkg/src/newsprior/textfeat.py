"""Lexicon densities and surface statistics over article text."""

from __future__ import annotations

import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .ingest import ArticleRecord
from .lexicon import Lexicon, LexiconBundle

# maximal runs of Unicode letters/digits (\w minus underscore)
_TOKEN_RE = re.compile(r"[^\W_]+")
_SENTENCE_RE = re.compile(r"[^.!?]+[.!?]*|[.!?]+")


def _raw_tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def tokenize(text: str) -> list[str]:
    return [t.lower() for t in _TOKEN_RE.findall(text)]


def split_sentences(text: str) -> list[str]:
    """Split on ``.``/``!``/``?`` runs; terminators stay attached."""
    return [s.strip() for s in _SENTENCE_RE.findall(text) if s.strip()]


def lexicon_density(tokens: Sequence[str], lexicon: Lexicon) -> float:
    total = sum(lexicon.weight(t) for t in tokens if t in lexicon.entries)
    return min(1.0, max(0.0, total / max(1, len(tokens))))


def sentiment_polarity(tokens: Sequence[str], positive: Lexicon, negative: Lexicon) -> float:
    pos = sum(1 for t in tokens if t in positive.entries)
    neg = sum(1 for t in tokens if t in negative.entries)
    return (pos - neg) / max(1, pos + neg)


def type_token_ratio(tokens: Sequence[str], window: int = 1000) -> float:
    if window < 1:
        raise ValueError("window must be >= 1")
    head = tokens[:window]
    if not head:
        return 0.0
    return len(set(head)) / len(head)


@dataclass(frozen=True)
class StyleFeatureVector:
    subjectivity_density: float
    sentiment_polarity: float
    offensive_density: float
    propaganda_cue_density: float
    type_token_ratio: float
    caps_word_ratio: float
    exclamation_density: float
    mean_sentence_length: float
    extra_densities: Mapping[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "subjectivity_density": self.subjectivity_density,
            "sentiment_polarity": self.sentiment_polarity,
            "offensive_density": self.offensive_density,
            "propaganda_cue_density": self.propaganda_cue_density,
            "type_token_ratio": self.type_token_ratio,
            "caps_word_ratio": self.caps_word_ratio,
            "exclamation_density": self.exclamation_density,
            "mean_sentence_length": self.mean_sentence_length,
            "extra_densities": dict(self.extra_densities),
        }


def style_features(article: ArticleRecord, lexicons: LexiconBundle,
                   ttr_window: int = 1000) -> StyleFeatureVector:
    """Feature vector for one article; the title is counted twice."""
    text_parts = [article.title, article.title, article.body]
    raw: list[str] = []
    sentences: list[str] = []
    for part in text_parts:
        raw.extend(_raw_tokens(part))
        sentences.extend(split_sentences(part))
    tokens = [t.lower() for t in raw]

    caps = sum(1 for t in raw if len(t) >= 2 and t.isupper())
    counted = [s for s in sentences if _TOKEN_RE.search(s)]
    exclaimed = sum(1 for s in counted if "!" in s[len(s.rstrip(".!?")):])
    n_sent = len(counted)

    return StyleFeatureVector(
        subjectivity_density=lexicon_density(tokens, lexicons.subjective),
        sentiment_polarity=sentiment_polarity(tokens, lexicons.positive, lexicons.negative),
        offensive_density=lexicon_density(tokens, lexicons.offensive),
        propaganda_cue_density=lexicon_density(tokens, lexicons.propaganda),
        type_token_ratio=type_token_ratio(tokens, ttr_window),
        caps_word_ratio=caps / len(raw) if raw else 0.0,
        exclamation_density=exclaimed / n_sent if n_sent else 0.0,
        mean_sentence_length=len(tokens) / n_sent if n_sent else 0.0,
        extra_densities={name: lexicon_density(tokens, lex)
                         for name, lex in lexicons.extras.items()},
    )


@dataclass(frozen=True)
class PropagandaSignal:
    flagged: bool
    score: float


def propaganda_flag(vec: StyleFeatureVector, threshold: float = 0.5) -> PropagandaSignal:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0,1]")
    score = 0.7 * vec.propaganda_cue_density + 0.3 * vec.subjectivity_density
    score = min(1.0, max(0.0, score))
    return PropagandaSignal(score >= threshold, score)
