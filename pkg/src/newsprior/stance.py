"""Rule-based stance baseline: token overlap for relatedness, negation parity
for agree/disagree.

Anything with a ``detect(claim, article) -> StanceResult`` method can replace
:class:`RuleStanceDetector` in the claim pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from .errors import DataError
from .ingest import ArticleRecord
from .lexicon import Lexicon
from .textfeat import split_sentences, tokenize

STANCE_VALUES = {"agree": 1.0, "disagree": -1.0, "discuss": 0.0, "unrelated": 0.0}


@dataclass(frozen=True)
class StanceResult:
    label: str
    value: float
    relatedness: float
    matched_sentence: str | None = None

    def __post_init__(self):
        if self.label not in STANCE_VALUES:
            raise ValueError(f"unknown stance label {self.label!r}")
        if not -1.0 <= self.value <= 1.0:
            raise ValueError("stance value outside [-1,1]")

    def to_dict(self) -> dict:
        return {"label": self.label, "value": self.value, "relatedness": self.relatedness,
                "matched_sentence": self.matched_sentence}


@dataclass(frozen=True)
class StanceParams:
    tau_rel: float = 0.15
    tau_agree: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.tau_rel <= self.tau_agree <= 1.0:
            raise DataError("stance thresholds must satisfy 0 <= tau_rel <= tau_agree <= 1")


class StanceDetector(Protocol):
    def detect(self, claim: str, article: ArticleRecord) -> StanceResult: ...


def _content(tokens: Sequence[str], stopwords: Lexicon | None) -> set[str]:
    if stopwords is None:
        return set(tokens)
    return {t for t in tokens if t not in stopwords.entries}


def relatedness(claim_tokens: Sequence[str], sentence_tokens: Sequence[str],
                stopwords: Lexicon | None = None) -> float:
    """Jaccard overlap of the two content-token sets."""
    claim = _content(claim_tokens, stopwords)
    if not claim:
        raise DataError("claim has no content tokens after stopword removal")
    sent = _content(sentence_tokens, stopwords)
    return len(claim & sent) / len(claim | sent)


def negation_parity(tokens: Sequence[str], negation: Lexicon) -> str:
    hits = sum(1 for t in tokens if t in negation.entries)
    return "odd" if hits % 2 else "even"


def detect_stance(claim: str, article: ArticleRecord, stopwords: Lexicon, negation: Lexicon,
                  params: StanceParams = StanceParams()) -> StanceResult:
    if not claim or not claim.strip():
        raise DataError("claim is empty")
    if not article.body.strip():
        raise DataError(f"article {article.id!r} has an empty body")
    claim_tokens = tokenize(claim)
    sentences = split_sentences(article.title) + split_sentences(article.body)

    best_rel, best_sent, best_tokens = -1.0, None, []
    for sent in sentences:
        toks = tokenize(sent)
        rel = relatedness(claim_tokens, toks, stopwords)
        if rel > best_rel:
            best_rel, best_sent, best_tokens = rel, sent, toks
    best_rel = max(best_rel, 0.0)

    if best_rel < params.tau_rel:
        return StanceResult("unrelated", 0.0, best_rel, None)
    if best_rel >= params.tau_agree:
        same = negation_parity(claim_tokens, negation) == negation_parity(best_tokens, negation)
        label = "agree" if same else "disagree"
    else:
        label = "discuss"
    return StanceResult(label, STANCE_VALUES[label], best_rel, best_sent)


class RuleStanceDetector:
    def __init__(self, stopwords: Lexicon, negation: Lexicon,
                 params: StanceParams = StanceParams()):
        self.stopwords = stopwords
        self.negation = negation
        self.params = params

    def detect(self, claim: str, article: ArticleRecord) -> StanceResult:
        return detect_stance(claim, article, self.stopwords, self.negation, self.params)
