"""Article factuality, claim factuality and media-profile assembly.

Article factuality blends language reliability with the outlet prior as a
convex combination ``lam * r_lang + (1 - lam) * r_site``; at ``lam = 0.5``
twice this value is the plain sum of the two terms. Claim factuality sums
``reliability * stance`` over retrieved evidence (the raw score) and then
divides by the total reliability mass to get a bounded score in [-1, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from . import canonical
from .errors import DataError, DomainError, InsufficientEvidenceError, MissingProfileError
from .ingest import ArticleRecord, OutletRecord
from .lexicon import LexiconBundle, SourceResources
from .reliability import DEFAULT_MIX_WEIGHTS, ReliabilityModel, language_reliability, predict
from .retrieval import BM25Params, InvertedIndex
from .sourcefeat import SourceParams, metadata_reports, text_channel
from .stance import StanceDetector
from .textfeat import propaganda_flag, style_features, tokenize

PROFILE_FORMAT_VERSION = 1
BANDS = ("likely-false", "unverified", "likely-true")
ARTICLE_RELIABILITY_MODES = ("eq1", "site_prior_only")


def article_factuality(r_lang: float, r_site: float, lam: float = 0.5) -> float:
    for name, v in (("r_lang", r_lang), ("r_site", r_site), ("lam", lam)):
        if not 0.0 <= v <= 1.0:
            raise DataError(f"{name}={v!r} outside [0,1]")
    return min(1.0, max(0.0, lam * r_lang + (1.0 - lam) * r_site))


@dataclass(frozen=True)
class EvidenceItem:
    article_id: str
    reliability: float
    stance_value: float
    stance_label: str = "discuss"
    retrieval_score: float = 0.0
    domain: str = ""
    matched_sentence: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.reliability <= 1.0:
            raise DataError(f"evidence reliability {self.reliability!r} outside [0,1]")
        if not -1.0 <= self.stance_value <= 1.0:
            raise DataError(f"stance value {self.stance_value!r} outside [-1,1]")

    @property
    def contribution(self) -> float:
        return self.reliability * self.stance_value

    def to_dict(self) -> dict:
        return {"article_id": self.article_id, "domain": self.domain,
                "reliability": self.reliability, "stance_value": self.stance_value,
                "stance_label": self.stance_label, "retrieval_score": self.retrieval_score,
                "contribution": self.contribution, "matched_sentence": self.matched_sentence}


def claim_raw_score(evidence: Iterable[EvidenceItem]) -> float:
    return math.fsum(e.contribution for e in evidence)


def normalize_claim_score(raw: float, evidence: Sequence[EvidenceItem]) -> tuple[float, float]:
    """Return ``(normalized, factuality)``."""
    mass = math.fsum(e.reliability for e in evidence)
    normalized = raw / mass if mass > 0 else 0.0
    normalized = min(1.0, max(-1.0, normalized))
    return normalized, (normalized + 1.0) / 2.0


@dataclass(frozen=True)
class VerdictParams:
    k: int = 20
    lam: float = 0.5
    band_low: float = 0.4
    band_high: float = 0.6
    article_reliability_mode: str = "eq1"
    bm25: BM25Params = BM25Params()
    mix_weights: tuple[float, ...] = DEFAULT_MIX_WEIGHTS
    ttr_window: int = 1000

    def __post_init__(self):
        if self.k < 1:
            raise DataError("k must be >= 1")
        if not 0.0 <= self.lam <= 1.0:
            raise DataError("lambda must be in [0,1]")
        if not 0.0 <= self.band_low <= self.band_high <= 1.0:
            raise DataError("bands must satisfy 0 <= low <= high <= 1")
        if self.article_reliability_mode not in ARTICLE_RELIABILITY_MODES:
            raise DataError(f"article_reliability_mode must be one of {ARTICLE_RELIABILITY_MODES}")


def band(factuality: float, low: float = 0.4, high: float = 0.6) -> str:
    if factuality < low:
        return "likely-false"
    if factuality > high:
        return "likely-true"
    return "unverified"


@dataclass(frozen=True)
class ClaimVerdict:
    claim: str
    evidence: tuple[EvidenceItem, ...]
    raw_score: float
    normalized_score: float
    factuality: float
    band: str
    config: Mapping[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"claim": self.claim, "evidence": [e.to_dict() for e in self.evidence],
                "raw_score": self.raw_score, "normalized_score": self.normalized_score,
                "factuality": self.factuality, "band": self.band, "config": dict(self.config)}

    def canonical(self) -> str:
        return canonical.dumps(self.to_dict())


def verdict_from_evidence(claim: str, evidence: Iterable[EvidenceItem],
                          params: VerdictParams = VerdictParams(),
                          config: Mapping[str, object] | None = None) -> ClaimVerdict:
    items = sorted(evidence, key=lambda e: (-abs(e.contribution), e.article_id))
    raw = claim_raw_score(items)
    normalized, fact = normalize_claim_score(raw, items)
    return ClaimVerdict(claim, tuple(items), raw, normalized, fact,
                        band(fact, params.band_low, params.band_high), dict(config or {}))


@dataclass(frozen=True)
class MediaProfile:
    domain: str
    reliability: float
    model_mode: str
    propaganda_degree: float
    flagged_article_fraction: float
    article_count: int
    channel_availability: Mapping[str, bool]
    channel_scores: Mapping[str, float] = field(default_factory=dict)
    ideology: str | None = None
    frames: tuple[str, ...] = ()
    hyper_partisanship: str | None = None
    created_at: int = 0
    profile_version: int = 1

    def __post_init__(self):
        for name in ("reliability", "propaganda_degree", "flagged_article_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DataError(f"profile {self.domain}: {name}={v!r} outside [0,1]")
        if self.article_count < 0:
            raise DataError("article_count must be >= 0")

    def to_dict(self) -> dict:
        return {
            "format_version": PROFILE_FORMAT_VERSION,
            "domain": self.domain, "reliability": self.reliability,
            "model_mode": self.model_mode, "propaganda_degree": self.propaganda_degree,
            "flagged_article_fraction": self.flagged_article_fraction,
            "article_count": self.article_count,
            "channel_availability": dict(self.channel_availability),
            "channel_scores": dict(self.channel_scores),
            "ideology": self.ideology, "frames": list(self.frames),
            "hyper_partisanship": self.hyper_partisanship,
            "created_at": self.created_at, "profile_version": self.profile_version,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "MediaProfile":
        if d.get("format_version") != PROFILE_FORMAT_VERSION:
            raise DataError("unsupported profile format_version")
        return cls(
            domain=d["domain"], reliability=d["reliability"], model_mode=d["model_mode"],
            propaganda_degree=d["propaganda_degree"],
            flagged_article_fraction=d["flagged_article_fraction"],
            article_count=d["article_count"],
            channel_availability=dict(d["channel_availability"]),
            channel_scores=dict(d.get("channel_scores", {})),
            ideology=d.get("ideology"), frames=tuple(d.get("frames", ())),
            hyper_partisanship=d.get("hyper_partisanship"),
            created_at=d["created_at"], profile_version=d["profile_version"],
        )

    def content_key(self) -> str:
        """Hash of everything except timestamps and the version counter."""
        d = self.to_dict()
        del d["created_at"], d["profile_version"]
        return canonical.digest(d)

    def canonical(self) -> str:
        return canonical.dumps(self.to_dict())

    def with_version(self, version: int) -> "MediaProfile":
        return replace(self, profile_version=version)


@dataclass(frozen=True)
class ProfileParams:
    min_articles: int = 1
    propaganda_threshold: float = 0.5
    mix_weights: tuple[float, ...] = DEFAULT_MIX_WEIGHTS
    ttr_window: int = 1000
    source: SourceParams = SourceParams()


def build_media_profile(domain: str, articles: Sequence[ArticleRecord], outlet: OutletRecord,
                        model: ReliabilityModel, lexicons: LexiconBundle,
                        resources: SourceResources, now: int,
                        params: ProfileParams = ProfileParams()) -> MediaProfile:
    if outlet.domain != domain:
        raise DomainError(f"outlet record is for {outlet.domain!r}, not {domain!r}")
    for a in articles:
        if a.source_domain != domain:
            raise DomainError(f"article {a.id!r} belongs to {a.source_domain!r}, not {domain!r}")
    if len(articles) < params.min_articles:
        raise InsufficientEvidenceError(
            f"{domain}: {len(articles)} article(s), need at least {params.min_articles}")

    lang_scores, prop_scores, flags = [], [], 0
    for a in articles:
        vec = style_features(a, lexicons, params.ttr_window)
        lang_scores.append(language_reliability(vec, params.mix_weights))
        sig = propaganda_flag(vec, params.propaganda_threshold)
        prop_scores.append(sig.score)
        flags += sig.flagged

    reports = [text_channel(lang_scores)] + metadata_reports(
        outlet, now, cues=resources.wikipedia_cues, dictionary=resources.dictionary,
        suspicious_suffixes=resources.suspicious_suffixes,
        public_suffixes=resources.public_suffixes, params=params.source)
    if not any(r.available for r in reports):
        raise InsufficientEvidenceError(f"{domain}: no articles and no metadata channels")

    reliability = predict(model, reports)
    n = len(articles)
    ann = outlet.annotations
    return MediaProfile(
        domain=domain,
        reliability=reliability,
        model_mode=model.mode,
        propaganda_degree=min(1.0, math.fsum(prop_scores) / n) if n else 0.0,
        flagged_article_fraction=flags / n if n else 0.0,
        article_count=n,
        channel_availability={r.channel_id: r.available for r in reports},
        channel_scores={r.channel_id: r.group_score for r in reports if r.available},
        ideology=ann.ideology if ann else None,
        frames=ann.frames if ann else (),
        hyper_partisanship=ann.hyper_partisanship if ann else None,
        created_at=int(now),
    )


def article_reliability(article: ArticleRecord, profile: MediaProfile, lexicons: LexiconBundle,
                        params: VerdictParams) -> float:
    if params.article_reliability_mode == "site_prior_only":
        return profile.reliability
    vec = style_features(article, lexicons, params.ttr_window)
    r_lang = language_reliability(vec, params.mix_weights)
    return article_factuality(r_lang, profile.reliability, params.lam)


def claim_verdict(claim: str, index: InvertedIndex, articles: Mapping[str, ArticleRecord],
                  profiles: Mapping[str, MediaProfile], detector: StanceDetector,
                  lexicons: LexiconBundle, params: VerdictParams = VerdictParams(),
                  config: Mapping[str, object] | None = None) -> ClaimVerdict:
    """Retrieve, detect stance, weight by reliability, aggregate."""
    if not claim or not claim.strip():
        raise DataError("claim is empty")
    if not any(t not in lexicons.stopwords.entries for t in tokenize(claim)):
        raise DataError("claim has no content tokens after stopword removal")
    evidence = []
    for article_id, score in index.retrieve(claim, params.k, params.bm25):
        article = articles[article_id]
        profile = profiles.get(article.source_domain)
        if profile is None:
            raise MissingProfileError(article.source_domain)
        stance = detector.detect(claim, article)
        evidence.append(EvidenceItem(
            article_id=article_id,
            reliability=article_reliability(article, profile, lexicons, params),
            stance_value=stance.value,
            stance_label=stance.label,
            retrieval_score=score,
            domain=article.source_domain,
            matched_sentence=stance.matched_sentence,
        ))
    return verdict_from_evidence(claim, evidence, params, config)
