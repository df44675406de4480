"""Per-outlet evidence channels other than article text.

Every channel yields a :class:`FeatureGroupReport` whose ``group_score`` lies in
[0, 1], higher meaning more evidence of reliability. Scoring functions are
simple monotone maps so each number can be audited by hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DataError, DomainError
from .ingest import EXTERNAL_CHANNELS, OutletRecord, normalize_domain

CHANNELS = ("text", "wikipedia", "twitter", "audience_links", "audience_bias",
            "speech", "traffic", "url")

SECONDS_PER_YEAR = 365.25 * 86400


@dataclass(frozen=True)
class FeatureGroupReport:
    channel_id: str
    available: bool
    vector: tuple[tuple[str, float], ...] = ()
    group_score: float = 0.0

    def __post_init__(self):
        if self.channel_id not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel_id!r}")
        if not self.available and self.vector:
            raise ValueError("unavailable report must have an empty vector")
        if not 0.0 <= self.group_score <= 1.0:
            raise ValueError(f"group_score {self.group_score!r} outside [0,1]")

    @classmethod
    def missing(cls, channel_id: str) -> "FeatureGroupReport":
        return cls(channel_id, False)

    def features(self) -> dict[str, float]:
        return dict(self.vector)

    def to_dict(self) -> dict:
        return {"channel_id": self.channel_id, "available": self.available,
                "vector": dict(self.vector), "group_score": self.group_score}


@dataclass(frozen=True)
class SourceParams:
    age_cap_years: float = 10.0
    follower_cap_log10: float = 6.0
    traffic_cap_log10: float = 7.0
    length_full: int = 20
    length_zero: int = 60


def _clip01(x: float) -> float:
    return min(1.0, max(0.0, x))


def wikipedia_features(outlet: OutletRecord, cues: Sequence[str]) -> FeatureGroupReport:
    wiki = outlet.wikipedia
    if wiki is None:
        return FeatureGroupReport.missing("wikipedia")
    text = " ".join(wiki.page_text.split()).casefold()
    has_page = 1.0 if text else 0.0
    hits = sum(1 for cue in cues if cue and " ".join(cue.split()).casefold() in text)
    vector = (
        ("has_page", has_page),
        ("has_infobox", 1.0 if wiki.has_infobox else 0.0),
        ("negative_cue_hits", float(hits)),
        ("category_count", float(len(wiki.categories))),
    )
    return FeatureGroupReport("wikipedia", True, vector, has_page / (1.0 + hits))


def twitter_features(outlet: OutletRecord, now: int | float,
                     params: SourceParams = SourceParams()) -> FeatureGroupReport:
    tw = outlet.twitter
    if tw is None:
        return FeatureGroupReport.missing("twitter")
    if now < tw.created_at:
        raise DataError(f"{outlet.domain}: twitter.created_at is after now")
    age = (now - tw.created_at) / SECONDS_PER_YEAR
    follower_log = math.log10(max(1, tw.followers))
    link = 0.0
    if tw.linked_url:
        try:
            link = 1.0 if normalize_domain(tw.linked_url) == outlet.domain else 0.0
        except DomainError:
            link = 0.0
    verified = 1.0 if tw.verified else 0.0
    terms = (verified, min(age / params.age_cap_years, 1.0),
             min(follower_log / params.follower_cap_log10, 1.0), link)
    vector = (("verified", verified), ("account_age_years", age),
              ("follower_log10", follower_log), ("has_site_link", link))
    return FeatureGroupReport("twitter", True, vector, _clip01(sum(terms) / 4.0))


def word_break_coverage(s: str, dictionary: Iterable[str]) -> float:
    """Largest fraction of ``s`` covered by non-overlapping dictionary words.

    Uncovered characters may sit anywhere between words. ``best[i]`` holds the
    maximum number of covered characters in ``s[:i]``.
    """
    n = len(s)
    if n == 0:
        return 0.0
    words = {w for w in dictionary if w}
    lengths = sorted({len(w) for w in words})
    best = [0] * (n + 1)
    for i in range(1, n + 1):
        top = best[i - 1]
        for L in lengths:
            if L > i:
                break
            if s[i - L:i] in words:
                top = max(top, best[i - L] + L)
        best[i] = top
    return best[n] / n


def _matches_suffix(domain: str, suffix: str) -> bool:
    suffix = suffix.lower().strip(".")
    return bool(suffix) and (domain == suffix or domain.endswith("." + suffix))


def registrable_name(domain: str, suffixes: Iterable[str]) -> str:
    """Label just left of the longest matching public suffix.

    Falls back to treating the last label as the suffix.
    """
    matched = [s.strip(".") for s in suffixes if _matches_suffix(domain, s)]
    matched = [s for s in matched if s != domain]
    if matched:
        suffix = max(matched, key=len)
        head = domain[: -len(suffix) - 1]
    else:
        head = domain.rpartition(".")[0] or domain
    return head.rpartition(".")[2]


def url_features(domain: str, dictionary: Iterable[str], suspicious_suffixes: Sequence[str],
                 public_suffixes: Sequence[str] = (),
                 params: SourceParams = SourceParams()) -> FeatureGroupReport:
    length = len(domain)
    suspicious = 1.0 if any(_matches_suffix(domain, s) for s in suspicious_suffixes) else 0.0
    name = registrable_name(domain, tuple(public_suffixes) + tuple(suspicious_suffixes))
    name = "".join(ch for ch in name.lower() if ch.isalnum())
    coverage = word_break_coverage(name, dictionary)
    if length <= params.length_full:
        penalty = 1.0
    elif length >= params.length_zero:
        penalty = 0.0
    else:
        penalty = (params.length_zero - length) / (params.length_zero - params.length_full)
    vector = (
        ("length", float(length)),
        ("hyphen_count", float(domain.count("-"))),
        ("digit_count", float(sum(ch.isdigit() for ch in domain))),
        ("suspicious_suffix", suspicious),
        ("word_coverage", coverage),
    )
    return FeatureGroupReport("url", True, vector,
                              _clip01(coverage * (1.0 - suspicious) * penalty))


def traffic_feature(rank: int | None, params: SourceParams = SourceParams()) -> FeatureGroupReport:
    if rank is None:
        return FeatureGroupReport.missing("traffic")
    if rank < 1:
        raise DataError("traffic rank must be >= 1")
    log_rank = math.log10(rank)
    score = 1.0 - min(log_rank / params.traffic_cap_log10, 1.0)
    return FeatureGroupReport("traffic", True, (("rank_log10", log_rank),), _clip01(score))


def external_channel_passthrough(outlet: OutletRecord, channel_id: str) -> FeatureGroupReport:
    if channel_id not in EXTERNAL_CHANNELS:
        raise ValueError(f"{channel_id!r} is not an ingested channel")
    if channel_id not in outlet.external_scores:
        return FeatureGroupReport.missing(channel_id)
    value = outlet.external_scores[channel_id]
    if not (isinstance(value, (int, float)) and math.isfinite(value) and 0.0 <= value <= 1.0):
        raise DataError(f"{outlet.domain}: external score {channel_id}={value!r} outside [0,1]")
    return FeatureGroupReport(channel_id, True, (("score", float(value)),), float(value))


def text_channel(language_scores: Sequence[float],
                 style_means: dict[str, float] | None = None) -> FeatureGroupReport:
    """Aggregate per-article language reliabilities into the text channel."""
    if not language_scores:
        return FeatureGroupReport.missing("text")
    mean = math.fsum(language_scores) / len(language_scores)
    vector = (("article_count", float(len(language_scores))),
              ("mean_language_reliability", mean))
    if style_means:
        vector += tuple(sorted(style_means.items()))
    return FeatureGroupReport("text", True, vector, _clip01(mean))


def metadata_reports(outlet: OutletRecord, now: int | float, *, cues: Sequence[str],
                     dictionary: Iterable[str], suspicious_suffixes: Sequence[str],
                     public_suffixes: Sequence[str] = (),
                     params: SourceParams = SourceParams()) -> list[FeatureGroupReport]:
    """All non-text channels for one outlet, in canonical channel order."""
    return [
        wikipedia_features(outlet, cues),
        twitter_features(outlet, now, params),
        *(external_channel_passthrough(outlet, ch) for ch in EXTERNAL_CHANNELS),
        traffic_feature(outlet.traffic_rank, params),
        url_features(outlet.domain, dictionary, suspicious_suffixes, public_suffixes, params),
    ]
