"""Synthetic corpora, the planted golden corpus, and brute-force oracles.

The oracles at the bottom deliberately re-derive everything from scratch
(own tokenizer, exact rational arithmetic, exhaustive enumeration) and import
nothing from the scoring modules, so agreement with the engine means
something.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import canonical
from .ingest import (EXTERNAL_CHANNELS, ArticleRecord, Corpus, OutletRecord, build_corpus,
                     serialize_articles, serialize_outlets)

BASE_TIME = 1_600_000_000
SYNTHETIC_WEIGHTS = {c: 1.0 for c in EXTERNAL_CHANNELS}

_ONSETS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


class OracleRefusal(ValueError):
    """Instance too large for exhaustive checking."""


@dataclass(frozen=True)
class SyntheticSpec:
    seed: int = 0
    outlet_count: int = 20
    reliabilities: tuple[float, ...] | None = None
    claim_count: int = 0
    outlets_per_claim: int = 6
    stance_noise: float = 0.0
    channel_sigma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.stance_noise <= 1.0:
            raise ValueError("stance_noise must be in [0,1]")
        if self.channel_sigma < 0:
            raise ValueError("channel_sigma must be >= 0")
        if self.reliabilities is not None:
            if len(self.reliabilities) != self.outlet_count:
                raise ValueError("need one reliability per outlet")
            if not all(0.0 <= r <= 1.0 for r in self.reliabilities):
                raise ValueError("reliabilities must lie in [0,1]")
        if self.claim_count and self.outlets_per_claim > self.outlet_count:
            raise ValueError("outlets_per_claim exceeds outlet_count")


@dataclass
class SyntheticClaim:
    text: str
    negation: str
    truth: bool
    asserting: dict[str, bool] = field(default_factory=dict)


@dataclass
class GroundTruth:
    reliability: dict[str, float]
    channel_scores: dict[str, dict[str, float]]
    claims: list[SyntheticClaim]


def _nonce(rng: np.random.Generator, used: set[str], syllables: int = 3) -> str:
    while True:
        word = "".join(_ONSETS[rng.integers(len(_ONSETS))] + _VOWELS[rng.integers(len(_VOWELS))]
                       for _ in range(syllables)) + "x"
        if word not in used:
            used.add(word)
            return word


def _article(aid: str, domain: str, title: str, body: str, t: int) -> ArticleRecord:
    return ArticleRecord(aid, domain, f"https://{domain}/{aid}", title, body, t, "en")


def generate_corpus(spec: SyntheticSpec) -> tuple[Corpus, GroundTruth]:
    """Outlets whose ingested channels equal true reliability plus Gaussian
    noise, and claim articles that state the truth with probability equal to
    the outlet's reliability.

    Stance noise flips what an article states. Flip decisions come from a
    separate stream drawn for every article, so the flipped sets for two noise
    rates are nested.
    """
    rng = np.random.default_rng(spec.seed)
    noise_rng = np.random.default_rng([spec.seed, 1])
    flip_rng = np.random.default_rng([spec.seed, 2])

    n = spec.outlet_count
    rel = (np.array(spec.reliabilities, dtype=np.float64) if spec.reliabilities is not None
           else rng.uniform(0.0, 1.0, n))
    domains = [f"outlet{i:04d}.example" for i in range(n)]

    outlets, channel_scores = [], {}
    for i, domain in enumerate(domains):
        noise = noise_rng.normal(0.0, 1.0, len(EXTERNAL_CHANNELS)) * spec.channel_sigma
        scores = {ch: float(min(1.0, max(0.0, rel[i] + e)))
                  for ch, e in zip(EXTERNAL_CHANNELS, noise)}
        channel_scores[domain] = scores
        outlets.append(OutletRecord(domain, external_scores=scores,
                                    label="high" if rel[i] >= 0.5 else "low"))

    used: set[str] = set()
    claims, articles = [], []
    for c in range(spec.claim_count):
        subj, verb, obj = _nonce(rng, used), _nonce(rng, used), _nonce(rng, used)
        claim = SyntheticClaim(f"{subj} {verb} {obj}", f"{subj} never {verb} {obj}",
                               bool(rng.integers(2)))
        picks = rng.choice(n, size=spec.outlets_per_claim, replace=False)
        honest = rng.uniform(size=spec.outlets_per_claim)
        flips = flip_rng.uniform(size=spec.outlets_per_claim)
        for j, i in enumerate(sorted(picks.tolist())):
            states_truth = honest[j] < rel[i]
            if flips[j] < spec.stance_noise:
                states_truth = not states_truth
            says_true = claim.truth if states_truth else not claim.truth
            claim.asserting[domains[i]] = says_true
            sentence = claim.text if says_true else claim.negation
            body = f"{sentence.capitalize()}. Officials released figures on tuesday."
            articles.append(_article(f"c{c:04d}-o{i:04d}", domains[i], f"Dispatch {c}", body,
                                     BASE_TIME + 60 * len(articles)))
        claims.append(claim)

    truth = GroundTruth({d: float(r) for d, r in zip(domains, rel)}, channel_scores, claims)
    return build_corpus(articles, outlets), truth


# planted golden corpus

GOLDEN_CLAIM = "Zorblax vaccine prevents seasonal flu"
GOLDEN_NEGATION = "Zorblax vaccine never prevents seasonal flu"
GOLDEN_NOW = 1_700_000_000
GOLDEN_FACTUALITY = (1.0 + 2.6 / 2.8) / 2.0


def golden_corpus() -> Corpus:
    """Three reliability-0.9 outlets state the claim, one 0.1 outlet denies it,
    and two bystander outlets write about unrelated things."""
    def outlet(domain, score, **kw):
        return OutletRecord(domain, external_scores={c: score for c in EXTERNAL_CHANNELS}, **kw)

    outlets = [
        outlet("dailyledger.example", 0.9, label="high"),
        outlet("harbortimes.example", 0.9, label="high"),
        outlet("northgazette.example", 0.9, label="high"),
        outlet("truthblast.example", 0.1, label="low"),
        outlet("weatherdesk.example", 0.6),
        outlet("marketwire.example", 0.5),
    ]
    t = BASE_TIME
    articles = [
        _article("g1", "dailyledger.example", "Health desk",
                 f"{GOLDEN_CLAIM}. The trial enrolled volunteers across four regions.", t),
        _article("g2", "harbortimes.example", "Health desk",
                 f"Researchers reported results this week. {GOLDEN_CLAIM}.", t + 60),
        _article("g3", "northgazette.example", "Health desk",
                 f"{GOLDEN_CLAIM}. Regulators reviewed the full dataset.", t + 120),
        _article("g4", "truthblast.example", "Health desk",
                 f"{GOLDEN_NEGATION}. Insiders say otherwise.", t + 180),
        _article("g5", "weatherdesk.example", "Forecast",
                 "Heavy rain expected over coastal towns. Winds ease by evening.", t + 240),
        _article("g6", "marketwire.example", "Markets",
                 "Shares closed higher after quarterly earnings. Bond yields held steady.",
                 t + 300),
    ]
    return build_corpus(articles, outlets)


def golden_config() -> dict:
    return {
        "paths": {"articles": "articles.jsonl", "outlets": "outlets.jsonl", "store": "store",
                  "model": "model.json"},
        "model": {"mode": "heuristic", "group_weights": dict(SYNTHETIC_WEIGHTS)},
        "verdict": {"article_reliability_mode": "site_prior_only"},
        "fixed_now": GOLDEN_NOW,
    }


def write_fixtures(outdir: str | Path, kind: str = "golden", spec: SyntheticSpec | None = None
                   ) -> list[Path]:
    """Write corpus files plus a matching config; returns the written paths."""
    import yaml

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    if kind == "golden":
        corpus = golden_corpus()
        claims = [{"claim": GOLDEN_CLAIM, "truth": True,
                   "expected_factuality": GOLDEN_FACTUALITY},
                  {"claim": GOLDEN_NEGATION, "truth": False,
                   "expected_factuality": 1.0 - GOLDEN_FACTUALITY}]
        config = golden_config()
    elif kind == "synthetic":
        corpus, truth = generate_corpus(spec or SyntheticSpec(claim_count=20, outlet_count=40))
        claims = [{"claim": c.text, "truth": c.truth} for c in truth.claims]
        config = golden_config()
        config["verdict"] = {"article_reliability_mode": "eq1"}
        config["fixed_now"] = BASE_TIME
    else:
        raise ValueError(f"unknown fixture kind {kind!r}")
    files = {
        "articles.jsonl": serialize_articles(corpus.articles),
        "outlets.jsonl": serialize_outlets(corpus.outlets.values()),
        "claims.jsonl": "".join(canonical.dumps(c) for c in claims),
        "config.yaml": yaml.safe_dump(config, sort_keys=True),
    }
    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


# oracles

_ORACLE_WORD = re.compile(r"[^\W_]+")


def oracle_claim_score(evidence: Sequence[tuple[float, float]]) -> float:
    """Exact rational sum of reliability * stance, rounded once at the end."""
    if len(evidence) > 100:
        raise OracleRefusal("oracle_claim_score handles at most 100 items")
    total = Fraction(0)
    for reliability, stance in evidence:
        total += Fraction(reliability) * Fraction(stance)
    return float(total)


def oracle_bm25(docs: Sequence[tuple[str, str]], query: str, k1: float = 1.2,
                b: float = 0.75) -> list[tuple[str, float]]:
    """Score every document from scratch; full ranking, ties by id."""
    if len(docs) > 100:
        raise OracleRefusal("oracle_bm25 handles at most 100 documents")
    toks = {doc_id: [w.lower() for w in _ORACLE_WORD.findall(text)] for doc_id, text in docs}
    n_docs = len(toks)
    avg = sum(len(t) for t in toks.values()) / n_docs if n_docs else 0.0
    q = [w.lower() for w in _ORACLE_WORD.findall(query)]
    ranking = []
    for doc_id, words in toks.items():
        score = 0.0
        for term in q:
            tf = words.count(term)
            if tf == 0:
                continue
            df = sum(1 for other in toks.values() if term in other)
            idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
            norm = 1.0 - b + b * len(words) / avg
            score += idf * tf * (k1 + 1.0) / (tf + k1 * norm)
        ranking.append((doc_id, score))
    ranking.sort(key=lambda item: (-item[1], item[0]))
    return ranking


def oracle_segment(s: str, dictionary) -> float:
    """Best coverage over every segmentation, enumerated without memoization."""
    if len(s) > 10:
        raise OracleRefusal("oracle_segment handles strings of length <= 10")
    if not s:
        return 0.0
    words = [w for w in dictionary if w]

    def walk(i: int):
        if i == len(s):
            yield 0
            return
        for rest in walk(i + 1):
            yield rest
        for w in words:
            if s.startswith(w, i):
                for rest in walk(i + len(w)):
                    yield len(w) + rest

    return max(walk(0)) / len(s)


# stance-noise study


def claim_accuracy(spec: SyntheticSpec, *, mode: str = "site_prior_only") -> float:
    """Fraction of synthetic claims whose factuality lands on the right side of 0.5."""
    from .lexicon import LexiconBundle, SourceResources
    from .reliability import ReliabilityModel
    from .retrieval import InvertedIndex
    from .stance import RuleStanceDetector
    from .verdict import VerdictParams, build_media_profile, claim_verdict
    from .ingest import group_by_outlet

    corpus, truth = generate_corpus(spec)
    lex = LexiconBundle.load()
    res = SourceResources.load()
    model = ReliabilityModel("heuristic", dict(SYNTHETIC_WEIGHTS))
    groups = group_by_outlet(corpus)
    profiles = {d: build_media_profile(d, groups.get(d, []), o, model, lex, res, BASE_TIME)
                for d, o in corpus.outlets.items() if d in groups}
    index = InvertedIndex.build(corpus.articles)
    detector = RuleStanceDetector(lex.stopwords, lex.negation)
    params = VerdictParams(article_reliability_mode=mode)
    articles = corpus.by_id()
    correct = 0
    for c in truth.claims:
        v = claim_verdict(c.text, index, articles, profiles, detector, lex, params)
        correct += (v.factuality > 0.5) == c.truth and v.factuality != 0.5
    return correct / len(truth.claims)


def stance_noise_study(rates: Sequence[float] = (0.0, 0.1, 0.3), seed: int = 7,
                       outlet_count: int = 60, claim_count: int = 200,
                       outlets_per_claim: int = 6) -> list[tuple[float, float]]:
    rows = []
    for rate in rates:
        spec = SyntheticSpec(seed=seed, outlet_count=outlet_count, claim_count=claim_count,
                             outlets_per_claim=outlets_per_claim, stance_noise=rate)
        rows.append((rate, claim_accuracy(spec)))
    return rows


def outlet_dataset(corpus: Corpus, now: int = BASE_TIME) -> "LabeledDataset":
    """Labeled channel-feature rows for every labeled outlet in ``corpus``.

    The text channel is left out, so the rows depend only on outlet metadata.
    """
    from .lexicon import SourceResources
    from .reliability import dataset_from_reports
    from .sourcefeat import metadata_reports, text_channel

    res = SourceResources.load()
    rows = []
    for domain, outlet in corpus.outlets.items():
        reports = [text_channel([])] + metadata_reports(
            outlet, now, cues=res.wikipedia_cues, dictionary=res.dictionary,
            suspicious_suffixes=res.suspicious_suffixes, public_suffixes=res.public_suffixes)
        rows.append((domain, reports, outlet.label))
    return dataset_from_reports(rows)
