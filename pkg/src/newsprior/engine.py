"""The single code path behind the CLI and the HTTP API."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .config import EngineConfig
from .errors import ConfigError, InsufficientEvidenceError, MissingProfileError
from .ingest import ArticleRecord, Corpus, group_by_outlet, load_corpus
from .lexicon import LexiconBundle, SourceResources
from .reliability import (LabeledDataset, ReliabilityModel, accuracy, dataset_from_reports,
                          language_reliability, train_logistic)
from .retrieval import InvertedIndex
from .sourcefeat import metadata_reports, text_channel
from .stance import RuleStanceDetector
from .store import ProfileStore
from .textfeat import propaganda_flag, style_features
from .verdict import (ClaimVerdict, MediaProfile, article_factuality, build_media_profile,
                      claim_verdict)

log = logging.getLogger(__name__)


@dataclass
class ProfileRun:
    snapshot_id: int
    profiled: list[str]
    skipped: dict[str, str]

    def to_dict(self) -> dict:
        return {"snapshot_id": self.snapshot_id, "profiled": self.profiled,
                "skipped": self.skipped}


class Engine:
    def __init__(self, config: EngineConfig, *, need_model: bool | None = None):
        config.check_paths(need_model=need_model)
        self.config = config
        self.corpus: Corpus = load_corpus(config.path("articles"), config.path("outlets"))
        self.articles = self.corpus.by_id()
        self.groups = group_by_outlet(self.corpus)
        self.lexicons = LexiconBundle.load(config.lexicon_paths())
        self.resources = SourceResources.load(
            config.path("dictionary"), config.path("suspicious_suffixes"),
            config.path("public_suffixes"), config.path("wikipedia_cues"))
        self.model = self._load_model(need_model)
        self.index = InvertedIndex.build(self.corpus.articles)
        self.store = ProfileStore.load(config.path("store"), clock=self.now)
        self.detector = RuleStanceDetector(self.lexicons.stopwords, self.lexicons.negation,
                                           config.stance_params())
        self.verdict_params = config.verdict_params()
        self.profile_params = config.profile_params()

    @classmethod
    def from_file(cls, path: str | Path, **kw) -> "Engine":
        return cls(EngineConfig.load(path), **kw)

    def _load_model(self, need_model: bool | None) -> ReliabilityModel:
        mode = self.config.raw["model"]["mode"]
        if mode == "trained" and need_model is not False:
            return ReliabilityModel.load(self.config.path("model"))
        return ReliabilityModel("heuristic", dict(self.config.raw["model"]["group_weights"]))

    def now(self) -> int:
        fixed = self.config.raw["fixed_now"]
        return int(fixed) if fixed is not None else int(time.time())

    @property
    def version_info(self) -> dict:
        return {"engine_version": __version__, "config_hash": self.config.config_hash()}

    # profiling

    def build_profile(self, domain: str) -> MediaProfile:
        if domain not in self.corpus.outlets:
            raise MissingProfileError(domain)
        return build_media_profile(domain, self.groups.get(domain, []),
                                   self.corpus.outlets[domain], self.model, self.lexicons,
                                   self.resources, self.now(), self.profile_params)

    def profile_all(self) -> ProfileRun:
        built, skipped = [], {}
        for domain in self.corpus.outlets:
            try:
                built.append(self.build_profile(domain))
            except InsufficientEvidenceError as exc:
                skipped[domain] = str(exc)
                log.info("skipping %s: %s", domain, exc)
        snapshot_id = self.store.put_profiles(built)
        return ProfileRun(snapshot_id, [p.domain for p in built], skipped)

    def get_profile(self, domain: str) -> MediaProfile:
        profile = self.store.get_profile(domain)
        if profile is None:
            raise MissingProfileError(domain)
        return profile

    # scoring

    def score_article(self, article: ArticleRecord) -> dict:
        profile = self.get_profile(article.source_domain)
        vec = style_features(article, self.lexicons, self.verdict_params.ttr_window)
        r_lang = language_reliability(vec, self.verdict_params.mix_weights)
        lam = self.verdict_params.lam
        signal = propaganda_flag(vec, self.profile_params.propaganda_threshold)
        return {
            "article_id": article.id,
            "domain": article.source_domain,
            "language_reliability": r_lang,
            "site_reliability": profile.reliability,
            "lambda": lam,
            "factuality": article_factuality(r_lang, profile.reliability, lam),
            "unnormalized_sum": r_lang + profile.reliability,
            "propaganda": {"flagged": signal.flagged, "score": signal.score},
            "style": vec.to_dict(),
            "profile_version": profile.profile_version,
            **self.version_info,
        }

    def score_article_id(self, article_id: str) -> dict:
        if article_id not in self.articles:
            raise KeyError(article_id)
        return self.score_article(self.articles[article_id])

    def score_claim(self, claim: str) -> ClaimVerdict:
        config = {"params": self.config.params_dict(), **self.version_info}
        return claim_verdict(claim, self.index, self.articles, self.store.get_snapshot().profiles,
                             self.detector, self.lexicons, self.verdict_params, config)

    # training

    def labeled_dataset(self) -> LabeledDataset:
        rows = []
        now = self.now()
        for domain, outlet in self.corpus.outlets.items():
            if outlet.label is None:
                continue
            lang = [language_reliability(style_features(a, self.lexicons,
                                                        self.profile_params.ttr_window),
                                         self.profile_params.mix_weights)
                    for a in self.groups.get(domain, [])]
            reports = [text_channel(lang)] + metadata_reports(
                outlet, now, cues=self.resources.wikipedia_cues,
                dictionary=self.resources.dictionary,
                suspicious_suffixes=self.resources.suspicious_suffixes,
                public_suffixes=self.resources.public_suffixes,
                params=self.profile_params.source)
            rows.append((domain, reports, outlet.label))
        return dataset_from_reports(rows)

    def train(self) -> tuple[ReliabilityModel, dict]:
        out = self.config.path("model")
        if out is None:
            raise ConfigError("paths.model must be set to train")
        dataset = self.labeled_dataset()
        t = self.config.raw["training"]
        model = train_logistic(dataset, lr=t["lr"], epochs=t["epochs"], l2=t["l2"],
                               seed=t["seed"])
        model.save(out)
        return model, {"model_path": str(out), "rows": len(dataset),
                       "training_accuracy": accuracy(model, dataset),
                       "initial_loss": model.training["initial_loss"],
                       "final_loss": model.training["final_loss"]}

    # reporting

    def report(self) -> dict:
        snap = self.store.get_snapshot()
        rel = [p.reliability for p in snap.profiles.values()]
        return {
            "snapshot_id": snap.snapshot_id,
            "created_at": snap.created_at,
            "profile_count": len(rel),
            "mean_reliability": math.fsum(rel) / len(rel) if rel else None,
            "profiles": [{"domain": p.domain, "reliability": p.reliability,
                          "propaganda_degree": p.propaganda_degree,
                          "flagged_article_fraction": p.flagged_article_fraction,
                          "article_count": p.article_count,
                          "profile_version": p.profile_version}
                         for p in sorted(snap.profiles.values(),
                                         key=lambda p: (-p.reliability, p.domain))],
            **self.version_info,
        }

    def health(self) -> dict:
        return {"status": "ok", "snapshot_id": self.store.get_snapshot().snapshot_id,
                **self.version_info}
