"""Engine configuration (YAML).

Relative paths resolve against the config file's directory. The config hash
covers every parameter but not the paths, so the same thresholds give the
same hash on any machine.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from . import canonical
from .errors import ConfigError
from .lexicon import EXTRA_SLOTS, STYLE_SLOTS
from .retrieval import BM25Params
from .sourcefeat import CHANNELS, SourceParams
from .stance import StanceParams
from .verdict import ProfileParams, VerdictParams

LEXICON_SLOTS = STYLE_SLOTS + ("stopwords", "negation") + EXTRA_SLOTS

DEFAULTS: dict[str, Any] = {
    "paths": {
        "articles": "articles.jsonl",
        "outlets": None,
        "store": "store",
        "model": None,
        "lexicons": {},
        "dictionary": None,
        "suspicious_suffixes": None,
        "public_suffixes": None,
        "wikipedia_cues": None,
    },
    "model": {"mode": "heuristic", "group_weights": {c: 1.0 for c in CHANNELS}},
    "article": {"lambda": 0.5, "mix_weights": [0.4, 0.3, 0.2, 0.1],
                "propaganda_threshold": 0.5, "ttr_window": 1000},
    "stance": {"tau_rel": 0.15, "tau_agree": 0.5},
    "retrieval": {"k": 20, "k1": 1.2, "b": 0.75},
    "verdict": {"band_low": 0.4, "band_high": 0.6, "article_reliability_mode": "eq1"},
    "profile": {"min_articles": 1},
    "source": {"age_cap_years": 10.0, "follower_cap_log10": 6.0, "traffic_cap_log10": 7.0,
               "length_full": 20, "length_zero": 60},
    "training": {"lr": 0.1, "epochs": 500, "l2": 0.001, "seed": 0},
    "fixed_now": None,
}

EXAMPLE_CONFIG = """\
# newsprior engine configuration. Relative paths resolve against this file.
paths:
  articles: articles.jsonl      # line-delimited ArticleRecord objects
  outlets: outlets.jsonl        # line-delimited OutletRecord objects (optional)
  store: store                  # profile store directory, created if missing
  model: null                   # model file; required when model.mode is trained
  lexicons: {}                  # slot -> file; unset slots use the bundled lists
  dictionary: null              # segmentation word list for the url channel
  suspicious_suffixes: null
  public_suffixes: null
  wikipedia_cues: null
model:
  mode: heuristic               # heuristic | trained
  group_weights: {text: 1.0, wikipedia: 1.0, twitter: 1.0, audience_links: 1.0,
                  audience_bias: 1.0, speech: 1.0, traffic: 1.0, url: 1.0}
article:
  lambda: 0.5                   # weight of language reliability vs the site prior
  mix_weights: [0.4, 0.3, 0.2, 0.1]   # propaganda, subjectivity, offensive, |sentiment|
  propaganda_threshold: 0.5
  ttr_window: 1000
stance: {tau_rel: 0.15, tau_agree: 0.5}
retrieval: {k: 20, k1: 1.2, b: 0.75}
verdict:
  band_low: 0.4                 # factuality below this -> likely-false
  band_high: 0.6                # factuality above this -> likely-true
  article_reliability_mode: eq1 # eq1 | site_prior_only
profile: {min_articles: 1}
source: {age_cap_years: 10.0, follower_cap_log10: 6.0, traffic_cap_log10: 7.0,
         length_full: 20, length_zero: 60}
training: {lr: 0.1, epochs: 500, l2: 0.001, seed: 0}
fixed_now: null                 # unix seconds; set for reproducible runs
"""


def _merge(base: dict, override: Mapping, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {where}{key}")
        if isinstance(base[key], dict) and key not in ("lexicons", "group_weights"):
            if not isinstance(value, Mapping):
                raise ConfigError(f"{where}{key} must be a mapping")
            out[key] = _merge(base[key], value, f"{where}{key}.")
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass
class EngineConfig:
    raw: dict[str, Any] = field(default_factory=lambda: copy.deepcopy(DEFAULTS))
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_mapping(cls, data: Mapping | None, base_dir: str | Path = ".") -> "EngineConfig":
        cfg = cls(_merge(DEFAULTS, data or {}), Path(base_dir).resolve())
        cfg.check_params()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "EngineConfig":
        path = Path(path)
        try:
            data = yaml.safe_load(path.read_text("utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, Mapping):
            raise ConfigError("config root must be a mapping")
        return cls.from_mapping(data, path.parent)

    # paths

    def path(self, key: str) -> Path | None:
        value = self.raw["paths"][key]
        return None if value is None else self.base_dir / value

    def lexicon_paths(self) -> dict[str, Path]:
        return {slot: self.base_dir / p for slot, p in self.raw["paths"]["lexicons"].items()
                if p is not None}

    def check_paths(self, *, need_model: bool | None = None) -> None:
        """Every referenced input file must exist."""
        missing = []
        for key in ("articles", "outlets", "dictionary", "suspicious_suffixes",
                    "public_suffixes", "wikipedia_cues"):
            p = self.path(key)
            if p is not None and not p.is_file():
                missing.append(f"paths.{key}={p}")
        for slot, p in self.lexicon_paths().items():
            if not p.is_file():
                missing.append(f"paths.lexicons.{slot}={p}")
        if need_model is None:
            need_model = self.raw["model"]["mode"] == "trained"
        if need_model:
            p = self.path("model")
            if p is None or not p.is_file():
                missing.append(f"paths.model={p}")
        if missing:
            raise ConfigError("missing input file(s): " + ", ".join(missing))

    # parameters

    def check_params(self) -> None:
        try:
            self.verdict_params()
            self.profile_params()
            self.stance_params()
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        mode = self.raw["model"]["mode"]
        if mode not in ("heuristic", "trained"):
            raise ConfigError("model.mode must be heuristic or trained")
        weights = self.raw["model"]["group_weights"]
        unknown = set(weights) - set(CHANNELS)
        if unknown:
            raise ConfigError(f"unknown channel(s) in group_weights: {sorted(unknown)}")
        if any(not isinstance(w, (int, float)) or w < 0 for w in weights.values()) \
                or sum(weights.values()) <= 0:
            raise ConfigError("group_weights must be non-negative with positive sum")
        unknown = set(self.raw["paths"]["lexicons"]) - set(LEXICON_SLOTS)
        if unknown:
            raise ConfigError(f"unknown lexicon slot(s): {sorted(unknown)}")
        t = self.raw["training"]
        if t["lr"] <= 0 or t["epochs"] < 1 or t["l2"] < 0:
            raise ConfigError("training needs lr > 0, epochs >= 1, l2 >= 0")
        if self.raw["fixed_now"] is not None and not isinstance(self.raw["fixed_now"], int):
            raise ConfigError("fixed_now must be an integer timestamp or null")

    def verdict_params(self) -> VerdictParams:
        a, r, v = self.raw["article"], self.raw["retrieval"], self.raw["verdict"]
        return VerdictParams(
            k=int(r["k"]), lam=float(a["lambda"]), band_low=float(v["band_low"]),
            band_high=float(v["band_high"]),
            article_reliability_mode=v["article_reliability_mode"],
            bm25=BM25Params(float(r["k1"]), float(r["b"])),
            mix_weights=tuple(float(w) for w in a["mix_weights"]),
            ttr_window=int(a["ttr_window"]),
        )

    def profile_params(self) -> ProfileParams:
        a, s = self.raw["article"], self.raw["source"]
        thr = float(a["propaganda_threshold"])
        if not 0.0 <= thr <= 1.0:
            raise ValueError("propaganda_threshold must be in [0,1]")
        if int(self.raw["profile"]["min_articles"]) < 0:
            raise ValueError("min_articles must be >= 0")
        return ProfileParams(
            min_articles=int(self.raw["profile"]["min_articles"]),
            propaganda_threshold=thr,
            mix_weights=tuple(float(w) for w in a["mix_weights"]),
            ttr_window=int(a["ttr_window"]),
            source=SourceParams(**s),
        )

    def stance_params(self) -> StanceParams:
        s = self.raw["stance"]
        return StanceParams(float(s["tau_rel"]), float(s["tau_agree"]))

    def params_dict(self) -> dict[str, Any]:
        return {k: v for k, v in self.raw.items() if k != "paths"}

    def config_hash(self) -> str:
        return canonical.digest(self.params_dict())[:16]
