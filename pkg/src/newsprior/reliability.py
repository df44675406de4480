"""Site reliability: a weighted-mean combiner and a small logistic model.

The heuristic mode needs no labels: it averages the available channel scores.
The trained mode fits a linear-logistic model on per-channel scores with plain
full-batch gradient descent (no framework), which keeps training bit-for-bit
reproducible.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import canonical
from .errors import DataError, DivergenceError, InsufficientEvidenceError, TrainingError
from .sourcefeat import CHANNELS, FeatureGroupReport
from .textfeat import StyleFeatureVector

log = logging.getLogger(__name__)

MODEL_FORMAT = "newsprior-model"
MODEL_FORMAT_VERSION = 1

DEFAULT_MIX_WEIGHTS = (0.4, 0.3, 0.2, 0.1)
LABEL_MAP = {"low": 0, "high": 1}

# keeps sigmoid strictly inside (0, 1) in float64
_LOGIT_CLIP = 30.0


def heuristic_site_reliability(reports: Sequence[FeatureGroupReport],
                               group_weights: Mapping[str, float]) -> float:
    """Weighted mean of available channel scores, weights renormalized."""
    used: list[tuple[float, float]] = []
    for r in reports:
        if not r.available:
            continue
        w = float(group_weights.get(r.channel_id, 0.0))
        if w < 0:
            raise DataError(f"negative weight for channel {r.channel_id!r}")
        if w > 0:
            used.append((w, r.group_score))
    total = math.fsum(w for w, _ in used)
    if total <= 0:
        raise InsufficientEvidenceError("no available channel with positive weight")
    # normalize first so a lone channel comes back bit-exact
    return min(1.0, max(0.0, math.fsum((w / total) * s for w, s in used)))


def language_reliability(vec: StyleFeatureVector,
                         mix_weights: Sequence[float] = DEFAULT_MIX_WEIGHTS) -> float:
    """One minus the weighted mean of propaganda, subjectivity, offensiveness
    and absolute sentiment."""
    if len(mix_weights) != 4 or any(w < 0 for w in mix_weights) or math.fsum(mix_weights) <= 0:
        raise DataError("mix_weights must be 4 non-negative numbers with positive sum")
    signals = (vec.propaganda_cue_density, vec.subjectivity_density,
               vec.offensive_density, abs(vec.sentiment_polarity))
    penalty = math.fsum(w * x for w, x in zip(mix_weights, signals)) / math.fsum(mix_weights)
    return min(1.0, max(0.0, 1.0 - penalty))


@dataclass(frozen=True)
class LabeledDataset:
    """Rows of per-channel scores; NaN marks an unavailable channel."""

    X: np.ndarray
    y: np.ndarray
    feature_order: tuple[str, ...]
    ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[1] != len(self.feature_order):
            raise DataError("feature matrix does not match feature_order")
        if self.y.shape != (self.X.shape[0],):
            raise DataError("label vector length does not match rows")
        if not np.isin(self.y, (0, 1)).all():
            raise DataError("labels must be 0 or 1")

    def __len__(self) -> int:
        return self.X.shape[0]

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx)
        ids = tuple(self.ids[i] for i in idx) if self.ids else ()
        return LabeledDataset(self.X[idx], self.y[idx], self.feature_order, ids)


def report_vector(reports: Sequence[FeatureGroupReport],
                  feature_order: Sequence[str] = CHANNELS) -> np.ndarray:
    by_id = {r.channel_id: r for r in reports}
    return np.array([by_id[c].group_score if c in by_id and by_id[c].available else np.nan
                     for c in feature_order], dtype=np.float64)


def dataset_from_reports(rows: Sequence[tuple[str, Sequence[FeatureGroupReport], str]],
                         feature_order: Sequence[str] = CHANNELS) -> LabeledDataset:
    """Build a dataset from ``(id, reports, label)``; ``mixed`` rows are dropped."""
    X, y, ids = [], [], []
    for row_id, reports, label in rows:
        if label not in LABEL_MAP:
            continue
        X.append(report_vector(reports, feature_order))
        y.append(LABEL_MAP[label])
        ids.append(row_id)
    X_arr = np.array(X, dtype=np.float64).reshape(len(X), len(feature_order))
    return LabeledDataset(X_arr, np.array(y, dtype=np.int64), tuple(feature_order), tuple(ids))


def train_test_split(dataset: LabeledDataset, n_train: int, seed: int = 0):
    if not 0 < n_train < len(dataset):
        raise DataError("n_train must leave at least one row on each side")
    perm = np.random.default_rng(seed).permutation(len(dataset))
    return dataset.subset(np.sort(perm[:n_train])), dataset.subset(np.sort(perm[n_train:]))


@dataclass(frozen=True)
class Standardization:
    mean: tuple[float, ...]
    scale: tuple[float, ...]
    warnings: tuple[str, ...] = ()

    def apply(self, X: np.ndarray) -> np.ndarray:
        Z = (np.asarray(X, dtype=np.float64) - np.array(self.mean)) / np.array(self.scale)
        return np.where(np.isnan(Z), 0.0, Z)


def standardize_fit(dataset: LabeledDataset) -> Standardization:
    """Per-feature mean and population std over the available values."""
    if len(dataset) < 2:
        raise DataError("standardization needs at least 2 rows")
    means, scales, warnings = [], [], []
    for j, name in enumerate(dataset.feature_order):
        col = dataset.X[:, j]
        col = col[~np.isnan(col)]
        if col.size == 0:
            means.append(0.0)
            scales.append(1.0)
            warnings.append(f"feature {name!r} never available; scale set to 1")
            continue
        mu = float(np.mean(col))
        sd = float(np.sqrt(np.mean((col - mu) ** 2)))
        means.append(mu)
        if sd == 0.0:
            scales.append(1.0)
            warnings.append(f"feature {name!r} has zero variance; scale set to 1")
        else:
            scales.append(sd)
    for w in warnings:
        log.warning(w)
    return Standardization(tuple(means), tuple(scales), tuple(warnings))


def _expit(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def _sigmoid(z):
    return _expit(np.clip(z, -_LOGIT_CLIP, _LOGIT_CLIP))


def logistic_loss_grad(theta: np.ndarray, X: np.ndarray, y: np.ndarray,
                       l2: float = 1e-3) -> tuple[float, np.ndarray]:
    """Mean negative log-likelihood plus ``l2 * ||w||^2`` and its exact gradient.

    ``theta`` is the weight vector with the bias appended; the bias is not
    penalized.
    """
    theta = np.asarray(theta, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("batch must be a non-empty 2-d array")
    if theta.shape != (X.shape[1] + 1,) or y.shape != (X.shape[0],):
        raise DataError(f"dimension mismatch: theta {theta.shape}, X {X.shape}, y {y.shape}")
    w, b = theta[:-1], theta[-1]
    z = X @ w + b
    # log(1 + e^z) - y z, computed without overflow
    nll = np.logaddexp(0.0, z) - y * z
    loss = float(np.mean(nll) + l2 * np.dot(w, w))
    resid = _expit(z) - y
    grad = np.empty_like(theta)
    grad[:-1] = X.T @ resid / X.shape[0] + 2.0 * l2 * w
    grad[-1] = np.mean(resid)
    return loss, grad


@dataclass(frozen=True)
class ReliabilityModel:
    mode: str = "heuristic"
    group_weights: Mapping[str, float] = field(
        default_factory=lambda: {c: 1.0 for c in CHANNELS})
    weights: tuple[float, ...] = ()
    bias: float = 0.0
    feature_order: tuple[str, ...] = ()
    standardization: Standardization | None = None
    training: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode == "heuristic":
            if any(w < 0 for w in self.group_weights.values()) \
                    or math.fsum(self.group_weights.values()) <= 0:
                raise DataError("group_weights must be non-negative with positive sum")
        elif self.mode == "trained":
            if len(self.weights) != len(self.feature_order):
                raise DataError("weights and feature_order differ in length")
            if self.standardization is None \
                    or len(self.standardization.mean) != len(self.feature_order) \
                    or any(s <= 0 for s in self.standardization.scale):
                raise DataError("trained model needs a valid standardization")
        else:
            raise DataError(f"unknown model mode {self.mode!r}")

    def to_dict(self) -> dict:
        out: dict = {"format": MODEL_FORMAT, "format_version": MODEL_FORMAT_VERSION,
                     "mode": self.mode}
        if self.mode == "heuristic":
            out["group_weights"] = dict(self.group_weights)
        else:
            st = self.standardization
            out.update(weights=list(self.weights), bias=self.bias,
                       feature_order=list(self.feature_order),
                       standardization={"mean": list(st.mean), "scale": list(st.scale),
                                        "warnings": list(st.warnings)},
                       training=dict(self.training))
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "ReliabilityModel":
        if d.get("format") != MODEL_FORMAT or d.get("format_version") != MODEL_FORMAT_VERSION:
            raise DataError("not a version-1 model file")
        if d["mode"] == "heuristic":
            return cls("heuristic", dict(d["group_weights"]))
        st = d["standardization"]
        return cls("trained", {}, tuple(float(w) for w in d["weights"]), float(d["bias"]),
                   tuple(d["feature_order"]),
                   Standardization(tuple(st["mean"]), tuple(st["scale"]),
                                   tuple(st.get("warnings", ()))),
                   dict(d.get("training", {})))

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(canonical.dump_bytes(self.to_dict()))

    @classmethod
    def load(cls, path: str | Path) -> "ReliabilityModel":
        return cls.from_dict(json.loads(Path(path).read_text("utf-8")))


def train_logistic(dataset: LabeledDataset, lr: float = 0.1, epochs: int = 500,
                   l2: float = 1e-3, seed: int = 0,
                   on_epoch: Callable[[int, float], None] | None = None) -> ReliabilityModel:
    """Full-batch gradient descent from zero on standardized features.

    ``seed`` is recorded for provenance; training itself draws no randomness.
    ``on_epoch(epoch, loss)`` sees the loss *before* each update, then once
    more with the final loss at ``epoch == epochs``.
    """
    if len(dataset) == 0 or len(set(dataset.y.tolist())) < 2:
        raise TrainingError("training needs at least one row of each label")
    st = standardize_fit(dataset)
    Z = st.apply(dataset.X)
    theta = np.zeros(Z.shape[1] + 1)
    initial = None
    for epoch in range(epochs):
        loss, grad = logistic_loss_grad(theta, Z, dataset.y, l2)
        if not math.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise DivergenceError(epoch, loss)
        if initial is None:
            initial = loss
        if on_epoch:
            on_epoch(epoch, loss)
        theta = theta - lr * grad
    final, _ = logistic_loss_grad(theta, Z, dataset.y, l2)
    if not math.isfinite(final):
        raise DivergenceError(epochs, final)
    if on_epoch:
        on_epoch(epochs, final)
    return ReliabilityModel(
        mode="trained",
        group_weights={},
        weights=tuple(float(v) for v in theta[:-1]),
        bias=float(theta[-1]),
        feature_order=dataset.feature_order,
        standardization=st,
        training={"lr": lr, "epochs": epochs, "l2": l2, "seed": seed, "rows": len(dataset),
                  "initial_loss": initial if initial is not None else final,
                  "final_loss": final},
    )


def predict(model: ReliabilityModel, evidence) -> float:
    """Site reliability from channel reports (either mode) or a raw feature
    vector ordered like ``model.feature_order`` (trained mode)."""
    if model.mode == "heuristic":
        return heuristic_site_reliability(evidence, model.group_weights)
    if len(evidence) and isinstance(evidence[0], FeatureGroupReport):
        x = report_vector(evidence, model.feature_order)
    else:
        x = np.asarray(evidence, dtype=np.float64)
        if x.shape != (len(model.feature_order),):
            raise DataError("feature vector does not match model.feature_order")
    z = model.standardization.apply(x[None, :])[0]
    return float(_sigmoid(float(np.dot(model.weights, z)) + model.bias))


def predict_many(model: ReliabilityModel, X: np.ndarray) -> np.ndarray:
    Z = model.standardization.apply(X)
    return _sigmoid(Z @ np.array(model.weights) + model.bias)


def accuracy(model: ReliabilityModel, dataset: LabeledDataset) -> float:
    pred = (predict_many(model, dataset.X) >= 0.5).astype(int)
    return float(np.mean(pred == dataset.y))
