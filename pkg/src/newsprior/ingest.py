"""Article / outlet records and their line-delimited JSON file formats.

Both files are UTF-8 with one JSON object per line. The field sets are closed:
an unknown key is a parse error, so typos in upstream exporters surface early.
Schemas for both formats live in ``newsprior/schemas``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, BinaryIO, Iterable, Mapping
from urllib.parse import urlsplit

from . import canonical
from .errors import DomainError, IngestError

ARTICLE_FORMAT_VERSION = 1
OUTLET_FORMAT_VERSION = 1

EXTERNAL_CHANNELS = ("audience_links", "audience_bias", "speech")
LABELS = ("low", "mixed", "high")

_LANG_RE = re.compile(r"^[a-z]{2}$")


def normalize_domain(url_or_domain: str) -> str:
    """Reduce a URL or bare host to its canonical outlet domain.

    >>> normalize_domain("https://www.Example.COM/a?b=1")
    'example.com'
    """
    if not isinstance(url_or_domain, str) or not url_or_domain.strip():
        raise DomainError("empty URL/domain")
    s = url_or_domain.strip()
    parts = urlsplit(s if "://" in s else "//" + s)
    host = parts.netloc.rpartition("@")[2]
    if host.startswith("["):
        host = host[: host.find("]") + 1] if "]" in host else host
    else:
        host = host.partition(":")[0]
    host = host.lower().rstrip(".")
    # repeated so that normalization is idempotent ("www.www.x.com")
    while host.startswith("www."):
        host = host[4:]
    if not host:
        raise DomainError(f"no host in {url_or_domain!r}")
    return host


@dataclass(frozen=True)
class ArticleRecord:
    id: str
    source_domain: str
    url: str
    title: str
    body: str
    published_at: int
    language_tag: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "source_domain": self.source_domain,
            "url": self.url,
            "title": self.title,
            "body": self.body,
            "published_at": self.published_at,
            "language_tag": self.language_tag,
        }

    @classmethod
    def from_dict(cls, data: Any, *, line: int | None = None) -> "ArticleRecord":
        _check_keys(data, ARTICLE_FIELDS, ARTICLE_FIELDS, line)
        rec = cls(
            id=_req_str(data, "id", line),
            source_domain=_req_str(data, "source_domain", line),
            url=_req_str(data, "url", line),
            title=_req_str(data, "title", line, allow_empty=True),
            body=_req_str(data, "body", line),
            published_at=_req_int(data, "published_at", line),
            language_tag=_req_str(data, "language_tag", line),
        )
        if not rec.body.strip():
            raise IngestError("body is blank", line=line, field="body")
        if not _LANG_RE.match(rec.language_tag):
            raise IngestError("language_tag must be a 2-letter lowercase code",
                              line=line, field="language_tag")
        try:
            url_domain = normalize_domain(rec.url)
        except DomainError as exc:
            raise IngestError(str(exc), line=line, field="url") from None
        if rec.source_domain != url_domain:
            raise IngestError(
                f"source_domain {rec.source_domain!r} does not match url domain {url_domain!r}",
                line=line, field="source_domain",
            )
        return rec


ARTICLE_FIELDS = frozenset(
    ("id", "source_domain", "url", "title", "body", "published_at", "language_tag")
)


@dataclass(frozen=True)
class WikipediaInfo:
    page_text: str
    has_infobox: bool = False
    categories: tuple[str, ...] = ()


@dataclass(frozen=True)
class TwitterInfo:
    created_at: int
    verified: bool
    followers: int
    description: str = ""
    linked_url: str | None = None


@dataclass(frozen=True)
class Annotations:
    """Ingested profile annotations (ideology, framing, hyper-partisanship).

    These come from external annotators; nothing here computes them.
    """

    ideology: str | None = None
    frames: tuple[str, ...] = ()
    hyper_partisanship: str | None = None


@dataclass(frozen=True)
class OutletRecord:
    domain: str
    wikipedia: WikipediaInfo | None = None
    twitter: TwitterInfo | None = None
    traffic_rank: int | None = None
    external_scores: Mapping[str, float] = field(default_factory=dict)
    label: str | None = None
    annotations: Annotations | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"domain": self.domain}
        if self.wikipedia is not None:
            w = self.wikipedia
            out["wikipedia"] = {"page_text": w.page_text, "has_infobox": w.has_infobox,
                                "categories": list(w.categories)}
        if self.twitter is not None:
            t = self.twitter
            out["twitter"] = {"created_at": t.created_at, "verified": t.verified,
                              "followers": t.followers, "description": t.description,
                              "linked_url": t.linked_url}
        if self.traffic_rank is not None:
            out["traffic_rank"] = self.traffic_rank
        if self.external_scores:
            out["external_scores"] = dict(self.external_scores)
        if self.label is not None:
            out["label"] = self.label
        if self.annotations is not None:
            a = self.annotations
            out["annotations"] = {"ideology": a.ideology, "frames": list(a.frames),
                                  "hyper_partisanship": a.hyper_partisanship}
        return out

    @classmethod
    def from_dict(cls, data: Any, *, line: int | None = None) -> "OutletRecord":
        _check_keys(data, OUTLET_FIELDS, {"domain"}, line)
        domain = _req_str(data, "domain", line)
        try:
            canon = normalize_domain(domain)
        except DomainError as exc:
            raise IngestError(str(exc), line=line, field="domain") from None
        if canon != domain:
            raise IngestError(f"domain {domain!r} is not canonical (expected {canon!r})",
                              line=line, field="domain")

        wikipedia = None
        if data.get("wikipedia") is not None:
            w = data["wikipedia"]
            _check_keys(w, {"page_text", "has_infobox", "categories"}, {"page_text"}, line,
                        prefix="wikipedia.")
            cats = w.get("categories", [])
            if not isinstance(cats, list) or not all(isinstance(c, str) for c in cats):
                raise IngestError("must be a list of strings", line=line,
                                  field="wikipedia.categories")
            wikipedia = WikipediaInfo(
                page_text=_req_str(w, "page_text", line, allow_empty=True, prefix="wikipedia."),
                has_infobox=_opt_bool(w, "has_infobox", line, prefix="wikipedia."),
                categories=tuple(cats),
            )

        twitter = None
        if data.get("twitter") is not None:
            t = data["twitter"]
            _check_keys(t, {"created_at", "verified", "followers", "description", "linked_url"},
                        {"created_at", "verified", "followers"}, line, prefix="twitter.")
            followers = _req_int(t, "followers", line, prefix="twitter.")
            if followers < 0:
                raise IngestError("must be >= 0", line=line, field="twitter.followers")
            linked = t.get("linked_url")
            if linked is not None and not isinstance(linked, str):
                raise IngestError("must be a string or null", line=line,
                                  field="twitter.linked_url")
            if not isinstance(t.get("verified"), bool):
                raise IngestError("must be a boolean", line=line, field="twitter.verified")
            twitter = TwitterInfo(
                created_at=_req_int(t, "created_at", line, prefix="twitter."),
                verified=t["verified"],
                followers=followers,
                description=_req_str(t, "description", line, allow_empty=True,
                                     prefix="twitter.") if "description" in t else "",
                linked_url=linked,
            )

        rank = None
        if data.get("traffic_rank") is not None:
            rank = _req_int(data, "traffic_rank", line)
            if rank < 1:
                raise IngestError("must be >= 1", line=line, field="traffic_rank")

        scores: dict[str, float] = {}
        raw_scores = data.get("external_scores") or {}
        if not isinstance(raw_scores, dict):
            raise IngestError("must be an object", line=line, field="external_scores")
        for key, value in raw_scores.items():
            fname = f"external_scores.{key}"
            if key not in EXTERNAL_CHANNELS:
                raise IngestError(f"unknown channel (expected one of {EXTERNAL_CHANNELS})",
                                  line=line, field=fname)
            if isinstance(value, bool) or not isinstance(value, (int, float)) \
                    or not math.isfinite(value) or not 0.0 <= value <= 1.0:
                raise IngestError("must be a number in [0,1]", line=line, field=fname)
            scores[key] = float(value)

        label = data.get("label")
        if label is not None and label not in LABELS:
            raise IngestError(f"must be one of {LABELS}", line=line, field="label")

        annotations = None
        if data.get("annotations") is not None:
            a = data["annotations"]
            _check_keys(a, {"ideology", "frames", "hyper_partisanship"}, set(), line,
                        prefix="annotations.")
            frames = a.get("frames") or []
            if not isinstance(frames, list) or not all(isinstance(f, str) for f in frames):
                raise IngestError("must be a list of strings", line=line,
                                  field="annotations.frames")
            for key in ("ideology", "hyper_partisanship"):
                if a.get(key) is not None and not isinstance(a[key], str):
                    raise IngestError("must be a string or null", line=line,
                                      field=f"annotations.{key}")
            annotations = Annotations(a.get("ideology"), tuple(frames),
                                      a.get("hyper_partisanship"))

        return cls(domain, wikipedia, twitter, rank, scores, label, annotations)


OUTLET_FIELDS = frozenset(
    ("domain", "wikipedia", "twitter", "traffic_rank", "external_scores", "label", "annotations")
)


@dataclass(frozen=True)
class Corpus:
    articles: tuple[ArticleRecord, ...]
    outlets: Mapping[str, OutletRecord]

    def article(self, article_id: str) -> ArticleRecord:
        for a in self.articles:
            if a.id == article_id:
                return a
        raise KeyError(article_id)

    def by_id(self) -> dict[str, ArticleRecord]:
        return {a.id: a for a in self.articles}


def _check_keys(data: Any, allowed, required, line, prefix: str = "") -> None:
    if not isinstance(data, dict):
        raise IngestError(f"{prefix or 'record'} must be a JSON object", line=line,
                          field=prefix.rstrip(".") or None)
    for key in data:
        if key not in allowed:
            raise IngestError(f"unknown field {prefix}{key!r}", line=line, field=prefix + key)
    for key in sorted(required):
        if key not in data:
            raise IngestError(f"missing required field {prefix}{key!r}", line=line,
                              field=prefix + key)


def _req_str(data, key, line, *, allow_empty=False, prefix="") -> str:
    value = data.get(key)
    if not isinstance(value, str):
        raise IngestError("must be a string", line=line, field=prefix + key)
    if not allow_empty and not value:
        raise IngestError("must be non-empty", line=line, field=prefix + key)
    return value


def _req_int(data, key, line, *, prefix="") -> int:
    value = data.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise IngestError("must be an integer", line=line, field=prefix + key)
    return value


def _opt_bool(data, key, line, *, prefix="") -> bool:
    value = data.get(key, False)
    if not isinstance(value, bool):
        raise IngestError("must be a boolean", line=line, field=prefix + key)
    return value


def _iter_json_lines(stream: Iterable[bytes | str]):
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise IngestError(f"invalid UTF-8: {exc.reason}", line=lineno) from None
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise IngestError(f"malformed JSON: {exc.msg}", line=lineno) from None
        yield lineno, obj


def _lines(stream: BinaryIO | bytes | str | Iterable[bytes | str]):
    if isinstance(stream, (bytes, str)):
        return stream.splitlines()
    return stream


def parse_article_stream(stream) -> list[ArticleRecord]:
    """Parse line-delimited article objects, in input order.

    Accepts a binary file object, raw bytes/str, or any iterable of lines.
    """
    records: list[ArticleRecord] = []
    seen: dict[str, int] = {}
    for lineno, obj in _iter_json_lines(_lines(stream)):
        rec = ArticleRecord.from_dict(obj, line=lineno)
        if rec.id in seen:
            raise IngestError(f"duplicate id {rec.id!r} (first seen on line {seen[rec.id]})",
                              line=lineno, field="id")
        seen[rec.id] = lineno
        records.append(rec)
    return records


def parse_outlet_stream(stream) -> list[OutletRecord]:
    records: list[OutletRecord] = []
    seen: set[str] = set()
    for lineno, obj in _iter_json_lines(_lines(stream)):
        rec = OutletRecord.from_dict(obj, line=lineno)
        if rec.domain in seen:
            raise IngestError(f"duplicate outlet domain {rec.domain!r}", line=lineno,
                              field="domain")
        seen.add(rec.domain)
        records.append(rec)
    return records


def build_corpus(articles: Iterable[ArticleRecord],
                 outlets: Iterable[OutletRecord] = ()) -> Corpus:
    """Assemble a corpus, registering an empty outlet for every unseen domain."""
    articles = tuple(articles)
    ids = set()
    for a in articles:
        if a.id in ids:
            raise IngestError(f"duplicate id {a.id!r}", field="id")
        ids.add(a.id)
    table: dict[str, OutletRecord] = {}
    for o in outlets:
        if o.domain in table:
            raise IngestError(f"duplicate outlet domain {o.domain!r}", field="domain")
        table[o.domain] = o
    for a in articles:
        table.setdefault(a.source_domain, OutletRecord(a.source_domain))
    return Corpus(articles, dict(sorted(table.items())))


def load_corpus(articles_path: str | Path, outlets_path: str | Path | None = None) -> Corpus:
    with open(articles_path, "rb") as fh:
        articles = parse_article_stream(fh)
    outlets: list[OutletRecord] = []
    if outlets_path is not None:
        with open(outlets_path, "rb") as fh:
            outlets = parse_outlet_stream(fh)
    return build_corpus(articles, outlets)


def group_by_outlet(corpus: Corpus) -> dict[str, list[ArticleRecord]]:
    """Partition articles by domain; newest first, ties by ascending id."""
    groups: dict[str, list[ArticleRecord]] = {}
    for a in corpus.articles:
        groups.setdefault(a.source_domain, []).append(a)
    for items in groups.values():
        items.sort(key=lambda a: (-a.published_at, a.id))
    return dict(sorted(groups.items()))


def serialize_articles(articles: Iterable[ArticleRecord]) -> str:
    return "".join(canonical.dumps(a.to_dict()) for a in articles)


def serialize_outlets(outlets: Iterable[OutletRecord]) -> str:
    return "".join(canonical.dumps(o.to_dict()) for o in outlets)
