"""In-memory inverted index with BM25 ranking."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import canonical
from .errors import DataError, IngestError
from .ingest import ArticleRecord
from .textfeat import tokenize

INDEX_FORMAT = "newsprior-index"
INDEX_FORMAT_VERSION = 1


def document_tokens(article: ArticleRecord) -> list[str]:
    return tokenize(article.title) + tokenize(article.body)


@dataclass(frozen=True)
class BM25Params:
    k1: float = 1.2
    b: float = 0.75


class InvertedIndex:
    """Postings are ``token -> [(article_id, tf), ...]`` sorted by id.

    Instances are built frozen; there is no incremental update.
    """

    def __init__(self, postings: dict[str, list[tuple[str, int]]],
                 doc_lengths: dict[str, int]):
        self.postings = postings
        self.doc_lengths = doc_lengths
        self.doc_count = len(doc_lengths)
        self.mean_doc_length = (math.fsum(doc_lengths.values()) / self.doc_count
                                if self.doc_count else 0.0)
        self._tf = {tok: dict(plist) for tok, plist in postings.items()}
        self.frozen = True

    @classmethod
    def build(cls, articles: Iterable[ArticleRecord]) -> "InvertedIndex":
        doc_lengths: dict[str, int] = {}
        postings: dict[str, list[tuple[str, int]]] = {}
        for art in articles:
            if art.id in doc_lengths:
                raise IngestError(f"duplicate id {art.id!r}", field="id")
            toks = document_tokens(art)
            doc_lengths[art.id] = len(toks)
            for tok, tf in Counter(toks).items():
                postings.setdefault(tok, []).append((art.id, tf))
        for plist in postings.values():
            plist.sort()
        return cls(dict(sorted(postings.items())), dict(sorted(doc_lengths.items())))

    def df(self, token: str) -> int:
        return len(self.postings.get(token, ()))

    def idf(self, token: str) -> float:
        df = self.df(token)
        return math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))

    def _term_score(self, token: str, doc_id: str, params: BM25Params) -> float:
        tf = self._tf.get(token, {}).get(doc_id, 0)
        if tf == 0:
            return 0.0
        norm = 1.0 - params.b + params.b * self.doc_lengths[doc_id] / self.mean_doc_length
        return self.idf(token) * tf * (params.k1 + 1.0) / (tf + params.k1 * norm)

    def bm25(self, query_tokens: Sequence[str], doc_id: str,
             params: BM25Params = BM25Params()) -> float:
        if doc_id not in self.doc_lengths:
            raise KeyError(f"unknown article id {doc_id!r}")
        score = 0.0
        for tok in query_tokens:
            score += self._term_score(tok, doc_id, params)
        return score

    def retrieve(self, claim_text: str, k: int = 20,
                 params: BM25Params = BM25Params()) -> list[tuple[str, float]]:
        """Top-``k`` ``(article_id, score)``; ties by ascending id, zeros dropped."""
        if k < 1:
            raise DataError("k must be >= 1")
        query = tokenize(claim_text)
        candidates = sorted({doc for tok in set(query)
                             for doc, _ in self.postings.get(tok, ())})
        scored = [(doc, self.bm25(query, doc, params)) for doc in candidates]
        scored = [(doc, s) for doc, s in scored if s > 0.0]
        scored.sort(key=lambda item: (-item[1], item[0]))
        return scored[:k]

    def to_dict(self) -> dict:
        return {
            "format": INDEX_FORMAT,
            "format_version": INDEX_FORMAT_VERSION,
            "doc_lengths": self.doc_lengths,
            "postings": {tok: [[doc, tf] for doc, tf in plist]
                         for tok, plist in self.postings.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InvertedIndex":
        if d.get("format") != INDEX_FORMAT or d.get("format_version") != INDEX_FORMAT_VERSION:
            raise DataError("not a version-1 index snapshot")
        postings = {tok: [(doc, int(tf)) for doc, tf in plist]
                    for tok, plist in d["postings"].items()}
        return cls(postings, {k: int(v) for k, v in d["doc_lengths"].items()})

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(canonical.dump_bytes(self.to_dict()))

    @classmethod
    def load(cls, path: str | Path) -> "InvertedIndex":
        return cls.from_dict(json.loads(Path(path).read_text("utf-8")))


def build_index(articles: Iterable[ArticleRecord]) -> InvertedIndex:
    return InvertedIndex.build(articles)


def bm25(index: InvertedIndex, query_tokens: Sequence[str], article_id: str,
         k1: float = 1.2, b: float = 0.75) -> float:
    return index.bm25(query_tokens, article_id, BM25Params(k1, b))


def retrieve(index: InvertedIndex, claim_text: str, k: int = 20,
             k1: float = 1.2, b: float = 0.75) -> list[tuple[str, float]]:
    return index.retrieve(claim_text, k, BM25Params(k1, b))
