import json

import pytest
from hypothesis import given, strategies as st

from newsprior.errors import DomainError, IngestError
from newsprior.ingest import (ArticleRecord, OutletRecord, build_corpus, group_by_outlet,
                              normalize_domain, parse_article_stream, parse_outlet_stream,
                              serialize_articles, serialize_outlets)


def line(**overrides):
    rec = {"id": "a1", "source_domain": "example.com", "url": "https://www.example.com/x",
           "title": "T", "body": "Body text.", "published_at": 1000, "language_tag": "en"}
    rec.update(overrides)
    rec = {k: v for k, v in rec.items() if v is not ...}
    return json.dumps(rec).encode() + b"\n"


def test_single_line():
    recs = parse_article_stream(line())
    assert len(recs) == 1
    assert recs[0] == ArticleRecord("a1", "example.com", "https://www.example.com/x", "T",
                                    "Body text.", 1000, "en")


def test_empty_stream():
    assert parse_article_stream(b"") == []


def test_duplicate_id_is_named():
    with pytest.raises(IngestError, match="'a1'") as exc:
        parse_article_stream(line() + line())
    assert exc.value.line == 2


def test_malformed_line_number():
    with pytest.raises(IngestError) as exc:
        parse_article_stream(line() + b"{not json\n")
    assert exc.value.line == 2


@pytest.mark.parametrize("missing", ["id", "body", "published_at", "url", "language_tag"])
def test_missing_field_is_named(missing):
    with pytest.raises(IngestError, match=missing) as exc:
        parse_article_stream(line(**{missing: ...}))
    assert exc.value.field == missing


def test_unknown_field_rejected():
    with pytest.raises(IngestError, match="extra"):
        parse_article_stream(line(extra=1))


def test_domain_must_match_url():
    with pytest.raises(IngestError, match="source_domain"):
        parse_article_stream(line(source_domain="other.org"))


def test_blank_body_rejected():
    with pytest.raises(IngestError):
        parse_article_stream(line(body="   "))


def test_bad_utf8():
    with pytest.raises(IngestError, match="UTF-8"):
        parse_article_stream(b"\xff\xfe\n")


@pytest.mark.parametrize("raw,expected", [
    ("https://www.Example.COM/a?b=1", "example.com"),
    ("example.com", "example.com"),
    ("http://abcnews.com.co/story", "abcnews.com.co"),
    ("HTTP://user:pw@News.Example.org:8080/p", "news.example.org"),
    ("www.www.site.net.", "site.net"),
    ("xn--bcher-kva.example/path", "xn--bcher-kva.example"),
])
def test_normalize_domain(raw, expected):
    assert normalize_domain(raw) == expected


@pytest.mark.parametrize("raw", ["", "   ", "https:///nohost", "http://:80/"])
def test_normalize_domain_errors(raw):
    with pytest.raises(DomainError):
        normalize_domain(raw)


@given(st.text(alphabet="abcWWw.:/-?=@1", min_size=1, max_size=30))
def test_normalize_idempotent(s):
    try:
        once = normalize_domain(s)
    except DomainError:
        return
    assert normalize_domain(once) == once


def _art(id, domain, t):
    return ArticleRecord(id, domain, f"http://{domain}/{id}", "", "x", t, "en")


def test_group_by_outlet_sizes_and_order():
    arts = [_art("1", "a.com", 5), _art("2", "a.com", 9), _art("3", "b.org", 1),
            _art("4", "a.com", 7)]
    groups = group_by_outlet(build_corpus(arts))
    assert {k: len(v) for k, v in groups.items()} == {"a.com": 3, "b.org": 1}
    assert [a.id for a in groups["a.com"]] == ["2", "4", "1"]


def test_group_by_outlet_empty():
    assert group_by_outlet(build_corpus([])) == {}


def test_group_tie_break():
    groups = group_by_outlet(build_corpus([_art("z", "a.com", 5), _art("a", "a.com", 5)]))
    assert [a.id for a in groups["a.com"]] == ["a", "z"]


@given(st.lists(st.tuples(st.sampled_from(["a.com", "b.org", "c.net"]),
                          st.integers(0, 5)), max_size=20))
def test_group_is_partition(items):
    arts = [_art(f"id{i}", d, t) for i, (d, t) in enumerate(items)]
    groups = group_by_outlet(build_corpus(arts))
    flat = [a.id for g in groups.values() for a in g]
    assert sorted(flat) == sorted(a.id for a in arts)
    assert len(flat) == len(set(flat))


def test_corpus_registers_missing_outlets():
    corpus = build_corpus([_art("1", "a.com", 1)], [OutletRecord("b.org", traffic_rank=3)])
    assert set(corpus.outlets) == {"a.com", "b.org"}
    assert corpus.outlets["a.com"] == OutletRecord("a.com")


OUTLET = {
    "domain": "example.com",
    "wikipedia": {"page_text": "An outlet.", "has_infobox": True, "categories": ["News"]},
    "twitter": {"created_at": 10, "verified": True, "followers": 5, "description": "d",
                "linked_url": "https://example.com"},
    "traffic_rank": 42,
    "external_scores": {"audience_bias": 0.3},
    "label": "high",
    "annotations": {"ideology": "center", "frames": ["economic"], "hyper_partisanship": None},
}


def test_outlet_roundtrip():
    text = json.dumps(OUTLET) + "\n" + json.dumps({"domain": "bare.org"}) + "\n"
    recs = parse_outlet_stream(text.encode())
    again = parse_outlet_stream(serialize_outlets(recs).encode())
    assert again == recs
    assert serialize_outlets(again) == serialize_outlets(recs)


@pytest.mark.parametrize("patch,field", [
    ({"domain": "www.example.com"}, "domain"),
    ({"traffic_rank": 0}, "traffic_rank"),
    ({"external_scores": {"speech": 1.2}}, "external_scores.speech"),
    ({"external_scores": {"wikipedia": 0.5}}, "external_scores.wikipedia"),
    ({"twitter": {"created_at": 1, "verified": True, "followers": -1}}, "twitter.followers"),
    ({"label": "great"}, "label"),
])
def test_outlet_validation(patch, field):
    bad = {**OUTLET, **patch}
    with pytest.raises(IngestError) as exc:
        parse_outlet_stream(json.dumps(bad).encode())
    assert exc.value.field == field


printable = st.text(st.characters(blacklist_categories=("Cs",)), max_size=40)


@given(st.lists(st.tuples(printable, printable, st.integers(-2**40, 2**40)), max_size=5))
def test_article_roundtrip(rows):
    arts = [ArticleRecord(f"id{i}", "example.com", f"https://example.com/{i}", title,
                          body + " x", t, "en") for i, (title, body, t) in enumerate(rows)]
    text = serialize_articles(arts)
    parsed = parse_article_stream(text.encode())
    assert parsed == arts
    assert serialize_articles(parsed) == text
