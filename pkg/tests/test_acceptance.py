"""Acceptance gate: ten criteria, each at its stated tolerance and time budget.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import io
import itertools
import math
import time

import numpy as np
import pytest

from newsprior.cli import run
from newsprior.fixtures import (GOLDEN_CLAIM, GOLDEN_FACTUALITY, GOLDEN_NEGATION, SyntheticSpec,
                                generate_corpus, oracle_bm25, oracle_claim_score, oracle_segment,
                                outlet_dataset, stance_noise_study, write_fixtures)
from newsprior.ingest import ArticleRecord
from newsprior.reliability import accuracy, logistic_loss_grad, train_logistic, train_test_split
from newsprior.retrieval import build_index
from newsprior.sourcefeat import word_break_coverage
from newsprior.verdict import (EvidenceItem, article_factuality, claim_raw_score,
                               verdict_from_evidence)

SEED = 20240601
STANCES = np.array([-1.0, 0.0, 1.0])


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def random_pairs(rng, max_n):
    n = int(rng.integers(0, max_n + 1))
    return [(float(r), float(s)) for r, s in zip(rng.uniform(0, 1, n), rng.choice(STANCES, n))]


def items(pairs, prefix="e"):
    return [EvidenceItem(f"{prefix}{i}", r, s) for i, (r, s) in enumerate(pairs)]


@pytest.mark.acceptance(1, "claim score equals exact rational oracle (1000 lists, 1e-12, <1 s)")
def test_01_claim_oracle():
    rng = np.random.default_rng(SEED)
    cases = [random_pairs(rng, 8) for _ in range(1000)]
    with Timer() as t:
        worst = max(abs(claim_raw_score(items(p)) - oracle_claim_score(p)) for p in cases)
    print(f"criterion 1: max abs error {worst:.3g}, {t.elapsed:.3f} s")
    assert worst <= 1e-12
    assert t.elapsed < 1.0


@pytest.mark.acceptance(2, "aggregation properties (1000 instances each, zero violations)")
def test_02_aggregation_properties():
    rng = np.random.default_rng(SEED + 1)
    tol = 1e-12
    violations = {"sign": 0, "linearity": 0, "duplication": 0, "monotonicity": 0}
    for _ in range(1000):
        a, b = random_pairs(rng, 8), random_pairs(rng, 8)
        v = verdict_from_evidence("c", items(a))
        w = verdict_from_evidence("c", items([(r, -s) for r, s in a]))
        if (abs(w.raw_score + v.raw_score) > tol or abs(w.normalized_score + v.normalized_score)
                > tol or abs(w.factuality - (1 - v.factuality)) > tol):
            violations["sign"] += 1

        joint = claim_raw_score(items(a) + items(b, "f"))
        if abs(joint - (claim_raw_score(items(a)) + claim_raw_score(items(b)))) > tol:
            violations["linearity"] += 1

        d = verdict_from_evidence("c", items(a) + items(a, "f"))
        if (abs(d.normalized_score - v.normalized_score) > tol
                or abs(d.factuality - v.factuality) > tol or abs(d.raw_score - 2 * v.raw_score) > tol):
            violations["duplication"] += 1

        lo, hi = sorted(rng.uniform(0, 1, 2))
        s = float(rng.choice([-1.0, 1.0]))
        f_lo = verdict_from_evidence("c", items(a) + [EvidenceItem("z", lo, s)]).factuality
        f_hi = verdict_from_evidence("c", items(a) + [EvidenceItem("z", hi, s)]).factuality
        if (s > 0 and f_hi < f_lo - tol) or (s < 0 and f_hi > f_lo + tol):
            violations["monotonicity"] += 1
    print(f"criterion 2: violations {violations}")
    assert sum(violations.values()) == 0


@pytest.mark.acceptance(3, "article factuality endpoints, boundaries and monotonicity")
def test_03_article_factuality():
    assert article_factuality(0, 0, 0.5) == 0.0
    assert article_factuality(1, 1, 0.5) == 1.0
    rng = np.random.default_rng(SEED + 2)
    bad = 0
    for a, b, lam in rng.uniform(0, 1, (1000, 3)):
        a, b, lam = float(a), float(b), float(lam)
        bad += article_factuality(a, b, 0.0) != b or article_factuality(a, b, 1.0) != a
        step = float(rng.uniform(0, 1 - a))
        f = article_factuality(a, b, lam)
        bad += article_factuality(a + step, b, lam) < f
        step = float(rng.uniform(0, 1 - b))
        bad += article_factuality(a, b + step, lam) < f
    print(f"criterion 3: violations {bad}")
    assert bad == 0


@pytest.mark.acceptance(4, "logistic gradient vs central differences (100 x 10-dim, rel < 1e-5, <5 s)")
def test_04_gradient():
    rng = np.random.default_rng(SEED + 3)
    h = 1e-5
    worst = 0.0
    with Timer() as t:
        for _ in range(100):
            X = rng.normal(size=(20, 10))
            y = (rng.uniform(size=20) < 0.5).astype(float)
            theta = rng.normal(size=11)
            _, grad = logistic_loss_grad(theta, X, y, 1e-3)
            fd = np.empty_like(theta)
            for j in range(theta.size):
                e = np.zeros_like(theta)
                e[j] = h
                fd[j] = (logistic_loss_grad(theta + e, X, y, 1e-3)[0]
                         - logistic_loss_grad(theta - e, X, y, 1e-3)[0]) / (2 * h)
            rel = np.linalg.norm(grad - fd) / max(np.linalg.norm(grad), np.linalg.norm(fd), 1e-12)
            worst = max(worst, float(rel))
    print(f"criterion 4: worst relative error {worst:.3g}, {t.elapsed:.3f} s")
    assert worst < 1e-5
    assert t.elapsed < 5.0


@pytest.mark.acceptance(5, "trained model held-out accuracy >= 0.90, bit-identical reruns, <10 s")
def test_05_supervised(tmp_path):
    with Timer() as t:
        corpus, _ = generate_corpus(SyntheticSpec(seed=SEED, outlet_count=200, channel_sigma=0.1))
        train, test = train_test_split(outlet_dataset(corpus), 150, seed=SEED)
        first = train_logistic(train, seed=SEED)
        second = train_logistic(train, seed=SEED)
        first.save(tmp_path / "a.json")
        second.save(tmp_path / "b.json")
        acc = accuracy(first, test)
    print(f"criterion 5: held-out accuracy {acc:.3f}, {t.elapsed:.3f} s")
    assert acc >= 0.90 and acc > 0.5
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert t.elapsed < 10.0


VOCAB = [f"w{i}" for i in range(25)]


@pytest.mark.acceptance(6, "retrieve(k) equals brute-force ranking truncation (50 corpora, <10 s)")
def test_06_retrieval():
    rng = np.random.default_rng(SEED + 5)
    mismatches = 0
    with Timer() as t:
        for _ in range(50):
            n = int(rng.integers(1, 101))
            docs = [(f"d{i:03d}", " ".join(rng.choice(VOCAB, int(rng.integers(1, 15)))))
                    for i in range(n)]
            index = build_index([ArticleRecord(d, "x.example", f"http://x.example/{d}", "",
                                               text, 0, "en") for d, text in docs])
            query = " ".join(rng.choice(VOCAB, int(rng.integers(1, 6))))
            k = int(rng.integers(1, 30))
            expected = [(d, s) for d, s in oracle_bm25(docs, query) if s > 0][:k]
            got = index.retrieve(query, k)
            if [d for d, _ in got] != [d for d, _ in expected] or any(
                    not math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)
                    for (_, a), (_, b) in zip(got, expected)):
                mismatches += 1
    print(f"criterion 6: mismatches {mismatches}, {t.elapsed:.3f} s")
    assert mismatches == 0
    assert t.elapsed < 10.0


SEGMENT_DICT = {"ab", "ba", "aba", "bab", "abba", "bbb"}


@pytest.mark.acceptance(7, "word-break coverage equals exhaustive enumeration (all strings <= 10, <30 s)")
def test_07_segmentation():
    mismatches = checked = 0
    with Timer() as t:
        for n in range(11):
            for chars in itertools.product("ab", repeat=n):
                s = "".join(chars)
                checked += 1
                mismatches += word_break_coverage(s, SEGMENT_DICT) != oracle_segment(s, SEGMENT_DICT)
    print(f"criterion 7: {checked} strings, mismatches {mismatches}, {t.elapsed:.3f} s")
    assert mismatches == 0
    assert t.elapsed < 30.0


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    assert code == 0, err.getvalue()
    return out.getvalue()


@pytest.mark.acceptance(8, "golden corpus: claim >= 0.7, negation <= 0.3, value 0.9643 to 1e-9, <5 s")
def test_08_golden(tmp_path):
    import json
    with Timer() as t:
        write_fixtures(tmp_path, "golden")
        cfg = str(tmp_path / "config.yaml")
        cli("-c", cfg, "profile-all")
        true = json.loads(cli("-c", cfg, "score-claim", GOLDEN_CLAIM))
        false = json.loads(cli("-c", cfg, "score-claim", GOLDEN_NEGATION))
    print(f"criterion 8: claim {true['factuality']!r}, negation {false['factuality']!r}, "
          f"{t.elapsed:.3f} s")
    assert true["factuality"] >= 0.7 and true["band"] == "likely-true"
    assert false["factuality"] <= 0.3 and false["band"] == "likely-false"
    assert len(true["evidence"]) == 4
    assert abs(true["factuality"] - GOLDEN_FACTUALITY) <= 1e-9
    assert abs(true["factuality"] - 0.9643) < 5e-5
    assert t.elapsed < 5.0


def pipeline(root):
    write_fixtures(root, "golden")
    cfg = str(root / "config.yaml")
    outputs = [cli("-c", cfg, "ingest"), cli("-c", cfg, "profile-all")]
    outputs += [cli("-c", cfg, "profile", d) for d in ("dailyledger.example", "truthblast.example")]
    outputs += [cli("-c", cfg, "score-claim", c, "--record") for c in (GOLDEN_CLAIM, GOLDEN_NEGATION)]
    files = {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}
    return outputs, files


@pytest.mark.acceptance(9, "two full pipeline runs give byte-identical outputs and store files")
def test_09_determinism(tmp_path):
    out_a, files_a = pipeline(tmp_path / "a")
    out_b, files_b = pipeline(tmp_path / "b")
    store_files = [p for p in files_a if p.parts[0] == "store"]
    print(f"criterion 9: {len(out_a)} outputs, {len(store_files)} store files compared")
    assert out_a == out_b
    assert files_a == files_b
    assert len(store_files) >= 4


@pytest.mark.acceptance(10, "stance-noise sweep accuracy non-increasing (at most one violated cell)")
def test_10_noise_sweep():
    rows = stance_noise_study(rates=(0.0, 0.1, 0.3), seed=7)
    print("criterion 10: noise  accuracy")
    for rate, acc in rows:
        print(f"              {rate:4.1f}   {acc:.3f}")
    violations = sum(later > earlier for (_, earlier), (_, later) in zip(rows, rows[1:]))
    assert violations <= 1
