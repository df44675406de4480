import pytest

from newsprior.fixtures import (GOLDEN_FACTUALITY, OracleRefusal, SyntheticSpec, generate_corpus,
                                golden_corpus, oracle_bm25, oracle_claim_score, oracle_segment,
                                outlet_dataset, write_fixtures)
from newsprior.ingest import load_corpus


def test_generation_is_seeded():
    spec = SyntheticSpec(seed=3, outlet_count=12, claim_count=4, channel_sigma=0.1)
    a, ta = generate_corpus(spec)
    b, tb = generate_corpus(spec)
    assert a == b and ta == tb
    assert generate_corpus(SyntheticSpec(seed=4, outlet_count=12, claim_count=4))[0] != a


def test_zero_noise_channels_equal_truth():
    _, truth = generate_corpus(SyntheticSpec(seed=1, outlet_count=5))
    for domain, scores in truth.channel_scores.items():
        assert set(scores.values()) == {truth.reliability[domain]}


def test_flip_sets_are_nested():
    base = dict(seed=5, outlet_count=20, claim_count=30)
    low = generate_corpus(SyntheticSpec(stance_noise=0.1, **base))[1]
    high = generate_corpus(SyntheticSpec(stance_noise=0.3, **base))[1]
    clean = generate_corpus(SyntheticSpec(**base))[1]
    for c0, c1, c3 in zip(clean.claims, low.claims, high.claims):
        for d in c0.asserting:
            if c1.asserting[d] != c0.asserting[d]:
                assert c3.asserting[d] != c0.asserting[d]


def test_synthetic_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(stance_noise=2)
    with pytest.raises(ValueError):
        SyntheticSpec(outlet_count=2, reliabilities=(0.5,))


def test_golden_expected_value():
    assert GOLDEN_FACTUALITY == pytest.approx(0.9643, abs=1e-4)
    assert len(golden_corpus().articles) == 6


def test_written_files_roundtrip(tmp_path):
    write_fixtures(tmp_path, "golden")
    corpus = load_corpus(tmp_path / "articles.jsonl", tmp_path / "outlets.jsonl")
    assert corpus == golden_corpus()
    with pytest.raises(ValueError):
        write_fixtures(tmp_path, "nope")


def test_outlet_dataset_labels():
    corpus, truth = generate_corpus(SyntheticSpec(seed=2, outlet_count=10))
    ds = outlet_dataset(corpus)
    assert len(ds) == 10
    for domain, y in zip(ds.ids, ds.y):
        assert y == (truth.reliability[domain] >= 0.5)


def test_oracles_refuse_large_instances():
    with pytest.raises(OracleRefusal):
        oracle_claim_score([(0.5, 1)] * 101)
    with pytest.raises(OracleRefusal):
        oracle_bm25([(str(i), "x") for i in range(101)], "x")
    with pytest.raises(OracleRefusal):
        oracle_segment("a" * 11, {"a"})


def test_oracle_segment_hand_cases():
    assert oracle_segment("", {"a"}) == 0.0
    assert oracle_segment("abxab", {"ab"}) == pytest.approx(0.8)
    assert oracle_segment("aaa", {"aa"}) == pytest.approx(2 / 3)
