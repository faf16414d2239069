"""Acceptance gate: every criterion as one test at its stated tolerance.

All tests run offline with the lexical baseline and synthetic corpora. The
conftest summary prints one PASS/FAIL line per criterion; run with
``pytest tests/test_acceptance.py -v``.
"""

import random
import shutil
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

import pytest

from noveltysearch.classify import (ClassificationResult, LexicalBaseline,
                                    RemoteClassifier, classify_batch)
from noveltysearch.corpus import Corpus, CorpusGroup, Patent
from noveltysearch.errors import ProtocolError, TransportError
from noveltysearch.evaluation import own_description_top1, pretest
from noveltysearch.pairs import (PairInput, build_negative_pairs,
                                 build_positive_pairs)
from noveltysearch.scoring import score_patents
from noveltysearch.search import (SearchJob, build_query_inputs, position_of,
                                  ranking_from_audit, run_search)
from noveltysearch.slicer import SliceConfig, slice_corpus, slice_description, \
    total_pieces
from noveltysearch.synthetic import planted_corpus

from stub_server import StubServer, overlap_prob

acceptance = pytest.mark.acceptance


@acceptance
def test_slicer_round_trip_1000_descriptions():
    """Joining pieces reproduces 1,000 random word sequences in under 5 s."""
    rng = random.Random(2024)
    config = SliceConfig(min_len=100, max_len=200, seed=7)
    started = time.perf_counter()
    for i in range(1000):
        n_words = rng.randint(10, 5000)
        words = [f"w{rng.randint(0, 9999)}" for _ in range(n_words)]
        pieces = slice_description(f"P{i}", " ".join(words), config)
        assert " ".join(p.text for p in pieces).split() == words
        for piece in pieces[:-1]:
            assert config.min_len <= piece.word_count <= config.max_len
        assert sum(p.word_count for p in pieces) == n_words
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"round trip took {elapsed:.2f}s"


def _feasible_counts(rng, n_patents):
    while True:
        counts = [rng.randint(1, 6) for _ in range(n_patents)]
        if 2 * max(counts) <= sum(counts):
            return counts


def _corpus_with_counts(counts, piece_len=5):
    return Corpus(
        Patent(f"P{i:02d}", "A1", ("G06T1/00",), f"claim {i} c{i}",
               " ".join(f"p{i}w{j}" for j in range(count * piece_len)))
        for i, count in enumerate(counts)
    )


@acceptance
def test_pair_balance_and_derangement_brute_force():
    """Balanced labels, zero same-patent negatives, multiset conservation."""
    rng = random.Random(99)
    started = time.perf_counter()
    for trial in range(25):
        n_patents = rng.randint(2, 50)
        counts = _feasible_counts(rng, n_patents)
        corpus = _corpus_with_counts(counts)
        pieces = slice_corpus(corpus, SliceConfig(5, 5, seed=0))
        positives = build_positive_pairs(pieces, corpus)
        negatives = build_negative_pairs(positives, seed=trial)

        labels = Counter(p.label for p in positives + negatives)
        assert labels[0] == labels[1] == len(positives)
        # Brute-force scan of every negative pair.
        for pair in negatives:
            assert pair.claim_patent_id != pair.piece_patent_id
        assert Counter(p.claim_text for p in negatives) == \
            Counter(p.claim_text for p in positives)
        assert Counter(p.piece_text for p in negatives) == \
            Counter(p.piece_text for p in positives)
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"balance scan took {elapsed:.2f}s"


@acceptance
def test_count_identities_on_20_random_corpora():
    """Training pairs = 2 * total pieces; query inputs = total pieces."""
    rng = random.Random(4242)
    for trial in range(20):
        n_patents = rng.randint(2, 30)
        counts = _feasible_counts(rng, n_patents)
        corpus = _corpus_with_counts(counts)
        pieces = slice_corpus(corpus, SliceConfig(5, 5, seed=0))
        n_pieces = total_pieces(pieces)

        positives = build_positive_pairs(pieces, corpus)
        negatives = build_negative_pairs(positives, seed=trial)
        assert len(positives) + len(negatives) == 2 * n_pieces

        job = SearchJob(
            corpus=corpus,
            target_group=CorpusGroup("search", tuple(corpus.ids())),
            claim_of_interest="claim 0 c0",
            slice_config=SliceConfig(5, 5, seed=0),
            backend=LexicalBaseline(),
        )
        assert len(build_query_inputs(job)) == n_pieces


@acceptance
def test_scoring_oracle_equivalence_100_tables():
    """Both scores match brute-force recomputation within 1e-12; the label
    score is exact as a rational."""
    rng = random.Random(777)
    for _ in range(100):
        table = {
            f"P{p:02d}": [rng.random() for _ in range(rng.randint(1, 20))]
            for p in range(rng.randint(1, 10))
        }
        results = []
        provenance = {}
        for patent_id, probs in table.items():
            for i, prob in enumerate(probs):
                pair_id = f"q:{patent_id}:{i}"
                results.append(ClassificationResult.from_prob(pair_id, prob))
                provenance[pair_id] = (patent_id, i)

        for score in score_patents(results, provenance):
            probs = table[score.patent_id]
            labels = [1 if p >= 0.5 else 0 for p in probs]
            exact_label = Fraction(sum(labels), len(labels))
            assert score.score_label == float(exact_label)
            assert Fraction(score.n_label1, score.n_pieces) == exact_label
            brute_sigmoid = sum(probs) / len(probs)
            assert abs(score.score_sigmoid - brute_sigmoid) <= 1e-12


@acceptance
def test_density_noise_suppression():
    """One relevant piece among n: score 1/n, strictly decreasing in n."""
    def label_score(n):
        results = [ClassificationResult.from_prob(f"q{i}", 1.0 if i == 0 else 0.0)
                   for i in range(n)]
        provenance = {f"q{i}": ("A", i) for i in range(n)}
        (score,) = score_patents(results, provenance)
        return score.score_label

    assert label_score(40) == 0.025
    assert label_score(5) == 0.2
    assert label_score(40) < label_score(5)
    previous = None
    for n in range(1, 61):
        value = label_score(n)
        if previous is not None:
            assert value < previous
        previous = value


@acceptance
def test_planted_relevance_end_to_end_30_patents():
    """Own description ranks 1 for all 30 claims; pair-level F1 >= 0.9."""
    started = time.perf_counter()
    corpus = planted_corpus(30, seed=2021)
    group = CorpusGroup("pretest", tuple(corpus.ids()))
    slice_config = SliceConfig(min_len=50, max_len=90, seed=3)
    backend = LexicalBaseline()

    own = own_description_top1(corpus, group, slice_config, backend)
    assert (own.n_top1, own.n_patents) == (30, 30), f"misses: {own.misses}"

    result = pretest(corpus, group, slice_config, seed=5, backend=backend)
    assert result.f1 >= 0.9, f"pair-level F1 {result.f1:.4f}"
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"planted relevance took {elapsed:.2f}s"


@acceptance
def test_planted_x_patent_position_one_both_modes():
    """Q's own claim as the query over 50 patents: position 1, both modes."""
    corpus = planted_corpus(50, seed=1011)
    target = CorpusGroup("search", tuple(corpus.ids()))
    q = corpus.ids()[17]
    job = SearchJob(
        corpus=corpus,
        target_group=target,
        claim_of_interest=corpus[q].first_claim,
        slice_config=SliceConfig(min_len=50, max_len=90, seed=9),
        backend=LexicalBaseline(),
        mode="label",
        claim_source_id=q,
    )
    outcome = run_search(job)
    assert position_of(outcome.ranking, q) == 1
    sigmoid_ranking = ranking_from_audit(outcome.audit, mode="sigmoid",
                                         query_label=q)
    assert position_of(sigmoid_ranking, q) == 1


@acceptance
def test_full_pipeline_determinism_byte_identical(tmp_path, monkeypatch):
    """Equal seeds and config give byte-identical ranking exports."""
    from noveltysearch.cli import main

    data = Path(__file__).resolve().parent.parent / "data"
    for run in ("run1", "run2"):
        run_dir = tmp_path / run
        run_dir.mkdir()
        shutil.copytree(data, run_dir / "data")
        monkeypatch.chdir(run_dir)
        assert main(["gen-pairs", "--config", "data/toy_config.json"]) == 0
        assert main(["search", "--config", "data/toy_config.json",
                     "--claim-source-id", "TP0003A1"]) == 0
    for name in ("out/search_TP0003A1/ranking.csv",
                 "out/search_TP0003A1/ranking.json",
                 "out/search_TP0003A1/audit.jsonl",
                 "out/pairs_train.jsonl"):
        a = (tmp_path / "run1" / name).read_bytes()
        b = (tmp_path / "run2" / name).read_bytes()
        assert a == b, f"{name} differs between identical runs"


@acceptance
def test_remote_protocol_conformance_against_stub():
    """Order preservation, label derivation, retries, and error paths."""
    server = StubServer()
    try:
        pairs = [
            PairInput(f"p{i}", "", f"P{i}", 0, "a b c d",
                      ["a b c d", "a b x", "zz"][i % 3], purpose="search")
            for i in range(9)
        ]
        server.behavior.prob_fn = overlap_prob
        server.behavior.reverse_results = True
        client = RemoteClassifier(server.url, batch_size=4, timeout=5.0)
        results = classify_batch(pairs, client)
        # Order restored to input order despite the shuffled response.
        assert [r.pair_id for r in results] == [p.pair_id for p in pairs]
        # prob_label1 drives the label; label 0 probability is implied.
        for result in results:
            assert result.predicted_label == (1 if result.prob_label1 >= 0.5
                                              else 0)
        assert [r.prob_label1 for r in results[:3]] == [1.0, 0.5, 0.0]

        # One failure is retried transparently.
        server.behavior.reverse_results = False
        server.behavior.fail_next = 1
        assert len(classify_batch(pairs, client)) == 9

        # Two failures exhaust the retry and name the unscored pairs,
        # keeping earlier batches' results.
        server.behavior.fail_next = 2
        single = RemoteClassifier(server.url, batch_size=9, timeout=5.0)
        with pytest.raises(TransportError) as excinfo:
            classify_batch(pairs, single)
        assert set(excinfo.value.pair_ids) == {p.pair_id for p in pairs}

        server.behavior.fail_next = 0
        server.behavior.malformed_body = True
        with pytest.raises(ProtocolError):
            classify_batch(pairs, client)
        server.behavior.malformed_body = False
        server.behavior.drop_first_id = True
        with pytest.raises(ProtocolError):
            classify_batch(pairs, client)
    finally:
        server.close()
