import json

import pytest

from noveltysearch.corpus import (Corpus, CorpusGroup, Patent, assign_groups,
                                  filter_by_class, ingest, read_corpus,
                                  read_meta, write_corpus)
from noveltysearch.errors import CorpusError


def make_record(pid, classes=("G06T1/00",), claim="a rotor blade",
                description="the rotor spins and the blade lifts"):
    return {
        "patent_id": pid,
        "kind_code": "A1",
        "ipc_classes": list(classes),
        "first_claim": claim,
        "description": description,
        "language": "en",
    }


class TestIngest:
    def test_three_valid_records_keep_order(self):
        records = [make_record(p) for p in ("B1", "A1", "C1")]
        corpus = ingest(records)
        assert len(corpus) == 3
        assert corpus.ids() == ["B1", "A1", "C1"]

    def test_duplicate_id_rejected(self):
        records = [make_record("A1"), make_record("A1")]
        with pytest.raises(CorpusError, match="duplicate patent_id 'A1'"):
            ingest(records)

    def test_empty_description_rejected(self):
        record = make_record("A1", description="")
        with pytest.raises(CorpusError, match="empty field 'description'"):
            ingest([record])

    def test_whitespace_only_claim_rejected(self):
        record = make_record("A1", claim="   \t ")
        with pytest.raises(CorpusError, match="empty field 'first_claim'"):
            ingest([record])

    def test_missing_field_rejected(self):
        record = make_record("A1")
        del record["description"]
        with pytest.raises(CorpusError, match="missing field 'description'"):
            ingest([record])

    def test_empty_patent_id_rejected(self):
        with pytest.raises(CorpusError, match="patent_id"):
            ingest([make_record("")])

    def test_text_stored_verbatim(self):
        record = make_record("A1", claim="  A   Rotor\tBLADE! ")
        corpus = ingest([record])
        assert corpus["A1"].first_claim == "  A   Rotor\tBLADE! "


class TestRoundTrip:
    def test_export_ingest_identity(self, tmp_path):
        records = [
            make_record("A1", claim="claim ünïcode Ω text"),
            make_record("B2", classes=("H04L9/00", "G06T1/20")),
        ]
        corpus = ingest(records)
        path = tmp_path / "corpus.jsonl"
        write_corpus(corpus, path)
        assert read_corpus(path) == corpus

    def test_round_trip_with_meta_header(self, tmp_path):
        corpus = ingest([make_record("A1")])
        path = tmp_path / "corpus.jsonl"
        write_corpus(corpus, path, meta={"stage": "test", "seed": 3})
        assert read_corpus(path) == corpus
        assert read_meta(path) == {"stage": "test", "seed": 3}

    def test_file_is_one_object_per_line(self, tmp_path):
        corpus = ingest([make_record("A1"), make_record("B1")])
        path = tmp_path / "corpus.jsonl"
        write_corpus(corpus, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert json.loads(lines[0])["patent_id"] == "A1"


class TestFilterByClass:
    def test_prefix_match(self):
        corpus = ingest([
            make_record("A", classes=("G06T1/00",)),
            make_record("B", classes=("H04L9/00",)),
        ])
        assert filter_by_class(corpus, "G06T").ids() == ["A"]

    def test_empty_prefix_rejected(self):
        corpus = ingest([make_record("A")])
        with pytest.raises(CorpusError, match="class_prefix"):
            filter_by_class(corpus, "")

    def test_multi_class_patent_included_once(self):
        corpus = ingest([make_record("A", classes=("G06T1/00", "H04L9/00"))])
        assert filter_by_class(corpus, "H04L").ids() == ["A"]

    def test_result_is_subset_and_idempotent(self):
        corpus = ingest([
            make_record(f"P{i}", classes=("G06T1/00",) if i % 2 else ("A01B1/00",))
            for i in range(10)
        ])
        once = filter_by_class(corpus, "G06T")
        assert set(once.ids()) <= set(corpus.ids())
        assert filter_by_class(once, "G06T") == once

    def test_empty_result_is_valid(self):
        corpus = ingest([make_record("A")])
        assert len(filter_by_class(corpus, "ZZZ")) == 0


def ten_patent_corpus():
    return ingest([make_record(f"P{i:02d}") for i in range(10)])


class TestAssignGroups:
    SIZES = {"training": 4, "pretest": 3, "search": 3}

    def test_deterministic_given_seed(self):
        corpus = ten_patent_corpus()
        a = assign_groups(corpus, self.SIZES, seed=7)
        b = assign_groups(corpus, self.SIZES, seed=7)
        assert a == b

    def test_different_seed_changes_partition(self):
        corpus = ten_patent_corpus()
        a = assign_groups(corpus, self.SIZES, seed=7)
        b = assign_groups(corpus, self.SIZES, seed=8)
        assert a != b

    def test_sizes_respected(self):
        groups = assign_groups(ten_patent_corpus(), self.SIZES, seed=7)
        assert {k: len(v) for k, v in groups.items()} == self.SIZES

    def test_pretest_disjoint_from_training(self):
        for seed in range(25):
            groups = assign_groups(ten_patent_corpus(), self.SIZES, seed=seed)
            assert not (set(groups["pretest"].patent_ids)
                        & set(groups["training"].patent_ids))

    def test_must_include_appended_when_missed(self):
        corpus = ten_patent_corpus()
        # Find a seed where P00 is not drawn into search randomly.
        for seed in range(100):
            plain = assign_groups(corpus, self.SIZES, seed=seed)
            if "P00" not in plain["search"].patent_ids:
                break
        else:
            pytest.fail("no seed left P00 out of the search group")
        groups = assign_groups(corpus, self.SIZES, seed=seed,
                               must_include_search=["P00"])
        assert "P00" in groups["search"].patent_ids
        assert len(groups["search"]) == self.SIZES["search"] + 1

    def test_must_include_absent_id_rejected(self):
        with pytest.raises(CorpusError, match="'NOPE'"):
            assign_groups(ten_patent_corpus(), self.SIZES, seed=1,
                          must_include_search=["NOPE"])

    def test_corpus_too_small(self):
        corpus = ingest([make_record(f"P{i}") for i in range(6)])
        with pytest.raises(CorpusError, match="too small"):
            assign_groups(corpus, self.SIZES, seed=1)

    def test_training_search_overlap_is_allowed(self):
        corpus = ten_patent_corpus()
        overlaps = []
        for seed in range(40):
            groups = assign_groups(corpus, self.SIZES, seed=seed)
            overlaps.append(bool(set(groups["training"].patent_ids)
                                 & set(groups["search"].patent_ids)))
        assert any(overlaps)


class TestCorpusGroup:
    def test_duplicate_id_in_group_rejected(self):
        with pytest.raises(CorpusError, match="repeats"):
            CorpusGroup("training", ("A", "A"))

    def test_unknown_name_rejected(self):
        with pytest.raises(CorpusError, match="unknown group name"):
            CorpusGroup("holdout", ("A",))


def test_patent_from_record_defaults_language():
    record = make_record("A1")
    del record["language"]
    assert Patent.from_record(record).language == "en"


def test_subset_preserves_given_order():
    corpus = ten_patent_corpus()
    sub = corpus.subset(["P03", "P01"])
    assert sub.ids() == ["P03", "P01"]


def test_unknown_patent_lookup():
    with pytest.raises(CorpusError, match="unknown patent_id"):
        ten_patent_corpus()["NOPE"]
