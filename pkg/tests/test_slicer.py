import random

import pytest

from noveltysearch.corpus import Patent
from noveltysearch.errors import SliceError
from noveltysearch.slicer import (SliceConfig, read_piece_table,
                                  slice_corpus, slice_description,
                                  total_pieces, write_piece_table)
from noveltysearch.synthetic import random_corpus


def words(n, prefix="w"):
    return " ".join(f"{prefix}{i}" for i in range(n))


class TestSliceConfig:
    def test_min_above_max_rejected(self):
        with pytest.raises(SliceError, match="min_len <= max_len"):
            SliceConfig(min_len=5, max_len=4)

    def test_zero_min_rejected(self):
        with pytest.raises(SliceError):
            SliceConfig(min_len=0, max_len=4)

    def test_min_equal_max_allowed(self):
        SliceConfig(min_len=4, max_len=4)


class TestSliceDescription:
    def test_fixed_length_pieces(self):
        # 10 words at a forced length of 4 -> 4, 4, 2.
        pieces = slice_description("A", words(10), SliceConfig(4, 4, seed=0))
        assert [p.word_count for p in pieces] == [4, 4, 2]
        assert [p.piece_index for p in pieces] == [0, 1, 2]

    def test_short_description_single_piece(self):
        pieces = slice_description("A", "one two three", SliceConfig(5, 8, seed=0))
        assert len(pieces) == 1
        assert pieces[0].word_count == 3
        assert pieces[0].text == "one two three"

    def test_word_count_matches_text(self):
        pieces = slice_description("A", words(137), SliceConfig(10, 30, seed=3))
        for piece in pieces:
            assert piece.word_count == len(piece.text.split())

    def test_deterministic_boundaries_and_sum(self):
        config = SliceConfig(100, 200, seed=42)
        text = words(1000)
        first = slice_description("A", text, config)
        second = slice_description("A", text, config)
        assert first == second
        assert sum(p.word_count for p in first) == 1000

    def test_round_trip_word_sequence(self):
        text = "alpha  beta\tgamma\ndelta epsilon " + words(95)
        pieces = slice_description("A", text, SliceConfig(7, 13, seed=9))
        joined = " ".join(p.text for p in pieces)
        assert joined.split() == text.split()

    def test_non_final_pieces_within_range(self):
        config = SliceConfig(10, 30, seed=5)
        pieces = slice_description("A", words(500), config)
        for piece in pieces[:-1]:
            assert config.min_len <= piece.word_count <= config.max_len
        assert pieces[-1].word_count <= config.max_len

    def test_empty_description_rejected(self):
        with pytest.raises(SliceError, match="no words"):
            slice_description("A", "   ", SliceConfig(4, 4, seed=0))

    def test_boundaries_depend_on_patent_id(self):
        config = SliceConfig(10, 30, seed=5)
        text = words(400)
        a = [p.word_count for p in slice_description("A", text, config)]
        b = [p.word_count for p in slice_description("B", text, config)]
        assert a != b  # overwhelmingly likely; both reproduce their own run

    def test_boundaries_depend_on_seed(self):
        text = words(400)
        a = slice_description("A", text, SliceConfig(10, 30, seed=1))
        b = slice_description("A", text, SliceConfig(10, 30, seed=2))
        assert [p.word_count for p in a] != [p.word_count for p in b]


class TestSliceCorpus:
    def test_empty_corpus(self):
        assert slice_corpus([], SliceConfig(4, 4, seed=0)) == {}

    def test_two_patents_fixed_length(self):
        patents = [
            Patent(f"P{i}", "A1", ("G06T1/00",), "a claim", words(10))
            for i in range(2)
        ]
        table = slice_corpus(patents, SliceConfig(5, 5, seed=0))
        assert total_pieces(table) == 4

    def test_removing_a_patent_leaves_others_unchanged(self):
        corpus = random_corpus(8, seed=21)
        config = SliceConfig(20, 40, seed=13)
        full = slice_corpus(corpus, config)
        keep = [p for p in corpus if p.patent_id != corpus.ids()[3]]
        partial = slice_corpus(keep, config)
        for pid, pieces in partial.items():
            assert pieces == full[pid]

    def test_order_independence(self):
        corpus = list(random_corpus(6, seed=2))
        config = SliceConfig(15, 25, seed=4)
        forward = slice_corpus(corpus, config)
        backward = slice_corpus(reversed(corpus), config)
        assert forward == backward


class TestPieceTableIO:
    def test_export_format_and_reload(self, tmp_path):
        corpus = random_corpus(4, seed=33)
        table = slice_corpus(corpus, SliceConfig(20, 40, seed=8))
        path = tmp_path / "pieces.jsonl"
        write_piece_table(table, path, meta={"seed": 8})
        loaded = read_piece_table(path)
        assert loaded == table

    def test_reload_detects_gaps(self, tmp_path):
        path = tmp_path / "pieces.jsonl"
        path.write_text('{"patent_id": "A", "piece_index": 1, "text": "x y"}\n')
        with pytest.raises(SliceError, match="gaps"):
            read_piece_table(path)


def test_lengths_cover_configured_range():
    # Sanity that the uniform draw actually uses the whole range.
    config = SliceConfig(3, 5, seed=0)
    seen = set()
    rng = random.Random(0)
    for i in range(200):
        text = words(rng.randint(30, 60))
        for piece in slice_description(f"P{i}", text, config)[:-1]:
            seen.add(piece.word_count)
    assert seen == {3, 4, 5}
