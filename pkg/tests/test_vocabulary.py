"""Unit tests for vocabularies and token streams."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from textlstm.vocabulary import OovTokenError, Vocab, build_vocab

CORPUS = "C:maj G:7 C:maj"

word_text = st.text(
    alphabet=st.sampled_from("ABCDEFG:#b79minaj() "), min_size=1, max_size=80
)


class TestBuildVocab:
    def test_word_mode(self):
        vocab = build_vocab(CORPUS, "word")
        assert vocab.tokens == ("C:maj", "G:7")
        assert len(vocab) == 2

    def test_char_mode(self):
        vocab = build_vocab(CORPUS, "char")
        assert set(vocab.tokens) == {" ", "7", ":", "C", "G", "a", "j", "m"}
        assert len(vocab) == 8

    def test_flags_are_ordinary_tokens(self):
        vocab = build_vocab("_START_ C:maj _END_", "word")
        assert "_START_" in vocab.index and "_END_" in vocab.index

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            build_vocab("", "word")
        with pytest.raises(ValueError):
            build_vocab("   ", "word")

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="mode"):
            build_vocab(CORPUS, "syllable")

    def test_deterministic_ordering(self):
        a = build_vocab(CORPUS, "word")
        b = build_vocab("G:7 C:maj G:7 C:maj G:7", "word")
        assert a.tokens == b.tokens

    def test_char_vocab_independent_of_corpus_length(self):
        assert build_vocab(CORPUS, "char").tokens == build_vocab(CORPUS * 5, "char").tokens


class TestEncode:
    def test_known_token_indices(self):
        vocab = build_vocab(CORPUS, "word")
        assert list(vocab.encode("G:7")) == [1]
        assert list(vocab.encode(CORPUS)) == [0, 1, 0]

    def test_oov_names_token_and_position(self):
        vocab = build_vocab(CORPUS, "word")
        with pytest.raises(OovTokenError) as err:
            vocab.encode("X:foo")
        assert err.value.token == "X:foo"
        assert err.value.position == 0
        with pytest.raises(OovTokenError) as err:
            vocab.encode("C:maj X:foo")
        assert err.value.position == 1

    def test_char_mode_verbatim(self):
        vocab = build_vocab(CORPUS, "char")
        assert len(vocab.encode(CORPUS)) == len(CORPUS)

    def test_whitespace_collapses_in_word_mode(self):
        vocab = build_vocab(CORPUS, "word")
        assert vocab.encode("C:maj   G:7\nC:maj").text() == CORPUS


class TestDecode:
    def test_empty_stream(self):
        vocab = build_vocab(CORPUS, "word")
        assert vocab.decode([]) == ""

    def test_word_join(self):
        vocab = build_vocab(CORPUS, "word")
        assert vocab.decode([0, 1, 0]) == "C:maj G:7 C:maj"

    def test_out_of_range_index(self):
        vocab = build_vocab(CORPUS, "word")
        with pytest.raises(IndexError):
            vocab.decode([2])

    @given(word_text)
    @settings(max_examples=50, deadline=None)
    def test_word_round_trip_normalizes_whitespace(self, text):
        if not text.split():
            return
        vocab = build_vocab(text, "word")
        assert vocab.encode(text).text() == " ".join(text.split())

    @given(word_text)
    @settings(max_examples=50, deadline=None)
    def test_char_round_trip_exact(self, text):
        vocab = build_vocab(text, "char")
        assert vocab.encode(text).text() == text


def test_stream_tokens_and_indices_agree():
    vocab = build_vocab(CORPUS, "word")
    stream = vocab.encode(CORPUS)
    assert stream.tokens() == ["C:maj", "G:7", "C:maj"]
    assert stream.indices.dtype == np.int64
