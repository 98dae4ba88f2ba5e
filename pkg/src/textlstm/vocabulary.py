"""Vocabularies and token streams at character or word granularity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["MODES", "OovTokenError", "Vocab", "TokenStream", "build_vocab"]

MODES = ("char", "word")


class OovTokenError(ValueError):
    """A token absent from the vocabulary, with where it was found."""

    def __init__(self, token: str, position: int):
        self.token = token
        self.position = position
        super().__init__(f"out-of-vocabulary token {token!r} at position {position}")


@dataclass(frozen=True)
class Vocab:
    """Bidirectional token<->index map, immutable once built.

    Tokens are sorted lexicographically so the same corpus always yields the
    same ordering regardless of how it was read.
    """

    mode: str
    tokens: tuple[str, ...]
    index: dict[str, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.tokens)

    @classmethod
    def build(cls, corpus: str, mode: str) -> "Vocab":
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        if not corpus:
            raise ValueError("cannot build a vocabulary from an empty corpus")
        if mode == "word":
            distinct = set(corpus.split())
            if not distinct:
                raise ValueError("corpus contains no word tokens")
        else:
            distinct = set(corpus)
        tokens = tuple(sorted(distinct))
        return cls(mode=mode, tokens=tokens, index={t: i for i, t in enumerate(tokens)})

    def encode(self, text: str) -> "TokenStream":
        """Map text to an index stream.

        Word mode splits on whitespace runs (so decode normalizes spacing);
        char mode maps every character verbatim.
        """
        pieces = text.split() if self.mode == "word" else text
        indices = np.empty(len(pieces), dtype=np.int64)
        for pos, token in enumerate(pieces):
            idx = self.index.get(token)
            if idx is None:
                raise OovTokenError(token, pos)
            indices[pos] = idx
        return TokenStream(indices=indices, vocab=self)

    def decode(self, indices: np.ndarray | list[int]) -> str:
        sep = " " if self.mode == "word" else ""
        return sep.join(self.token_at(int(i)) for i in indices)

    def token_at(self, index: int) -> str:
        if not 0 <= index < len(self.tokens):
            raise IndexError(f"token index {index} out of range [0, {len(self.tokens)})")
        return self.tokens[index]


@dataclass
class TokenStream:
    """A sequence of token indices tied to the vocab that produced it."""

    indices: np.ndarray
    vocab: Vocab

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(int(i) for i in self.indices)

    def tokens(self) -> list[str]:
        return [self.vocab.token_at(int(i)) for i in self.indices]

    def text(self) -> str:
        return self.vocab.decode(self.indices)


def build_vocab(corpus: str, mode: str) -> Vocab:
    return Vocab.build(corpus, mode)
