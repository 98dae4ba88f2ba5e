"""Chord symbols, timed scores, and the per-quarter-note text representation.

A score is a list of chord-change events over a 4/4 grid measured in quarter
notes.  For training, scores are transposed to C and expanded so every
quarter note carries an explicit chord token, wrapped in ``_START_`` /
``_END_`` flags.  Generated token sequences go the other way: grouped into
4-beat bars with ``|`` separators and adjacent repeats collapsed.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from .vocabulary import Vocab

__all__ = [
    "START_FLAG",
    "END_FLAG",
    "ChordParseError",
    "LabFormatError",
    "ChordSymbol",
    "Score",
    "CorpusStats",
    "parse_chord",
    "transpose_score",
    "expand_to_text",
    "decode_progression",
    "read_lab",
    "corpus_stats",
]

START_FLAG = "_START_"
END_FLAG = "_END_"
BEATS_PER_BAR = 4

# Pitch classes use the C=0 convention; output spelling is always sharp-wise.
_LETTER_PC = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
PITCH_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")

_ROOT_RE = re.compile(r"^([A-G])([#b]?)$")


class ChordParseError(ValueError):
    pass


class LabFormatError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


def parse_root(text: str) -> int:
    """Pitch class of a root name such as C, F#, or Bb."""
    m = _ROOT_RE.match(text)
    if not m:
        raise ChordParseError(f"invalid root {text!r}")
    pc = _LETTER_PC[m.group(1)]
    if m.group(2) == "#":
        pc += 1
    elif m.group(2) == "b":
        pc -= 1
    return pc % 12


@dataclass(frozen=True)
class ChordSymbol:
    """A root pitch class and an opaque quality suffix.

    The quality text after the colon is never interpreted; degree basses
    like ``maj/3`` are scale degrees and survive transposition verbatim.
    """

    root: int
    quality: str

    def __str__(self) -> str:
        return f"{PITCH_NAMES[self.root]}:{self.quality}"

    def transposed(self, semitones: int) -> "ChordSymbol":
        return ChordSymbol((self.root + semitones) % 12, self.quality)


def parse_chord(text: str) -> ChordSymbol:
    """Parse ``<root>:<quality>``, e.g. F:9 or A#:min(6,9)."""
    if not text:
        raise ChordParseError("empty chord token")
    root_text, sep, quality = text.partition(":")
    if not sep:
        raise ChordParseError(f"missing ':' in chord token {text!r}")
    if not quality:
        raise ChordParseError(f"empty quality in chord token {text!r}")
    return ChordSymbol(parse_root(root_text), quality)


@dataclass
class Score:
    """Chord-change events on a quarter-note grid, in the original key."""

    key: int
    events: list[tuple[int, ChordSymbol]]
    length_quarters: int

    def validate(self) -> None:
        if self.length_quarters <= 0 or self.length_quarters % BEATS_PER_BAR:
            raise ValueError(
                f"score length must be a positive multiple of {BEATS_PER_BAR} "
                f"quarters, got {self.length_quarters}"
            )
        if not self.events:
            raise ValueError("score has no events")
        if self.events[0][0] != 0:
            raise ValueError("first event must start at quarter 0")
        starts = [start for start, _ in self.events]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("event starts must be strictly increasing")
        if starts[-1] >= self.length_quarters:
            raise ValueError("event start beyond score length")


def transpose_score(score: Score) -> Score:
    """Shift every root so the score sits in C; qualities are untouched."""
    score.validate()
    shift = (0 - score.key) % 12
    return Score(
        key=0,
        events=[(start, chord.transposed(shift)) for start, chord in score.events],
        length_quarters=score.length_quarters,
    )


def expand_to_text(score: Score) -> str:
    """One chord token per quarter note, wrapped in the start/end flags.

    Quarters between change points repeat the active chord, so the token
    count between the flags always equals the score length.
    """
    score.validate()
    tokens = [START_FLAG]
    next_event = 0
    current = None
    for quarter in range(score.length_quarters):
        while next_event < len(score.events) and score.events[next_event][0] == quarter:
            current = score.events[next_event][1]
            next_event += 1
        tokens.append(str(current))
    tokens.append(END_FLAG)
    return " ".join(tokens)


def decode_progression(tokens: str | list[str]) -> str:
    """Render generated chord tokens as bar-grouped lead-sheet text.

    Chords are grouped 4 to a bar with ``|`` separators and adjacent
    repeats inside a bar are collapsed.  Flags are kept verbatim and reset
    the bar phase; a trailing partial bar is rendered as-is.
    """
    if isinstance(tokens, str):
        tokens = tokens.split()
    parts: list[str] = []
    bar: list[str] = []

    def flush() -> None:
        if not bar:
            return
        deduped = [bar[0]]
        for tok in bar[1:]:
            if tok != deduped[-1]:
                deduped.append(tok)
        if not parts or parts[-1] != "|":
            parts.append("|")
        parts.extend(deduped)
        parts.append("|")
        bar.clear()

    for tok in tokens:
        if tok in (START_FLAG, END_FLAG):
            flush()
            parts.append(tok)
            continue
        bar.append(tok)
        if len(bar) == BEATS_PER_BAR:
            flush()
    flush()
    return " ".join(parts)


_KEY_RE = re.compile(r"^#\s*key\s*:\s*(\S+)\s*$")


def read_lab(text: str) -> Score:
    """Parse a lab-style score file.

    Format: a ``# key: <root>`` header line, then one event per line as
    ``<start_quarter> <end_quarter> <chord>`` with integer quarter-note
    times.  Events must be in order and non-overlapping; the final end
    time fixes the score length and must complete a 4/4 bar.  Later ``#``
    lines are comments.
    """
    key: int | None = None
    events: list[tuple[int, ChordSymbol]] = []
    prev_start = -1
    prev_end = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _KEY_RE.match(line)
            if m:
                if key is not None:
                    raise LabFormatError("duplicate key header", line_no)
                try:
                    key = parse_root(m.group(1))
                except ChordParseError as exc:
                    raise LabFormatError(str(exc), line_no) from exc
            continue
        if key is None:
            raise LabFormatError("missing '# key: <root>' header", line_no)
        fields = line.split()
        if len(fields) != 3:
            raise LabFormatError(
                f"expected '<start> <end> <chord>', got {line!r}", line_no
            )
        try:
            start, end = int(fields[0]), int(fields[1])
        except ValueError as exc:
            raise LabFormatError(f"non-integer time in {line!r}", line_no) from exc
        if not events and start != 0:
            raise LabFormatError("first event must start at quarter 0", line_no)
        if start <= prev_start:
            raise LabFormatError(f"event out of order (start {start})", line_no)
        if start < prev_end:
            raise LabFormatError(f"event overlaps previous (start {start})", line_no)
        if end <= start:
            raise LabFormatError(f"event end {end} not after start {start}", line_no)
        try:
            chord = parse_chord(fields[2])
        except ChordParseError as exc:
            raise LabFormatError(str(exc), line_no) from exc
        events.append((start, chord))
        prev_start, prev_end = start, end
    if key is None:
        raise LabFormatError("missing '# key: <root>' header", 1)
    if not events:
        raise LabFormatError("score has no events", 1)
    if prev_end % BEATS_PER_BAR:
        raise LabFormatError(
            f"score length {prev_end} is not a multiple of {BEATS_PER_BAR}", 1
        )
    score = Score(key=key, events=events, length_quarters=prev_end)
    score.validate()
    return score


@dataclass
class CorpusStats:
    vocab_size_word: int
    vocab_size_char: int
    total_words: int
    total_chars: int
    ending_chords: Counter

    def ending_fractions(self) -> dict[str, float]:
        total = sum(self.ending_chords.values())
        if not total:
            return {}
        return {tok: n / total for tok, n in self.ending_chords.most_common()}


def corpus_stats(corpus: str) -> CorpusStats:
    """Vocabulary sizes, token/character totals, and the histogram of the
    chords that close each flagged score."""
    word_vocab = Vocab.build(corpus, "word")
    char_vocab = Vocab.build(corpus, "char")
    tokens = corpus.split()
    ending: Counter = Counter()
    in_score = False
    last_chord: str | None = None
    for pos, tok in enumerate(tokens):
        if tok == START_FLAG:
            if in_score:
                raise ValueError(f"nested {START_FLAG} at token {pos}")
            in_score = True
            last_chord = None
        elif tok == END_FLAG:
            if not in_score:
                raise ValueError(f"{END_FLAG} without {START_FLAG} at token {pos}")
            if last_chord is not None:
                ending[last_chord] += 1
            in_score = False
        elif in_score:
            last_chord = tok
    if in_score:
        raise ValueError(f"unterminated {START_FLAG} at end of corpus")
    return CorpusStats(
        vocab_size_word=len(word_vocab),
        vocab_size_char=len(char_vocab),
        total_words=len(tokens),
        total_chars=len(corpus),
        ending_chords=ending,
    )
