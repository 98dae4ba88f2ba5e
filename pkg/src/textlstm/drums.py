"""Drum tracks as 9-bit binary words on a 16th-note grid.

Each grid slot is one word of nine 0/1 characters, leftmost bit first:
kick, snare, open hi-hat, closed hi-hat, high tom, mid tom, low tom,
crash, ride.  Bars carry exactly 16 slots and are announced by a
``_BAR_`` flag in the text form, so every encoded bar is 17 tokens.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

__all__ = [
    "BAR_FLAG",
    "COMPONENTS",
    "N_COMPONENTS",
    "SLOTS_PER_BAR",
    "TOKENS_PER_BAR",
    "DrumEventList",
    "map_gm",
    "canonical_note",
    "word_to_text",
    "text_to_word",
    "quantize",
    "encode_words",
    "words_to_grid",
    "decode_words",
    "grid_to_events",
    "looks_like_drum_text",
]

logger = logging.getLogger(__name__)

BAR_FLAG = "_BAR_"
SLOTS_PER_BAR = 16
TOKENS_PER_BAR = SLOTS_PER_BAR + 1

COMPONENTS = (
    "kick",
    "snare",
    "open-hh",
    "closed-hh",
    "tom-hi",
    "tom-mid",
    "tom-low",
    "crash",
    "ride",
)
N_COMPONENTS = len(COMPONENTS)

# General MIDI percussion notes per component; the first note in each row is
# the canonical one emitted when rendering.  Pedal hi-hat (44) counts as
# closed hi-hat.
_GM_ROWS = (
    (36, 35),  # kick
    (38, 40),  # snare
    (46,),  # open hi-hat
    (42, 44),  # closed hi-hat
    (50, 48),  # high tom
    (47, 45),  # mid tom
    (43, 41),  # low tom
    (49, 57),  # crash
    (51, 59),  # ride
)
_NOTE_TO_COMPONENT = {
    note: comp for comp, row in enumerate(_GM_ROWS) for note in row
}

_WORD_RE = re.compile(r"^[01]{9}$")


def map_gm(note_number: int) -> int | None:
    """Component index for a GM percussion note, or None when unmapped."""
    if not 0 <= note_number <= 127:
        raise ValueError(f"MIDI note out of range: {note_number}")
    return _NOTE_TO_COMPONENT.get(note_number)


def canonical_note(component: int) -> int:
    return _GM_ROWS[component][0]


def word_to_text(word: int) -> str:
    """Nine 0/1 characters, kick leftmost."""
    if not 0 <= word < 2**N_COMPONENTS:
        raise ValueError(f"drum word out of range: {word}")
    return "".join("1" if word >> bit & 1 else "0" for bit in range(N_COMPONENTS))


def text_to_word(text: str) -> int:
    if not _WORD_RE.match(text):
        raise ValueError(f"malformed drum word {text!r}")
    return sum(1 << bit for bit, ch in enumerate(text) if ch == "1")


@dataclass
class DrumEventList:
    """Note-on events at absolute ticks, the raw-MIDI side of the codec."""

    events: list[tuple[int, int]] = field(default_factory=list)  # (tick, note)
    ppqn: int = 480

    def __post_init__(self) -> None:
        if self.ppqn <= 0:
            raise ValueError(f"ppqn must be positive, got {self.ppqn}")
        ticks = [tick for tick, _ in self.events]
        if any(b < a for a, b in zip(ticks, ticks[1:])):
            raise ValueError("event ticks must be non-decreasing")
        if any(tick < 0 for tick in ticks):
            raise ValueError("negative event tick")


DrumGrid = list[list[int]]  # bars of 16 words each


def quantize(events: DrumEventList) -> DrumGrid:
    """Snap events to the 16th-note grid and OR-merge simultaneous hits.

    Ties at exact slot midpoints round half up (to the later slot).  Notes
    outside the nine components are dropped.  The grid runs through the
    last bar containing a mapped event; untouched slots are all-zero words.
    """
    slots: dict[int, int] = {}
    for tick, note in events.events:
        component = map_gm(note)
        if component is None:
            continue
        slot = (8 * tick + events.ppqn) // (2 * events.ppqn)
        slots[slot] = slots.get(slot, 0) | (1 << component)
    if not slots:
        return []
    n_bars = max(slots) // SLOTS_PER_BAR + 1
    grid = [[0] * SLOTS_PER_BAR for _ in range(n_bars)]
    for slot, word in slots.items():
        grid[slot // SLOTS_PER_BAR][slot % SLOTS_PER_BAR] = word
    return grid


def encode_words(grid: DrumGrid) -> str:
    """Text form: each bar is ``_BAR_`` followed by its 16 word tokens."""
    tokens = []
    for bar in grid:
        if len(bar) != SLOTS_PER_BAR:
            raise ValueError(f"bar must have {SLOTS_PER_BAR} slots, got {len(bar)}")
        tokens.append(BAR_FLAG)
        tokens.extend(word_to_text(word) for word in bar)
    return " ".join(tokens)


def words_to_grid(tokens: str | list[str]) -> tuple[DrumGrid, int]:
    """Inverse of encode_words, tolerant of generated noise.

    ``_BAR_`` flags round the write cursor up to the next bar boundary;
    malformed word tokens are skipped and counted.  Returns the grid and
    the number of skipped tokens.
    """
    if isinstance(tokens, str):
        tokens = tokens.split()
    grid: DrumGrid = []
    cursor = 0
    skipped = 0

    def ensure_bar(index: int) -> None:
        while len(grid) <= index:
            grid.append([0] * SLOTS_PER_BAR)

    for tok in tokens:
        if tok == BAR_FLAG:
            if cursor % SLOTS_PER_BAR:
                cursor += SLOTS_PER_BAR - cursor % SLOTS_PER_BAR
            ensure_bar(cursor // SLOTS_PER_BAR)
            continue
        if not _WORD_RE.match(tok):
            skipped += 1
            logger.warning("skipping malformed drum word %r", tok)
            continue
        ensure_bar(cursor // SLOTS_PER_BAR)
        grid[cursor // SLOTS_PER_BAR][cursor % SLOTS_PER_BAR] = text_to_word(tok)
        cursor += 1
    return grid, skipped


def grid_to_events(grid: DrumGrid, ppqn: int = 480) -> DrumEventList:
    """Emit the canonical note of every set bit, slot by slot."""
    ticks_per_slot = ppqn // 4
    events = []
    for bar_idx, bar in enumerate(grid):
        for slot_idx, word in enumerate(bar):
            tick = (SLOTS_PER_BAR * bar_idx + slot_idx) * ticks_per_slot
            for component in range(N_COMPONENTS):
                if word >> component & 1:
                    events.append((tick, canonical_note(component)))
    return DrumEventList(events=events, ppqn=ppqn)


def decode_words(
    tokens: str | list[str], tempo_bpm: float = 120.0
) -> tuple[DrumEventList, int]:
    """Generated drum tokens back to note-on events at ppqn 480.

    Returns the event list and the count of malformed tokens skipped.
    The tempo is validated here because rendering is this function's only
    purpose; it is applied when the events are written to a MIDI file.
    """
    if tempo_bpm <= 0:
        raise ValueError(f"tempo must be positive, got {tempo_bpm}")
    grid, skipped = words_to_grid(tokens)
    return grid_to_events(grid), skipped


def looks_like_drum_text(corpus: str) -> bool:
    """True when every non-flag token is a 9-bit binary word."""
    tokens = [t for t in corpus.split() if not (t.startswith("_") and t.endswith("_"))]
    return bool(tokens) and all(_WORD_RE.match(t) for t in tokens)
