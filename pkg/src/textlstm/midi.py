"""Standard MIDI File reading and writing for percussion tracks.

Only what the drum pipeline needs: format 0/1 ingest that collects
channel-10 note-ons across all tracks, and a format-0 writer that renders
an event list with a fixed tempo.  Chunk framing, variable-length deltas,
and running status follow the SMF spec byte for byte.
"""

from __future__ import annotations

import logging

from .drums import DrumEventList

__all__ = ["MidiFormatError", "read_smf", "write_smf"]

logger = logging.getLogger(__name__)

DRUM_CHANNEL = 9  # MIDI channel 10, zero-indexed
_NOTE_VELOCITY = 100


class MidiFormatError(ValueError):
    pass


def _read_vlq(data: bytes, pos: int) -> tuple[int, int]:
    """Variable-length quantity at pos; returns (value, next pos)."""
    value = 0
    for count in range(4):
        if pos >= len(data):
            raise MidiFormatError("truncated variable-length quantity")
        byte = data[pos]
        pos += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos
    raise MidiFormatError("variable-length quantity longer than 4 bytes")


def _write_vlq(value: int) -> bytes:
    if value < 0:
        raise ValueError("delta time cannot be negative")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def read_smf(data: bytes) -> DrumEventList:
    """Extract channel-10 note-ons (velocity > 0) from a format 0/1 file.

    Tracks are merged by absolute tick; a note-on with velocity 0 is a
    note-off by convention and is excluded.
    """
    if len(data) < 14 or data[:4] != b"MThd":
        raise MidiFormatError("not a Standard MIDI File (missing MThd)")
    header_len = int.from_bytes(data[4:8], "big")
    if header_len < 6 or 8 + header_len > len(data):
        raise MidiFormatError("malformed MThd chunk")
    fmt = int.from_bytes(data[8:10], "big")
    n_tracks = int.from_bytes(data[10:12], "big")
    division = int.from_bytes(data[12:14], "big")
    if fmt not in (0, 1):
        raise MidiFormatError(f"unsupported SMF format {fmt}")
    if division & 0x8000:
        raise MidiFormatError("SMPTE time division is not supported")
    if division == 0:
        raise MidiFormatError("zero ticks-per-quarter division")

    events: list[tuple[int, int]] = []
    pos = 8 + header_len
    for _ in range(n_tracks):
        if pos + 8 > len(data):
            raise MidiFormatError("truncated track header")
        if data[pos : pos + 4] != b"MTrk":
            raise MidiFormatError("expected MTrk chunk")
        track_len = int.from_bytes(data[pos + 4 : pos + 8], "big")
        pos += 8
        end = pos + track_len
        if end > len(data):
            raise MidiFormatError("truncated track data")
        events.extend(_read_track(data, pos, end))
        pos = end
    events.sort(key=lambda ev: ev[0])  # stable: same-tick order preserved
    return DrumEventList(events=events, ppqn=division)


def _read_track(data: bytes, pos: int, end: int) -> list[tuple[int, int]]:
    tick = 0
    status = 0
    events: list[tuple[int, int]] = []
    while pos < end:
        delta, pos = _read_vlq(data, pos)
        tick += delta
        if pos >= end:
            raise MidiFormatError("truncated event")
        byte = data[pos]
        if byte & 0x80:
            status = byte
            pos += 1
        elif status == 0:
            raise MidiFormatError("running status with no prior status byte")
        if status == 0xFF:
            if pos >= end:
                raise MidiFormatError("truncated meta event")
            meta_type = data[pos]
            length, pos = _read_vlq(data, pos + 1)
            pos += length
            if pos > end:
                raise MidiFormatError("truncated meta event payload")
            if meta_type == 0x2F:
                break
            status = 0  # meta events cancel running status
        elif status in (0xF0, 0xF7):
            length, pos = _read_vlq(data, pos)
            pos += length
            if pos > end:
                raise MidiFormatError("truncated sysex payload")
            status = 0  # sysex events cancel running status
        elif 0x80 <= status < 0xF0:
            n_data = 1 if status & 0xF0 in (0xC0, 0xD0) else 2
            if pos + n_data > end:
                raise MidiFormatError("truncated channel event")
            kind = status & 0xF0
            channel = status & 0x0F
            if kind == 0x90 and channel == DRUM_CHANNEL and data[pos + 1] > 0:
                events.append((tick, data[pos]))
            pos += n_data
        else:
            raise MidiFormatError(f"unsupported status byte 0x{status:02X}")
    return events


def write_smf(events: DrumEventList, tempo_bpm: float = 120.0) -> bytes:
    """Render note-ons as a format-0 file on channel 10.

    Each hit gets velocity 100 and a paired note-off one 16th note later.
    The events' own ppqn is written (the rendering pipeline uses 480).
    """
    if tempo_bpm <= 0:
        raise ValueError(f"tempo must be positive, got {tempo_bpm}")
    gate_ticks = max(1, events.ppqn // 4)
    # (tick, off-before-on flag, sequence, status, note, velocity)
    scheduled = []
    for seq, (tick, note) in enumerate(events.events):
        scheduled.append((tick, 1, seq, 0x90 | DRUM_CHANNEL, note, _NOTE_VELOCITY))
        scheduled.append((tick + gate_ticks, 0, seq, 0x80 | DRUM_CHANNEL, note, 0))
    scheduled.sort(key=lambda ev: ev[:3])

    mpqn = round(60_000_000 / tempo_bpm)
    track = bytearray()
    track += _write_vlq(0) + bytes([0xFF, 0x51, 0x03]) + mpqn.to_bytes(3, "big")
    last_tick = 0
    for tick, _, _, status, note, velocity in scheduled:
        track += _write_vlq(tick - last_tick) + bytes([status, note, velocity])
        last_tick = tick
    track += _write_vlq(0) + bytes([0xFF, 0x2F, 0x00])

    header = b"MThd" + (6).to_bytes(4, "big")
    header += (0).to_bytes(2, "big") + (1).to_bytes(2, "big")
    header += events.ppqn.to_bytes(2, "big")
    return header + b"MTrk" + len(track).to_bytes(4, "big") + bytes(track)
