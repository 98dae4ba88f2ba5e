"""Unit tests for the Standard MIDI File reader and writer."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from textlstm.drums import DrumEventList
from textlstm.midi import MidiFormatError, _read_vlq, _write_vlq, read_smf, write_smf


def smf(track: bytes, division: int = 480, fmt: int = 0, n_tracks: int = 1) -> bytes:
    """Hand-assemble a file from raw track event bytes."""
    header = b"MThd" + (6).to_bytes(4, "big")
    header += fmt.to_bytes(2, "big") + n_tracks.to_bytes(2, "big")
    header += division.to_bytes(2, "big")
    return header + b"MTrk" + len(track).to_bytes(4, "big") + track

EOT = bytes([0x00, 0xFF, 0x2F, 0x00])


class TestVlq:
    def test_known_encodings(self):
        # reference values from the SMF specification's VLQ table
        assert _write_vlq(0) == bytes([0x00])
        assert _write_vlq(0x40) == bytes([0x40])
        assert _write_vlq(0x7F) == bytes([0x7F])
        assert _write_vlq(0x80) == bytes([0x81, 0x00])
        assert _write_vlq(0x2000) == bytes([0xC0, 0x00])
        assert _write_vlq(0x0FFFFFFF) == bytes([0xFF, 0xFF, 0xFF, 0x7F])

    @given(st.integers(0, 0x0FFFFFFF))
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, value):
        encoded = _write_vlq(value)
        decoded, pos = _read_vlq(encoded, 0)
        assert decoded == value and pos == len(encoded)

    def test_overlong_rejected(self):
        with pytest.raises(MidiFormatError, match="longer"):
            _read_vlq(bytes([0x81, 0x81, 0x81, 0x81, 0x01]), 0)


class TestReadSmf:
    def test_minimal_kick_file(self):
        # delta 0, note-on ch10 (0x99) note 36 velocity 100, then end of track
        track = bytes([0x00, 0x99, 0x24, 0x64]) + EOT
        events = read_smf(smf(track))
        assert events.events == [(0, 36)]
        assert events.ppqn == 480

    def test_other_channel_filtered(self):
        track = bytes([0x00, 0x90, 0x24, 0x64]) + EOT  # channel 1
        assert read_smf(smf(track)).events == []

    def test_velocity_zero_is_note_off(self):
        track = bytes([0x00, 0x99, 0x24, 0x64, 0x60, 0x99, 0x24, 0x00]) + EOT
        assert read_smf(smf(track)).events == [(0, 36)]

    def test_running_status(self):
        # second event reuses the note-on status byte
        track = bytes([0x00, 0x99, 0x24, 0x64, 0x60, 0x26, 0x64]) + EOT
        assert read_smf(smf(track)).events == [(0, 36), (0x60, 38)]

    def test_format_one_multiple_tracks_merged(self):
        t1 = bytes([0x81, 0x00, 0x99, 0x24, 0x64]) + EOT  # kick at tick 128
        t2 = bytes([0x00, 0x99, 0x26, 0x64]) + EOT  # snare at tick 0
        data = smf(t1, fmt=1, n_tracks=2) + b"MTrk" + len(t2).to_bytes(4, "big") + t2
        assert read_smf(data).events == [(0, 38), (128, 36)]

    def test_bad_magic(self):
        with pytest.raises(MidiFormatError, match="MThd"):
            read_smf(b"RIFFxxxxxxxxxxxxxx")

    def test_smpte_division_rejected(self):
        with pytest.raises(MidiFormatError, match="SMPTE"):
            read_smf(smf(EOT, division=0xE728))

    def test_format_two_rejected(self):
        with pytest.raises(MidiFormatError, match="format 2"):
            read_smf(smf(EOT, fmt=2))

    def test_truncated_track(self):
        data = smf(bytes([0x00, 0x99, 0x24]))  # event cut short
        with pytest.raises(MidiFormatError, match="truncated"):
            read_smf(data)

    def test_meta_and_sysex_skipped(self):
        track = (
            bytes([0x00, 0xFF, 0x51, 0x03, 0x07, 0xA1, 0x20])  # tempo
            + bytes([0x00, 0xF0, 0x02, 0x01, 0xF7])  # sysex
            + bytes([0x00, 0x99, 0x24, 0x64])
            + EOT
        )
        assert read_smf(smf(track)).events == [(0, 36)]


class TestWriteSmf:
    def test_empty_event_list_valid(self):
        data = write_smf(DrumEventList([], ppqn=480), 120.0)
        assert data[:4] == b"MThd"
        assert read_smf(data).events == []

    def test_delta_128_encoding_appears(self):
        # single hit at tick 128: the note-on delta is 128 -> bytes 81 00
        data = write_smf(DrumEventList([(128, 36)], ppqn=480), 120.0)
        assert bytes([0x00, 0xFF, 0x2F]) in data
        on = data.index(bytes([0x99, 0x24, 0x64]))
        assert data[on - 2 : on] == bytes([0x81, 0x00])

    def test_tempo_meta_written(self):
        data = write_smf(DrumEventList([], ppqn=480), 120.0)
        assert bytes([0xFF, 0x51, 0x03]) + (500000).to_bytes(3, "big") in data

    def test_bad_tempo(self):
        with pytest.raises(ValueError, match="tempo"):
            write_smf(DrumEventList([], ppqn=480), 0.0)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_round_trip_random_event_lists(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(0, 40))
        ticks = np.sort(rng.integers(0, 4000, size=n))
        notes = rng.choice([35, 36, 38, 40, 42, 44, 46, 49, 51], size=n)
        events = DrumEventList(
            [(int(t), int(p)) for t, p in zip(ticks, notes)], ppqn=480
        )
        assert read_smf(write_smf(events, 120.0)).events == events.events
