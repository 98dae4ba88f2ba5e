"""End-to-end tests of the command-line interface."""

import json

import pytest

from textlstm.cli import main
from textlstm.drums import DrumEventList
from textlstm.midi import read_smf, write_smf

LAB_A = """\
# key: F
0 4 A#:9
4 6 G:min7
6 8 C:9
8 10 F:maj
10 12 A#:9
12 16 F:maj
"""

LAB_B = """\
# key: C
0 8 C:maj
8 16 G:7
"""


@pytest.fixture()
def lab_files(tmp_path):
    a = tmp_path / "a.lab"
    b = tmp_path / "b.lab"
    a.write_text(LAB_A)
    b.write_text(LAB_B)
    return [str(a), str(b)]


@pytest.fixture(scope="module")
def trained(tmp_path_factory, cyclic_chord_corpus):
    """A corpus file and a checkpoint trained through the CLI."""
    root = tmp_path_factory.mktemp("cli")
    corpus = root / "corpus.txt"
    corpus.write_text(cyclic_chord_corpus)
    ckpt = root / "model.ckpt"
    rc = main(
        [
            "train", str(corpus),
            "--hidden", "16", "--seq-len", "16", "--batch", "4",
            "--epochs", "2", "--seed", "0", "--out", str(ckpt),
        ]
    )
    assert rc == 0
    return {"corpus": corpus, "ckpt": ckpt}


class TestEncodeChords:
    def test_writes_expanded_corpus(self, lab_files, tmp_path, capsys):
        out = tmp_path / "corpus.txt"
        assert main(["encode-chords", *lab_files, "--out", str(out)]) == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 2
        assert lines[0].startswith("_START_ F:9 F:9 F:9 F:9 D:min7")
        assert lines[1] == "_START_ " + " ".join(["C:maj"] * 8 + ["G:7"] * 8) + " _END_"

    def test_stdout_default(self, lab_files, capsys):
        assert main(["encode-chords", lab_files[1]]) == 0
        assert "_START_ C:maj" in capsys.readouterr().out

    def test_bad_file_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.lab"
        bad.write_text("0 4 C:maj\n")
        assert main(["encode-chords", str(bad)]) == 1
        assert "key" in capsys.readouterr().err


class TestEncodeDrums:
    def test_midi_to_corpus(self, tmp_path):
        mid = tmp_path / "beat.mid"
        events = DrumEventList([(0, 36), (240, 42), (480, 38)], ppqn=480)
        mid.write_bytes(write_smf(events, 120.0))
        out = tmp_path / "drums.txt"
        assert main(["encode-drums", str(mid), "--out", str(out)]) == 0
        tokens = out.read_text().split()
        assert tokens[0] == "_BAR_"
        assert tokens[1] == "100000000"
        assert tokens[3] == "000100000"
        assert tokens[5] == "010000000"

    def test_missing_file(self, capsys):
        assert main(["encode-drums", "/nonexistent.mid"]) == 1
        assert "nonexistent" in capsys.readouterr().err


class TestTrainGenerate:
    def test_missing_corpus_names_path(self, tmp_path, capsys):
        rc = main(["train", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "x")])
        assert rc != 0
        assert "nope.txt" in capsys.readouterr().err

    def test_generate_tokens(self, trained, capsys):
        rc = main(
            ["generate", str(trained["ckpt"]), "--seed-text", "C:maj",
             "--length", "16", "--seed", "0"]
        )
        assert rc == 0
        assert len(capsys.readouterr().out.split()) == 16

    def test_generate_leadsheet(self, trained, capsys):
        rc = main(
            ["generate", str(trained["ckpt"]), "--seed-text", "C:maj",
             "--length", "64", "--alpha", "1.0", "--format", "leadsheet",
             "--seed", "0"]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith("| ") and "|" in out.strip()

    def test_alpha_region_flag(self, trained, capsys):
        rc = main(
            ["generate", str(trained["ckpt"]), "--seed-text", "C:maj",
             "--length", "8", "--alpha-region", "2:4:1.5", "--seed", "0"]
        )
        assert rc == 0

    def test_bad_alpha_region(self, trained, capsys):
        rc = main(
            ["generate", str(trained["ckpt"]), "--seed-text", "C:maj",
             "--length", "8", "--alpha-region", "2:4"]
        )
        assert rc == 1
        assert "start:end:alpha" in capsys.readouterr().err

    def test_same_seed_byte_identical_outputs(self, trained, tmp_path):
        outs = []
        for name in ("one.txt", "two.txt"):
            path = tmp_path / name
            rc = main(
                ["generate", str(trained["ckpt"]), "--seed-text", "C:maj",
                 "--length", "32", "--seed", "7", "--out", str(path)]
            )
            assert rc == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_midi_format_requires_out(self, trained, capsys):
        rc = main(
            ["generate", str(trained["ckpt"]), "--seed-text", "C:maj",
             "--length", "8", "--format", "midi"]
        )
        assert rc == 1
        assert "--out" in capsys.readouterr().err


class TestDrumMidiRoundTrip:
    def test_generate_midi_from_drum_model(self, tmp_path, drum_corpus):
        corpus = tmp_path / "drums.txt"
        corpus.write_text(drum_corpus)
        ckpt = tmp_path / "drum.ckpt"
        assert main(
            ["train", str(corpus), "--hidden", "16", "--seq-len", "17",
             "--batch", "8", "--epochs", "1", "--seed", "0", "--out", str(ckpt)]
        ) == 0
        mid = tmp_path / "out.mid"
        assert main(
            ["generate", str(ckpt), "--length", "40", "--format", "midi",
             "--seed", "0", "--tempo", "100", "--out", str(mid)]
        ) == 0
        events = read_smf(mid.read_bytes())
        assert events.ppqn == 480


class TestStats:
    def test_json_report(self, tmp_path, capsys):
        corpus = tmp_path / "c.txt"
        corpus.write_text("_START_ C:maj G:7 _END_ _START_ F:9 C:maj _END_")
        assert main(["stats", str(corpus), "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["vocab_size_word"] == 5
        assert report["ending_chords"] == {"G:7": 1, "C:maj": 1}
        assert report["total_words"] == 8

    def test_human_report(self, tmp_path, capsys):
        corpus = tmp_path / "c.txt"
        corpus.write_text("_START_ C:maj _END_")
        assert main(["stats", str(corpus)]) == 0
        assert "word vocabulary" in capsys.readouterr().out


class TestGradcheck:
    def test_passes_and_reports(self, capsys):
        assert main(["gradcheck"]) == 0
        out = capsys.readouterr().out
        assert "max relative gradient error" in out
        error = float(out.strip().rsplit(" ", 1)[1])
        assert error <= 1e-4


SUBCOMMANDS = ["encode-chords", "encode-drums", "train", "generate", "stats", "gradcheck"]


@pytest.mark.parametrize("command", SUBCOMMANDS)
def test_every_subcommand_has_help(command, capsys):
    with pytest.raises(SystemExit) as exit_info:
        main([command, "--help"])
    assert exit_info.value.code == 0
    assert "--" in capsys.readouterr().out or command in ("stats",)


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["stats", "x.txt", "--frobnicate"])
    assert exit_info.value.code == 2


class TestConfigFile:
    def test_flags_beat_config_beats_defaults(self, tmp_path, cyclic_chord_corpus):
        corpus = tmp_path / "c.txt"
        corpus.write_text(cyclic_chord_corpus)
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"hidden": 8, "epochs": 1, "seq_len": 16, "batch": 4}))
        ckpt = tmp_path / "m.ckpt"
        rc = main(
            ["train", str(corpus), "--config", str(config),
             "--hidden", "12", "--seed", "0", "--out", str(ckpt)]
        )
        assert rc == 0
        from textlstm.model import load_checkpoint

        model = load_checkpoint(ckpt)
        assert model.hidden_size == 12  # flag wins
        assert model.hyper.seq_len == 16  # config wins over default 64
