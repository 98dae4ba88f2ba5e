"""Command-line interface: corpus encoding, training, generation, reports.

Flag values win over a ``--config`` JSON file, which wins over built-in
defaults.  Generation writes to stdout unless ``--out`` is given; MIDI is
binary and always needs ``--out``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import chords, drums, midi
from .estimator import TextLstmGenerator
from .model import ModelHyper, init_model, load_checkpoint
from .nn import grad_check
from .sampling import AlphaRegion, AlphaSchedule, GenerationRequest, generate
from .vocabulary import Vocab

logger = logging.getLogger(__name__)

GRADCHECK_TOLERANCE = 1e-4


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return config


def _setting(args: argparse.Namespace, config: dict, key: str, default):
    """Precedence: explicit flag > config file > default."""
    value = getattr(args, key)
    if value is not None:
        return value
    return config.get(key, default)


def _write_text(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        print(text)


def cmd_encode_chords(args: argparse.Namespace) -> int:
    texts = []
    for path in args.scores:
        score = chords.read_lab(Path(path).read_text(encoding="utf-8"))
        texts.append(chords.expand_to_text(chords.transpose_score(score)))
    _write_text("\n".join(texts) + "\n", args.out)
    return 0


def cmd_encode_drums(args: argparse.Namespace) -> int:
    texts = []
    for path in args.midis:
        events = midi.read_smf(Path(path).read_bytes())
        grid = drums.quantize(events)
        if not grid:
            logger.warning("%s: no mapped drum events, skipping", path)
            continue
        texts.append(drums.encode_words(grid))
    if not texts:
        raise ValueError("no drum events found in any input file")
    _write_text("\n".join(texts) + "\n", args.out)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    corpus = Path(args.corpus).read_text(encoding="utf-8")
    est = TextLstmGenerator(
        mode=_setting(args, config, "mode", "word"),
        hidden_size=_setting(args, config, "hidden", 128),
        n_layers=_setting(args, config, "layers", 2),
        dropout=_setting(args, config, "dropout", 0.2),
        seq_len=_setting(args, config, "seq_len", 64),
        batch_size=_setting(args, config, "batch", 32),
        epochs=_setting(args, config, "epochs", 25),
        domain=_setting(args, config, "domain", None),
        random_state=_setting(args, config, "seed", 0),
    )
    est.fit(corpus)
    est.save(args.out)
    logger.info("final loss %.6f nats; checkpoint written to %s", est.history_[-1], args.out)
    return 0


def _parse_region(text: str) -> AlphaRegion:
    fields = text.split(":")
    if len(fields) != 3:
        raise ValueError(f"--alpha-region wants start:end:alpha, got {text!r}")
    return AlphaRegion(int(fields[0]), int(fields[1]), float(fields[2]))


def _default_seed_text(vocab: Vocab) -> str:
    for flag in (chords.START_FLAG, drums.BAR_FLAG):
        if flag in vocab.index:
            return flag
    raise ValueError("no start flag in vocabulary; pass --seed-text")


def cmd_generate(args: argparse.Namespace) -> int:
    model = load_checkpoint(args.checkpoint)
    seed_text = args.seed_text or _default_seed_text(model.vocab)
    schedule = AlphaSchedule(
        default_alpha=args.alpha,
        regions=tuple(_parse_region(r) for r in args.alpha_region or ()),
    )
    request = GenerationRequest(
        seed_text=seed_text, length=args.length, schedule=schedule, seed=args.seed
    )
    stream = generate(model, request)
    if args.format == "tokens":
        _write_text(stream.text() + "\n", args.out)
    elif args.format == "leadsheet":
        _write_text(chords.decode_progression(stream.tokens()) + "\n", args.out)
    else:  # midi
        if not args.out:
            raise ValueError("--format midi writes binary data; --out is required")
        events, skipped = drums.decode_words(stream.tokens(), args.tempo)
        if skipped:
            logger.warning("skipped %d malformed drum tokens", skipped)
        Path(args.out).write_bytes(midi.write_smf(events, args.tempo))
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    stats = chords.corpus_stats(Path(args.corpus).read_text(encoding="utf-8"))
    if args.json:
        print(
            json.dumps(
                {
                    "vocab_size_word": stats.vocab_size_word,
                    "vocab_size_char": stats.vocab_size_char,
                    "total_words": stats.total_words,
                    "total_chars": stats.total_chars,
                    "ending_chords": dict(stats.ending_chords),
                },
                indent=2,
                sort_keys=True,
            )
        )
        return 0
    print(f"word vocabulary: {stats.vocab_size_word}")
    print(f"char vocabulary: {stats.vocab_size_char}")
    print(f"total words:     {stats.total_words}")
    print(f"total chars:     {stats.total_chars}")
    if stats.ending_chords:
        print("ending chords:")
        for token, share in stats.ending_fractions().items():
            print(f"  {token:12s} {stats.ending_chords[token]:5d}  ({share:.0%})")
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    rng = np.random.Generator(np.random.PCG64(args.seed))
    corpus = " ".join(f"tok{i}" for i in range(args.vocab))
    vocab = Vocab.build(corpus, "word")
    model = init_model(
        vocab, ModelHyper(hidden_size=args.hidden), precision="float64", rng=rng
    )
    sample = (
        rng.integers(0, len(vocab), size=args.length),
        rng.integers(0, len(vocab), size=args.length),
    )
    error = grad_check(model, sample, seed=args.seed)
    print(f"max relative gradient error: {error:.3e}")
    if error > GRADCHECK_TOLERANCE:
        print(f"FAIL: exceeds tolerance {GRADCHECK_TOLERANCE:.0e}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="textlstm",
        description="Train LSTM language models on chord/drum text and generate music.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode-chords", help="lab score files -> corpus text")
    p.add_argument("scores", nargs="+", help="lab-format score files")
    p.add_argument("--out", help="output corpus file (default: stdout)")
    p.set_defaults(func=cmd_encode_chords)

    p = sub.add_parser("encode-drums", help="MIDI drum files -> corpus text")
    p.add_argument("midis", nargs="+", help="Standard MIDI Files")
    p.add_argument("--out", help="output corpus file (default: stdout)")
    p.set_defaults(func=cmd_encode_drums)

    p = sub.add_parser("train", help="train a model on a corpus file")
    p.add_argument("corpus", help="corpus text file")
    p.add_argument("--mode", choices=["char", "word"], help="token granularity (default word)")
    p.add_argument("--hidden", type=int, help="hidden units per layer (default 128)")
    p.add_argument("--layers", type=int, help="LSTM layers (default 2)")
    p.add_argument("--dropout", type=float, help="dropout rate (default 0.2)")
    p.add_argument("--seq-len", dest="seq_len", type=int, help="BPTT window (default 64)")
    p.add_argument("--batch", type=int, help="windows per optimizer step (default 32)")
    p.add_argument("--epochs", type=int, help="passes over the corpus (default 25)")
    p.add_argument("--seed", type=int, help="PRNG seed (default 0)")
    p.add_argument("--domain", choices=["chord", "drum"], help="override corpus kind")
    p.add_argument("--config", help="JSON file with defaults for these flags")
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="sample tokens from a checkpoint")
    p.add_argument("checkpoint", help="checkpoint file from `train`")
    p.add_argument("--seed-text", dest="seed_text", help="seed tokens (default: start flag)")
    p.add_argument("--length", type=int, default=64, help="tokens to generate")
    p.add_argument("--alpha", type=float, default=1.0, help="diversity exponent")
    p.add_argument(
        "--alpha-region",
        action="append",
        metavar="START:END:ALPHA",
        help="alpha override for a token-index range; repeatable",
    )
    p.add_argument(
        "--format",
        choices=["tokens", "leadsheet", "midi"],
        default="tokens",
        help="output rendering",
    )
    p.add_argument("--tempo", type=float, default=120.0, help="MIDI tempo in BPM")
    p.add_argument("--seed", type=int, help="PRNG seed")
    p.add_argument("--out", help="output path (required for midi)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("stats", help="corpus statistics report")
    p.add_argument("corpus", help="corpus text file")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gradcheck", help="verify gradients against finite differences")
    p.add_argument("--hidden", type=int, default=4)
    p.add_argument("--vocab", type=int, default=5)
    p.add_argument("--length", type=int, default=8, help="sample length in tokens")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
