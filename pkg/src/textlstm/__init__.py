"""Text-based LSTM language models for chord progressions and drum tracks."""

from .chords import (
    ChordSymbol,
    CorpusStats,
    Score,
    corpus_stats,
    decode_progression,
    expand_to_text,
    parse_chord,
    read_lab,
    transpose_score,
)
from .drums import (
    DrumEventList,
    decode_words,
    encode_words,
    map_gm,
    quantize,
    text_to_word,
    word_to_text,
    words_to_grid,
)
from .estimator import TextLstmGenerator
from .midi import read_smf, write_smf
from .model import (
    CheckpointError,
    LstmModel,
    ModelHyper,
    init_model,
    load_checkpoint,
    save_checkpoint,
)
from .nn import grad_check
from .sampling import AlphaRegion, AlphaSchedule, GenerationRequest, generate, reweight
from .training import TrainConfig, TrainingDiverged, evaluate, make_batches, train_epoch, train_model
from .vocabulary import OovTokenError, TokenStream, Vocab, build_vocab

__version__ = "0.1.0"

__all__ = [
    "AlphaRegion",
    "AlphaSchedule",
    "CheckpointError",
    "ChordSymbol",
    "CorpusStats",
    "DrumEventList",
    "GenerationRequest",
    "LstmModel",
    "ModelHyper",
    "OovTokenError",
    "Score",
    "TextLstmGenerator",
    "TokenStream",
    "TrainConfig",
    "TrainingDiverged",
    "Vocab",
    "build_vocab",
    "corpus_stats",
    "decode_progression",
    "decode_words",
    "encode_words",
    "evaluate",
    "expand_to_text",
    "generate",
    "grad_check",
    "init_model",
    "load_checkpoint",
    "make_batches",
    "map_gm",
    "parse_chord",
    "quantize",
    "read_lab",
    "read_smf",
    "reweight",
    "save_checkpoint",
    "text_to_word",
    "train_epoch",
    "train_model",
    "transpose_score",
    "word_to_text",
    "words_to_grid",
    "write_smf",
    "__version__",
]
