"""Joint entity and relation extraction with a BiLSTM tagger and
bidirectional dependency tree-LSTMs, built on a small numpy autodiff."""

from .bilou import EntitySpan, TagAlphabet, decode_bilou, encode_bilou
from .config import RunConfig, load_config
from .corpus import Sentence, parse_corpus, read_corpus, write_corpus
from .metrics import MetricReport, evaluate_predictions
from .model import JointModel
from .training import Trainer, epsilon, evaluate, train

__version__ = "0.1.0"

__all__ = [
    "EntitySpan", "TagAlphabet", "decode_bilou", "encode_bilou", "RunConfig", "load_config",
    "Sentence", "parse_corpus", "read_corpus", "write_corpus", "MetricReport",
    "evaluate_predictions", "JointModel", "Trainer", "epsilon", "evaluate", "train",
]
