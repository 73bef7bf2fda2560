"""Run configuration: ``key = value`` files with ``--set`` overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields

from .depstruct import KINDS, SPTREE
from .relation import BOTH, CANDIDATE_MODES


class ConfigError(ValueError):
    pass


# search ranges used to tune the original model; values outside are
# rejected unless strict_ranges is off
RANGES = {
    "lr": (1e-4, 5e-3),
    "l2": (0.0, 1e-4),
    "dropout": (0.0, 0.5),
    "clip": (1.0, 100.0),
    "ss_k": (1.0, 100.0),
    "epochs": (0, 100),
    "pretrain_epochs": (0, 100),
}


@dataclass
class RunConfig:
    # architecture
    word_dim: int = 200
    pos_dim: int = 25
    dep_dim: int = 25
    label_dim: int = 25
    seq_hidden: int = 100
    tree_hidden: int = 100
    entity_hidden: int = 100
    relation_hidden: int = 100
    forget_bias: float = 0.0
    structure: str = SPTREE
    pair: bool = True
    shared: bool = True
    semeval: bool = False
    negative_type: str = "Other"
    float64: bool = False
    # training
    lr: float = 1e-3
    l2: float = 1e-5
    dropout: float = 0.3
    clip: float = 10.0
    ss_k: float = 10.0
    epochs: int = 50
    pretrain_epochs: int = 10
    candidates: str = BOTH
    constrained: bool = True
    entity_weight: float = 1.0
    relation_weight: float = 1.0
    min_word_freq: int = 1
    seed: int = 1
    strict_ranges: bool = True
    # files
    train_path: str = ""
    dev_path: str = ""
    test_path: str = ""
    vectors_path: str = ""
    model_in: str = ""
    model_out: str = ""
    log_path: str = ""

    def validate(self):
        if self.structure not in KINDS:
            raise ConfigError(f"structure must be one of {KINDS}")
        if self.candidates not in CANDIDATE_MODES:
            raise ConfigError(f"candidates must be one of {CANDIDATE_MODES}")
        if self.ss_k < 1:
            raise ConfigError("ss_k must be >= 1")
        if not 0 <= self.dropout < 1:
            raise ConfigError("dropout must be in [0, 1)")
        if self.clip <= 0:
            raise ConfigError("clip must be positive")
        for name in ("word_dim", "pos_dim", "dep_dim", "seq_hidden", "tree_hidden",
                     "entity_hidden", "relation_hidden"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.strict_ranges:
            for name, (lo, hi) in RANGES.items():
                v = getattr(self, name)
                if not lo <= v <= hi:
                    raise ConfigError(
                        f"{name}={v} outside the tuning range [{lo}, {hi}] "
                        f"(set strict_ranges = false to allow)")
        return self

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def architecture(self) -> dict:
        keys = ("word_dim", "pos_dim", "dep_dim", "label_dim", "seq_hidden", "tree_hidden",
                "entity_hidden", "relation_hidden", "forget_bias", "structure", "pair",
                "shared", "semeval", "negative_type", "float64", "candidates", "constrained")
        return {k: getattr(self, k) for k in keys}


SMALL_DIMS = dict(word_dim=6, pos_dim=3, dep_dim=3, label_dim=3, seq_hidden=5, tree_hidden=5,
                  entity_hidden=4, relation_hidden=4)

_FIELDS = {f.name: f for f in fields(RunConfig)}


def _convert(key, text):
    if key not in _FIELDS:
        raise ConfigError(f"unknown configuration key {key!r}")
    kind = type(getattr(RunConfig(), key))
    text = text.strip()
    if key == "structure":
        text = {k.lower(): k for k in KINDS}.get(text.lower(), text)
    if kind is bool:
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {text!r}")
    try:
        return kind(text)
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {text!r}") from None


def parse_assignments(lines, source="<config>") -> dict:
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key = key.strip()
        try:
            out[key] = _convert(key, value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return out


def load_config(path=None, overrides=(), base: RunConfig | None = None) -> RunConfig:
    """Defaults, then the file at ``path``, then ``key=value`` overrides."""
    values = {}
    if path:
        with open(path, encoding="utf-8") as f:
            values.update(parse_assignments(f, source=str(path)))
    values.update(parse_assignments(overrides, source="--set"))
    cfg = dataclasses.replace(base or RunConfig(), **values)
    return cfg.validate()


def dump_config(cfg: RunConfig) -> str:
    return "".join(f"{f.name} = {getattr(cfg, f.name)}\n" for f in fields(RunConfig))
