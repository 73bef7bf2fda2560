"""Entity pretraining, joint training and evaluation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .autodiff import AdamState, AveragedParams, Graph, clip_gradients
from .metrics import MetricReport, evaluate_predictions
from .model import JointModel

log = logging.getLogger(__name__)


def epsilon(i: int, k: float) -> float:
    """Probability of feeding the gold label in epoch ``i`` (inverse sigmoid decay)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if i < 0:
        raise ValueError(f"epoch index must be >= 0, got {i}")
    return k / (k + math.exp(i / k))


@dataclass
class EpochStats:
    epoch: int
    epsilon: float
    loss: float
    entity_loss: float
    relation_loss: float
    dev: MetricReport | None = None

    def log_line(self) -> str:
        ent = f"{self.dev.entity.f1:.4f}" if self.dev else "-"
        rel = f"{self.dev.relation.f1:.4f}" if self.dev else "-"
        return (f"epoch {self.epoch} eps={self.epsilon:.6f} loss={self.loss:.6f} "
                f"dev_ent_f1={ent} dev_rel_f1={rel}")


@dataclass
class TrainResult:
    history: list[EpochStats] = field(default_factory=list)
    pretrain_history: list[EpochStats] = field(default_factory=list)
    best_epoch: int | None = None


class Trainer:
    """Owns the optimizer, the averaged copy and the RNG for one model."""

    def __init__(self, model: JointModel, rng: np.random.Generator | None = None):
        self.model = model
        self.cfg = model.cfg
        self.rng = rng if rng is not None else np.random.default_rng(self.cfg.seed + 1)
        self._adam: AdamState | None = None
        self._avg: AveragedParams | None = None

    def _epoch(self, corpus, params, eps, stats_epoch, **loss_kw):
        model, cfg = self.model, self.cfg
        adam = self._adam
        order = self.rng.permutation(len(corpus))
        total = ent_total = rel_total = 0.0
        for idx in order:
            sentence = corpus[idx]
            model.store.zero_grad()
            g = Graph()
            loss, ent, rel = model.sentence_loss(g, sentence, eps, self.rng, training=True,
                                                 **loss_kw)
            if loss is None:
                continue
            g.backward(loss)
            clip_gradients(params, cfg.clip)
            adam.step()
            self._avg.update()
            total += float(loss.value)
            ent_total += ent
            rel_total += rel
        n = max(len(corpus), 1)
        return EpochStats(stats_epoch, eps, total / n, ent_total / n, rel_total / n)

    def _phase(self, params):
        self._adam = AdamState(params, lr=self.cfg.lr, l2=self.cfg.l2)
        self._avg = AveragedParams(params)

    def pretrain_entities(self, corpus, epochs=None) -> list[EpochStats]:
        """Train embeddings, sequence layer and tagger on the entity loss only."""
        cfg = self.cfg
        epochs = cfg.pretrain_epochs if epochs is None else epochs
        if epochs == 0 or cfg.semeval:
            return []
        params = self.model.entity_parameters()
        self._phase(params)
        history = []
        for e in range(epochs):
            stats = self._epoch(corpus, params, epsilon(e, cfg.ss_k), e + 1, entity_only=True)
            history.append(stats)
            log.info("pretrain " + stats.log_line())
        # continue joint training from the raw, not averaged, parameters
        return history

    def train_joint(self, corpus, dev=None, epochs=None, on_epoch=None) -> TrainResult:
        """Joint training with scheduled sampling. After each epoch the
        averaged parameters are scored on ``dev`` (if given); the best
        relation-F1 snapshot is kept and loaded into the model at the end,
        otherwise the final averaged parameters are.

        ``on_epoch(stats)`` returning True stops training early.
        """
        cfg = self.cfg
        model = self.model
        epochs = cfg.epochs if epochs is None else epochs
        result = TrainResult()
        if cfg.shared or cfg.semeval:
            phases = [(model.store.params.values(), {})]
        else:
            # pipeline: tagger first, then a separate relation model on its output
            phases = [(model.entity_parameters(), {"entity_only": True}),
                      (model.relation_parameters(), {"relation_only": True})]
        best = None
        best_f1 = -1.0
        epoch_no = 0
        for phase_no, (params, loss_kw) in enumerate(phases):
            params = list(params)
            last_phase = phase_no == len(phases) - 1
            self._phase(params)
            for e in range(epochs):
                eps = epsilon(e, cfg.ss_k)
                epoch_no += 1
                stats = self._epoch(corpus, params, eps, epoch_no, **loss_kw)
                if dev is not None and last_phase:
                    averaged = self.averaged_values()
                    raw = model.store.copy_values()
                    model.store.assign(averaged)
                    stats.dev = evaluate(model, dev)
                    model.store.assign(raw)
                    if stats.dev.relation.f1 > best_f1:
                        best_f1 = stats.dev.relation.f1
                        best = averaged
                        result.best_epoch = epoch_no
                result.history.append(stats)
                log.info(stats.log_line())
                if on_epoch is not None and on_epoch(stats):
                    break
            if not last_phase:
                model.store.assign(self.averaged_values())
        final = best if best is not None else self.averaged_values()
        model.store.assign(final)
        return result

    def averaged_values(self):
        """Full parameter dict with the current phase's averages applied."""
        values = self.model.store.copy_values()
        if self._avg is not None:
            values.update(self._avg.snapshot())
        return values


def train(model: JointModel, corpus, dev=None, on_epoch=None, rng=None) -> TrainResult:
    """Pretrain the tagger (unless disabled) and then train jointly."""
    trainer = Trainer(model, rng)
    pre = trainer.pretrain_entities(corpus)
    result = trainer.train_joint(corpus, dev, on_epoch=on_epoch)
    result.pretrain_history = pre
    return result


def predict_corpus(model: JointModel, corpus):
    return [model.predict(s) for s in corpus]


def evaluate(model: JointModel, corpus) -> MetricReport:
    return evaluate_predictions(corpus, predict_corpus(model, corpus), model.cfg.negative_type)
