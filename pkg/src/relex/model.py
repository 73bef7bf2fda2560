"""The joint entity/relation network: parameters, per-sentence forward
passes for training, and prediction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .autodiff import Graph, ParamStore, read_params, write_params
from .bilou import EntitySpan
from .config import RunConfig
from .corpus import RelationInstance, Sentence
from .depstruct import extract_structure, validate_tree
from .encoder import EmbedTables, LSTMCell, embed_token, sequence_layer
from .entity import EntityHead, TagDecision, decode_entities
from .relation import (
    L2R_ONLY,
    Prediction,
    RelationCandidate,
    RelationHead,
    TreeLSTM,
    build_candidates,
    classify_relation,
    dependency_input,
    relation_vector,
    resolve_directions,
    tree_bottom_up,
    tree_top_down,
)
from .vocab import Vocabulary

# parameter groups by name prefix
ENTITY_PREFIXES = ("emb.word", "emb.pos", "emb.label", "seq.", "ent.")
RELATION_PREFIXES = ("emb.dep", "rel_emb.", "rel_seq.", "tree_up.", "tree_down.", "rel.")


@dataclass
class PredictedRelation:
    type: str
    arg1: EntitySpan
    arg2: EntitySpan

    def instance(self) -> RelationInstance:
        return RelationInstance(self.arg1.end, self.arg2.end, self.type)


@dataclass
class SentenceResult:
    tags: list[int]
    entities: list[EntitySpan]
    relations: list[PredictedRelation] = field(default_factory=list)


class JointModel:
    """All parameters of the network plus the vocabulary they index.

    With ``shared`` off, the relation side gets its own embedding and
    sequence layers (the pipeline variant). With ``semeval`` on there is no
    entity tagger and no label embedding; relation targets come from the
    corpus.
    """

    def __init__(self, vocab: Vocabulary, cfg: RunConfig):
        self.vocab = vocab
        self.cfg = cfg
        self.dtype = np.float64 if cfg.float64 else np.float32
        self.store = ParamStore(np.random.default_rng(cfg.seed), self.dtype)
        st = self.store
        n_labels = 0 if cfg.semeval else len(vocab.tags)
        self.emb = EmbedTables(st, "emb.", len(vocab.words), len(vocab.pos), len(vocab.deps),
                               n_labels, cfg.word_dim, cfg.pos_dim, cfg.dep_dim, cfg.label_dim)
        self.seq_fw = LSTMCell(st, "seq.fw.", self.emb.token_dim, cfg.seq_hidden, cfg.forget_bias)
        self.seq_bw = LSTMCell(st, "seq.bw.", self.emb.token_dim, cfg.seq_hidden, cfg.forget_bias)
        s_dim = 2 * cfg.seq_hidden
        self.ent = None
        if not cfg.semeval:
            self.ent = EntityHead(st, "ent.", s_dim + cfg.label_dim, cfg.entity_hidden,
                                  len(vocab.tags))
        if cfg.shared:
            self.rel_emb, self.rel_fw, self.rel_bw = self.emb, self.seq_fw, self.seq_bw
            self.rel_labels = self.emb.label
        else:
            self.rel_emb = EmbedTables(st, "rel_emb.", len(vocab.words), len(vocab.pos), 0,
                                       n_labels, cfg.word_dim, cfg.pos_dim, 0, cfg.label_dim)
            self.rel_fw = LSTMCell(st, "rel_seq.fw.", self.emb.token_dim, cfg.seq_hidden,
                                   cfg.forget_bias)
            self.rel_bw = LSTMCell(st, "rel_seq.bw.", self.emb.token_dim, cfg.seq_hidden,
                                   cfg.forget_bias)
            self.rel_labels = self.rel_emb.label
        x_dim = s_dim + cfg.dep_dim + (0 if cfg.semeval else cfg.label_dim)
        self.tree_up = TreeLSTM(st, "tree_up.", x_dim, cfg.tree_hidden, cfg.forget_bias)
        self.tree_down = TreeLSTM(st, "tree_down.", x_dim, cfg.tree_hidden, cfg.forget_bias)
        d_dim = 3 * cfg.tree_hidden + (2 * s_dim if cfg.pair else 0)
        self.rel = RelationHead(st, "rel.", d_dim, cfg.relation_hidden, len(vocab.relations))

    # parameter groups

    def entity_parameters(self):
        return self.store.select(ENTITY_PREFIXES)

    def relation_parameters(self):
        """Parameters touched by the relation loss alone in pipeline mode."""
        return self.store.select(RELATION_PREFIXES)

    # forward pieces

    def _encode(self, g, sentence, tables, fw, bw, training, rng):
        p = self.cfg.dropout
        xs = [embed_token(g, tables, self.vocab.word_id(t.form), self.vocab.pos_id(t.pos),
                          p, training, rng) for t in sentence.tokens]
        return sequence_layer(g, xs, fw, bw)

    def encode(self, g, sentence, training=False, rng=None):
        return self._encode(g, sentence, self.emb, self.seq_fw, self.seq_bw, training, rng)

    def encode_relation_side(self, g, sentence, s_shared, training=False, rng=None):
        if self.cfg.shared:
            return s_shared
        return self._encode(g, sentence, self.rel_emb, self.rel_fw, self.rel_bw, training, rng)

    def tag(self, g, s, gold=None, epsilon=0.0, training=False, rng=None) -> list[TagDecision]:
        return decode_entities(g, self.ent, self.emb.label, s, self.vocab.tags, gold=gold,
                               epsilon=epsilon, constrained=self.cfg.constrained,
                               dropout=self.cfg.dropout, training=training, rng=rng)

    def score_candidates(self, g, sentence, tree, s, fed_tags, candidates,
                         training=False, rng=None):
        """Relation logits for each candidate; dependency inputs are built
        once per token and shared between candidates."""
        inputs = {}

        def x_of(t):
            x = inputs.get(t)
            if x is None:
                tok = sentence.tokens[t - 1]
                label_id = None if self.cfg.semeval else fed_tags[t - 1]
                x = dependency_input(g, s[t - 1], self.emb.dep, self.vocab.dep_id(tok),
                                     self.rel_labels, label_id)
                inputs[t] = x
            return x

        out = []
        for cand in candidates:
            structure = extract_structure(tree, cand.first, cand.second, self.cfg.structure)
            xs = {t: x_of(t) for t in structure.nodes}
            up = tree_bottom_up(g, self.tree_up, structure, xs)
            down = tree_top_down(g, self.tree_down, structure, xs)
            d = relation_vector(g, cand, structure, up, down, s, self.cfg.pair)
            out.append(classify_relation(g, self.rel, d, self.cfg.dropout, training, rng))
        return out

    def _targets(self, sentence: Sentence, spans):
        """Candidate argument spans: detected spans, or in nominal-pair mode
        the gold entities named by the corpus relation lines."""
        if not self.cfg.semeval:
            return spans
        ends = {r.arg1 for r in sentence.relations} | {r.arg2 for r in sentence.relations}
        return [e for e in sentence.entities if e.end in ends]

    def gold_relation_map(self, sentence: Sentence):
        gold = {}
        for r in sentence.relations:
            if r.type == self.cfg.negative_type and r.type not in self.vocab.relations.types:
                continue
            a1 = sentence.entity_ending_at(r.arg1)
            a2 = sentence.entity_ending_at(r.arg2)
            gold[a1, a2] = r.type
        return gold

    # training loss

    def sentence_loss(self, g, sentence: Sentence, epsilon: float, rng, training=True,
                      entity_only=False, relation_only=False):
        """Build the joint loss for one sentence. Returns (loss node or None,
        entity loss value, relation loss value)."""
        cfg = self.cfg
        s = self.encode(g, sentence, training, rng)
        ent_losses = []
        if cfg.semeval:
            fed = [0] * len(sentence)
            spans = []
        else:
            gold_tags = self.vocab.tags.encode(sentence.entities, len(sentence))
            if relation_only:
                decisions = self.tag(g, s)
            else:
                decisions = self.tag(g, s, gold_tags, epsilon, training, rng)
                ent_losses = [d.loss for d in decisions]
            fed = [d.fed for d in decisions]
            spans = self.vocab.tags.decode(fed)
        rel_losses = []
        if not entity_only:
            s_rel = self.encode_relation_side(g, sentence, s, training, rng)
            candidates = build_candidates(self._targets(sentence, spans), cfg.candidates,
                                          self.gold_relation_map(sentence), self.vocab.relations)
            if candidates:
                tree = validate_tree(sentence.tokens)
                logits = self.score_candidates(g, sentence, tree, s_rel, fed, candidates,
                                               training, rng)
                rel_losses = [g.pick_neg_log_softmax(z, c.label)
                              for z, c in zip(logits, candidates)]
        terms = []
        if ent_losses:
            terms.append(g.scale(g.sum_scalars(ent_losses), cfg.entity_weight))
        if rel_losses:
            terms.append(g.scale(g.sum_scalars(rel_losses), cfg.relation_weight))
        ent_val = float(sum(x.value for x in ent_losses))
        rel_val = float(sum(x.value for x in rel_losses))
        if not terms:
            return None, ent_val, rel_val
        return (terms[0] if len(terms) == 1 else g.add(*terms)), ent_val, rel_val

    # prediction

    def predict(self, sentence: Sentence) -> SentenceResult:
        g = Graph()
        s = self.encode(g, sentence)
        if self.cfg.semeval:
            tags = self.vocab.tags.encode(sentence.entities, len(sentence))
            spans = list(sentence.entities)
        else:
            tags = [d.fed for d in self.tag(g, s)]
            spans = self.vocab.tags.decode(tags)
        result = SentenceResult(tags, spans)
        targets = self._targets(sentence, spans)
        candidates = build_candidates(targets, self.cfg.candidates)
        if not candidates:
            return result
        s_rel = self.encode_relation_side(g, sentence, s)
        tree = validate_tree(sentence.tokens)
        logits = self.score_candidates(g, sentence, tree, s_rel, tags, candidates)
        preds = {}
        for cand, z in zip(candidates, logits):
            probs = np.exp(z.value - z.value.max())
            probs /= probs.sum()
            label = int(np.argmax(probs))
            preds[cand.first, cand.second] = (cand, Prediction(label, float(probs[label])))
        labels = self.vocab.relations
        for (first, second), (cand, pred) in preds.items():
            if first > second and self.cfg.candidates != L2R_ONLY:
                continue
            back = preds.get((second, first))
            resolved = resolve_directions(pred, back[1] if back else None, labels)
            if resolved is None:
                continue
            rtype, forward = resolved
            a, b = cand.first_span, cand.second_span
            result.relations.append(PredictedRelation(rtype, *((a, b) if forward else (b, a))))
        return result

    # persistence

    def save(self, path, values=None):
        """Write parameters to ``path`` and the vocabulary/architecture to
        ``path + '.vocab.json'``."""
        with open(path, "w", encoding="utf-8") as f:
            write_params(f, values if values is not None else self.store.values())
        with open(str(path) + ".vocab.json", "w", encoding="utf-8") as f:
            json.dump({"vocab": self.vocab.to_json(), "architecture": self.cfg.architecture()},
                      f, ensure_ascii=False, indent=1)

    @classmethod
    def load(cls, path, cfg: RunConfig | None = None) -> "JointModel":
        with open(str(path) + ".vocab.json", encoding="utf-8") as f:
            meta = json.load(f)
        cfg = (cfg or RunConfig()).replace(**meta["architecture"])
        model = cls(Vocabulary.from_json(meta["vocab"]), cfg)
        with open(path, encoding="utf-8") as f:
            values = read_params(f, model.store.shapes())
        model.store.assign(values)
        return model
