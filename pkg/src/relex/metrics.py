"""Micro precision/recall/F1 for entities and relations, and macro-F1."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


def _match(gold, pred) -> Counts:
    gold, pred = set(gold), set(pred)
    tp = len(gold & pred)
    return Counts(tp, len(pred) - tp, len(gold) - tp)


def score_entities(gold, pred) -> Counts:
    """Exact (type, start, end) matching with set semantics."""
    return _match(gold, pred)


def relation_key(rtype, arg1, arg2):
    return (rtype, arg1, arg2)


def score_relations(gold, pred) -> Counts:
    """A predicted relation is correct only if its type, direction and both
    argument spans (type and region) equal a gold relation's. Duplicates are
    dropped before counting."""
    return _match(gold, pred)


def per_class_counts(gold, pred) -> dict[str, Counts]:
    """Per relation type counts from ``(type, arg1, arg2)`` tuples."""
    gold, pred = set(gold), set(pred)
    tp = Counter(r[0] for r in gold & pred)
    fp = Counter(r[0] for r in pred - gold)
    fn = Counter(r[0] for r in gold - pred)
    classes = set(tp) | set(fp) | set(fn)
    return {c: Counts(tp[c], fp[c], fn[c]) for c in sorted(classes)}


def macro_f1(per_class: dict[str, Counts], exclude=()) -> float:
    """Unweighted mean of per-class F1, skipping ``exclude`` classes."""
    classes = [c for c in per_class if c not in exclude]
    if not classes:
        raise ValueError("macro-F1 over zero classes")
    return sum(per_class[c].f1 for c in classes) / len(classes)


@dataclass
class MetricReport:
    entity: Counts = field(default_factory=Counts)
    relation: Counts = field(default_factory=Counts)
    per_class: dict[str, Counts] = field(default_factory=dict)

    @property
    def macro_f1(self) -> float | None:
        return macro_f1(self.per_class) if self.per_class else None

    def machine_line(self) -> str:
        e, r = self.entity, self.relation
        return (f"ENT {e.precision:.4f} {e.recall:.4f} {e.f1:.4f} "
                f"REL {r.precision:.4f} {r.recall:.4f} {r.f1:.4f}")

    def table(self) -> str:
        rows = [("", "P", "R", "F1", "TP", "FP", "FN")]
        for name, c in (("entity", self.entity), ("relation", self.relation),
                        *sorted(self.per_class.items())):
            rows.append((name, f"{c.precision:.3f}", f"{c.recall:.3f}", f"{c.f1:.3f}",
                         str(c.tp), str(c.fp), str(c.fn)))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(cell.rjust(w) if i else cell.ljust(w)
                           for i, (cell, w) in enumerate(zip(row, widths)))
                 for row in rows]
        if self.per_class:
            lines.append(f"macro-F1 {self.macro_f1:.4f}")
        return "\n".join(lines)


def gold_relations(sentence, negative_type=None):
    out = set()
    for r in sentence.relations:
        if r.type == negative_type:
            continue
        out.add(relation_key(r.type, sentence.entity_ending_at(r.arg1),
                             sentence.entity_ending_at(r.arg2)))
    return out


def evaluate_predictions(gold_corpus, predictions, negative_type=None) -> MetricReport:
    """Pool counts over sentences. ``predictions[i]`` needs ``entities`` and
    ``relations`` (objects with ``type``, ``arg1``, ``arg2`` spans)."""
    ent = Counts()
    rel = Counts()
    all_gold, all_pred = set(), set()
    for k, (sentence, pred) in enumerate(zip(gold_corpus, predictions)):
        ent += score_entities(sentence.entities, pred.entities)
        g = gold_relations(sentence, negative_type)
        p = {relation_key(r.type, r.arg1, r.arg2) for r in pred.relations}
        rel += score_relations(g, p)
        all_gold |= {(t, k, a, b) for t, a, b in g}
        all_pred |= {(t, k, a, b) for t, a, b in p}
    return MetricReport(ent, rel, per_class_counts(all_gold, all_pred))
