"""Sentence data model and the tab-separated corpus format.

One token per line with six tab-separated columns::

    INDEX  FORM  POS  HEAD  DEPREL  ENTITY_TAG

followed by optional relation lines ``#rel<TAB>ARG1_LAST<TAB>ARG2_LAST<TAB>TYPE``.
Sentences are separated by a blank line; lines starting with ``#doc`` are
ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bilou import EntitySpan, OverlapError, split_tag, spans_to_tags, tags_to_spans


class CorpusError(ValueError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    pos: str
    head: int
    deprel: str


@dataclass(frozen=True)
class RelationInstance:
    """A directed relation between the entities ending at ``arg1`` and ``arg2``."""

    arg1: int
    arg2: int
    type: str


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    entities: tuple[EntitySpan, ...] = ()
    relations: tuple[RelationInstance, ...] = ()
    _by_end: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_end", {e.end: e for e in self.entities})

    def __len__(self):
        return len(self.tokens)

    @property
    def forms(self):
        return [t.form for t in self.tokens]

    def entity_ending_at(self, index: int) -> EntitySpan | None:
        return self._by_end.get(index)

    def tags(self) -> list[str]:
        return spans_to_tags(self.entities, len(self.tokens))


def _validate(tokens, entities, relations, first_line):
    from .depstruct import TreeError, validate_tree

    n = len(tokens)
    for k, tok in enumerate(tokens, start=1):
        if tok.index != k:
            raise CorpusError(f"token index {tok.index}, expected {k}", first_line + k - 1, 1)
        if not 0 <= tok.head <= n:
            raise CorpusError(f"head {tok.head} out of range 0..{n}", first_line + k - 1, 4)
    try:
        validate_tree(tokens)
    except TreeError as exc:
        raise CorpusError(str(exc), first_line) from None
    ends = {e.end for e in entities}
    for rel in relations:
        for arg in (rel.arg1, rel.arg2):
            if arg not in ends:
                raise CorpusError(f"relation argument {arg} is not the last token of an entity",
                                  first_line)
        if rel.arg1 == rel.arg2:
            raise CorpusError("relation arguments coincide", first_line)


def make_sentence(tokens, entities=(), relations=()) -> Sentence:
    """Build a validated sentence from python objects."""
    tokens = tuple(tokens)
    entities = tuple(sorted(entities))
    try:
        spans_to_tags(entities, len(tokens))
    except OverlapError as exc:
        raise CorpusError(str(exc)) from None
    _validate(tokens, entities, tuple(relations), None)
    return Sentence(tokens, entities, tuple(relations))


def parse_corpus(stream) -> list[Sentence]:
    """Read every sentence from a text stream, validating as it goes."""
    sentences = []
    block: list[tuple[int, str]] = []

    def flush():
        if block:
            sentences.append(_parse_block(block))
            block.clear()

    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if line.endswith("\r"):
            line = line[:-1]
        if line.startswith("#doc"):
            continue
        if not line.strip():
            flush()
            continue
        block.append((lineno, line))
    flush()
    return sentences


def _parse_block(block) -> Sentence:
    tokens = []
    tags = []
    relations = []
    first_line = block[0][0]
    for lineno, line in block:
        cols = line.split("\t")
        if cols[0] == "#rel":
            if tokens == []:
                raise CorpusError("relation line before any token", lineno)
            if len(cols) != 4:
                raise CorpusError(f"relation line needs 4 columns, got {len(cols)}", lineno)
            try:
                a1, a2 = int(cols[1]), int(cols[2])
            except ValueError:
                raise CorpusError("relation arguments must be integers", lineno, 2) from None
            relations.append(RelationInstance(a1, a2, cols[3]))
            continue
        if relations:
            raise CorpusError("token line after relation lines", lineno)
        if len(cols) != 6:
            raise CorpusError(f"expected 6 tab-separated columns, got {len(cols)}", lineno)
        try:
            index, head = int(cols[0]), int(cols[3])
        except ValueError:
            raise CorpusError("INDEX and HEAD must be integers", lineno) from None
        try:
            split_tag(cols[5])
        except ValueError as exc:
            raise CorpusError(str(exc), lineno, 6) from None
        tokens.append(Token(index, cols[1], cols[2], head, cols[4]))
        tags.append(cols[5])
    entities = tags_to_spans(tags)
    if spans_to_tags(entities, len(tags)) != tags:
        raise CorpusError("ill-formed or overlapping BILOU tags", first_line)
    _validate(tokens, entities, relations, first_line)
    return Sentence(tuple(tokens), tuple(entities), tuple(relations))


def format_sentence(sentence: Sentence, tags=None, relations=None) -> str:
    tags = sentence.tags() if tags is None else tags
    relations = sentence.relations if relations is None else relations
    lines = [f"{t.index}\t{t.form}\t{t.pos}\t{t.head}\t{t.deprel}\t{tag}"
             for t, tag in zip(sentence.tokens, tags)]
    lines += [f"#rel\t{r.arg1}\t{r.arg2}\t{r.type}" for r in relations]
    return "\n".join(lines) + "\n"


def write_corpus(stream, sentences):
    stream.write("\n".join(format_sentence(s) for s in sentences))


def read_corpus(path) -> list[Sentence]:
    with open(path, encoding="utf-8") as f:
        return parse_corpus(f)
