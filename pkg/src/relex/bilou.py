"""BILOU entity tags: alphabet, span encoding, repair decoding, legality."""

from __future__ import annotations

from dataclasses import dataclass

OUTSIDE = "O"
PREFIXES = ("B", "I", "L", "U")


@dataclass(frozen=True, order=True)
class EntitySpan:
    """An entity over tokens ``start..end`` (1-based, inclusive)."""

    start: int
    end: int
    type: str

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"span start {self.start} > end {self.end}")

    def tokens(self) -> range:
        return range(self.start, self.end + 1)


class OverlapError(ValueError):
    pass


def split_tag(tag: str) -> tuple[str, str | None]:
    if tag == OUTSIDE:
        return OUTSIDE, None
    prefix, sep, etype = tag.partition("-")
    if not sep or prefix not in PREFIXES or not etype:
        raise ValueError(f"not a BILOU tag: {tag!r}")
    return prefix, etype


def check_disjoint(spans, n: int | None = None):
    taken = {}
    for span in spans:
        if n is not None and (span.start < 1 or span.end > n):
            raise OverlapError(f"span {span} outside sentence of length {n}")
        for i in span.tokens():
            if i in taken:
                raise OverlapError(f"spans {taken[i]} and {span} overlap at token {i}")
            taken[i] = span


def spans_to_tags(spans, n: int) -> list[str]:
    check_disjoint(spans, n)
    tags = [OUTSIDE] * n
    for s in spans:
        if s.start == s.end:
            tags[s.start - 1] = f"U-{s.type}"
        else:
            tags[s.start - 1] = f"B-{s.type}"
            for i in range(s.start + 1, s.end):
                tags[i - 1] = f"I-{s.type}"
            tags[s.end - 1] = f"L-{s.type}"
    return tags


def tags_to_spans(tags) -> list[EntitySpan]:
    """Spans for every maximal well-formed ``B I* L`` or ``U`` run.

    Fragments that break the pattern (a missing B, a type change, a run cut
    off by O or sentence end) produce nothing.
    """
    spans = []
    open_start = None
    open_type = None
    for i, tag in enumerate(tags, start=1):
        prefix, etype = split_tag(tag)
        if prefix in ("I", "L"):
            if open_start is not None and etype == open_type:
                if prefix == "L":
                    spans.append(EntitySpan(open_start, i, etype))
                    open_start = open_type = None
                continue
            open_start = open_type = None
            continue
        open_start = open_type = None
        if prefix == "B":
            open_start, open_type = i, etype
        elif prefix == "U":
            spans.append(EntitySpan(i, i, etype))
    return spans


class TagAlphabet:
    """Tag ids: ``O`` is 0, then B, I, L, U for each entity type in order."""

    def __init__(self, entity_types):
        self.entity_types = tuple(sorted(set(entity_types)))
        self.tags = [OUTSIDE] + [f"{p}-{t}" for t in self.entity_types for p in PREFIXES]
        self.index = {t: i for i, t in enumerate(self.tags)}
        self.outside = 0
        self._parsed = [split_tag(t) for t in self.tags]
        self._legal = [frozenset(self._legal_after(i)) for i in range(len(self.tags))]
        self._open = frozenset(i for i, (p, _) in enumerate(self._parsed) if p in ("B", "I"))

    def __len__(self):
        return len(self.tags)

    def __getitem__(self, tag_id: int) -> str:
        return self.tags[tag_id]

    def id(self, tag: str) -> int:
        try:
            return self.index[tag]
        except KeyError:
            raise KeyError(f"tag {tag!r} not in alphabet") from None

    def encode(self, spans, n: int) -> list[int]:
        return [self.id(t) for t in spans_to_tags(spans, n)]

    def decode(self, tag_ids) -> list[EntitySpan]:
        return tags_to_spans(self.tags[i] for i in tag_ids)

    def _legal_after(self, prev: int) -> set[int]:
        prefix, etype = self._parsed[prev]
        if prefix in ("B", "I"):
            return {self.index[f"I-{etype}"], self.index[f"L-{etype}"]}
        return {i for i, (p, _) in enumerate(self._parsed) if p in (OUTSIDE, "B", "U")}

    def legal_next(self, prev: int | None, last: bool = False) -> frozenset[int]:
        """Tags allowed after ``prev`` (``None`` = sentence start, treated as O).

        With ``last=True`` the B and I tags, which would leave a span open,
        are removed.
        """
        allowed = self._legal[self.outside if prev is None else prev]
        if last:
            allowed = allowed - self._open
        return allowed

    def is_last_word(self, tag_id: int) -> bool:
        return self._parsed[tag_id][0] in ("L", "U")


def encode_bilou(spans, n: int, alphabet: TagAlphabet) -> list[int]:
    return alphabet.encode(spans, n)


def decode_bilou(tag_ids, alphabet: TagAlphabet) -> list[EntitySpan]:
    return alphabet.decode(tag_ids)


def legal_next_tags(prev: int | None, alphabet: TagAlphabet) -> frozenset[int]:
    return alphabet.legal_next(prev)
