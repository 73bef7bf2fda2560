import io

import pytest

from relex.bilou import EntitySpan
from relex.corpus import CorpusError, RelationInstance, parse_corpus, write_corpus
from relex.synthetic import gen_synthetic

MINIMAL = "1\tYates\tNNP\t2\tnsubj\tU-PER\n2\tChicago\tNNP\t0\troot\tU-LOC\n#rel\t1\t2\tPHYS\n"


def parse(text):
    return parse_corpus(io.StringIO(text))


def test_minimal_sentence():
    corpus = parse(MINIMAL)
    assert len(corpus) == 1
    s = corpus[0]
    assert s.forms == ["Yates", "Chicago"]
    assert s.entities == (EntitySpan(1, 1, "PER"), EntitySpan(2, 2, "LOC"))
    assert s.relations == (RelationInstance(1, 2, "PHYS"),)


def test_empty_file():
    assert parse("") == []
    assert parse("\n\n") == []


def test_doc_comments_and_crlf():
    text = "#doc a.xml\n" + MINIMAL.replace("\n", "\r\n") + "\r\n\r\n" + MINIMAL
    assert len(parse(text)) == 2


def test_round_trip_byte_identical():
    text = gen_synthetic(5, 11)
    buf = io.StringIO()
    write_corpus(buf, parse(text))
    assert buf.getvalue() == text


@pytest.mark.parametrize("text, message", [
    ("1\tYates\tNNP\t0\troot\n", "6 tab-separated"),
    ("1\tYates\tNNP\t3\troot\tO\n", "out of range"),
    ("1\ta\tX\t2\td\tB-PER\n2\tb\tX\t0\troot\tU-LOC\n", "ill-formed"),
    ("1\ta\tX\t2\td\tU-PER\n2\tb\tX\t0\troot\tO\n#rel\t1\t2\tT\n", "not the last token"),
    ("1\ta\tX\t2\td\tU-PER\n2\tb\tX\t1\troot\tU-LOC\n", "cycle"),
    ("1\ta\tX\t0\td\tU-PER\n2\tb\tX\t0\troot\tU-LOC\n", "root"),
    ("1\ta\tX\t0\td\tQ-PER\n", "BILOU"),
    ("1\ta\tX\tz\td\tO\n", "integers"),
    ("2\ta\tX\t0\td\tO\n", "expected 1"),
    ("1\ta\tX\t0\td\tU-A\n#rel\t1\t1\tT\n", "coincide"),
    ("1\ta\tX\t0\td\tU-A\n#rel\t1\tT\n", "4 columns"),
])
def test_errors(text, message):
    with pytest.raises(CorpusError, match=message):
        parse(text)


def test_error_reports_line_and_column():
    text = MINIMAL + "\n1\tx\tX\t5\troot\tO\n"
    with pytest.raises(CorpusError) as info:
        parse(text)
    assert info.value.line == 5 and info.value.column == 4


def test_entity_ending_at():
    s = parse(MINIMAL)[0]
    assert s.entity_ending_at(2) == EntitySpan(2, 2, "LOC")
    assert s.entity_ending_at(3) is None
