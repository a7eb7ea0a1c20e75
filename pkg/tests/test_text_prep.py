import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sansum.errors import EmptyDocumentError
from sansum.text_prep import Document, clean, ngrams, prepare, read_document, segment

DELIMS = ("।", "॥", "|")

# mixed-script text: Devanagari, Latin, digits, punctuation, whitespace, URLs
mixed_text = st.lists(
    st.one_of(
        st.characters(min_codepoint=0x0900, max_codepoint=0x097F),
        st.sampled_from(list("abcXYZ019 .,;:!?|\t\n()-_/")),
        st.sampled_from(["http://a.b/c", "www.site.in", "https://x.y ", "‍", " "]),
        st.characters(),
    ),
    max_size=40,
).map("".join)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("रामः  गच्छति। http://x.y देवः", "रामः गच्छति। देवः"),
        ("abc रामः 123", "रामः"),
        ("", ""),
        ("  \n\t ", ""),
        ("रामः,देवः", "रामः देवः"),
        ("see www.example.com/x रामः", "रामः"),
        ("HTTPS://A.B रामः", "रामः"),
        ("क्‍ष", "क्ष"),
        ("रामः | सीता", "रामः | सीता"),
    ],
)
def test_clean_examples(raw, expected):
    assert clean(raw) == expected


def test_clean_keeps_devanagari_digits_and_signs():
    assert clean("१२३ ॐ सोऽहम्") == "१२३ ॐ सोऽहम्"


def test_clean_bytes_input_must_be_utf8():
    assert clean("देवः".encode()) == "देवः"
    with pytest.raises(UnicodeDecodeError):
        clean(b"\xff\xfe\xfa")


@given(mixed_text)
def test_clean_idempotent(text):
    once = clean(text)
    assert clean(once) == once


@given(mixed_text)
def test_clean_output_alphabet(text):
    out = clean(text)
    assert out == out.strip()
    assert "  " not in out
    assert all("ऀ" <= ch <= "ॿ" or ch in "| " for ch in out)


def test_segment_two_sentences():
    doc = segment("अहं पठामि। सः गच्छति।", "d")
    assert [s.index for s in doc.sentences] == [0, 1]
    assert doc.sentences[1].tokens == ("सः", "गच्छति")


def test_segment_double_danda():
    doc = segment("अहं पठामि॥", "d")
    assert len(doc) == 1
    assert doc.sentences[0].tokens == ("अहं", "पठामि")


def test_segment_ascii_pipe():
    doc = segment("अहं पठामि | सः गच्छति", "d")
    assert [s.text for s in doc.sentences] == ["अहं पठामि", "सः गच्छति"]


@pytest.mark.parametrize("text", ["।।।", "", "   ", "॥ | ।"])
def test_segment_empty(text):
    with pytest.raises(EmptyDocumentError):
        segment(text, "d")


@given(mixed_text)
def test_segment_properties(text):
    cleaned = clean(text)
    try:
        doc = segment(cleaned, "d")
    except EmptyDocumentError:
        return
    assert [s.index for s in doc.sentences] == list(range(len(doc)))
    for s in doc.sentences:
        assert s.tokens
        assert not any(d in s.text for d in DELIMS)
        assert all(not any(c.isspace() for c in tok) for tok in s.tokens)
        assert " ".join(s.tokens) == s.text
    # token conservation: whitespace tokens of the cleaned text, minus pure-delimiter
    # pieces, once delimiters are treated as separators
    spaced = cleaned
    for d in DELIMS:
        spaced = spaced.replace(d, " ")
    assert sum(len(s.tokens) for s in doc.sentences) == len(spaced.split())


def test_document_json_round_trip(fixtures_dir):
    doc = read_document(fixtures_dir / "story15.txt")
    data = json.loads(doc.to_json())
    assert data["id"] == "story15"
    assert set(data["sentences"][0]) == {"index", "text", "tokens"}
    assert Document.from_dict(data) == doc


def test_prepare_story_fixture(story15):
    assert len(story15) == 15
    assert story15.sentences[-1].text == "एवं बुद्धिमान् शशकः सर्वान् पशून् अरक्षत्"


def test_ngrams_examples():
    assert ngrams(["a", "b", "c"], 2) == {("a", "b"): 1, ("b", "c"): 1}
    assert ngrams(["a", "a"], 1) == {("a",): 2}
    assert ngrams(["a"], 2) == {}
    with pytest.raises(ValueError):
        ngrams(["a"], 0)


@given(st.lists(st.sampled_from("abcd"), max_size=15))
def test_unigram_cardinality(tokens):
    assert sum(ngrams(tokens, 1).values()) == len(tokens)


def test_prepare_matches_segment_of_clean():
    raw = "abc रामः। www.x.org देवः॥"
    assert prepare(raw, "x") == segment(clean(raw), "x")
