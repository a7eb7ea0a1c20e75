"""Cleaning and sentence segmentation for Devanagari text.

Scraped text is reduced to the Devanagari block (U+0900-U+097F), the ASCII
pipe that is often typed in place of a danda, and single spaces. Sentences end
at danda (U+0964), double danda (U+0965) or ``|``.
"""

from __future__ import annotations

import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import EmptyDocumentError

DANDA = "।"
DOUBLE_DANDA = "॥"
SENTENCE_DELIMITERS = (DANDA, DOUBLE_DANDA, "|")

_URL_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)\S*", re.IGNORECASE)
_DELIM_RE = re.compile("[" + re.escape("".join(SENTENCE_DELIMITERS)) + "]")
_WS_RE = re.compile(r"\s+")


def _keep(ch: str) -> bool:
    return "ऀ" <= ch <= "ॿ" or ch == "|"


def clean(raw: str | bytes) -> str:
    """Strip URLs and every non-Devanagari character, then normalize spacing.

    ``bytes`` input is decoded as strict UTF-8 (``UnicodeDecodeError`` on bad
    input). Dropped characters become spaces so that ``रामः,देवः`` still
    yields two words; zero-width joiners and other format characters are
    deleted outright because they sit inside words.
    """
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    text = _URL_RE.sub(" ", raw)
    out = []
    for ch in text:
        if _keep(ch):
            out.append(ch)
        elif unicodedata.category(ch) != "Cf":
            out.append(" ")
    return _WS_RE.sub(" ", "".join(out)).strip()


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    tokens: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"index": self.index, "text": self.text, "tokens": list(self.tokens)}


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple[Sentence, ...]

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def tokens(self) -> list[str]:
        """All tokens, sentence after sentence."""
        return [tok for s in self.sentences for tok in s.tokens]

    def to_dict(self) -> dict:
        return {"id": self.id, "sentences": [s.to_dict() for s in self.sentences]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "Document":
        sentences = tuple(
            Sentence(int(s["index"]), s["text"], tuple(s["tokens"])) for s in data["sentences"]
        )
        return cls(str(data["id"]), sentences)


def tokenize(text: str) -> list[str]:
    return text.split()


def segment(cleaned: str, doc_id: str) -> Document:
    """Split cleaned text into indexed sentences.

    Raises :class:`EmptyDocumentError` when nothing but delimiters and
    whitespace is left.
    """
    sentences = []
    for part in _DELIM_RE.split(cleaned):
        tokens = tokenize(part)
        if not tokens:
            continue
        sentences.append(Sentence(len(sentences), " ".join(tokens), tuple(tokens)))
    if not sentences:
        raise EmptyDocumentError(f"document {doc_id!r} has no sentences")
    return Document(doc_id, tuple(sentences))


def prepare(raw: str | bytes, doc_id: str) -> Document:
    """``segment(clean(raw))``."""
    return segment(clean(raw), doc_id)


def read_document(path: str | Path, doc_id: str | None = None) -> Document:
    """Load a UTF-8 text file as a Document; the id defaults to the file stem."""
    path = Path(path)
    return prepare(path.read_bytes(), doc_id if doc_id is not None else path.stem)


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    """Multiset of contiguous ``n``-token windows."""
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
