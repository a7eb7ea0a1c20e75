"""Token embedding providers and sentence embeddings by averaging.

Two providers share one interface: :class:`DeterministicProvider` hashes each
token into a fixed unit vector (no model needed, bit-identical everywhere) and
:class:`FileProvider` looks vectors up in a TSV table that may hold contextual
(``doc_id:sentence:token``) as well as static (bare token) keys.
"""

from __future__ import annotations

import math
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, EmbeddingFileError, TokenLookupError
from .text_prep import Document, Sentence

DEFAULT_DIM = 768
MISSING_POLICIES = ("error", "zero", "fallback")

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def splitmix64(state: int, count: int) -> list[int]:
    """``count`` successive outputs of splitmix64 seeded with ``state``."""
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out


@lru_cache(maxsize=65536)
def _hashed_vector(token: str, dim: int) -> tuple[float, ...]:
    raw = [(u >> 11) * 2.0**-53 * 2.0 - 1.0 for u in splitmix64(fnv1a_64(token.encode("utf-8")), dim)]
    # fsum is correctly rounded, so the norm does not depend on summation order
    norm = math.sqrt(math.fsum(x * x for x in raw))
    return tuple(x / norm for x in raw)


def hashed_vector(token: str, dim: int = DEFAULT_DIM) -> np.ndarray:
    """Unit vector derived only from the UTF-8 bytes of ``token``."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    return np.array(_hashed_vector(token, dim), dtype=np.float64)


class EmbeddingProvider:
    """Interface: one ``dim``-vector per token of a sentence."""

    kind: str
    dim: int

    def token_embeddings(self, doc_id: str, sentence: Sentence) -> np.ndarray:
        raise NotImplementedError


class DeterministicProvider(EmbeddingProvider):
    kind = "deterministic"

    def __init__(self, dim: int = DEFAULT_DIM):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.dim = dim

    def token_embeddings(self, doc_id: str, sentence: Sentence) -> np.ndarray:
        if not sentence.tokens:
            raise ValueError("sentence has no tokens")
        return np.stack([hashed_vector(tok, self.dim) for tok in sentence.tokens])

    def __repr__(self) -> str:
        return f"DeterministicProvider(dim={self.dim})"


class FileProvider(EmbeddingProvider):
    """Vectors from a lookup table; contextual keys win over static ones.

    ``missing`` selects what happens when neither key exists: ``"error"``
    raises :class:`TokenLookupError`, ``"zero"`` returns a zero vector and
    ``"fallback"`` uses the hashed vector of the token.
    """

    kind = "file"

    def __init__(self, table: Mapping[str, np.ndarray], dim: int, missing: str = "fallback"):
        if missing not in MISSING_POLICIES:
            raise ValueError(f"missing-token policy must be one of {MISSING_POLICIES}, got {missing!r}")
        for key, vec in table.items():
            if len(vec) != dim:
                raise DimensionError(f"vector for {key!r} has dimension {len(vec)}, expected {dim}")
        self.table = dict(table)
        self.dim = dim
        self.missing = missing

    @classmethod
    def from_file(cls, path: str | Path, missing: str = "fallback") -> "FileProvider":
        dim, table = load_embedding_file(path)
        return cls(table, dim, missing)

    def lookup(self, doc_id: str, sentence_index: int, token_index: int, token: str) -> np.ndarray:
        vec = self.table.get(f"{doc_id}:{sentence_index}:{token_index}")
        if vec is None:
            vec = self.table.get(token)
        if vec is not None:
            return vec
        if self.missing == "error":
            raise TokenLookupError(token, doc_id, sentence_index, token_index)
        if self.missing == "zero":
            return np.zeros(self.dim)
        return hashed_vector(token, self.dim)

    def token_embeddings(self, doc_id: str, sentence: Sentence) -> np.ndarray:
        if not sentence.tokens:
            raise ValueError("sentence has no tokens")
        return np.stack(
            [self.lookup(doc_id, sentence.index, j, tok) for j, tok in enumerate(sentence.tokens)]
        )

    def __repr__(self) -> str:
        return f"FileProvider(entries={len(self.table)}, dim={self.dim}, missing={self.missing!r})"


def token_embeddings(provider: EmbeddingProvider, doc_id: str, sentence: Sentence) -> np.ndarray:
    return provider.token_embeddings(doc_id, sentence)


def sentence_embedding(token_vectors: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    """Component-wise mean of the token vectors.

    Each column is summed with ``math.fsum`` so the result is exactly
    independent of token order; the final clamp only removes the last-bit
    rounding of the division.
    """
    if len(token_vectors) == 0:
        raise ValueError("cannot average an empty list of vectors")
    dims = {len(v) for v in token_vectors}
    if len(dims) != 1:
        raise DimensionError(f"mixed vector dimensions: {sorted(dims)}")
    vecs = np.asarray(token_vectors, dtype=np.float64)
    m = vecs.shape[0]
    mean = np.array([math.fsum(col) / m for col in vecs.T])
    return np.clip(mean, vecs.min(axis=0), vecs.max(axis=0))


def embed_document(provider: EmbeddingProvider, doc: Document) -> np.ndarray:
    """n x d matrix; row i is the averaged embedding of sentence i."""
    if len(doc) == 0:
        raise ValueError("document has no sentences")
    return np.stack([sentence_embedding(provider.token_embeddings(doc.id, s)) for s in doc.sentences])


def load_embedding_file(path: str | Path) -> tuple[int, dict[str, np.ndarray]]:
    """Read the ``dim<TAB>d`` / ``key<TAB>v1 v2 ...`` TSV format.

    Later duplicates overwrite earlier ones. Blank lines are skipped.
    """
    with open(path, encoding="utf-8") as fh:
        return parse_embedding_lines(fh)


def parse_embedding_lines(lines: Iterable[str]) -> tuple[int, dict[str, np.ndarray]]:
    dim = None
    table: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if dim is None:
            head = line.split("\t")
            if len(head) != 2 or head[0] != "dim":
                raise EmbeddingFileError("expected header 'dim<TAB><d>'", lineno)
            try:
                dim = int(head[1])
            except ValueError:
                raise EmbeddingFileError(f"bad dimension {head[1]!r}", lineno) from None
            if dim < 1:
                raise EmbeddingFileError(f"dimension must be >= 1, got {dim}", lineno)
            continue
        if not line.strip():
            continue
        key, sep, values = line.partition("\t")
        if not sep or not key:
            raise EmbeddingFileError("expected '<key><TAB><values>'", lineno)
        try:
            vec = np.array([float(v) for v in values.split()], dtype=np.float64)
        except ValueError as exc:
            raise EmbeddingFileError(str(exc), lineno) from None
        if vec.shape[0] != dim:
            raise EmbeddingFileError(f"expected {dim} values, got {vec.shape[0]}", lineno)
        if not np.all(np.isfinite(vec)):
            raise EmbeddingFileError("non-finite value", lineno)
        table[key] = vec
    if dim is None:
        raise EmbeddingFileError("empty embedding file", 1)
    return dim, table


def format_embedding_lines(dim: int, rows: Iterable[tuple[str, Sequence[float]]]) -> list[str]:
    lines = [f"dim\t{dim}"]
    for key, vec in rows:
        if len(vec) != dim:
            raise DimensionError(f"row {key!r} has dimension {len(vec)}, expected {dim}")
        lines.append(key + "\t" + " ".join(repr(float(v)) for v in vec))
    return lines


def write_embedding_file(path: str | Path, dim: int, rows: Iterable[tuple[str, Sequence[float]]]) -> None:
    Path(path).write_text("\n".join(format_embedding_lines(dim, rows)) + "\n", encoding="utf-8")
