"""Contextual-embedding inspection: one word's vectors across sentences in 3-D."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .embeddings import EmbeddingProvider
from .linalg_reduce import pca_fit, pca_transform
from .text_prep import Document

N_COORDS = 3


@dataclass(frozen=True)
class Occurrence:
    doc_id: str
    sentence_index: int
    token_index: int
    coords: tuple[float, float, float]


@dataclass(frozen=True)
class TokenProjection:
    token: str
    occurrences: list[Occurrence]
    explained_variance: tuple[float, float, float]


def token_vectors(docs: Iterable[Document], token: str, provider: EmbeddingProvider):
    """(doc_id, sentence, position) keys and the matching vectors of every occurrence."""
    keys, vecs = [], []
    for doc in docs:
        for s in doc.sentences:
            positions = [j for j, tok in enumerate(s.tokens) if tok == token]
            if not positions:
                continue
            emb = provider.token_embeddings(doc.id, s)
            for j in positions:
                keys.append((doc.id, s.index, j))
                vecs.append(emb[j])
    return keys, vecs


def project_token(docs: Iterable[Document], token: str, provider: EmbeddingProvider) -> TokenProjection:
    """PCA-project every occurrence of ``token`` to three coordinates.

    With fewer than four occurrences the data spans fewer than three
    directions; missing coordinates and variances are reported as zero.
    Raises ``LookupError`` when the token never occurs.
    """
    keys, vecs = token_vectors(docs, token, provider)
    if not keys:
        raise LookupError(f"token {token!r} does not occur in the input")
    X = np.stack(vecs)
    n, d = X.shape
    coords = np.zeros((n, N_COORDS))
    variance = np.zeros(N_COORDS)
    if n >= 2:
        q = min(N_COORDS, n - 1, d)
        model = pca_fit(X, q)
        coords[:, :q] = pca_transform(model, X)
        variance[:q] = model.explained_variance
    occ = [Occurrence(doc_id, si, tj, tuple(float(c) for c in row)) for (doc_id, si, tj), row in zip(keys, coords)]
    return TokenProjection(token, occ, tuple(float(v) for v in variance))
