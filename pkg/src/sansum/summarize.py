"""Sentence ranking (TF-IDF and embedding clusters) and summary assembly."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .cluster import DEFAULT_K_MAX, DEFAULT_RESTARTS, ElbowCurve, distance, elbow_select
from .embeddings import EmbeddingProvider, embed_document
from .linalg_reduce import default_components, pca_fit, pca_transform
from .text_prep import DANDA, Document

DEFAULT_RATIO = 0.2
# scores equal to this many decimals are ties; float noise must not break
# the earlier-sentence-first rule
TIE_DECIMALS = 12


@dataclass(frozen=True)
class TfIdfTable:
    n_sentences: int
    term_freq: dict[tuple[int, str], int]
    sent_freq: dict[str, int]

    @classmethod
    def from_document(cls, doc: Document) -> "TfIdfTable":
        term_freq: dict[tuple[int, str], int] = {}
        sent_freq: Counter = Counter()
        for s in doc.sentences:
            counts = Counter(s.tokens)
            for tok, c in counts.items():
                term_freq[(s.index, tok)] = c
            sent_freq.update(counts.keys())
        return cls(len(doc), term_freq, dict(sent_freq))

    def idf(self, token: str, log: Callable[[float], float] = math.log) -> float:
        return log(self.n_sentences / self.sent_freq[token])


@dataclass(frozen=True)
class RankedSentence:
    sentence_index: int
    score: float | None = None
    distance: float | None = None
    cluster: int | None = None


@dataclass(frozen=True)
class Summary:
    doc_id: str
    selected: tuple[int, ...]
    text: str
    method: str = ""
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "method": self.method,
            "selected": list(self.selected),
            "summary": self.text,
            "params": self.params,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)


def tfidf_score(doc: Document, log: Callable[[float], float] = math.log) -> list[RankedSentence]:
    """Rank sentences by mean TF-IDF over their token occurrences.

    TF is the raw in-sentence count and IDF is ``log(N / sentences containing w)``
    over the sentences of this one document. Score of S is
    ``sum(TF(w,S) * IDF(w) for distinct w in S) / |S|``. Highest first, ties
    to the earlier sentence.
    """
    if len(doc) == 0:
        raise ValueError("document has no sentences")
    table = TfIdfTable.from_document(doc)
    idf = {tok: table.idf(tok, log) for tok in table.sent_freq}
    ranked = []
    for s in doc.sentences:
        counts = Counter(s.tokens)
        total = math.fsum(c * idf[tok] for tok, c in counts.items())
        ranked.append(RankedSentence(s.index, score=total / len(s.tokens)))
    ranked.sort(key=lambda r: (-round(r.score, TIE_DECIMALS), r.sentence_index))
    return ranked


@dataclass(frozen=True)
class NeuralRanking:
    ranked: list[RankedSentence]
    elbow: ElbowCurve | None
    pca_components: int | None


def neural_rank_detail(
    doc: Document,
    provider: EmbeddingProvider,
    pca_dim: int | None = None,
    use_pca: bool = True,
    k_max: int = DEFAULT_K_MAX,
    metric: str = "cosine",
    seed: int = 42,
    restarts: int = DEFAULT_RESTARTS,
) -> NeuralRanking:
    """Like :func:`neural_rank` but also returns the elbow curve and PCA width."""
    n = len(doc)
    if n == 0:
        raise ValueError("document has no sentences")
    if n == 1:
        return NeuralRanking([RankedSentence(0, distance=0.0, cluster=0)], None, None)

    E = embed_document(provider, doc)
    features = E
    q = None
    if use_pca:
        q = pca_dim if pca_dim is not None else default_components(n, E.shape[1])
        features = pca_transform(pca_fit(E, q), E)
    curve = elbow_select(features, k_max=k_max, seed=seed, restarts=restarts)
    model = curve.model_for(curve.chosen_k)

    ranked = []
    for i in range(n):
        c = int(model.assignments[i])
        # centroid in embedding space: PCA centering would otherwise put a
        # one-cluster centroid at the origin, where cosine is undefined
        centroid = E[model.assignments == c].mean(axis=0)
        ranked.append(RankedSentence(i, distance=distance(E[i], centroid, metric), cluster=c))
    ranked.sort(key=lambda r: (round(r.distance, TIE_DECIMALS), r.sentence_index))
    return NeuralRanking(ranked, curve, q)


def neural_rank(
    doc: Document,
    provider: EmbeddingProvider,
    pca_dim: int | None = None,
    use_pca: bool = True,
    k_max: int = DEFAULT_K_MAX,
    metric: str = "cosine",
    seed: int = 42,
    restarts: int = DEFAULT_RESTARTS,
) -> list[RankedSentence]:
    """Rank sentences by closeness to the centroid of their k-means cluster.

    Sentence embeddings are optionally PCA-reduced (``pca_dim`` defaults to
    ``min(64, n-1, d)``), clustered with k chosen at the elbow, and sorted by
    ``metric`` distance between each sentence embedding and the mean
    embedding of its cluster. Nearest first, ties to the earlier sentence.
    """
    return neural_rank_detail(doc, provider, pca_dim, use_pca, k_max, metric, seed, restarts).ranked


def summary_length(n: int, k: int | None = None, ratio: float | None = None) -> int:
    if k is not None and ratio is not None:
        raise ValueError("give either k or ratio, not both")
    if k is not None:
        if not 1 <= k <= n:
            raise ValueError(f"k must lie in [1, {n}], got {k}")
        return k
    if ratio is None:
        ratio = DEFAULT_RATIO
    if not 0 < ratio <= 1:
        raise ValueError(f"ratio must lie in (0, 1], got {ratio}")
    return max(1, math.ceil(ratio * n))


def join_sentences(texts: Sequence[str]) -> str:
    return " ".join(t + DANDA for t in texts)


def select_and_order(
    ranked: Sequence[RankedSentence],
    doc: Document,
    k: int | None = None,
    ratio: float | None = None,
    method: str = "",
    params: dict | None = None,
) -> Summary:
    """Keep the top-m ranked sentences and put them back in document order."""
    m = summary_length(len(doc), k, ratio)
    selected = tuple(sorted(r.sentence_index for r in ranked[:m]))
    text = join_sentences([doc.sentences[i].text for i in selected])
    return Summary(doc.id, selected, text, method, dict(params or {}))


def summarize(
    doc: Document,
    method: str = "tfidf",
    provider: EmbeddingProvider | None = None,
    k: int | None = None,
    ratio: float | None = None,
    **neural_opts,
) -> Summary:
    """One-call pipeline: rank with ``method`` then select and reorder."""
    if method == "tfidf":
        ranked = tfidf_score(doc)
    elif method == "neural":
        if provider is None:
            raise ValueError("the neural method needs an embedding provider")
        ranked = neural_rank(doc, provider, **neural_opts)
    else:
        raise ValueError(f"unknown method {method!r}")
    return select_and_order(ranked, doc, k=k, ratio=ratio, method=method)

