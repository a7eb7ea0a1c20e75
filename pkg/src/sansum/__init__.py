"""Extractive summarization and summary evaluation for Devanagari Sanskrit text."""

__version__ = "0.1.0"

from .cluster import ClusterModel, ElbowCurve, distance, elbow_select, kmeans
from .embeddings import (
    DeterministicProvider,
    EmbeddingProvider,
    FileProvider,
    embed_document,
    sentence_embedding,
    token_embeddings,
)
from .linalg_reduce import PCAModel, pca_fit, pca_transform
from .metrics import ScoreReport, bert_score, evaluate, rouge_l, rouge_n
from .summarize import (
    RankedSentence,
    Summary,
    neural_rank,
    select_and_order,
    summarize,
    tfidf_score,
)
from .text_prep import Document, Sentence, clean, ngrams, prepare, segment

__all__ = [
    "ClusterModel",
    "DeterministicProvider",
    "Document",
    "ElbowCurve",
    "EmbeddingProvider",
    "FileProvider",
    "PCAModel",
    "RankedSentence",
    "ScoreReport",
    "Sentence",
    "Summary",
    "bert_score",
    "clean",
    "distance",
    "elbow_select",
    "embed_document",
    "evaluate",
    "kmeans",
    "neural_rank",
    "ngrams",
    "pca_fit",
    "pca_transform",
    "prepare",
    "rouge_l",
    "rouge_n",
    "segment",
    "select_and_order",
    "sentence_embedding",
    "summarize",
    "tfidf_score",
    "token_embeddings",
]
