"""ROUGE-1/2/L and BERTScore for candidate vs. reference summaries."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingProvider
from .errors import DegenerateVectorError, SansumError
from .text_prep import Document, Sentence, ngrams, prepare


def f_measure(precision: float, recall: float) -> float:
    if precision + recall <= 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class RougeResult:
    variant: str
    recall: float
    precision: float
    f1: float

    def to_dict(self) -> dict:
        return {"r": self.recall, "p": self.precision, "f": self.f1}


@dataclass(frozen=True)
class BertScoreResult:
    recall: float
    precision: float
    f1: float

    def to_dict(self) -> dict:
        return {"r": self.recall, "p": self.precision, "f": self.f1}


def ngram_matches(candidate: Sequence[str], reference: Sequence[str], n: int) -> int:
    """Clipped overlap: sum over shared n-grams of min(candidate count, reference count)."""
    cand, ref = ngrams(candidate, n), ngrams(reference, n)
    return sum((cand & ref).values())


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int = 1) -> RougeResult:
    cand_total = max(0, len(candidate) - n + 1)
    ref_total = max(0, len(reference) - n + 1)
    match = ngram_matches(candidate, reference, n)
    recall = match / ref_total if ref_total else 0.0
    precision = match / cand_total if cand_total else 0.0
    return RougeResult(f"rouge{n}", recall, precision, f_measure(precision, recall))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeResult:
    if not candidate or not reference:
        return RougeResult("rougeL", 0.0, 0.0, 0.0)
    lcs = lcs_length(candidate, reference)
    recall, precision = lcs / len(reference), lcs / len(candidate)
    return RougeResult("rougeL", recall, precision, f_measure(precision, recall))


def _unit_rows(M: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(M, axis=1)
    if np.any(norms == 0):
        raise DegenerateVectorError("zero-norm token embedding in BERTScore")
    return M / norms[:, None]


def greedy_match(reference_vecs: np.ndarray, candidate_vecs: np.ndarray) -> BertScoreResult:
    """BERTScore from raw token vectors (rows), normalized here."""
    ref = _unit_rows(np.asarray(reference_vecs, dtype=np.float64))
    cand = _unit_rows(np.asarray(candidate_vecs, dtype=np.float64))
    sim = ref @ cand.T  # (|ref|, |cand|)
    recall = float(sim.max(axis=1).mean())
    precision = float(sim.max(axis=0).mean())
    return BertScoreResult(recall, precision, f_measure(precision, recall))


def _stack_tokens(provider: EmbeddingProvider, doc_id: str, sentences: Sequence[Sentence]) -> np.ndarray:
    blocks = [provider.token_embeddings(doc_id, s) for s in sentences if s.tokens]
    if not blocks:
        raise ValueError("summary has no tokens")
    return np.vstack(blocks)


def bert_score(
    candidate: Sequence[Sentence],
    reference: Sequence[Sentence],
    provider: EmbeddingProvider,
    candidate_id: str = "candidate",
    reference_id: str = "reference",
) -> BertScoreResult:
    """Greedy cosine matching of token embeddings.

    Recall averages, over reference tokens, the best similarity to any
    candidate token; precision does the same from the candidate side.
    The ids are used for contextual lookups in file providers.
    """
    ref = _stack_tokens(provider, reference_id, reference)
    cand = _stack_tokens(provider, candidate_id, candidate)
    return greedy_match(ref, cand)


@dataclass
class ScoreReport:
    rouge1: RougeResult | None = None
    rouge2: RougeResult | None = None
    rougeL: RougeResult | None = None
    bert_score: BertScoreResult | None = None
    errors: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            name: (getattr(self, name).to_dict() if getattr(self, name) is not None else None)
            for name in ("rouge1", "rouge2", "rougeL", "bert_score")
        }
        if self.errors:
            out["errors"] = dict(self.errors)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _as_document(obj, doc_id: str) -> Document:
    if isinstance(obj, Document):
        return obj
    text = getattr(obj, "text", obj)  # Summary or plain string
    return prepare(text, doc_id)


def evaluate(candidate, reference, provider: EmbeddingProvider | None = None) -> ScoreReport:
    """Score ``candidate`` against ``reference`` with every metric.

    Both sides may be a Document, a Summary or raw text; text is cleaned and
    segmented the same way as summarizer input. An empty reference raises
    :class:`~sansum.errors.EmptyDocumentError`. Failures inside one metric
    (including an empty candidate) are recorded in ``errors`` and leave the
    other fields intact. BERTScore runs only when ``provider`` is given.
    """
    ref_doc = _as_document(reference, "reference")
    report = ScoreReport()
    try:
        cand_doc = _as_document(candidate, "candidate")
    except SansumError as exc:
        cand_doc = None
        report.errors["candidate"] = str(exc)
    cand_tokens = cand_doc.tokens if cand_doc is not None else []
    ref_tokens = ref_doc.tokens
    report.rouge1 = rouge_n(cand_tokens, ref_tokens, 1)
    report.rouge2 = rouge_n(cand_tokens, ref_tokens, 2)
    report.rougeL = rouge_l(cand_tokens, ref_tokens)
    if provider is not None:
        if cand_doc is None:
            report.errors["bert_score"] = "candidate summary is empty"
        else:
            try:
                report.bert_score = bert_score(
                    cand_doc.sentences, ref_doc.sentences, provider, cand_doc.id, ref_doc.id
                )
            except (SansumError, ValueError) as exc:
                report.errors["bert_score"] = str(exc)
    return report


CSV_FIELDS = ["doc"] + [f"{m}_{s}" for m in ("rouge1", "rouge2", "rougeL", "bert_score") for s in "rpf"]


def report_row(doc: str, report: ScoreReport) -> dict:
    row = {"doc": doc}
    for name, res in report.to_dict().items():
        if name == "errors":
            continue
        for s in "rpf":
            row[f"{name}_{s}"] = "" if res is None else repr(res[s])
    return row


def append_csv(path: str | Path, doc: str, report: ScoreReport) -> None:
    """Append one row to a CSV report, writing the header for a new file."""
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        if new:
            writer.writeheader()
        writer.writerow(report_row(doc, report))
