"""Command-line interface.

Exit codes: 0 success, 2 I/O or unreadable input, 3 empty or degenerate
input, 64 usage error. Machine-readable output goes to stdout (or ``--out``),
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections import Counter
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .cluster import DEFAULT_K_MAX, METRICS
from .embeddings import DEFAULT_DIM, MISSING_POLICIES, DeterministicProvider, EmbeddingProvider, FileProvider
from .errors import (
    DegenerateVectorError,
    EmbeddingFileError,
    EmptyDocumentError,
    InsufficientDataError,
    TokenLookupError,
)
from .metrics import append_csv, evaluate
from .probe import project_token
from .summarize import DEFAULT_RATIO, neural_rank_detail, select_and_order, summary_length, tfidf_score
from .text_prep import Document, Sentence, clean, prepare, segment

EXIT_OK = 0
EXIT_IO = 2
EXIT_EMPTY = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    method: str = "tfidf"
    k: int | None = None
    ratio: float | None = None
    pca_dim: int | None = None
    pca_enabled: bool = True
    k_max: int = DEFAULT_K_MAX
    metric: str = "cosine"
    seed: int = 42
    embeddings_path: str | None = None
    missing_token_policy: str = "fallback"
    dim: int = DEFAULT_DIM

    def validate(self) -> "RunConfig":
        if self.method not in ("tfidf", "neural"):
            raise UsageError(f"method must be tfidf or neural, got {self.method!r}")
        if self.k is not None and self.ratio is not None:
            raise UsageError("--k and --ratio are mutually exclusive")
        if self.k is not None and self.k < 1:
            raise UsageError(f"k must be >= 1, got {self.k}")
        if self.ratio is not None and not 0 < self.ratio <= 1:
            raise UsageError(f"ratio must lie in (0, 1], got {self.ratio}")
        if self.pca_dim is not None and self.pca_dim < 1:
            raise UsageError(f"pca_dim must be >= 1, got {self.pca_dim}")
        if self.k_max < 2:
            raise UsageError(f"k_max must be >= 2, got {self.k_max}")
        if self.metric not in METRICS:
            raise UsageError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.missing_token_policy not in MISSING_POLICIES:
            raise UsageError(f"missing_token_policy must be one of {MISSING_POLICIES}")
        if self.dim < 1:
            raise UsageError(f"dim must be >= 1, got {self.dim}")
        return self


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def _coerce(name: str, raw: str):
    if name in ("k", "pca_dim", "k_max", "seed", "dim"):
        return int(raw)
    if name == "ratio":
        return float(raw)
    if name == "pca_enabled":
        try:
            return _BOOL[raw.lower()]
        except KeyError:
            raise ValueError(f"not a boolean: {raw!r}") from None
    return raw


def read_config_file(path: str | Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().replace("-", "_"), value.strip()
        if not sep or key not in known:
            raise UsageError(f"{path}:{lineno}: unknown or malformed setting {line!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from None
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    """Flags beat the config file, which beats defaults."""
    settings = read_config_file(args.config) if getattr(args, "config", None) else {}
    flag_values = {f.name: getattr(args, f.name, None) for f in fields(RunConfig)}
    # choosing k or ratio on the command line overrides either from the file
    if flag_values.get("k") is not None or flag_values.get("ratio") is not None:
        settings.pop("k", None)
        settings.pop("ratio", None)
    settings.update({key: v for key, v in flag_values.items() if v is not None})
    return RunConfig(**settings).validate()


def make_provider(cfg: RunConfig) -> EmbeddingProvider:
    if cfg.embeddings_path:
        return FileProvider.from_file(cfg.embeddings_path, missing=cfg.missing_token_policy)
    return DeterministicProvider(cfg.dim)


def _warn(msg: str) -> None:
    print(f"sansum: {msg}", file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _files(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir() if p.is_file())


def load_input(path: str | Path) -> tuple[Document, list[tuple[str, int]] | None]:
    """A file gives one Document. A directory gives its files, sorted by name,
    concatenated into one sentence stream plus (doc_id, sentence) provenance."""
    path = Path(path)
    if not path.is_dir():
        return prepare(path.read_bytes(), path.stem), None
    sentences, provenance = [], []
    for f in _files(path):
        try:
            doc = prepare(f.read_bytes(), f.stem)
        except EmptyDocumentError:
            _warn(f"{f.name}: no sentences, skipped")
            continue
        for s in doc.sentences:
            sentences.append(Sentence(len(sentences), s.text, s.tokens))
            provenance.append((doc.id, s.index))
    if not sentences:
        raise EmptyDocumentError(f"no sentences in any file under {path}")
    return Document(path.name, tuple(sentences)), provenance


def load_documents(path: str | Path) -> list[Document]:
    path = Path(path)
    if not path.is_dir():
        return [prepare(path.read_bytes(), path.stem)]
    docs = []
    for f in _files(path):
        try:
            docs.append(prepare(f.read_bytes(), f.stem))
        except EmptyDocumentError:
            _warn(f"{f.name}: no sentences, skipped")
    if not docs:
        raise EmptyDocumentError(f"no sentences in any file under {path}")
    return docs


def cmd_clean(args) -> int:
    text = clean(Path(args.input).read_bytes())
    _emit(text + ("\n" if text else ""), args.output)
    return EXIT_OK


def cmd_segment(args) -> int:
    path = Path(args.input)
    doc = segment(clean(path.read_bytes()), args.id or path.stem)
    _emit(doc.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_summarize(args) -> int:
    cfg = build_config(args)
    doc, provenance = load_input(args.input)
    n = len(doc)
    if cfg.k is not None and cfg.k > n:
        raise UsageError(f"k={cfg.k} exceeds the {n} sentences in the input")
    params = {"k": cfg.k, "ratio": None if cfg.k is not None else (cfg.ratio or DEFAULT_RATIO)}
    params["m"] = summary_length(n, cfg.k, cfg.ratio)
    if cfg.method == "tfidf":
        ranked = tfidf_score(doc)
    else:
        provider = make_provider(cfg)
        result = neural_rank_detail(
            doc,
            provider,
            pca_dim=cfg.pca_dim,
            use_pca=cfg.pca_enabled,
            k_max=cfg.k_max,
            metric=cfg.metric,
            seed=cfg.seed,
        )
        ranked = result.ranked
        params.update(
            provider=provider.kind,
            dim=provider.dim,
            missing_token_policy=cfg.missing_token_policy if cfg.embeddings_path else None,
            pca_enabled=cfg.pca_enabled,
            pca_dim=result.pca_components,
            k_max=cfg.k_max,
            chosen_k=result.elbow.chosen_k if result.elbow else 1,
            metric=cfg.metric,
            seed=cfg.seed,
        )
    summary = select_and_order(ranked, doc, k=cfg.k, ratio=cfg.ratio, method=cfg.method, params=params)
    payload = summary.to_dict()
    if provenance is not None:
        payload["provenance"] = [{"doc_id": provenance[i][0], "sentence": provenance[i][1]} for i in summary.selected]
    _emit(json.dumps(payload, ensure_ascii=False, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = build_config(args)
    candidate = Path(args.candidate).read_bytes().decode("utf-8")
    reference = Path(args.reference).read_bytes().decode("utf-8")
    provider = make_provider(cfg) if (cfg.embeddings_path or args.bert_score) else None
    report = evaluate(candidate, reference, provider)
    for field_name, msg in report.errors.items():
        _warn(f"{field_name}: {msg}")
    _emit(report.to_json() + "\n", args.out)
    if args.csv:
        append_csv(args.csv, Path(args.candidate).stem, report)
    return EXIT_OK


def cmd_embed_inspect(args) -> int:
    cfg = build_config(args)
    docs = load_documents(args.input)
    try:
        proj = project_token(docs, args.token, make_provider(cfg))
    except LookupError as exc:
        if isinstance(exc, TokenLookupError):
            raise
        _warn(str(exc))
        return EXIT_EMPTY
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["doc", "sentence", "token_index", "x", "y", "z"])
    for occ in proj.occurrences:
        writer.writerow([occ.doc_id, occ.sentence_index, occ.token_index, *(repr(c) for c in occ.coords)])
    _warn("explained variance: " + ", ".join(repr(v) for v in proj.explained_variance))
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_corpus_stats(args) -> int:
    directory = Path(args.input_dir)
    if not directory.is_dir():
        raise NotADirectoryError(f"not a directory: {directory}")
    n_docs = n_sent = n_tok = 0
    vocab: Counter = Counter()
    for f in _files(directory):
        try:
            text = f.read_bytes().decode("utf-8")
        except UnicodeDecodeError:
            _warn(f"{f.name}: not valid UTF-8, skipped")
            continue
        n_docs += 1
        try:
            doc = prepare(text, f.stem)
        except EmptyDocumentError:
            continue
        n_sent += len(doc)
        tokens = doc.tokens
        n_tok += len(tokens)
        vocab.update(tokens)
    if n_docs == 0:
        _warn(f"no readable documents in {directory}")
        return EXIT_EMPTY
    print(f"documents: {n_docs}, sentences: {n_sent}, tokens: {n_tok}, unique_tokens: {len(vocab)}")
    return EXIT_OK


def _add_run_flags(p: argparse.ArgumentParser, neural: bool = True) -> None:
    p.add_argument("--config", help="key=value settings file; flags take precedence")
    p.add_argument("--embeddings", dest="embeddings_path", help="embedding TSV file (default: hashed vectors)")
    p.add_argument("--missing-token-policy", choices=MISSING_POLICIES, default=None)
    p.add_argument("--dim", type=int, default=None, help=f"hashed-vector dimension (default {DEFAULT_DIM})")
    if neural:
        p.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sansum", description="Extractive summaries of Devanagari Sanskrit text.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("clean", help="strip non-Devanagari content")
    p.add_argument("input")
    p.add_argument("output", nargs="?")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("segment", help="clean and split into sentences (JSON)")
    p.add_argument("input")
    p.add_argument("--id", help="document id (default: file stem)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("summarize", help="extractive summary (JSON)")
    p.add_argument("input", help="text file, or a directory of them")
    p.add_argument("--method", choices=("tfidf", "neural"), default=None)
    p.add_argument("--k", type=int, default=None, help="number of sentences")
    p.add_argument("--ratio", type=float, default=None, help=f"fraction of sentences (default {DEFAULT_RATIO})")
    p.add_argument("--pca-dim", type=int, default=None)
    p.add_argument("--no-pca", dest="pca_enabled", action="store_const", const=False, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--metric", choices=METRICS, default=None)
    p.add_argument("--out")
    _add_run_flags(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("eval", help="ROUGE / BERTScore of a candidate against a reference")
    p.add_argument("candidate")
    p.add_argument("reference")
    p.add_argument("--bert-score", action="store_true", help="compute BERTScore with hashed vectors when no --embeddings")
    p.add_argument("--csv", help="append a result row to this CSV file")
    p.add_argument("--out")
    _add_run_flags(p, neural=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("embed-inspect", help="3-D PCA of one token's embeddings across sentences (CSV)")
    p.add_argument("input", help="text file, or a directory of them")
    p.add_argument("token")
    p.add_argument("--out")
    _add_run_flags(p, neural=False)
    p.set_defaults(func=cmd_embed_inspect)

    p = sub.add_parser("corpus-stats", help="document / sentence / token counts")
    p.add_argument("input_dir")
    p.set_defaults(func=cmd_corpus_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _warn(str(exc))
        return EXIT_USAGE
    except (UnicodeDecodeError, OSError, EmbeddingFileError) as exc:
        _warn(str(exc))
        return EXIT_IO
    except (EmptyDocumentError, InsufficientDataError, DegenerateVectorError, TokenLookupError) as exc:
        _warn(str(exc))
        return EXIT_EMPTY


if __name__ == "__main__":
    sys.exit(main())
