"""Exception types shared across the package."""


class SansumError(Exception):
    """Base class for every error raised by sansum."""


class EmptyDocumentError(SansumError, ValueError):
    """No sentence survived cleaning and segmentation."""


class DimensionError(SansumError, ValueError):
    """Vectors or matrices disagree on dimension."""


class DegenerateVectorError(SansumError, ValueError):
    """A zero-norm vector reached an operation that needs a direction."""


class InsufficientDataError(SansumError, ValueError):
    """Too few rows for a fit (PCA, elbow selection)."""


class TokenLookupError(SansumError, KeyError):
    """An embedding file has no vector for a token and the policy is ``error``."""

    def __init__(self, token: str, doc_id: str, sentence_index: int, token_index: int):
        self.token = token
        self.doc_id = doc_id
        self.sentence_index = sentence_index
        self.token_index = token_index
        super().__init__(
            f"no embedding for token {token!r} at {doc_id}:{sentence_index}:{token_index}"
        )

    def __str__(self) -> str:
        return self.args[0]


class EmbeddingFileError(SansumError, ValueError):
    """Malformed embedding / model TSV file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
