"""Tokenizer and the trainable siamese text encoder.

The encoder is a small bag-of-words model: token embeddings are mean
pooled and optionally passed through a single linear layer. It stands
in for a large pretrained sentence encoder behind the same interface,
so a stronger encoder can be substituted without touching the rest of
the pipeline. Mean pooling is permutation-invariant over token order,
a known expressiveness limit of this stand-in.

All parameters are 64-bit floats and gradients are exact analytic
expressions, which keeps finite-difference checks tight.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .container import read_container, write_container
from .errors import DataError, EmptyInputError, ShapeMismatchError
from .textutil import (
    CLOSE_MARKER,
    DEFAULT_SEPARATOR,
    OPEN_MARKER,
    UNK_TOKEN,
    word_tokens,
)

logger = logging.getLogger(__name__)

RESERVED_TOKENS = (UNK_TOKEN, OPEN_MARKER, CLOSE_MARKER, DEFAULT_SEPARATOR)

CHECKPOINT_FORMAT = "glosswsd-encoder"


class Vocabulary:
    """Dense token-to-id map with fixed reserved entries."""

    def __init__(self, tokens: Sequence[str]):
        self.tokens = list(tokens)
        self.token_to_id = {tok: i for i, tok in enumerate(self.tokens)}
        if len(self.token_to_id) != len(self.tokens):
            raise ValueError("duplicate tokens in vocabulary")
        for reserved in RESERVED_TOKENS:
            if reserved not in self.token_to_id:
                raise ValueError(f"reserved token {reserved!r} missing from vocabulary")
        self.unk_id = self.token_to_id[UNK_TOKEN]

    @classmethod
    def from_texts(cls, texts: Iterable[Sequence[str]], min_count: int = 1) -> "Vocabulary":
        """Vocabulary over token sequences, reserved tokens first,
        remaining tokens in first-seen order."""
        counts: dict[str, int] = {}
        for text in texts:
            for token in text:
                counts[token] = counts.get(token, 0) + 1
        tokens = list(RESERVED_TOKENS)
        reserved = set(RESERVED_TOKENS)
        for token, count in counts.items():
            if count >= min_count and token not in reserved:
                tokens.append(token)
        return cls(tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def id_of(self, token: str) -> int:
        return self.token_to_id.get(token, self.unk_id)


@dataclass
class EncoderGradients:
    """Gradients from one backward pass; untouched embedding rows are
    implicitly zero and simply absent from ``rows``."""

    rows: dict[int, np.ndarray]
    projection: np.ndarray | None = None
    bias: np.ndarray | None = None


class EncoderModel:
    """Mean-pooling embedding encoder with an optional linear layer."""

    def __init__(
        self,
        vocab: Vocabulary,
        embeddings: np.ndarray,
        projection: np.ndarray | None = None,
        bias: np.ndarray | None = None,
        seed: int = 0,
    ):
        if embeddings.shape[0] != len(vocab):
            raise ShapeMismatchError("embedding rows do not match vocabulary size")
        self.vocab = vocab
        self.embeddings = np.asarray(embeddings, dtype=np.float64)
        self.projection = None if projection is None else np.asarray(projection, dtype=np.float64)
        self.bias = None if bias is None else np.asarray(bias, dtype=np.float64)
        self.seed = seed
        self.dim = self.embeddings.shape[1]
        if self.dim < 2:
            raise ValueError("embedding dimension must be >= 2")

    @classmethod
    def create(
        cls, vocab: Vocabulary, dim: int = 64, projection: bool = False, seed: int = 0
    ) -> "EncoderModel":
        """Fresh model with uniform init in [-1/sqrt(dim), +1/sqrt(dim)]."""
        rng = np.random.default_rng(seed)
        scale = 1.0 / np.sqrt(dim)
        embeddings = rng.uniform(-scale, scale, size=(len(vocab), dim))
        w = b = None
        if projection:
            w = rng.uniform(-scale, scale, size=(dim, dim))
            b = np.zeros(dim)
        return cls(vocab, embeddings, w, b, seed=seed)

    # -- text -> ids ----------------------------------------------------

    def tokenize(self, text) -> list[int]:
        """Map a raw string or a pre-tokenized sequence to token ids.

        Known tokens (markers and separators included) pass through as
        single ids; anything else is lowercased, split on whitespace and
        punctuation, and unknown words map to the unk id.
        """
        pieces = text.split() if isinstance(text, str) else text
        ids: list[int] = []
        for piece in pieces:
            hit = self.vocab.token_to_id.get(piece)
            if hit is not None:
                ids.append(hit)
            else:
                ids.extend(self.vocab.id_of(w) for w in word_tokens(piece))
        return ids

    # -- forward / backward ---------------------------------------------

    def encode(self, ids: Sequence[int]) -> np.ndarray:
        """Pooled embedding: mean of token rows, then the linear layer
        when present. Pure function of (model, ids)."""
        if len(ids) == 0:
            raise EmptyInputError("cannot encode an empty id sequence")
        pooled = self.embeddings[np.asarray(ids, dtype=np.intp)].mean(axis=0)
        if self.projection is not None:
            return self.projection @ pooled + self.bias
        return pooled

    def encode_backward(self, ids: Sequence[int], grad: np.ndarray) -> EncoderGradients:
        """Parameter gradients for an upstream gradient w.r.t. the
        pooled output, for the same ids as the forward pass."""
        if len(ids) == 0:
            raise EmptyInputError("cannot backprop through an empty id sequence")
        grad = np.asarray(grad, dtype=np.float64)
        if grad.shape != (self.dim,):
            raise ShapeMismatchError(
                f"upstream gradient shape {grad.shape}, expected ({self.dim},)"
            )
        index = np.asarray(ids, dtype=np.intp)
        if self.projection is not None:
            pooled = self.embeddings[index].mean(axis=0)
            d_projection = np.outer(grad, pooled)
            d_bias = grad.copy()
            d_pooled = self.projection.T @ grad
        else:
            d_projection = d_bias = None
            d_pooled = grad
        rows: dict[int, np.ndarray] = {}
        unique, counts = np.unique(index, return_counts=True)
        for row, count in zip(unique, counts):
            rows[int(row)] = d_pooled * (count / len(ids))
        return EncoderGradients(rows, d_projection, d_bias)

    # -- persistence ----------------------------------------------------

    def parameters(self) -> list[tuple[str, np.ndarray]]:
        params = [("embeddings", self.embeddings)]
        if self.projection is not None:
            params.append(("projection", self.projection))
            params.append(("bias", self.bias))
        return params

    def fingerprint(self) -> str:
        """Stable hash over structure, vocabulary, and parameter bytes."""
        digest = hashlib.sha256()
        meta = {
            "dim": self.dim,
            "projection": self.projection is not None,
            "vocab": self.vocab.tokens,
        }
        digest.update(json.dumps(meta, sort_keys=True).encode("utf-8"))
        for _, array in self.parameters():
            digest.update(np.ascontiguousarray(array, dtype="<f8").tobytes())
        return digest.hexdigest()

    def copy(self) -> "EncoderModel":
        return EncoderModel(
            self.vocab,
            self.embeddings.copy(),
            None if self.projection is None else self.projection.copy(),
            None if self.bias is None else self.bias.copy(),
            seed=self.seed,
        )

    def save(self, path) -> None:
        header = {
            "format": CHECKPOINT_FORMAT,
            "version": 1,
            "dim": self.dim,
            "projection": self.projection is not None,
            "seed": self.seed,
            "vocab": self.vocab.tokens,
            "fingerprint": self.fingerprint(),
        }
        write_container(path, header, self.parameters())

    @classmethod
    def load(cls, path) -> "EncoderModel":
        header, arrays = read_container(path)
        if header.get("format") != CHECKPOINT_FORMAT:
            raise DataError(f"{path}: not an encoder checkpoint")
        model = cls(
            Vocabulary(header["vocab"]),
            arrays["embeddings"],
            arrays.get("projection"),
            arrays.get("bias"),
            seed=header.get("seed", 0),
        )
        if model.fingerprint() != header.get("fingerprint"):
            raise DataError(f"{path}: checkpoint fingerprint mismatch")
        return model
