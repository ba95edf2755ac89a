"""Shared text primitives: marker tokens and word-level tokenization.

Weakly supervised texts are plain sequences of string tokens. Contexts
carry a pair of marker tokens around the target span; gloss texts are
the sense lemma, a separator token, then the definition.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

UNK_TOKEN = "«unk»"
OPEN_MARKER = "«t»"
CLOSE_MARKER = "«/t»"
QUOTE_MARKER = '"'
DEFAULT_SEPARATOR = ";"

MARKER_STYLES = ("token", "quote")

_WORD_RE = re.compile(r"[\w']+|[^\w\s]")


def word_tokens(text: str) -> list[str]:
    """Lowercase ``text`` and split it into word and punctuation tokens.

    Words keep internal apostrophes and underscores; every other
    non-space character becomes a single-character token.
    """
    return _WORD_RE.findall(text.lower())


def markers_for(style: str) -> tuple[str, str]:
    """Return the (open, close) marker tokens for a marker style.

    ``token`` uses the dedicated vocabulary items; ``quote`` emits a
    literal double quote on both sides, mirroring the quoting
    convention of earlier gloss-pair systems.
    """
    if style == "token":
        return OPEN_MARKER, CLOSE_MARKER
    if style == "quote":
        return QUOTE_MARKER, QUOTE_MARKER
    raise ValueError(f"unknown marker style {style!r}, expected one of {MARKER_STYLES}")


def render_text(tokens: Iterable[str]) -> str:
    return " ".join(tokens)


def split_text(text: str) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(text.split(" "))


def count_markers(tokens: Sequence[str], style: str = "token") -> tuple[int, int]:
    """Count (open, close) marker occurrences; equal halves for quote style."""
    open_m, close_m = markers_for(style)
    if open_m == close_m:
        n = sum(1 for t in tokens if t == open_m)
        return n - n // 2, n // 2
    return (
        sum(1 for t in tokens if t == open_m),
        sum(1 for t in tokens if t == close_m),
    )
