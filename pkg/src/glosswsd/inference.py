"""Nearest-gloss disambiguation.

A gloss index holds one pooled embedding per candidate sense of every
(lemma, POS) key, built with exactly the weak supervision used in
training. Prediction embeds the marked-up context and picks the
candidate gloss with the highest cosine similarity; candidate sets are
small (tens at most), so scoring is an exact brute-force scan.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .container import read_container, write_container
from .corpus import AnnotatedCorpus, COARSE_POS, Sentence
from .datasets import weak_supervise_context, weak_supervise_gloss
from .encoder import EncoderModel
from .errors import DataError
from .lexicon import Lexicon, POS_FILES, SynsetId, coarse_pos, normalize_lemma
from .textutil import DEFAULT_SEPARATOR

logger = logging.getLogger(__name__)

INDEX_FORMAT = "glosswsd-index"


@dataclass(frozen=True)
class Prediction:
    instance_id: str
    synset: SynsetId | None
    candidates: tuple[SynsetId, ...] = ()
    scores: tuple[float, ...] = ()
    backoff: bool = False


class GlossIndex:
    """(lemma, POS) -> candidate sense embeddings in canonical order."""

    def __init__(self, entries, fingerprint: str, dim: int):
        self.entries: dict[tuple[str, str], list[tuple[SynsetId, np.ndarray]]] = entries
        self.fingerprint = fingerprint
        self.dim = dim

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, lemma: str, pos: str):
        return self.entries.get((normalize_lemma(lemma), coarse_pos(pos)), [])

    def save(self, path) -> None:
        keys = []
        vectors = []
        for (lemma, pos), candidates in self.entries.items():
            keys.append(
                {"lemma": lemma, "pos": pos, "synsets": [str(sid) for sid, _ in candidates]}
            )
            vectors.extend(vec for _, vec in candidates)
        matrix = np.stack(vectors) if vectors else np.zeros((0, self.dim))
        header = {
            "format": INDEX_FORMAT,
            "version": 1,
            "dim": self.dim,
            "fingerprint": self.fingerprint,
            "key_count": len(keys),
            "keys": keys,
        }
        write_container(path, header, [("embeddings", matrix)])

    @classmethod
    def load(cls, path) -> "GlossIndex":
        header, arrays = read_container(path)
        if header.get("format") != INDEX_FORMAT:
            raise DataError(f"{path}: not a gloss index")
        matrix = arrays["embeddings"]
        entries: dict[tuple[str, str], list[tuple[SynsetId, np.ndarray]]] = {}
        row = 0
        for key in header["keys"]:
            candidates = []
            for sid in key["synsets"]:
                candidates.append((SynsetId.parse(sid), matrix[row]))
                row += 1
            entries[(key["lemma"], key["pos"])] = candidates
        return cls(entries, header["fingerprint"], header["dim"])


def build_index(
    model: EncoderModel,
    lex: Lexicon,
    keys: Iterable[tuple[str, str]] | None = None,
    separator: str = DEFAULT_SEPARATOR,
) -> GlossIndex:
    """Embed every candidate gloss under each (lemma, POS) key.

    ``keys`` restricts the build to the given keys; by default every
    key in the lexicon is indexed. Gloss texts are weak-supervised with
    the key's lemma, exactly as during training.
    """
    entries: dict[tuple[str, str], list[tuple[SynsetId, np.ndarray]]] = {}
    for lemma, pos in keys if keys is not None else lex.senses:
        key = (normalize_lemma(lemma), coarse_pos(pos))
        if key in entries:
            continue
        candidates = []
        for synset in lex.candidates(*key):
            text = weak_supervise_gloss(key[0], synset.gloss, separator)
            candidates.append((synset.id, model.encode(model.tokenize(text))))
        if candidates:
            entries[key] = candidates
    return GlossIndex(entries, model.fingerprint(), model.dim)


def _argmax_by_cosine(u: np.ndarray, candidates) -> tuple[int, list[float]]:
    """Index of the best-scoring candidate; ties go to the lower rank."""
    norm_u = np.linalg.norm(u)
    best = 0
    scores = []
    for i, (_, vec) in enumerate(candidates):
        denom = norm_u * np.linalg.norm(vec)
        score = float(u @ vec / denom) if denom > 0 else 0.0
        scores.append(score)
        if score > scores[best]:
            best = i
    return best, scores


def predict(
    index: GlossIndex,
    model: EncoderModel,
    sentence: Sentence,
    target_index: int,
    lemma: str,
    pos: str,
    pos_filter: bool = True,
    marker_style: str = "token",
) -> Prediction:
    """Disambiguate one tagged instance against the gloss index.

    With an empty candidate set the prediction backs off to the lemma's
    rank-1 sense under any POS (scanning n, v, a, r) and sets the
    backoff flag; if the lemma is entirely unknown, the synset is None.
    """
    if index.fingerprint != model.fingerprint():
        raise DataError("gloss index was built by a different model")
    iid = sentence.tokens[target_index].instance_id or ""
    lemma = normalize_lemma(lemma)
    if pos_filter:
        candidates = list(index.lookup(lemma, pos))
    else:
        candidates = [c for p in POS_FILES for c in index.lookup(lemma, p)]
    if not candidates:
        for fallback_pos in POS_FILES:
            entry = index.lookup(lemma, fallback_pos)
            if entry:
                return Prediction(iid, entry[0][0], backoff=True)
        return Prediction(iid, None, backoff=True)
    u = model.encode(
        model.tokenize(weak_supervise_context(sentence, target_index, marker_style))
    )
    best, scores = _argmax_by_cosine(u, candidates)
    return Prediction(
        iid,
        candidates[best][0],
        tuple(sid for sid, _ in candidates),
        tuple(scores),
        False,
    )


def _instance_keys(corpus: AnnotatedCorpus, lex: Lexicon):
    """Index keys needed to disambiguate a corpus, backoff POS included."""
    keys: dict[tuple[str, str], None] = {}
    for sentence, i, _ in corpus.instances():
        token = sentence.tokens[i]
        lemma = normalize_lemma(token.lemma)
        pos = COARSE_POS.get(token.pos)
        for p in POS_FILES:
            if (lemma, p) in lex.senses:
                keys.setdefault((lemma, p))
        if pos is not None:
            keys.setdefault((lemma, pos))
    return list(keys)


def predict_corpus(
    model: EncoderModel,
    lex: Lexicon,
    corpus: AnnotatedCorpus,
    pos_filter: bool = True,
    marker_style: str = "token",
    separator: str = DEFAULT_SEPARATOR,
    index: GlossIndex | None = None,
) -> list[Prediction]:
    """Predictions for every tagged instance of a corpus, corpus order."""
    if index is None:
        index = build_index(model, lex, keys=_instance_keys(corpus, lex), separator=separator)
    out = []
    for sentence, i, _ in corpus.instances():
        token = sentence.tokens[i]
        pos = COARSE_POS.get(token.pos, "")
        out.append(
            predict(index, model, sentence, i, token.lemma, pos, pos_filter, marker_style)
        )
    return out


# -- most-frequent-sense baseline ----------------------------------------


def sense_frequencies(
    corpus: AnnotatedCorpus, lex: Lexicon
) -> dict[tuple[str, str], dict[SynsetId, int]]:
    """Gold sense counts per (lemma, POS) from a tagged training corpus."""
    freqs: dict[tuple[str, str], dict[SynsetId, int]] = {}
    for sentence, i, iid in corpus.instances():
        token = sentence.tokens[i]
        pos = COARSE_POS.get(token.pos)
        if pos is None:
            continue
        key = (normalize_lemma(token.lemma), pos)
        bucket = freqs.setdefault(key, {})
        for raw in corpus.gold.get(iid, ()):
            sid = lex.sense_keys.get(raw)
            if sid is not None:
                bucket[sid] = bucket.get(sid, 0) + 1
    return freqs


def mfs_predict(
    freqs: dict[tuple[str, str], dict[SynsetId, int]] | None,
    lex: Lexicon,
    lemma: str,
    pos: str,
    instance_id: str = "",
) -> Prediction:
    """Most frequent training sense of (lemma, POS).

    Count ties break toward the lower canonical rank, so unseen lemmas
    (all counts zero) fall back to the first sense; without a frequency
    table this is the plain first-sense baseline. Lemmas absent from
    the lexicon back off to the first sense under any POS, else abstain.
    """
    lemma = normalize_lemma(lemma)
    pos = coarse_pos(pos)
    candidates = lex.candidates(lemma, pos)
    if not candidates:
        fallback = lex.first_sense(lemma)
        return Prediction(instance_id, fallback, backoff=True)
    counts = (freqs or {}).get((lemma, pos), {})
    best = max(candidates, key=lambda s: counts.get(s.id, 0))
    ranked = [s.id for s in candidates]
    scores = tuple(float(counts.get(sid, 0)) for sid in ranked)
    return Prediction(instance_id, best.id, tuple(ranked), scores, False)


def mfs_predict_corpus(
    freqs: dict | None, lex: Lexicon, corpus: AnnotatedCorpus
) -> list[Prediction]:
    out = []
    for sentence, i, iid in corpus.instances():
        token = sentence.tokens[i]
        pos = COARSE_POS.get(token.pos, "")
        out.append(mfs_predict(freqs, lex, token.lemma, pos, iid))
    return out
