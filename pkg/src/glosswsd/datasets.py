"""Weakly supervised training set construction.

Three builders over annotated corpora and a lexicon:

* context-gloss pairs: for an instance whose lemma has n candidate
  senses, the gold gloss forms the positive pair (repeated by the
  oversample ratio) and each other sense's gloss a negative pair;
  optionally all unordered gloss-gloss pairs among the candidates are
  added as negatives to push the sense definitions themselves apart.
* context-hypernym pairs: glosses of the gold synset's immediate
  hypernyms are positives (oversampled); glosses of every non-gold
  candidate's immediate hypernyms are negatives, without deduplication.
* triplets: anchor = context, positive = gold gloss, one triplet per
  non-gold sense; never oversampled.

Contexts carry marker tokens around the target span; gloss texts are
the sense lemma, a separator token, then the definition. Build order is
corpus order, so identical inputs and config produce identical files.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .corpus import AnnotatedCorpus, COARSE_POS, Sentence
from .errors import DataError, NotAnInstanceError
from .lexicon import Lexicon, Synset
from .textutil import (
    DEFAULT_SEPARATOR,
    markers_for,
    render_text,
    split_text,
    word_tokens,
)

logger = logging.getLogger(__name__)

TASK_CONTEXT_GLOSS = "context_gloss"
TASK_CONTEXT_HYPERNYM = "context_hypernym"
TASK_GLOSS_GLOSS = "gloss_gloss"


@dataclass(frozen=True)
class TrainingPair:
    a: tuple[str, ...]
    b: tuple[str, ...]
    y: int
    task: str
    instance_id: str = ""


@dataclass(frozen=True)
class TrainingTriplet:
    anchor: tuple[str, ...]
    positive: tuple[str, ...]
    negative: tuple[str, ...]
    instance_id: str = ""


@dataclass
class TrainingSet:
    kind: str  # "pairs" | "triplets"
    records: list
    provenance: tuple[str, ...] = ()
    config: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def texts(self) -> Iterator[tuple[str, ...]]:
        for record in self.records:
            if self.kind == "pairs":
                yield record.a
                yield record.b
            else:
                yield record.anchor
                yield record.positive
                yield record.negative

    def report(self) -> dict:
        out = {
            "kind": self.kind,
            "rows": len(self.records),
            "provenance": list(self.provenance),
            "config": self.config,
        }
        out.update(self.stats)
        return out


def weak_supervise_context(
    sentence: Sentence, target_index: int, marker_style: str = "token"
) -> list[str]:
    """Lowercased word tokens of the sentence with the target marked.

    Multi-word target surfaces stay inside a single marker pair.
    """
    token = sentence.tokens[target_index]
    if token.instance_id is None:
        raise NotAnInstanceError(
            f"token {target_index} of {sentence.sent_id} is not a tagged instance"
        )
    open_m, close_m = markers_for(marker_style)
    out: list[str] = []
    for i, tok in enumerate(sentence.tokens):
        words = word_tokens(tok.surface)
        if i == target_index:
            out.append(open_m)
            out.extend(words or [tok.surface.lower()])
            out.append(close_m)
        else:
            out.extend(words)
    return out


def weak_supervise_gloss(
    lemma: str, gloss: str, separator: str = DEFAULT_SEPARATOR
) -> list[str]:
    """Gloss text as lemma tokens, the separator token, then the definition."""
    if not lemma.strip():
        raise ValueError("empty lemma for gloss supervision")
    if not gloss.strip():
        raise ValueError(f"empty gloss for lemma {lemma!r}")
    return word_tokens(lemma.replace("_", " ")) + [separator] + word_tokens(gloss)


_SKIP_KEYS = (
    "instances_used",
    "skipped_unmapped_pos",
    "skipped_no_candidates",
    "skipped_missing_gold",
    "skipped_gold_not_in_candidates",
    "unresolvable_gold_keys",
)


def _new_stats() -> dict:
    return {key: 0 for key in _SKIP_KEYS}


def _supervised_instances(corpora, lex: Lexicon, stats: dict):
    """Yield instances with resolved candidates and in-candidate gold ids."""
    for corpus in corpora:
        for sentence, index, iid in corpus.instances():
            token = sentence.tokens[index]
            pos = COARSE_POS.get(token.pos)
            if pos is None:
                stats["skipped_unmapped_pos"] += 1
                continue
            cands = lex.candidates(token.lemma, pos)
            if not cands:
                stats["skipped_no_candidates"] += 1
                continue
            keys = corpus.gold.get(iid, ())
            if not keys:
                stats["skipped_missing_gold"] += 1
                continue
            cand_ids = {s.id for s in cands}
            gold_ids = []
            for raw in keys:
                sid = lex.sense_keys.get(raw)
                if sid is None:
                    stats["unresolvable_gold_keys"] += 1
                elif sid in cand_ids and sid not in gold_ids:
                    gold_ids.append(sid)
            if not gold_ids:
                stats["skipped_gold_not_in_candidates"] += 1
                logger.warning("gold synset not among candidates for %s", iid)
                continue
            stats["instances_used"] += 1
            yield sentence, index, iid, token, cands, gold_ids


def _base_config(**kwargs) -> dict:
    return dict(sorted(kwargs.items()))


def build_context_gloss(
    corpora: Sequence[AnnotatedCorpus],
    lex: Lexicon,
    oversample_ratio: int = 3,
    include_gloss_gloss: bool = True,
    seed: int = 0,
    marker_style: str = "token",
    separator: str = DEFAULT_SEPARATOR,
) -> TrainingSet:
    """Build the context-gloss pair set (plus optional gloss-gloss rows)."""
    if oversample_ratio < 1:
        raise ValueError("oversample_ratio must be >= 1")
    stats = _new_stats()
    records: list[TrainingPair] = []
    positives = negatives = gloss_gloss = 0
    for sentence, index, iid, token, cands, gold_ids in _supervised_instances(
        corpora, lex, stats
    ):
        context = tuple(weak_supervise_context(sentence, index, marker_style))
        glosses = {
            s.id: tuple(weak_supervise_gloss(token.lemma, s.gloss, separator))
            for s in cands
        }
        gold = gold_ids[0]
        for _ in range(oversample_ratio):
            records.append(TrainingPair(context, glosses[gold], 1, TASK_CONTEXT_GLOSS, iid))
            positives += 1
        for synset in cands:
            if synset.id not in gold_ids:
                records.append(
                    TrainingPair(context, glosses[synset.id], 0, TASK_CONTEXT_GLOSS, iid)
                )
                negatives += 1
        if include_gloss_gloss:
            for i in range(len(cands)):
                for j in range(i + 1, len(cands)):
                    records.append(
                        TrainingPair(
                            glosses[cands[i].id],
                            glosses[cands[j].id],
                            0,
                            TASK_GLOSS_GLOSS,
                            iid,
                        )
                    )
                    gloss_gloss += 1
    stats.update(positives=positives, negatives=negatives, gloss_gloss_rows=gloss_gloss)
    return TrainingSet(
        "pairs",
        records,
        tuple(c.name for c in corpora),
        _base_config(
            task=TASK_CONTEXT_GLOSS,
            oversample_ratio=oversample_ratio,
            include_gloss_gloss=include_gloss_gloss,
            marker_style=marker_style,
            separator=separator,
            seed=seed,
        ),
        stats,
    )


def build_context_hypernym(
    corpora: Sequence[AnnotatedCorpus],
    lex: Lexicon,
    oversample_ratio: int = 3,
    seed: int = 0,
    marker_style: str = "token",
    separator: str = DEFAULT_SEPARATOR,
) -> TrainingSet:
    """Build the context-hypernym pair set.

    Hypernym glosses carry the same weak supervision as sense glosses,
    with the hypernym's first lemma prepended. Instances whose gold
    synset has no hypernym contribute no positive rows.
    """
    if oversample_ratio < 1:
        raise ValueError("oversample_ratio must be >= 1")
    stats = _new_stats()
    stats["instances_without_gold_hypernym"] = 0
    records: list[TrainingPair] = []
    positives = negatives = 0

    def hypernym_gloss(synset: Synset) -> tuple[str, ...]:
        return tuple(weak_supervise_gloss(synset.lemmas[0], synset.gloss, separator))

    for sentence, index, iid, token, cands, gold_ids in _supervised_instances(
        corpora, lex, stats
    ):
        context = tuple(weak_supervise_context(sentence, index, marker_style))
        gold_hypernyms = lex.immediate_hypernyms(gold_ids[0])
        if not gold_hypernyms:
            stats["instances_without_gold_hypernym"] += 1
        for hypernym in gold_hypernyms:
            for _ in range(oversample_ratio):
                records.append(
                    TrainingPair(
                        context, hypernym_gloss(hypernym), 1, TASK_CONTEXT_HYPERNYM, iid
                    )
                )
                positives += 1
        for synset in cands:
            if synset.id in gold_ids:
                continue
            for hypernym in lex.immediate_hypernyms(synset.id):
                records.append(
                    TrainingPair(
                        context, hypernym_gloss(hypernym), 0, TASK_CONTEXT_HYPERNYM, iid
                    )
                )
                negatives += 1
    stats.update(positives=positives, negatives=negatives)
    return TrainingSet(
        "pairs",
        records,
        tuple(c.name for c in corpora),
        _base_config(
            task=TASK_CONTEXT_HYPERNYM,
            oversample_ratio=oversample_ratio,
            marker_style=marker_style,
            separator=separator,
            seed=seed,
        ),
        stats,
    )


def build_triplets(
    corpora: Sequence[AnnotatedCorpus],
    lex: Lexicon,
    seed: int = 0,
    marker_style: str = "token",
    separator: str = DEFAULT_SEPARATOR,
) -> TrainingSet:
    """Build anchor-positive-negative triplets, one per non-gold sense."""
    stats = _new_stats()
    records: list[TrainingTriplet] = []
    for sentence, index, iid, token, cands, gold_ids in _supervised_instances(
        corpora, lex, stats
    ):
        anchor = tuple(weak_supervise_context(sentence, index, marker_style))
        glosses = {
            s.id: tuple(weak_supervise_gloss(token.lemma, s.gloss, separator))
            for s in cands
        }
        positive = glosses[gold_ids[0]]
        for synset in cands:
            if synset.id not in gold_ids:
                records.append(
                    TrainingTriplet(anchor, positive, glosses[synset.id], iid)
                )
    return TrainingSet(
        "triplets",
        records,
        tuple(c.name for c in corpora),
        _base_config(
            task="triplet", marker_style=marker_style, separator=separator, seed=seed
        ),
        stats,
    )


def write_tsv(training_set: TrainingSet, path) -> None:
    """One record per line, tab-separated, UTF-8.

    Pairs: task, label, context text, gloss text.
    Triplets: anchor, positive, negative.
    """
    lines = []
    for record in training_set.records:
        if training_set.kind == "pairs":
            lines.append(
                f"{record.task}\t{record.y}\t{render_text(record.a)}\t{render_text(record.b)}"
            )
        else:
            lines.append(
                f"{render_text(record.anchor)}\t{render_text(record.positive)}"
                f"\t{render_text(record.negative)}"
            )
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_pairs(path) -> TrainingSet:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4 or fields[1] not in ("0", "1"):
                raise DataError(f"{path}:{line_no}: bad pair record")
            records.append(
                TrainingPair(
                    split_text(fields[2]), split_text(fields[3]), int(fields[1]), fields[0]
                )
            )
    return TrainingSet("pairs", records, (f"file:{Path(path).name}",))


def read_triplets(path) -> TrainingSet:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise DataError(f"{path}:{line_no}: bad triplet record")
            records.append(
                TrainingTriplet(
                    split_text(fields[0]), split_text(fields[1]), split_text(fields[2])
                )
            )
    return TrainingSet("triplets", records, (f"file:{Path(path).name}",))
