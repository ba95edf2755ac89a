"""WordNet-3.0-style database parsing.

Reads the plain-text database distribution (``data.{noun,verb,adj,adv}``,
``index.{noun,verb,adj,adv}``, ``index.sense``) into an immutable sense
inventory: synsets with definition glosses, lemma-to-sense lists in
canonical rank order, sense-key resolution, and the immediate-hypernym
graph.

Data file grammar (one synset per line)::

    offset lex_filenum ss_type w_cnt (word lex_id){w_cnt} p_cnt
        (ptr_symbol offset pos source_target){p_cnt} [frames] | gloss

``offset`` is an 8-digit decimal byte offset, ``w_cnt`` is 2-digit hex,
``p_cnt`` is 3-digit decimal, and the gloss follows the ``|`` separator.
Verb frame data after the pointers is tolerated and ignored. Hypernym
edges use pointer symbols ``@`` and ``@i``.

Index file grammar::

    lemma pos synset_cnt p_cnt (ptr_symbol){p_cnt} sense_cnt
        tagsense_cnt (offset){synset_cnt}

``index.sense`` grammar::

    sense_key offset sense_number tag_cnt
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import (
    DanglingPointerError,
    MalformedLineError,
    UnknownSynsetError,
    UnresolvableKeyError,
)

logger = logging.getLogger(__name__)

SYNSET_POS = ("n", "v", "a", "r", "s")
POS_FILES = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
HYPERNYM_SYMBOLS = ("@", "@i")

# ss_type digit of a sense key -> synset type
_KEY_POS = {"1": "n", "2": "v", "3": "a", "4": "r", "5": "s"}


def coarse_pos(pos: str) -> str:
    """Merge adjective satellites under the coarse adjective class."""
    return "a" if pos == "s" else pos


class SynsetId(NamedTuple):
    """Part of speech plus zero-padded 8-digit byte offset."""

    pos: str
    offset: str

    def __str__(self) -> str:
        return f"{self.pos}/{self.offset}"

    @classmethod
    def parse(cls, text: str) -> "SynsetId":
        pos, _, offset = text.partition("/")
        if pos not in SYNSET_POS or len(offset) != 8 or not offset.isdigit():
            raise ValueError(f"not a synset id: {text!r}")
        return cls(pos, offset)


@dataclass(frozen=True)
class Synset:
    id: SynsetId
    lemmas: tuple[str, ...]
    gloss: str
    examples: tuple[str, ...]
    hypernyms: tuple[SynsetId, ...]
    # every pointer that resolved, hypernyms included; unused downstream
    pointers: tuple[tuple[str, SynsetId], ...]


def split_gloss(text: str) -> tuple[str, tuple[str, ...]]:
    """Split a raw gloss into the definition and its quoted examples.

    Segments are ``;``-delimited; a segment opening with a double quote
    starts the example region. Definition segments before that point are
    re-joined. Falls back to the whole trimmed gloss when no unquoted
    definition segment exists.
    """
    definition_parts: list[str] = []
    examples: list[str] = []
    for segment in (s.strip() for s in text.split(";")):
        if segment.startswith('"'):
            examples.append(segment.strip('"').strip())
        elif not examples and segment:
            definition_parts.append(segment)
    definition = "; ".join(definition_parts) or text.strip()
    return definition, tuple(examples)


def _parse_data_line(line: str, file_name: str, line_no: int):
    head, bar, gloss = line.partition("|")
    if not bar:
        raise MalformedLineError(file_name, line_no, "missing gloss separator '|'")
    fields = head.split()
    try:
        offset, ss_type = fields[0], fields[2]
        if len(offset) != 8 or not offset.isdigit():
            raise ValueError(f"bad offset {offset!r}")
        if ss_type not in SYNSET_POS:
            raise ValueError(f"bad synset type {ss_type!r}")
        w_cnt = int(fields[3], 16)
        if w_cnt < 1:
            raise ValueError("empty lemma list")
        words = tuple(fields[4 + 2 * i] for i in range(w_cnt))
        p_idx = 4 + 2 * w_cnt
        p_cnt = int(fields[p_idx])
        pointers = []
        for i in range(p_cnt):
            base = p_idx + 1 + 4 * i
            symbol, t_offset, t_pos = fields[base], fields[base + 1], fields[base + 2]
            _ = fields[base + 3]  # source/target field, presence required
            if len(t_offset) != 8 or not t_offset.isdigit() or t_pos not in SYNSET_POS:
                raise ValueError(f"bad pointer target {t_pos}/{t_offset}")
            pointers.append((symbol, t_offset, t_pos))
        # anything left over is verb frame data; ignored
    except (IndexError, ValueError) as exc:
        raise MalformedLineError(file_name, line_no, str(exc)) from None
    gloss_text = gloss.strip()
    if not gloss_text:
        raise MalformedLineError(file_name, line_no, "empty gloss")
    return offset, ss_type, words, tuple(pointers), gloss_text


def format_data_line(
    offset: str,
    ss_type: str,
    lemmas: Iterable[str],
    pointers: Iterable[tuple[str, str, str]],
    gloss: str,
    lex_filenum: int = 3,
) -> str:
    """Render one data-file line in the database grammar (parse inverse)."""
    lemmas = list(lemmas)
    pointers = list(pointers)
    parts = [offset, f"{lex_filenum:02d}", ss_type, f"{len(lemmas):02x}"]
    for lemma in lemmas:
        parts += [lemma, "0"]
    parts.append(f"{len(pointers):03d}")
    for symbol, t_offset, t_pos in pointers:
        parts += [symbol, t_offset, t_pos, "0000"]
    return " ".join(parts) + " | " + gloss


def format_index_line(lemma: str, pos: str, offsets: Iterable[str]) -> str:
    offsets = list(offsets)
    n = len(offsets)
    return " ".join([lemma, pos, str(n), "0", str(n), "0"] + offsets)


def format_sense_index_line(raw_key: str, offset: str, rank: int, tag_count: int = 0) -> str:
    return f"{raw_key} {offset} {rank} {tag_count}"


class Lexicon:
    """Immutable sense inventory with gloss and hypernym access.

    Safe for concurrent reads; nothing mutates after construction.
    """

    def __init__(
        self,
        synsets: dict[SynsetId, Synset],
        senses: dict[tuple[str, str], list[SynsetId]],
        sense_keys: dict[str, SynsetId],
        key_by_sense: dict[tuple[str, SynsetId], str],
    ):
        self.synsets = synsets
        self.senses = senses
        self.sense_keys = sense_keys
        self._key_by_sense = key_by_sense

    def __len__(self) -> int:
        return len(self.synsets)

    def synset(self, synset_id: SynsetId) -> Synset:
        try:
            return self.synsets[synset_id]
        except KeyError:
            raise UnknownSynsetError(synset_id) from None

    def candidates(self, lemma: str, pos: str) -> list[Synset]:
        """Synsets for a lemma in canonical sense order; [] if unknown."""
        key = (normalize_lemma(lemma), coarse_pos(pos))
        return [self.synsets[sid] for sid in self.senses.get(key, [])]

    def immediate_hypernyms(self, synset_id: SynsetId) -> list[Synset]:
        """Synsets one hypernym edge up; never the transitive closure."""
        return [self.synsets[h] for h in self.synset(synset_id).hypernyms]

    def resolve_key(self, raw: str) -> SynsetId:
        try:
            return self.sense_keys[raw]
        except KeyError:
            raise UnresolvableKeyError(raw) from None

    def sense_key_for(self, lemma: str, synset_id: SynsetId) -> str | None:
        return self._key_by_sense.get((normalize_lemma(lemma), synset_id))

    def first_sense(self, lemma: str) -> SynsetId | None:
        """Rank-1 sense of ``lemma`` under any POS, scanning n, v, a, r."""
        lemma = normalize_lemma(lemma)
        for pos in POS_FILES:
            ids = self.senses.get((lemma, pos))
            if ids:
                return ids[0]
        return None


def normalize_lemma(lemma: str) -> str:
    return lemma.strip().lower().replace(" ", "_")


def _data_lines(path: Path):
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            # license header lines start with whitespace
            if not line or line[0] == " ":
                continue
            yield line_no, line


def parse_lexicon(directory, include_instance_hypernyms: bool = True) -> Lexicon:
    """Parse a WordNet 3.0 database directory into a :class:`Lexicon`.

    ``include_instance_hypernyms`` controls whether ``@i`` pointers
    count as hypernym edges alongside ``@``.
    """
    directory = Path(directory)
    raw: dict[SynsetId, tuple] = {}
    # (data file pos, offset) -> true id; the adjective file holds both
    # 'a' and 's' synsets under the same offset space
    by_file_offset: dict[tuple[str, str], SynsetId] = {}

    for pos, suffix in POS_FILES.items():
        path = directory / f"data.{suffix}"
        for line_no, line in _data_lines(path):
            offset, ss_type, words, pointers, gloss = _parse_data_line(
                line, path.name, line_no
            )
            allowed = ("a", "s") if pos == "a" else (pos,)
            if ss_type not in allowed:
                raise MalformedLineError(
                    path.name, line_no, f"synset type {ss_type!r} in data.{suffix}"
                )
            sid = SynsetId(ss_type, offset)
            raw[sid] = (words, pointers, gloss)
            by_file_offset[(pos, offset)] = sid

    hypernym_symbols = HYPERNYM_SYMBOLS if include_instance_hypernyms else ("@",)
    synsets: dict[SynsetId, Synset] = {}
    for sid, (words, pointers, gloss_text) in raw.items():
        resolved: list[tuple[str, SynsetId]] = []
        hypernyms: list[SynsetId] = []
        for symbol, t_offset, t_pos in pointers:
            target = by_file_offset.get((coarse_pos(t_pos), t_offset))
            if symbol in HYPERNYM_SYMBOLS:
                if target is None:
                    raise DanglingPointerError(str(sid), f"{t_pos}/{t_offset}")
                if symbol in hypernym_symbols:
                    hypernyms.append(target)
            if target is not None:
                resolved.append((symbol, target))
        definition, examples = split_gloss(gloss_text)
        synsets[sid] = Synset(
            sid, words, definition, examples, tuple(hypernyms), tuple(resolved)
        )

    senses: dict[tuple[str, str], list[SynsetId]] = {}
    for pos, suffix in POS_FILES.items():
        path = directory / f"index.{suffix}"
        for line_no, line in _data_lines(path):
            fields = line.split()
            try:
                lemma, file_pos = fields[0], fields[1]
                if file_pos != pos:
                    raise ValueError(f"pos {file_pos!r} in index.{suffix}")
                synset_cnt = int(fields[2])
                p_cnt = int(fields[3])
                tail = fields[4 + p_cnt :]
                offsets = tail[2 : 2 + synset_cnt]
                if len(offsets) != synset_cnt:
                    raise ValueError("offset count mismatch")
            except (IndexError, ValueError) as exc:
                raise MalformedLineError(path.name, line_no, str(exc)) from None
            ids = []
            for offset in offsets:
                sid = by_file_offset.get((pos, offset))
                if sid is None:
                    raise DanglingPointerError(
                        f"index.{suffix}:{lemma}", f"{pos}/{offset}"
                    )
                ids.append(sid)
            senses[(lemma, pos)] = ids

    sense_keys: dict[str, SynsetId] = {}
    key_by_sense: dict[tuple[str, SynsetId], str] = {}
    path = directory / "index.sense"
    for line_no, line in _data_lines(path):
        fields = line.split()
        if len(fields) != 4:
            raise MalformedLineError(path.name, line_no, "expected 4 fields")
        raw_key, offset = fields[0], fields[1]
        lemma, sep, rest = raw_key.partition("%")
        key_pos = _KEY_POS.get(rest.split(":", 1)[0]) if sep else None
        if key_pos is None or len(offset) != 8 or not offset.isdigit():
            raise MalformedLineError(path.name, line_no, f"bad sense key {raw_key!r}")
        sid = by_file_offset.get((coarse_pos(key_pos), offset))
        if sid is None:
            raise DanglingPointerError(f"index.sense:{raw_key}", f"{key_pos}/{offset}")
        sense_keys[raw_key] = sid
        key_by_sense.setdefault((lemma, sid), raw_key)

    lexicon = Lexicon(synsets, senses, sense_keys, key_by_sense)
    logger.info(
        "parsed lexicon: %d synsets, %d lemma/pos entries, %d sense keys",
        len(synsets),
        len(senses),
        len(sense_keys),
    )
    return lexicon
