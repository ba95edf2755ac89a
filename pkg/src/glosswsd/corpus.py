"""Annotated corpus ingestion.

Parses evaluation-framework corpora: an XML file of ``<text>`` /
``<sentence>`` elements whose tokens are ``<wf>`` (plain) or
``<instance>`` (sense-tagged, carrying an id), plus a whitespace-
delimited gold key file with lines ``instance_id key [key ...]``.
Lemma and POS are read from the files, never predicted.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MalformedXmlError, MissingGoldError
from .lexicon import Lexicon, coarse_pos

logger = logging.getLogger(__name__)

# framework POS tag -> lexicon POS
COARSE_POS = {"NOUN": "n", "VERB": "v", "ADJ": "a", "ADV": "r"}
_POS_LABEL = {"n": "NOUN", "v": "VERB", "a": "ADJ", "r": "ADV"}


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str
    instance_id: str | None = None


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    sent_id: str
    tokens: tuple[Token, ...]


@dataclass(frozen=True)
class AnnotatedCorpus:
    name: str
    sentences: tuple[Sentence, ...]
    # instance id -> gold sense keys in file order, deduplicated
    gold: dict[str, tuple[str, ...]]

    def instances(self) -> list[tuple[Sentence, int, str]]:
        """All tagged instances as (sentence, token index, id), corpus order."""
        out = []
        for sentence in self.sentences:
            for i, token in enumerate(sentence.tokens):
                if token.instance_id is not None:
                    out.append((sentence, i, token.instance_id))
        return out


def parse_key_file(path) -> dict[str, tuple[str, ...]]:
    gold: dict[str, tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) < 2:
                raise MalformedXmlError(f"{path}:{line_no}: key line without keys")
            gold[fields[0]] = tuple(dict.fromkeys(fields[1:]))
    return gold


def parse_corpus(xml_path, key_path=None, name: str | None = None) -> AnnotatedCorpus:
    """Parse framework XML (and optionally its gold key file).

    With ``key_path`` given, every tagged instance must have a gold
    entry; corpora without gold keys load with an empty gold map.
    """
    xml_path = Path(xml_path)
    try:
        root = ET.parse(xml_path).getroot()
    except ET.ParseError as exc:
        raise MalformedXmlError(f"{xml_path}: {exc}") from None

    sentences: list[Sentence] = []
    seen_ids: set[str] = set()
    for text_el in root.iter("text"):
        doc_id = text_el.get("id", "")
        for sent_el in text_el.iter("sentence"):
            tokens: list[Token] = []
            for el in sent_el:
                if el.tag not in ("wf", "instance"):
                    continue
                surface = (el.text or "").strip()
                lemma = el.get("lemma", surface.lower())
                pos = el.get("pos", "")
                if el.tag == "instance":
                    iid = el.get("id")
                    if not iid or not surface:
                        raise MalformedXmlError(
                            f"{xml_path}: instance without id or text in "
                            f"sentence {sent_el.get('id')}"
                        )
                    if iid in seen_ids:
                        raise MalformedXmlError(f"{xml_path}: duplicate instance id {iid}")
                    seen_ids.add(iid)
                    tokens.append(Token(surface, lemma, pos, iid))
                elif surface:
                    tokens.append(Token(surface, lemma, pos))
            if tokens:
                sentences.append(Sentence(doc_id, sent_el.get("id", ""), tuple(tokens)))

    gold: dict[str, tuple[str, ...]] = {}
    if key_path is not None:
        gold = parse_key_file(key_path)
        for iid in seen_ids:
            if iid not in gold:
                raise MissingGoldError(iid)
        extra = set(gold) - seen_ids
        if extra:
            logger.warning("%d gold keys without a matching instance", len(extra))

    corpus = AnnotatedCorpus(
        name or xml_path.stem, tuple(sentences), gold
    )
    logger.info(
        "parsed corpus %s: %d sentences, %d instances",
        corpus.name,
        len(corpus.sentences),
        len(seen_ids),
    )
    return corpus


def _strip_edges(word: str) -> str:
    return word.strip(".,;:!?()[]'\"").lower()


def _find_lemma_span(words: list[str], lemmas) -> tuple[int, int, str] | None:
    """Locate a contiguous lemma occurrence among surface words."""
    normalized = [_strip_edges(w) for w in words]
    for lemma in lemmas:
        parts = lemma.lower().split("_")
        for start in range(len(normalized) - len(parts) + 1):
            if normalized[start : start + len(parts)] == parts:
                return start, start + len(parts), lemma
    return None


def wordnet_examples_to_framework(
    lexicon: Lexicon, xml_path, key_path, name: str = "wordnet_examples"
) -> tuple[int, int]:
    """Render lexicon example sentences as a tagged framework corpus.

    Each example sentence that literally contains one of its synset's
    lemmas becomes a one-instance sentence whose gold key is that
    synset's sense key. Examples without a resolvable lemma occurrence
    or sense key are skipped. Returns (sentences written, skipped).
    """
    corpus_el = ET.Element("corpus", {"lang": "en", "source": name})
    text_el = ET.SubElement(corpus_el, "text", {"id": "d000"})
    key_lines: list[str] = []
    written = 0
    skipped = 0
    for sid in sorted(lexicon.synsets):
        synset = lexicon.synsets[sid]
        pos_label = _POS_LABEL[coarse_pos(sid.pos)]
        for example in synset.examples:
            words = example.split()
            span = _find_lemma_span(words, synset.lemmas)
            if span is None:
                skipped += 1
                continue
            start, end, lemma = span
            raw_key = lexicon.sense_key_for(lemma, sid)
            if raw_key is None:
                skipped += 1
                continue
            sent_id = f"d000.s{written:04d}"
            iid = f"{sent_id}.t000"
            sent_el = ET.SubElement(text_el, "sentence", {"id": sent_id})
            for i, word in enumerate(words):
                if i == start:
                    inst = ET.SubElement(
                        sent_el,
                        "instance",
                        {"id": iid, "lemma": lemma.lower(), "pos": pos_label},
                    )
                    inst.text = " ".join(words[start:end])
                elif start < i < end:
                    continue
                else:
                    wf = ET.SubElement(
                        sent_el, "wf", {"lemma": _strip_edges(word), "pos": "X"}
                    )
                    wf.text = word
            key_lines.append(f"{iid} {raw_key}")
            written += 1

    tree = ET.ElementTree(corpus_el)
    ET.indent(tree)
    tree.write(xml_path, encoding="utf-8", xml_declaration=True)
    Path(key_path).write_text(
        "".join(line + "\n" for line in key_lines), encoding="utf-8"
    )
    logger.info("example corpus %s: %d sentences, %d skipped", name, written, skipped)
    return written, skipped
