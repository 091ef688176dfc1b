"""Core corpus data types and corpus statistics.

Every pipeline stage passes these value objects around. They are frozen
dataclasses so a document or pair can be shared between worker processes
without copying surprises.
"""

from __future__ import annotations

import json
import logging
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TextDocument:
    """A normalized document: ordered lines plus where they came from."""

    doc_id: str
    lines: tuple[str, ...]
    language: Optional[str] = None
    origin: str = ""
    extractor: str = "text"

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        for line in self.lines:
            if "\ufeff" in line or "\r" in line or "\n" in line:
                raise ValueError(f"{self.doc_id}: line contains BOM or line-break characters")

    @classmethod
    def from_text(cls, doc_id: str, text: str, **kwargs) -> "TextDocument":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        return cls(doc_id=doc_id, lines=tuple(lines), **kwargs)

    @property
    def char_count(self) -> int:
        return sum(len(line) for line in self.lines)

    @property
    def text(self) -> str:
        return "\n".join(self.lines)

    def with_language(self, language: Optional[str]) -> "TextDocument":
        return TextDocument(self.doc_id, self.lines, language, self.origin, self.extractor)


@dataclass(frozen=True)
class SentencePair:
    source: str
    target: str
    link: Optional["AlignmentLink"] = None  # noqa: F821 - defined in sentalign
    doc_pair_id: str = ""

    def __post_init__(self):
        if "\n" in self.source or "\n" in self.target:
            raise ValueError("sentence pair sides must not contain newlines")


@dataclass(frozen=True)
class CorpusStats:
    line_count: int = 0
    vocab_size: int = 0
    per_source_counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "line_count": self.line_count,
            "vocab_size": self.vocab_size,
            "per_source_counts": dict(sorted(self.per_source_counts.items())),
        }


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: tuple[SentencePair, ...]
    stats: CorpusStats

    @classmethod
    def from_pairs(cls, pairs: Iterable[SentencePair], tokenization: Callable[[str], list] | None = None):
        pairs = tuple(pairs)
        return cls(pairs, compute_stats(pairs, tokenization))

    def __len__(self):
        return len(self.pairs)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Whitespace tokens with leading/trailing punctuation stripped, case kept."""
    tokens = []
    for raw in text.split():
        start, end = 0, len(raw)
        while start < end and _is_punct(raw[start]):
            start += 1
        while end > start and _is_punct(raw[end - 1]):
            end -= 1
        if start < end:
            tokens.append(raw[start:end])
    return tokens


def compute_stats(corpus, tokenization: Callable[[str], list] | None = None) -> CorpusStats:
    """Line count, combined source+target vocabulary size and per-document counts.

    ``corpus`` may be a :class:`ParallelCorpus` or any sequence of
    :class:`SentencePair`.
    """
    tok = tokenization or tokenize
    pairs = corpus.pairs if isinstance(corpus, ParallelCorpus) else corpus
    vocab = set()
    per_source = Counter()
    n = 0
    for pair in pairs:
        n += 1
        vocab.update(tok(pair.source))
        vocab.update(tok(pair.target))
        per_source[pair.doc_pair_id] += 1
    return CorpusStats(line_count=n, vocab_size=len(vocab), per_source_counts=dict(per_source))


def stats_for_files(source_path, target_path, tokenization=None) -> CorpusStats:
    """Stats for an existing pair of line-aligned text files (e.g. a released corpus)."""
    src = _read_lines(Path(source_path))
    tgt = _read_lines(Path(target_path))
    if len(src) != len(tgt):
        raise ValueError(f"{source_path} has {len(src)} lines but {target_path} has {len(tgt)}")
    doc = Path(source_path).stem
    return compute_stats([SentencePair(s, t, doc_pair_id=doc) for s, t in zip(src, tgt)], tokenization)


# -- on-disk format --------------------------------------------------------

def corpus_paths(dest, name: str, languages: Sequence[str]) -> dict:
    dest = Path(dest)
    src_lang, tgt_lang = languages
    return {
        "source": dest / f"{name}.{src_lang}",
        "target": dest / f"{name}.{tgt_lang}",
        "tsv": dest / f"{name}.tsv",
        "links": dest / f"{name}.links.tsv",
        "stats": dest / f"{name}.stats.json",
    }


def _write(path: Path, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _read_lines(path: Path) -> list[str]:
    try:
        with open(path, encoding="utf-8", newline="") as f:
            text = f.read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def write_corpus(corpus: ParallelCorpus, dest, name: str = "corpus", languages=("src", "tgt")) -> dict:
    """Write the corpus as parallel text files, a TSV, a provenance file and a stats report.

    Returns the mapping of output kind to path.
    """
    from .sentalign import format_link

    paths = corpus_paths(dest, name, languages)
    Path(dest).mkdir(parents=True, exist_ok=True)
    sources = [p.source for p in corpus.pairs]
    targets = [p.target for p in corpus.pairs]
    _write(paths["source"], "".join(s + "\n" for s in sources))
    _write(paths["target"], "".join(t + "\n" for t in targets))
    _write(
        paths["tsv"],
        "".join(f"{s.replace(chr(9), ' ')}\t{t.replace(chr(9), ' ')}\n" for s, t in zip(sources, targets)),
    )
    _write(
        paths["links"],
        "".join(
            f"{p.doc_pair_id}\t{format_link(p.link) if p.link is not None else '-'}\n"
            for p in corpus.pairs
        ),
    )
    report = dict(corpus.stats.to_dict(), languages=list(languages), name=name)
    _write(paths["stats"], json.dumps(report, indent=2, ensure_ascii=False, sort_keys=True) + "\n")
    logger.info("wrote %d pairs to %s", len(corpus.pairs), paths["source"].parent)
    return paths


def read_corpus(dest, name: str = "corpus", languages=("src", "tgt"), tokenization=None) -> ParallelCorpus:
    """Inverse of :func:`write_corpus` (reads the plain-text pair form)."""
    from .sentalign import parse_link

    paths = corpus_paths(dest, name, languages)
    sources = _read_lines(paths["source"])
    targets = _read_lines(paths["target"])
    if len(sources) != len(targets):
        raise ValueError(f"{paths['source']} and {paths['target']} differ in line count")
    provenance = [("", None)] * len(sources)
    if paths["links"].exists():
        rows = _read_lines(paths["links"])
        if len(rows) != len(sources):
            raise ValueError(f"{paths['links']} does not match corpus length")
        provenance = []
        for row in rows:
            doc_pair_id, _, link = row.partition("\t")
            provenance.append((doc_pair_id, None if link in ("", "-") else parse_link(link)))
    pairs = [
        SentencePair(s, t, link=link, doc_pair_id=doc)
        for s, t, (doc, link) in zip(sources, targets, provenance)
    ]
    return ParallelCorpus.from_pairs(pairs, tokenization)
