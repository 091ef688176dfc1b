"""Sentence boundary reconstruction for editable text and PDF-extracted text.

Boundaries come from terminal punctuation followed by a capitalised word,
vetoed by a per-language abbreviation list and by single-letter initials.
PDF text is first re-flowed, since every visual line there is a hard wrap.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import TextDocument

OPENERS = "\"'“‘«„([{"
CLOSERS = "\"'”’»)]}"
_CANDIDATE = re.compile(r"[.?!]+[" + re.escape(CLOSERS) + r"]*(?=\s+\S)")
_TERMINAL_END = re.compile(r"[.?!][" + re.escape(CLOSERS) + r"]*$")
_INITIAL = re.compile(r"^[^\W\d_]\.$")
_ENUMERATOR = re.compile(r"^\d+\.$")
# A line opening with "(a)" or "3." starts a new sentence in PDF text.
BREAK_PATTERN = re.compile(r"^(\([^\W\d_]\)|\d+\.)(\s|$)")
_SOFT_HYPHEN_END = re.compile(r"[^\W\d_]-$")


@dataclass(frozen=True)
class AbbreviationLexicon:
    language: str
    entries: frozenset

    def __post_init__(self):
        object.__setattr__(self, "entries", frozenset(self.entries))
        bad = sorted(e for e in self.entries if not e.endswith("."))
        if bad:
            raise ValueError(f"abbreviations must end with '.': {bad[:5]}")

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    @classmethod
    def from_lines(cls, language: str, lines: Iterable[str]) -> "AbbreviationLexicon":
        entries = []
        for line in lines:
            line = line.split("#", 1)[0].strip()
            if line:
                entries.append(line)
        return cls(language, frozenset(entries))

    @classmethod
    def load(cls, path, language: str | None = None) -> "AbbreviationLexicon":
        path = Path(path)
        return cls.from_lines(language or path.stem, path.read_text(encoding="utf-8").splitlines())

    @classmethod
    def default(cls, language: str) -> "AbbreviationLexicon":
        res = resources.files("bitextforge") / "data" / "abbrev" / f"{language}.txt"
        if not res.is_file():
            return cls(language, frozenset())
        return cls.from_lines(language, res.read_text(encoding="utf-8").splitlines())


@dataclass(frozen=True)
class SentenceList:
    doc_id: str
    sentences: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if any(not s.strip() for s in self.sentences):
            raise ValueError("empty sentence in SentenceList")

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]


def _is_boundary(text: str, m: re.Match, sent_start: int, lex) -> bool:
    punct = m.group(0).rstrip(CLOSERS)
    after = text[m.end():].lstrip()
    nxt = after[0]
    if not (nxt.isupper() or nxt in OPENERS):
        return False
    if punct[-1] != ".":
        return True
    end = m.start() + len(punct)
    tok_start = m.start()
    while tok_start > 0 and not text[tok_start - 1].isspace():
        tok_start -= 1
    token = text[tok_start:end].lstrip(OPENERS)
    if token in lex:
        return False
    if _INITIAL.match(token) and token[0].isupper():
        return False
    if _ENUMERATOR.match(token) and tok_start <= sent_start:
        return False
    return True


def split_line(text: str, lex=()) -> list[str]:
    """Split a single line of running text into sentences."""
    out, start = [], 0
    for m in _CANDIDATE.finditer(text):
        if _is_boundary(text, m, start, lex):
            piece = text[start : m.end()].strip()
            if piece:
                out.append(piece)
            start = m.end()
            while start < len(text) and text[start].isspace():
                start += 1
    tail = text[start:].strip()
    if tail:
        out.append(tail)
    return out


def split_editable(doc: TextDocument, lex=()) -> SentenceList:
    """Sentences of an editable document; every line break is a hard boundary."""
    sentences = []
    for line in doc.lines:
        sentences.extend(split_line(line, lex))
    return SentenceList(doc.doc_id, sentences)


def _ends_sentence(prev: str, line: str, lex) -> bool:
    if not _TERMINAL_END.search(prev):
        return False
    joined = prev + " " + line
    m = None
    for m in _CANDIDATE.finditer(joined, 0, len(prev) + 2):
        pass
    if m is None or m.end() != len(prev):
        return True
    return _is_boundary(joined, m, 0, lex)


def reflow(lines: Iterable[str], lex=(), dehyphenate: bool = True) -> list[str]:
    """Join hard-wrapped PDF lines back into blocks of running text.

    Blank lines close a block. A line starts a new block when it matches
    :data:`BREAK_PATTERN` or when the previous line ends a sentence.
    """
    blocks, cur = [], None
    for raw in lines:
        line = raw.strip()
        if not line:
            if cur:
                blocks.append(cur)
            cur = None
            continue
        if cur is None:
            cur = line
        elif BREAK_PATTERN.match(line) or _ends_sentence(cur, line, lex):
            blocks.append(cur)
            cur = line
        elif _SOFT_HYPHEN_END.search(cur):
            if dehyphenate and line[0].islower():
                cur = cur[:-1] + line
            else:
                cur = cur + line
        else:
            cur = cur + " " + line
    if cur:
        blocks.append(cur)
    return blocks


def split_pdf_text(doc: TextDocument, lex=(), dehyphenate: bool = True) -> SentenceList:
    """Sentences of PDF-extracted text: re-flow, then apply the editable rule per block."""
    sentences = []
    for block in reflow(doc.lines, lex, dehyphenate):
        sentences.extend(split_line(block, lex))
    return SentenceList(doc.doc_id, sentences)


class SentenceSplitter(BaseEstimator, TransformerMixin):
    """Transformer: documents (or raw strings) in, lists of sentences out.

    ``lexicon`` may be an :class:`AbbreviationLexicon`, a path, or ``None``
    for the bundled list of ``language``.
    """

    def __init__(self, mode="editable", language="en", lexicon=None, dehyphenate=True):
        self.mode = mode
        self.language = language
        self.lexicon = lexicon
        self.dehyphenate = dehyphenate

    def fit(self, X=None, y=None):
        if self.mode not in ("editable", "pdf"):
            raise ValueError(f"mode must be 'editable' or 'pdf', got {self.mode!r}")
        if isinstance(self.lexicon, AbbreviationLexicon):
            self.lexicon_ = self.lexicon
        elif self.lexicon is not None:
            self.lexicon_ = AbbreviationLexicon.load(self.lexicon, self.language)
        else:
            self.lexicon_ = AbbreviationLexicon.default(self.language)
        return self

    def transform(self, X):
        if not hasattr(self, "lexicon_"):
            self.fit()
        if isinstance(X, (str, TextDocument)):
            raise TypeError("transform expects an iterable of documents or strings")
        out = []
        for i, item in enumerate(X):
            doc = item if isinstance(item, TextDocument) else TextDocument.from_text(f"doc{i}", item)
            if self.mode == "pdf":
                out.append(list(split_pdf_text(doc, self.lexicon_, self.dehyphenate)))
            else:
                out.append(list(split_editable(doc, self.lexicon_)))
        return out
