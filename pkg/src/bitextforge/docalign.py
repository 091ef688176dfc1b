"""Cross-lingual document pairing over language-independent anchor tokens.

Two documents in different languages rarely share ordinary words, but they
do share numbers, names, acronyms and cognates. The score of a pair is the
cosine of TF-IDF vectors restricted to those anchors. Pairs are picked
greedily by score, one-to-one, subject to a character-size ratio window;
unmatched documents are retried with IDF recomputed over what is left.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import TextDocument

DEFAULT_THRESHOLD = 0.1
DEFAULT_RATIO_BOUNDS = (0.75, 1.33)
DEFAULT_MAX_ITER = 3
MIN_SHARED_TOKEN_LEN = 4

_NUMBER = re.compile(r"\d+(?:[.,]\d+)*")
_WORD = re.compile(r"[^\W\d_]+(?:[-'’][^\W\d_]+)*")


@dataclass(frozen=True)
class DocumentPair:
    source_id: str
    target_id: str
    score: float
    size_ratio: float
    iteration: int = 1

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "target_id": self.target_id,
            "score": self.score,
            "size_ratio": self.size_ratio,
            "iteration": self.iteration,
        }

    @property
    def pair_id(self) -> str:
        return f"{self.source_id}|{self.target_id}"


@dataclass
class DocAlignResult:
    pairs: list[DocumentPair] = field(default_factory=list)
    unmapped: list[str] = field(default_factory=list)
    iterations_used: int = 0

    def to_dict(self) -> dict:
        return {
            "pairs": [p.to_dict() for p in self.pairs],
            "unmapped": list(self.unmapped),
            "iterations_used": self.iterations_used,
        }


def _token_counts(doc: TextDocument) -> tuple[Counter, Counter]:
    """(numbers, long lowercased words) with their frequencies."""
    numbers, words = Counter(), Counter()
    for line in doc.lines:
        for num in _NUMBER.findall(line):
            numbers[re.sub(r"[.,]", "", num)] += 1
        for word in _WORD.findall(line):
            if len(word) >= MIN_SHARED_TOKEN_LEN:
                words[word.lower()] += 1
    return numbers, words


class _Profile:
    __slots__ = ("doc", "numbers", "words")

    def __init__(self, doc: TextDocument):
        self.doc = doc
        self.numbers, self.words = _token_counts(doc)


def _anchors(a: _Profile, b: _Profile) -> tuple[Counter, Counter]:
    shared = a.words.keys() & b.words.keys()
    va = Counter(a.numbers)
    vb = Counter(b.numbers)
    for w in shared:
        va["w:" + w] = a.words[w]
        vb["w:" + w] = b.words[w]
    return va, vb


def _idf(df: int, n_docs: int) -> float:
    return math.log((1 + n_docs) / (1 + df)) + 1.0


def _cosine(va: Counter, vb: Counter, idf) -> float:
    keys = sorted(va.keys() | vb.keys())
    wa = {k: va[k] * idf(k) for k in keys if va[k]}
    wb = {k: vb[k] * idf(k) for k in keys if vb[k]}
    na = math.sqrt(math.fsum(w * w for w in wa.values()))
    nb = math.sqrt(math.fsum(w * w for w in wb.values()))
    if na == 0 or nb == 0:
        return 0.0
    dot = math.fsum(wa[k] * wb[k] for k in keys if k in wa and k in wb)
    return min(1.0, max(0.0, dot / (na * nb)))


def _document_frequencies(profiles: Iterable[_Profile]) -> Counter:
    df = Counter()
    for p in profiles:
        df.update(p.numbers.keys())
        df.update("w:" + w for w in p.words.keys())
    return df


def _idf_lookup(df: Counter, n_docs: int):
    return lambda tok: _idf(df.get(tok, 0), n_docs)


def score_pair(src: TextDocument, tgt: TextDocument, collection: Sequence[TextDocument] | None = None) -> float:
    """Anchor-token TF-IDF cosine of two documents, in [0, 1].

    IDF is taken over ``collection`` when given, else over the two
    documents alone.
    """
    a, b = _Profile(src), _Profile(tgt)
    pool = [a, b] if collection is None else [_Profile(d) for d in collection]
    df = _document_frequencies(pool)
    return _cosine(*_anchors(a, b), _idf_lookup(df, len(pool)))


def size_ratio(src: TextDocument, tgt: TextDocument) -> float:
    if tgt.char_count == 0:
        return math.inf
    return src.char_count / tgt.char_count


def align_documents(sources: Sequence[TextDocument], targets: Sequence[TextDocument],
                    threshold: float = DEFAULT_THRESHOLD, max_iter: int = DEFAULT_MAX_ITER,
                    ratio_bounds: tuple[float, float] = DEFAULT_RATIO_BOUNDS) -> DocAlignResult:
    """One-to-one greedy document matching with up to ``max_iter`` passes.

    Each pass scores every still-unassigned source/target pair (IDF over
    the unassigned pool), then accepts pairs in descending score order,
    tie-broken by (source_id, target_id), skipping conflicts and any pair
    under ``threshold`` or outside ``ratio_bounds``. Passes stop early when
    nothing new is accepted.
    """
    ids = [d.doc_id for d in sources] + [d.doc_id for d in targets]
    if len(set(ids)) != len(ids):
        raise ValueError("document ids must be unique across sources and targets")
    lo, hi = ratio_bounds
    src_prof = {d.doc_id: _Profile(d) for d in sources}
    tgt_prof = {d.doc_id: _Profile(d) for d in targets}
    free_src, free_tgt = set(src_prof), set(tgt_prof)
    result = DocAlignResult()

    for it in range(1, max_iter + 1):
        if not free_src or not free_tgt:
            break
        result.iterations_used = it
        pool = [src_prof[k] for k in sorted(free_src)] + [tgt_prof[k] for k in sorted(free_tgt)]
        idf = _idf_lookup(_document_frequencies(pool), len(pool))
        candidates = []
        for s in sorted(free_src):
            for t in sorted(free_tgt):
                ratio = size_ratio(src_prof[s].doc, tgt_prof[t].doc)
                if not lo <= ratio <= hi:
                    continue
                score = _cosine(*_anchors(src_prof[s], tgt_prof[t]), idf)
                if score < threshold or score <= 0.0:
                    continue
                candidates.append((-score, s, t, ratio))
        candidates.sort()
        accepted = 0
        for neg, s, t, ratio in candidates:
            if s in free_src and t in free_tgt:
                result.pairs.append(DocumentPair(s, t, -neg, ratio, it))
                free_src.discard(s)
                free_tgt.discard(t)
                accepted += 1
        if not accepted:
            break

    result.unmapped = sorted(free_src) + sorted(free_tgt)
    return result


def write_manifest(result: DocAlignResult, docs: Mapping[str, TextDocument], path) -> None:
    """Audit file: one JSON object per accepted pair, then the unmapped ids."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for p in result.pairs:
            row = dict(p.to_dict(), source_path=docs[p.source_id].origin, target_path=docs[p.target_id].origin)
            f.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
        for doc_id in result.unmapped:
            row = {"unmapped": doc_id, "path": docs[doc_id].origin if doc_id in docs else ""}
            f.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
