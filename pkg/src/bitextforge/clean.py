"""Rule-based removal of sentence pairs that are unlikely to be translations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import SentencePair
from .langid import detect_string

LANGID_MIN_CHARS = 40
DEFAULT_RATIO_BOUND = 3.0

RULES = ("empty", "nonalpha", "wronglang", "ratio")


@dataclass(frozen=True)
class CleanReport:
    removed_empty: int = 0
    removed_nonalpha: int = 0
    removed_wronglang: int = 0
    removed_ratio: int = 0
    kept: int = 0

    @property
    def total(self) -> int:
        return self.removed_empty + self.removed_nonalpha + self.removed_wronglang + self.removed_ratio + self.kept

    def to_dict(self) -> dict:
        return {
            "removed_empty": self.removed_empty,
            "removed_nonalpha": self.removed_nonalpha,
            "removed_wronglang": self.removed_wronglang,
            "removed_ratio": self.removed_ratio,
            "kept": self.kept,
        }


def has_letter(s: str) -> bool:
    return any(ch.isalpha() for ch in s)


def _wrong_language(segment: str, expected: str | None, profiles) -> bool:
    if expected is None or len(segment) < LANGID_MIN_CHARS:
        return False
    return detect_string(segment, profiles).language != expected


def rejection_rule(pair: SentencePair, profiles=None, expected=(None, None),
                   ratio_bound: float | None = DEFAULT_RATIO_BOUND) -> str | None:
    """Name of the first rule that rejects ``pair``, or ``None`` if it is kept."""
    src, tgt = pair.source.strip(), pair.target.strip()
    if not src or not tgt:
        return "empty"
    if not has_letter(src) or not has_letter(tgt):
        return "nonalpha"
    if profiles and (
        _wrong_language(src, expected[0], profiles) or _wrong_language(tgt, expected[1], profiles)
    ):
        return "wronglang"
    if ratio_bound is not None:
        lo, hi = sorted((len(src), len(tgt)))
        if hi / lo > ratio_bound:
            return "ratio"
    return None


def clean_pairs(pairs: Iterable[SentencePair], profiles=None, expected: Sequence = (None, None),
                ratio_bound: float | None = DEFAULT_RATIO_BOUND, rejects: list | None = None):
    """Drop pairs failing any rule; returns ``(kept_pairs, CleanReport)``.

    Rules, first match wins: an empty side; a side without any letter; a
    side of at least 40 characters detected as the wrong language (only
    when ``profiles`` are given); a length ratio above ``ratio_bound``.
    Rejected pairs are appended to ``rejects`` as ``(rule, pair)`` when a
    list is passed.
    """
    kept = []
    counts = dict.fromkeys(RULES, 0)
    for pair in pairs:
        rule = rejection_rule(pair, profiles, tuple(expected), ratio_bound)
        if rule is None:
            kept.append(pair)
        else:
            counts[rule] += 1
            if rejects is not None:
                rejects.append((rule, pair))
    report = CleanReport(counts["empty"], counts["nonalpha"], counts["wronglang"], counts["ratio"], len(kept))
    return kept, report


def write_rejects(rejects, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rule, pair in rejects:
            src = pair.source.replace("\t", " ")
            tgt = pair.target.replace("\t", " ")
            f.write(f"{rule}\t{pair.doc_pair_id}\t{src}\t{tgt}\n")


class PairCleaner(BaseEstimator, TransformerMixin):
    """Transformer over lists of :class:`SentencePair`; ``report_`` describes the last call."""

    def __init__(self, profiles=None, expected=(None, None), ratio_bound=DEFAULT_RATIO_BOUND):
        self.profiles = profiles
        self.expected = expected
        self.ratio_bound = ratio_bound

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        pairs = list(X)
        for i, p in enumerate(pairs):
            if not isinstance(p, SentencePair):
                raise TypeError(f"X[{i}] is {type(p).__name__}, expected SentencePair")
        kept, self.report_ = clean_pairs(pairs, self.profiles, self.expected, self.ratio_bound)
        return kept
