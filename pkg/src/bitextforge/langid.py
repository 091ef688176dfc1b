"""Character n-gram naive-Bayes language identification.

A profile stores raw n-gram counts for orders 1..3. Log probabilities are
derived with additive smoothing over the observed n-gram inventory plus one
bucket shared by every unseen n-gram, so each order's distribution sums to
one. Text is lowercased and split into letter runs; each run is padded with
a space on both sides before n-grams are taken, which makes scores additive
over words.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_labels, check_texts
from .corpus import TextDocument

DEFAULT_ORDERS = (1, 2, 3)
DEFAULT_ALPHA = 0.5
SAMPLE_HEAD = 50
SAMPLE_EVERY = 100
PROFILE_FORMAT = "bitextforge-profile/1"


class LanguageIdError(ValueError):
    pass


def _words(text: str) -> list[str]:
    out, cur = [], []
    for ch in text.lower():
        if ch.isalpha():
            cur.append(ch)
        elif cur:
            out.append("".join(cur))
            cur = []
    if cur:
        out.append("".join(cur))
    return out


def extract_ngrams(text: str, orders: Sequence[int] = DEFAULT_ORDERS) -> dict[int, Counter]:
    """Count padded character n-grams of each order in ``text``."""
    counts = {n: Counter() for n in orders}
    for word in _words(text):
        padded = f" {word} "
        for n in orders:
            c = counts[n]
            for i in range(len(padded) - n + 1):
                gram = padded[i : i + n]
                if gram.strip():
                    c[gram] += 1
    return counts


@dataclass
class LanguageProfile:
    """Smoothed n-gram model for one language.

    ``counts`` maps order -> {ngram: count}; ``ngram_log_probs`` is derived
    from it at construction.
    """

    language: str
    counts: dict[int, dict[str, int]]
    alpha: float = DEFAULT_ALPHA
    ngram_log_probs: dict[int, dict[str, float]] = field(init=False, repr=False)
    unseen_log_probs: dict[int, float] = field(init=False, repr=False)

    def __post_init__(self):
        if self.alpha <= 0:
            raise LanguageIdError("smoothing alpha must be positive")
        self.counts = {int(n): dict(c) for n, c in self.counts.items()}
        self.ngram_log_probs, self.unseen_log_probs = {}, {}
        for n, c in self.counts.items():
            total = sum(c.values())
            vocab = len(c) + 1  # + shared unseen bucket
            denom = total + self.alpha * vocab
            self.ngram_log_probs[n] = {g: math.log((k + self.alpha) / denom) for g, k in c.items()}
            self.unseen_log_probs[n] = math.log(self.alpha / denom)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(sorted(self.counts))

    def probability(self, gram: str) -> float:
        n = len(gram)
        return math.exp(self.ngram_log_probs[n].get(gram, self.unseen_log_probs[n]))

    def log_likelihood(self, text_or_counts) -> float:
        counts = text_or_counts
        if isinstance(text_or_counts, str):
            counts = extract_ngrams(text_or_counts, self.orders)
        total = 0.0
        for n in self.orders:
            table, unseen = self.ngram_log_probs[n], self.unseen_log_probs[n]
            for gram in sorted(counts.get(n, ())):
                total += counts[n][gram] * table.get(gram, unseen)
        return total

    def to_dict(self) -> dict:
        return {
            "format": PROFILE_FORMAT,
            "language": self.language,
            "alpha": self.alpha,
            "counts": {str(n): dict(sorted(c.items())) for n, c in sorted(self.counts.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LanguageProfile":
        if data.get("format") != PROFILE_FORMAT:
            raise LanguageIdError(f"unsupported profile format {data.get('format')!r}")
        return cls(data["language"], {int(n): c for n, c in data["counts"].items()}, float(data["alpha"]))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False, indent=0) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "LanguageProfile":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class LanguagePrediction:
    language: str
    confidence: float


def train_profile(language: str, corpus_text: str, alpha: float = DEFAULT_ALPHA,
                  orders: Sequence[int] = DEFAULT_ORDERS) -> LanguageProfile:
    counts = extract_ngrams(corpus_text, orders)
    if not corpus_text.strip() or not any(counts.values()):
        raise LanguageIdError(f"no trainable text for language {language!r}")
    return LanguageProfile(language, {n: dict(c) for n, c in counts.items()}, alpha)


def _check_profiles(profiles) -> list[LanguageProfile]:
    profiles = sorted(profiles, key=lambda p: p.language)
    if len(profiles) < 2:
        raise LanguageIdError("language detection needs at least two profiles")
    return profiles


def _posterior(loglik: np.ndarray) -> np.ndarray:
    shifted = loglik - loglik.max()
    p = np.exp(shifted)
    return p / p.sum()


def detect_string(s: str, profiles: Iterable[LanguageProfile]) -> LanguagePrediction:
    """Most probable language of ``s`` under a uniform prior.

    Ties go to the lexicographically smallest language code.
    """
    if not s or not s.strip():
        raise LanguageIdError("cannot detect the language of an empty string")
    profiles = _check_profiles(profiles)
    counts = extract_ngrams(s, sorted({n for p in profiles for n in p.orders}))
    loglik = np.array([p.log_likelihood(counts) for p in profiles])
    post = _posterior(loglik)
    best = int(np.argmax(loglik))  # first maximum == smallest code
    return LanguagePrediction(profiles[best].language, float(post[best]))


def sampled_line_numbers(n_lines: int, head: int = SAMPLE_HEAD, every: int = SAMPLE_EVERY) -> list[int]:
    """1-based line numbers read by :func:`detect_file`: the first ``head``, then every ``every``-th."""
    picked = list(range(1, min(head, n_lines) + 1))
    picked.extend(range(every, n_lines + 1, every) if every > 0 else ())
    return sorted(set(picked))


def detect_file(doc: TextDocument, profiles, head: int = SAMPLE_HEAD, every: int = SAMPLE_EVERY) -> LanguagePrediction:
    sample = [doc.lines[i - 1] for i in sampled_line_numbers(len(doc.lines), head, every)]
    text = "\n".join(line for line in sample if line.strip())
    if not text:
        raise LanguageIdError(f"{doc.doc_id}: no text in the sampled lines")
    return detect_string(text, profiles)


def load_default_profiles() -> list[LanguageProfile]:
    """The bundled en/ga profiles."""
    root = resources.files("bitextforge") / "data" / "profiles"
    return sorted(
        (LanguageProfile.from_dict(json.loads(f.read_text(encoding="utf-8")))
         for f in root.iterdir() if f.name.endswith(".json")),
        key=lambda p: p.language,
    )


def load_profiles(paths: Iterable | None = None) -> list[LanguageProfile]:
    if not paths:
        return load_default_profiles()
    return sorted((LanguageProfile.load(p) for p in paths), key=lambda p: p.language)


class LanguageDetector(BaseEstimator, ClassifierMixin):
    """sklearn-compatible wrapper: ``fit(texts, languages)`` trains one profile per label.

    Can also be built from existing profiles with :meth:`from_profiles`.
    """

    def __init__(self, alpha=DEFAULT_ALPHA, orders=DEFAULT_ORDERS):
        self.alpha = alpha
        self.orders = orders

    def fit(self, X, y):
        X = check_texts(X, allow_empty=False)
        y = check_labels(y, len(X))
        by_lang = {}
        for text, lang in zip(X, y):
            by_lang.setdefault(str(lang), []).append(text)
        if len(by_lang) < 2:
            raise LanguageIdError("need training text for at least two languages")
        self.profiles_ = [
            train_profile(lang, "\n".join(texts), self.alpha, self.orders) for lang, texts in sorted(by_lang.items())
        ]
        self.classes_ = np.array([p.language for p in self.profiles_])
        return self

    @classmethod
    def from_profiles(cls, profiles) -> "LanguageDetector":
        profiles = _check_profiles(profiles)
        est = cls(alpha=profiles[0].alpha, orders=profiles[0].orders)
        est.profiles_ = profiles
        est.classes_ = np.array([p.language for p in profiles])
        return est

    def _loglik(self, X) -> np.ndarray:
        check_is_fitted(self, "profiles_")
        X = check_texts(X)
        orders = sorted({n for p in self.profiles_ for n in p.orders})
        rows = []
        for text in X:
            counts = extract_ngrams(text, orders)
            rows.append([p.log_likelihood(counts) for p in self.profiles_])
        return np.array(rows, dtype=float).reshape(len(X), len(self.profiles_))

    def predict_log_likelihood(self, X):
        return self._loglik(X)

    def predict_proba(self, X):
        return np.array([_posterior(row) for row in self._loglik(X)]).reshape(-1, len(self.profiles_))

    def predict(self, X):
        return self.classes_[np.argmax(self._loglik(X), axis=1)]
