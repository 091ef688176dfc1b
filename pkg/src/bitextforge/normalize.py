"""Character-level normalization applied to every extracted document."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_texts

BOM = "\ufeff"

# Line separators that survive normalization as "\n"; everything else that
# str.isspace() accepts is intra-line whitespace and gets merged.
_LINE_BREAKS = re.compile("\r\n|[\r\x0b\x0c\x85\u2028\u2029]")
_INLINE_WS = re.compile(r"[^\S\n]+")


@dataclass(frozen=True)
class NormalizationReport:
    boms_removed: int = 0
    chars_substituted: int = 0
    whitespace_runs_merged: int = 0

    def __add__(self, other: "NormalizationReport") -> "NormalizationReport":
        return NormalizationReport(
            self.boms_removed + other.boms_removed,
            self.chars_substituted + other.chars_substituted,
            self.whitespace_runs_merged + other.whitespace_runs_merged,
        )

    def to_dict(self):
        return {
            "boms_removed": self.boms_removed,
            "chars_substituted": self.chars_substituted,
            "whitespace_runs_merged": self.whitespace_runs_merged,
        }


def normalize_text(raw: str, substitutions: dict[str, str] | None = None) -> tuple[str, NormalizationReport]:
    """Return ``raw`` in NFC with BOMs dropped and intra-line whitespace runs merged.

    Substitutions are applied before NFC, so keys are written the way the
    characters appear in the extracted (possibly corrupted) text. Line
    breaks of any flavour become ``"\\n"``; case and tokenization are left
    alone. Idempotent as long as no substitution output is itself a key.
    """
    boms = raw.count(BOM)
    text = raw.replace(BOM, "") if boms else raw

    substituted = 0
    if substitutions:
        out = []
        for ch in text:
            rep = substitutions.get(ch)
            if rep is None:
                out.append(ch)
            else:
                out.append(rep)
                substituted += 1
        text = "".join(out).replace(BOM, "")

    text = _LINE_BREAKS.sub("\n", text)
    text = unicodedata.normalize("NFC", text)

    merged = 0

    def _merge(m):
        nonlocal merged
        if m.group(0) != " ":
            merged += 1
        return " "

    text = _INLINE_WS.sub(_merge, text)
    return text, NormalizationReport(boms, substituted, merged)


def load_substitutions(path) -> dict[str, str]:
    """Read a substitution map: one ``FROM TO`` pair of hex code points per line.

    ``#`` starts a comment. ``TO`` may be ``-`` to delete the character.
    """
    table = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected two hex code points, got {line!r}")
        src, dst = parts
        try:
            key = chr(int(src.removeprefix("U+").removeprefix("u+"), 16))
            value = "" if dst == "-" else chr(int(dst.removeprefix("U+").removeprefix("u+"), 16))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
        table[key] = value
    return table


class UnicodeNormalizer(BaseEstimator, TransformerMixin):
    """Stateless transformer wrapper around :func:`normalize_text`.

    ``report_`` holds the summed :class:`NormalizationReport` of the last
    ``transform`` call.
    """

    def __init__(self, substitutions=None):
        self.substitutions = substitutions

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        X = check_texts(X)
        out = []
        total = NormalizationReport()
        for raw in X:
            text, report = normalize_text(raw, self.substitutions)
            out.append(text)
            total = total + report
        self.report_ = total
        return out
