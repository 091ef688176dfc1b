"""Length-based sentence alignment by dynamic programming over beads.

A bead links a run of 0-2 source sentences to 0-2 target sentences. Its
cost is the negative log prior of the bead shape plus the two-sided tail
probability of the normalised length difference::

    delta = (tgt_len - c * src_len) / sqrt(src_len * s2)
    cost  = -log prior(shape) - log(2 * (1 - Phi(|delta|)))

The optimum is found with a backward recursion over prefix pairs,
vectorised along anti-diagonals so that documents with a few thousand
sentences per side stay fast. Ties are broken in favour of more 1-1 beads
and then the lexicographically smallest sequence of bead shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import log_ndtr

from .corpus import SentencePair

ONE_TO_ONE = (1, 1)
DEFAULT_PRIORS = {
    (1, 1): 0.89,
    (1, 0): 0.0099,
    (0, 1): 0.0099,
    (2, 1): 0.0445,
    (1, 2): 0.0445,
}
MANY_TO_MANY_PRIOR = 0.011
BRUTE_FORCE_LIMIT = 8
_LN2 = math.log(2.0)


class AlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class AlignmentLink:
    """Half-open index ranges into the source and target sentence lists."""

    src_indices: range
    tgt_indices: range
    cost: float = 0.0

    def __post_init__(self):
        shape = self.shape
        if shape == (0, 0) or max(shape) > 2 or (0 in shape and max(shape) > 1):
            raise AlignmentError(f"unsupported bead shape {shape}")
        if self.cost < 0:
            raise AlignmentError("bead cost must be non-negative")

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.src_indices), len(self.tgt_indices))


@dataclass(frozen=True)
class BeadCostModel:
    bead_log_priors: dict = field(default_factory=lambda: {k: math.log(v) for k, v in DEFAULT_PRIORS.items()})
    c: float = 1.0
    s2: float = 6.8

    def __post_init__(self):
        if self.s2 <= 0:
            raise AlignmentError("length variance s2 must be positive")
        if self.c <= 0:
            raise AlignmentError("length ratio c must be positive")
        total = sum(math.exp(v) for v in self.bead_log_priors.values())
        if total > 1 + 1e-12:
            raise AlignmentError(f"bead priors sum to {total:.6f} > 1")
        for shape in self.bead_log_priors:
            AlignmentLink(range(shape[0]), range(shape[1]))

    @classmethod
    def default(cls, allow_many_to_many: bool = False, c: float = 1.0, s2: float = 6.8,
                priors: dict | None = None) -> "BeadCostModel":
        priors = dict(priors or DEFAULT_PRIORS)
        if allow_many_to_many:
            priors.setdefault((2, 2), MANY_TO_MANY_PRIOR)
            total = sum(priors.values())
            if total > 1:
                priors = {k: v / total for k, v in priors.items()}
        return cls({k: math.log(v) for k, v in priors.items()}, c, s2)

    @property
    def shapes(self) -> list[tuple[int, int]]:
        return sorted(self.bead_log_priors)

    def transposed(self) -> "BeadCostModel":
        """Model for aligning target against source: priors mirrored, c inverted."""
        return BeadCostModel({(b, a): v for (a, b), v in self.bead_log_priors.items()}, 1.0 / self.c, self.s2 / self.c)

    def with_c(self, c: float) -> "BeadCostModel":
        return BeadCostModel(dict(self.bead_log_priors), c, self.s2)

    def to_dict(self) -> dict:
        return {
            "priors": {f"{a}-{b}": math.exp(v) for (a, b), v in sorted(self.bead_log_priors.items())},
            "c": self.c,
            "s2": self.s2,
        }


def _bead_costs(src_len, tgt_len, shape, model: BeadCostModel) -> np.ndarray:
    """Vectorised bead cost; the scalar :func:`bead_cost` goes through here too."""
    try:
        log_prior = model.bead_log_priors[tuple(shape)]
    except KeyError:
        raise AlignmentError(f"bead shape {tuple(shape)} not supported by the model") from None
    a, b = shape
    src = np.asarray(src_len, dtype=float) * (a > 0)
    tgt = np.asarray(tgt_len, dtype=float) * (b > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(src > 0, (tgt - model.c * src) / np.sqrt(src * model.s2), 0.0)
    tail = np.where(delta == 0, 0.0, _LN2 + log_ndtr(-np.abs(delta)))
    return -log_prior - tail


def bead_cost(src_len: int, tgt_len: int, shape, model: BeadCostModel) -> float:
    if src_len < 0 or tgt_len < 0:
        raise AlignmentError("lengths must be non-negative")
    return float(_bead_costs(src_len, tgt_len, shape, model))


def _lengths(sentences) -> np.ndarray:
    return np.array([len(s) if isinstance(s, str) else int(s) for s in sentences], dtype=np.int64)


def align_sentences(src: Sequence, tgt: Sequence, model: BeadCostModel | None = None) -> list[AlignmentLink]:
    """Minimum-cost monotone bead tiling of ``src`` x ``tgt``.

    ``src``/``tgt`` are sentence strings (or :class:`SentenceList`), or
    integer lengths.
    """
    model = model or BeadCostModel()
    src_len, tgt_len = _lengths(src), _lengths(tgt)
    m, n = len(src_len), len(tgt_len)
    if m == 0 or n == 0:
        raise AlignmentError("cannot align an empty sentence list")
    shapes = model.shapes
    S = np.concatenate([[0], np.cumsum(src_len)])
    T = np.concatenate([[0], np.cumsum(tgt_len)])

    pad = 3
    cost = np.full((m + pad, n + pad), np.inf)
    ones = np.zeros((m + pad, n + pad), dtype=np.int64)
    choice = np.full((m + pad, n + pad), -1, dtype=np.int8)
    cost[m, n] = 0.0

    for k in range(m + n - 1, -1, -1):
        i = np.arange(max(0, k - n), min(m, k) + 1)
        j = k - i
        best = np.full(len(i), np.inf)
        best_ones = np.zeros(len(i), dtype=np.int64)
        best_choice = np.full(len(i), -1, dtype=np.int8)
        for s, (a, b) in enumerate(shapes):
            ii, jj = i + a, j + b
            ok = (ii <= m) & (jj <= n)
            if not ok.any():
                continue
            iic, jjc = np.minimum(ii, m), np.minimum(jj, n)
            bead = _bead_costs(S[iic] - S[i], T[jjc] - T[j], (a, b), model)
            cand = np.where(ok, bead + cost[iic, jjc], np.inf)
            cand_ones = ones[iic, jjc] + ((a, b) == ONE_TO_ONE)
            better = (cand < best) | ((cand == best) & (cand_ones > best_ones) & np.isfinite(cand))
            best = np.where(better, cand, best)
            best_ones = np.where(better, cand_ones, best_ones)
            best_choice = np.where(better, s, best_choice)
        cost[i, j] = best
        ones[i, j] = best_ones
        choice[i, j] = best_choice

    links, i, j = [], 0, 0
    while (i, j) != (m, n):
        a, b = shapes[choice[i, j]]
        c = bead_cost(int(S[i + a] - S[i]), int(T[j + b] - T[j]), (a, b), model)
        links.append(AlignmentLink(range(i, i + a), range(j, j + b), c))
        i, j = i + a, j + b
    return links


def length_ratio(src: Sequence, tgt: Sequence) -> float:
    """Total target length over total source length; 1.0 if either side is empty."""
    s, t = int(_lengths(src).sum()), int(_lengths(tgt).sum())
    return t / s if s and t else 1.0


def total_cost(links: Sequence[AlignmentLink]) -> float:
    return math.fsum(link.cost for link in links)


def brute_force_align(src: Sequence, tgt: Sequence, model: BeadCostModel | None = None,
                      tol: float = 1e-9) -> list[AlignmentLink]:
    """Exhaustive reference aligner for tiny instances (test oracle).

    Enumerates every monotone tiling; totals within ``tol`` count as ties and
    are resolved like :func:`align_sentences`.
    """
    model = model or BeadCostModel()
    src_len, tgt_len = [int(x) for x in _lengths(src)], [int(x) for x in _lengths(tgt)]
    m, n = len(src_len), len(tgt_len)
    if m > BRUTE_FORCE_LIMIT or n > BRUTE_FORCE_LIMIT:
        raise AlignmentError(f"brute force is limited to {BRUTE_FORCE_LIMIT} sentences per side")
    if m == 0 or n == 0:
        raise AlignmentError("cannot align an empty sentence list")
    shapes = model.shapes
    costs = {}
    for i in range(m + 1):
        for j in range(n + 1):
            for a, b in shapes:
                if i + a <= m and j + b <= n:
                    costs[i, j, a, b] = bead_cost(sum(src_len[i:i + a]), sum(tgt_len[j:j + b]), (a, b), model)

    best = None  # (total, -ones, shape sequence)

    def visit(i, j, seq, total, n_ones):
        nonlocal best
        if (i, j) == (m, n):
            key = (total, -n_ones, tuple(seq))
            if best is None or total < best[0] - tol:
                best = key
            elif abs(total - best[0]) <= tol and key[1:] < best[1:]:
                best = key
            return
        for a, b in shapes:
            if i + a <= m and j + b <= n:
                seq.append((a, b))
                visit(i + a, j + b, seq, total + costs[i, j, a, b], n_ones + ((a, b) == ONE_TO_ONE))
                seq.pop()

    visit(0, 0, [], 0.0, 0)
    links, i, j = [], 0, 0
    for a, b in best[2]:
        links.append(AlignmentLink(range(i, i + a), range(j, j + b), costs[i, j, a, b]))
        i, j = i + a, j + b
    return links


def count_tilings(m: int, n: int, shapes) -> int:
    """Number of monotone bead tilings of an m x n grid (by recursion)."""
    table = [[0] * (n + 1) for _ in range(m + 1)]
    table[0][0] = 1
    for i in range(m + 1):
        for j in range(n + 1):
            if i or j:
                table[i][j] = sum(table[i - a][j - b] for a, b in shapes if i >= a and j >= b)
    return table[m][n]


def links_to_pairs(src: Sequence[str], tgt: Sequence[str], links, doc_pair_id: str = "") -> list[SentencePair]:
    return [
        SentencePair(
            " ".join(src[k] for k in link.src_indices),
            " ".join(tgt[k] for k in link.tgt_indices),
            link=link,
            doc_pair_id=doc_pair_id,
        )
        for link in links
    ]


def check_tiling(links: Sequence[AlignmentLink], m: int, n: int) -> None:
    """Raise unless ``links`` cover 0..m and 0..n exactly once, in order."""
    i = j = 0
    for link in links:
        if link.src_indices.start != i or link.tgt_indices.start != j:
            raise AlignmentError(f"gap or overlap at bead {link}")
        i, j = link.src_indices.stop, link.tgt_indices.stop
    if (i, j) != (m, n):
        raise AlignmentError(f"tiling ends at {(i, j)}, expected {(m, n)}")


def format_link(link: AlignmentLink) -> str:
    s, t = link.src_indices, link.tgt_indices
    return f"{s.start}-{s.stop}\t{t.start}-{t.stop}\t{link.cost!r}"


def parse_link(line: str) -> AlignmentLink:
    try:
        src, tgt, cost = line.rstrip("\n").split("\t")
        s0, s1 = (int(x) for x in src.split("-"))
        t0, t1 = (int(x) for x in tgt.split("-"))
        return AlignmentLink(range(s0, s1), range(t0, t1), float(cost))
    except ValueError as exc:
        raise AlignmentError(f"malformed alignment line {line!r}") from exc


def write_alignment(links, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for link in links:
            f.write(format_link(link) + "\n")


def read_alignment(path) -> list[AlignmentLink]:
    with open(path, encoding="utf-8") as f:
        return [parse_link(line) for line in f if line.strip()]
