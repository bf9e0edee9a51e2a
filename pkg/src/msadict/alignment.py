"""Similarity scoring, pairwise profile alignment and progressive multiple
sequence alignment over token sequences.

Cells of an alignment are tokens (``str``), argument slots (:class:`Slot`)
or :data:`GAP`.  Plain sequences are one-row :class:`Msa` objects, so the
same dynamic program aligns sequences, alignments and slotted lattices.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

GAP = None

SUM_OF_PAIRS = "sum-of-pairs"
SET_MAX = "set-max"
PROFILE_MODES = (SUM_OF_PAIRS, SET_MAX)


@dataclass(frozen=True, order=True)
class Slot:
    """An argument position, e.g. ``[prem1]``."""

    role: str

    def __str__(self):
        return f"[{self.role}]"


Cell = Union[str, Slot, None]


@dataclass(frozen=True)
class Scores:
    match: float = 1.0
    paraphrase: float = 0.5
    gap: float = -0.01
    mismatch: float = -0.5


DEFAULT_SCORES = Scores()


def _elementary(x, y, thesaurus, scores: Scores) -> float:
    if x is GAP:
        if y is GAP:
            raise ValueError("sim is undefined for a pair of gaps")
        return scores.gap
    if y is GAP:
        return scores.gap
    if x == y:
        return scores.match
    if (thesaurus is not None and isinstance(x, str) and isinstance(y, str)
            and thesaurus.paraphrases(x, y)):
        return scores.paraphrase
    return scores.mismatch


def _as_symbol(x):
    if x is GAP or isinstance(x, (frozenset, set)):
        return x
    return frozenset((x,))


def sim(x, y, thesaurus=None, scores: Scores = DEFAULT_SCORES) -> float:
    """Similarity of two alignment symbols.

    A symbol is GAP, a single token/slot, or a set of them; for sets the
    best-scoring element pair counts.
    """
    sx, sy = _as_symbol(x), _as_symbol(y)
    if sx is GAP or sy is GAP:
        if sx is GAP and sy is GAP:
            raise ValueError("sim is undefined for a pair of gaps")
        return scores.gap
    if not sx or not sy:
        raise ValueError("symbol sets must be non-empty")
    return max(_elementary(a, b, thesaurus, scores) for a in sx for b in sy)


class Scorer:
    """Memoized elementary similarity for one thesaurus and score table."""

    def __init__(self, thesaurus=None, scores: Scores = DEFAULT_SCORES):
        self.thesaurus = thesaurus
        self.scores = scores
        self._cache: dict = {}

    def __call__(self, x, y) -> float:
        key = (x, y)
        try:
            return self._cache[key]
        except KeyError:
            val = self._cache[key] = _elementary(x, y, self.thesaurus, self.scores)
            return val


class InvariantError(RuntimeError):
    """An internal consistency check failed."""


@dataclass(frozen=True)
class Msa:
    """A multiple sequence alignment: equal-length rows of cells.

    ``origins`` labels each row with the index of its source sequence.
    """

    rows: tuple[tuple[Cell, ...], ...]
    origins: tuple[int, ...]

    def __post_init__(self):
        if not self.rows:
            raise InvariantError("an alignment needs at least one row")
        if len(self.origins) != len(self.rows):
            raise InvariantError("one origin per row required")
        if len(set(self.origins)) != len(self.origins):
            raise InvariantError("row origins must be unique")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise InvariantError("ragged alignment rows")
        for j in range(width):
            if all(r[j] is GAP for r in self.rows):
                raise InvariantError(f"column {j} contains only gaps")

    @classmethod
    def from_sequence(cls, tokens: Sequence[Cell], origin: int = 0) -> "Msa":
        return cls((tuple(tokens),), (origin,))

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0])

    def column(self, j: int) -> tuple[Cell, ...]:
        return tuple(r[j] for r in self.rows)

    def sequence(self, i: int) -> tuple[Cell, ...]:
        """Row *i* with gaps removed."""
        return tuple(c for c in self.rows[i] if c is not GAP)

    def sequences(self) -> dict[int, tuple[Cell, ...]]:
        return {o: self.sequence(i) for i, o in enumerate(self.origins)}

    def sorted_by_origin(self) -> "Msa":
        order = sorted(range(self.n_rows), key=self.origins.__getitem__)
        return Msa(tuple(self.rows[i] for i in order), tuple(self.origins[i] for i in order))

    def table(self, gap: str = "_") -> str:
        """Render as text, gaps shown as underscores."""
        cells = [[gap if c is GAP else str(c) for c in r] for r in self.rows]
        widths = [max(len(r[j]) for r in cells) for j in range(self.n_cols)]
        return "\n".join(" ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


def sop_score(m: Msa, thesaurus=None, scores: Scores = DEFAULT_SCORES) -> float:
    """Sum over columns and unordered row pairs of ``sim``; gap/gap is 0."""
    total = 0.0
    for j in range(m.n_cols):
        col = m.column(j)
        for x, y in combinations(col, 2):
            if x is GAP and y is GAP:
                continue
            total += _elementary(x, y, thesaurus, scores)
    return total


def _profiles(m: Msa):
    out = []
    for j in range(m.n_cols):
        counts = Counter(c for c in m.column(j) if c is not GAP)
        out.append((tuple(sorted(counts.items(), key=_cell_key)), sum(counts.values())))
    return out


def _cell_key(item):
    cell = item[0]
    return (isinstance(cell, Slot), str(cell))


def _column_scores(a: Msa, b: Msa, score: Scorer, mode: str):
    """Scores for aligning columns, and for a column against all gaps."""
    gap = score.scores.gap
    pa, pb = _profiles(a), _profiles(b)
    na, nb = a.n_rows, b.n_rows
    if mode == SUM_OF_PAIRS:
        match = []
        for items_a, ng_a in pa:
            row = []
            for items_b, ng_b in pb:
                s = 0.0
                for x, cx in items_a:
                    for y, cy in items_b:
                        s += cx * cy * score(x, y)
                s += gap * ((na - ng_a) * ng_b + ng_a * (nb - ng_b))
                row.append(s)
            match.append(row)
        del_a = [gap * ng * nb for _, ng in pa]
        ins_b = [gap * ng * na for _, ng in pb]
    elif mode == SET_MAX:
        match = [[max(score(x, y) for x, _ in ia for y, _ in ib) for ib, _ in pb] for ia, _ in pa]
        del_a = [gap] * len(pa)
        ins_b = [gap] * len(pb)
    else:
        raise ValueError(f"unknown profile mode {mode!r}")
    return match, del_a, ins_b


_EPS = 1e-9


def _fill(match, del_a, ins_b):
    n, m = len(del_a), len(ins_b)
    F = [[0.0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        F[i][0] = F[i - 1][0] + del_a[i - 1]
    for j in range(1, m + 1):
        F[0][j] = F[0][j - 1] + ins_b[j - 1]
    for i in range(1, n + 1):
        Fi, Fp, mi, di = F[i], F[i - 1], match[i - 1], del_a[i - 1]
        for j in range(1, m + 1):
            best = Fp[j - 1] + mi[j - 1]
            v = Fi[j - 1] + ins_b[j - 1]
            if v > best:
                best = v
            v = Fp[j] + di
            if v > best:
                best = v
            Fi[j] = best
    return F


def align_pair(a: Msa, b: Msa, thesaurus=None, scores: Scores = DEFAULT_SCORES,
               mode: str = SUM_OF_PAIRS, scorer: Optional[Scorer] = None) -> Msa:
    """Merge two alignments by global dynamic programming over their columns.

    Columns of *a* and *b* are kept intact; the merged rows are those of
    *a* followed by those of *b*.  In sum-of-pairs mode the result has the
    highest sum-of-pairs score among all merges.  Ties prefer aligning
    columns, then a gap in *a*, then a gap in *b*.
    """
    score = scorer or Scorer(thesaurus, scores)
    match, del_a, ins_b = _column_scores(a, b, score, mode)
    F = _fill(match, del_a, ins_b)
    i, j = a.n_cols, b.n_cols
    moves = []
    while i > 0 or j > 0:
        cur = F[i][j]
        if i > 0 and j > 0 and abs(F[i - 1][j - 1] + match[i - 1][j - 1] - cur) <= _EPS:
            moves.append((i - 1, j - 1))
            i, j = i - 1, j - 1
        elif j > 0 and abs(F[i][j - 1] + ins_b[j - 1] - cur) <= _EPS:
            moves.append((None, j - 1))
            j -= 1
        else:
            moves.append((i - 1, None))
            i -= 1
    moves.reverse()
    gaps_a = (GAP,) * a.n_rows
    gaps_b = (GAP,) * b.n_rows
    cols = []
    for ia, jb in moves:
        ca = a.column(ia) if ia is not None else gaps_a
        cb = b.column(jb) if jb is not None else gaps_b
        cols.append(ca + cb)
    n = a.n_rows + b.n_rows
    rows = tuple(tuple(c[r] for c in cols) for r in range(n))
    return Msa(rows, a.origins + b.origins)


def pair_score(x: Sequence[Cell], y: Sequence[Cell], scorer: Scorer) -> float:
    """Optimal global alignment score of two plain sequences."""
    if not x and not y:
        return 0.0
    gap = scorer.scores.gap
    match = [[scorer(p, q) for q in y] for p in x]
    F = _fill(match, [gap] * len(x), [gap] * len(y))
    return F[len(x)][len(y)]


def iterative_msa(items: Iterable[Msa], thesaurus=None, scores: Scores = DEFAULT_SCORES,
                  mode: str = SUM_OF_PAIRS, threads: int = 1) -> Msa:
    """Progressive alignment: repeatedly merge the closest pair of alignments.

    Closeness of two alignments is the mean optimal pairwise score over
    their source sequences, computed once from the original sequences.
    Equal means go to the pair with the smallest origin sets.  The result
    does not depend on the order of *items*; rows come out sorted by origin.
    """
    clusters = sorted((m.sorted_by_origin() for m in items), key=lambda m: m.origins)
    if not clusters:
        raise ValueError("iterative_msa needs at least one alignment")
    if len(clusters) == 1:
        return clusters[0]
    seen = [o for m in clusters for o in m.origins]
    if len(set(seen)) != len(seen):
        raise InvariantError("row origins must be unique across inputs")

    scorer = Scorer(thesaurus, scores)
    seqs = {}
    owner = {}
    for k, m in enumerate(clusters):
        seqs.update(m.sequences())
        owner.update((o, k) for o in m.origins)
    pairs = [(p, q) for p, q in combinations(sorted(seqs), 2) if owner[p] != owner[q]]

    def _score(pq):
        return pair_score(seqs[pq[0]], seqs[pq[1]], scorer)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(_score, pairs))
    else:
        values = [_score(pq) for pq in pairs]
    row_score = dict(zip(pairs, values))

    # summed row-pair scores between live clusters, keyed by cluster index
    live = dict(enumerate(clusters))
    sums: dict[tuple[int, int], float] = {}
    for ka, kb in combinations(sorted(live), 2):
        sums[ka, kb] = sum(row_score[_ordered(p, q)]
                           for p in live[ka].origins for q in live[kb].origins)
    next_key = len(clusters)
    while len(live) > 1:
        best = None
        for (ka, kb), total in sums.items():
            ma, mb = live[ka], live[kb]
            key = (-total / (ma.n_rows * mb.n_rows),) + tuple(sorted((ma.origins, mb.origins)))
            if best is None or key < best[0]:
                best = (key, ka, kb)
        _, ka, kb = best
        first, second = sorted((live[ka], live[kb]), key=lambda m: m.origins)
        merged = align_pair(first, second, mode=mode, scorer=scorer).sorted_by_origin()
        del live[ka], live[kb]
        sums = {k: v for k, v in sums.items() if ka not in k and kb not in k} | {
            (other, next_key): sums[_ordered(other, ka)] + sums[_ordered(other, kb)]
            for other in live}
        live[next_key] = merged
        next_key += 1
    (result,) = live.values()
    return result


def _ordered(x, y):
    return (x, y) if x < y else (y, x)
