"""Paraphrase thesaurus induction from parallel verbalizations.

Pairs of verbalizations of the same record are aligned; the diverging
stretches between shared words ("sausages") give candidate paraphrase
pairs.  Candidates seen in enough alignments are accepted, multi-word
phrases are fused into single tokens, and the process repeats until no
new pair appears.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, TextIO

from .alignment import DEFAULT_SCORES, GAP, Msa, Scorer, Scores, align_pair, sop_score
from .corpus import PHRASE_JOINER, Corpus, InstanceRecord, fuse_tokens, is_punctuation, phrase_words

log = logging.getLogger(__name__)


def fuse(words: Iterable[str]) -> str:
    return PHRASE_JOINER.join(words)


class Thesaurus:
    """Symmetric, irreflexive paraphrase relation over tokens.

    Multi-word phrases are stored as fused tokens.  Each accepted pair
    keeps the list of alignments that witnessed it.
    """

    def __init__(self, pairs: Iterable[tuple[str, str]] = ()):
        self._pairs: set[frozenset] = set()
        self._partners: dict[str, set[str]] = defaultdict(set)
        self.witnesses: dict[frozenset, list] = {}
        self.iterations = 0
        for a, b in pairs:
            self.add(a, b)

    def add(self, a: str, b: str, witnesses: Optional[list] = None) -> bool:
        a, b = _as_token(a), _as_token(b)
        if a == b:
            raise ValueError(f"a token cannot paraphrase itself: {a!r}")
        key = frozenset((a, b))
        if key in self._pairs:
            return False
        self._pairs.add(key)
        self._partners[a].add(b)
        self._partners[b].add(a)
        self.witnesses[key] = list(witnesses or [])
        return True

    def paraphrases(self, x: str, y: str) -> bool:
        return x != y and y in self._partners.get(x, ())

    def partners(self, x: str) -> set[str]:
        return set(self._partners.get(x, ()))

    def witness_count(self, a: str, b: str) -> int:
        return len(self.witnesses.get(frozenset((a, b)), ()))

    def pairs(self) -> list[tuple[str, str]]:
        return sorted(tuple(sorted(p)) for p in self._pairs)

    def phrases(self) -> list[tuple[str, ...]]:
        """Multi-word phrases appearing in the thesaurus, as word tuples."""
        out = {phrase_words(t) for p in self._pairs for t in p}
        return sorted(p for p in out if len(p) > 1)

    def copy(self) -> "Thesaurus":
        t = Thesaurus()
        for key in sorted(self._pairs, key=sorted):
            a, b = sorted(key)
            t.add(a, b, self.witnesses.get(key))
        t.iterations = self.iterations
        return t

    def __contains__(self, pair) -> bool:
        a, b = pair
        return frozenset((_as_token(a), _as_token(b))) in self._pairs

    def __len__(self):
        return len(self._pairs)

    def __iter__(self):
        return iter(self.pairs())

    def __eq__(self, other):
        return isinstance(other, Thesaurus) and self._pairs == other._pairs

    def __repr__(self):
        return f"Thesaurus({self.pairs()!r})"

    def dumps(self, verbose: bool = False) -> str:
        """One pair per line, tab-separated; fused phrases shown with spaces."""
        lines = []
        for a, b in self.pairs():
            fields = [a.replace(PHRASE_JOINER, " "), b.replace(PHRASE_JOINER, " ")]
            if verbose:
                fields.append(str(self.witness_count(a, b)))
            lines.append("\t".join(fields))
        return "".join(line + "\n" for line in lines)

    def write(self, stream: TextIO, verbose: bool = False) -> None:
        stream.write(self.dumps(verbose))

    @classmethod
    def loads(cls, text: str) -> "Thesaurus":
        t = cls()
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3) or not fields[0].strip() or not fields[1].strip():
                raise ValueError(f"thesaurus line {lineno}: expected two tab-separated phrases")
            t.add(fields[0], fields[1])
            if len(fields) == 3:
                t.witnesses[frozenset((_as_token(fields[0]), _as_token(fields[1])))] = \
                    [None] * int(fields[2])
        return t


def _as_token(phrase: str) -> str:
    """Accept ``"are equal to"`` or an already fused token."""
    return fuse(phrase.split()) if " " in phrase.strip() else phrase.strip()


@dataclass(frozen=True)
class Sausage:
    """A stretch where two aligned rows diverge between shared columns.

    ``entry``/``exit`` are column indices of the bounding match columns.
    """

    entry: int
    exit: int
    interiors: tuple[tuple[str, ...], tuple[str, ...]]


def extract_sausages(m: Msa, thesaurus=None, scores: Scores = DEFAULT_SCORES) -> list[Sausage]:
    if m.n_rows != 2:
        raise ValueError("sausage extraction needs a two-row alignment")
    scorer = Scorer(thesaurus, scores)
    top, bottom = m.rows
    matches = [j for j in range(m.n_cols)
               if top[j] is not GAP and bottom[j] is not GAP
               and scorer(top[j], bottom[j]) >= scores.paraphrase]
    out = []
    for i, j in zip(matches, matches[1:]):
        if j == i + 1:
            continue
        left = tuple(c for c in top[i + 1:j] if c is not GAP)
        right = tuple(c for c in bottom[i + 1:j] if c is not GAP)
        if left and right:
            out.append(Sausage(i, j, (left, right)))
    return out


@dataclass
class InductionSettings:
    cutoff: float = 4.0
    min_witnesses: int = 2
    interior_cap: int = 4
    scores: Scores = field(default_factory=Scores)
    max_iterations: int = 50
    threads: int = 1


def _candidate(sausage: Sausage, cap: int) -> Optional[tuple[str, str]]:
    left, right = (tuple(w for tok in side for w in phrase_words(tok)) for side in sausage.interiors)
    if left == right or len(left) > cap or len(right) > cap:
        return None
    if all(is_punctuation(w) for w in left) or all(is_punctuation(w) for w in right):
        return None
    return tuple(sorted((fuse(left), fuse(right))))


def induce_thesaurus(corpus: Corpus, settings: Optional[InductionSettings] = None,
                     initial: Optional[Thesaurus] = None) -> Thesaurus:
    """Iterate pairwise alignment and sausage harvesting to a fixpoint.

    Only verbalizations of the same record are compared.  The returned
    thesaurus records, per pair, the ``(record, i, j, iteration)`` ids of
    the alignments that witnessed it, and ``iterations`` counts the
    alignment passes made.
    """
    cfg = settings or InductionSettings()
    thesaurus = initial.copy() if initial is not None else Thesaurus()
    working = [[list(v) for v in rec.verbalizations] for rec in corpus.records]
    jobs = [(r, i, j) for r, verbs in enumerate(working)
            for i, j in combinations(range(len(verbs)), 2)]
    if thesaurus.phrases():
        working = [[fuse_tokens(v, thesaurus.phrases()) for v in verbs] for verbs in working]

    iteration = 0
    while iteration < cfg.max_iterations:
        iteration += 1
        scorer = Scorer(thesaurus, cfg.scores)

        def harvest(job):
            r, i, j = job
            a = Msa.from_sequence(working[r][i], 0)
            b = Msa.from_sequence(working[r][j], 1)
            m = align_pair(a, b, scorer=scorer)
            if sop_score(m, thesaurus, cfg.scores) < cfg.cutoff:
                return []
            found = []
            for s in extract_sausages(m, thesaurus, cfg.scores):
                pair = _candidate(s, cfg.interior_cap)
                if pair is not None and pair not in thesaurus:
                    found.append(pair)
            return found

        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                harvested = list(pool.map(harvest, jobs))
        else:
            harvested = [harvest(job) for job in jobs]

        candidates: dict[tuple[str, str], list] = defaultdict(list)
        for job, pairs in zip(jobs, harvested):
            for pair in dict.fromkeys(pairs):
                candidates[pair].append(job + (iteration,))
        accepted = [p for p in sorted(candidates) if len(candidates[p]) >= cfg.min_witnesses]
        log.debug("iteration %d: %d candidates, %d accepted", iteration, len(candidates), len(accepted))
        for a, b in accepted:
            thesaurus.add(a, b, candidates[a, b])
        if not accepted:
            break
        phrases = thesaurus.phrases()
        if phrases:
            working = [[fuse_tokens(v, phrases) for v in verbs] for verbs in working]
    thesaurus.iterations = iteration
    return thesaurus


def fuse_corpus(corpus: Corpus, thesaurus: Thesaurus) -> Corpus:
    """Copy of *corpus* with the thesaurus' multi-word phrases fused."""
    phrases = thesaurus.phrases()
    if not phrases:
        return corpus
    return Corpus(tuple(
        InstanceRecord(rec.semantics, tuple(tuple(fuse_tokens(v, phrases)) for v in rec.verbalizations))
        for rec in corpus.records))
