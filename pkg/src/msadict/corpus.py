"""Corpus data model, JSON-lines ingestion, tokenization and step/sentence
segmentation for multi-parallel corpora.

A corpus record pairs one semantic expression (a predicate with named
arguments, or a bare term) with several alternative verbalizations.
"""

from __future__ import annotations

import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

# Joins the words of a fused multi-word phrase into one token.  Not
# whitespace, so ``str.split`` never breaks a fused token apart.
PHRASE_JOINER = "▁"

_TRAILING_PUNCT = ".,;:!?"
_QUOTES = "\"'`“”‘’"
_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")


class CorpusError(ValueError):
    """Raised for malformed corpus documents."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Argument:
    role: str
    value: tuple[str, ...]


@dataclass(frozen=True)
class SemanticExpression:
    """A predicate instance with ordered, named arguments, or a term."""

    name: str = ""
    args: tuple[Argument, ...] = ()
    term: tuple[str, ...] = ()

    def __post_init__(self):
        if self.is_term:
            if not self.term:
                raise CorpusError("term expression needs a non-empty value", field="term")
            if self.args:
                raise CorpusError("term expression cannot take arguments", field="args")
        else:
            if not self.args:
                raise CorpusError(f"predicate {self.name!r} needs at least one argument", field="args")
            roles = [a.role for a in self.args]
            if len(set(roles)) != len(roles):
                raise CorpusError(f"duplicate roles in predicate {self.name!r}", field="args")
            for arg in self.args:
                if not arg.role:
                    raise CorpusError("argument role must be non-empty", field="args")
                if not arg.value:
                    raise CorpusError(f"argument {arg.role!r} has an empty value", field="args")

    @property
    def is_term(self) -> bool:
        return self.name == ""

    @property
    def roles(self) -> tuple[str, ...]:
        return tuple(a.role for a in self.args)

    def value_of(self, role: str) -> tuple[str, ...]:
        for arg in self.args:
            if arg.role == role:
                return arg.value
        raise KeyError(role)

    @classmethod
    def predicate(cls, name: str, **values: str) -> "SemanticExpression":
        """Convenience constructor: ``predicate("univcd", prem1="a=0", ...)``."""
        return cls(name=name, args=tuple(Argument(r, tuple(tokenize(v))) for r, v in values.items()))

    @classmethod
    def make_term(cls, text: str) -> "SemanticExpression":
        return cls(term=tuple(tokenize(text)))

    def symbols(self) -> list[str]:
        """Tokens of the predicate name and all argument values (or the term)."""
        if self.is_term:
            return list(self.term)
        out = tokenize(self.name)
        for arg in self.args:
            out.extend(arg.value)
        return out


@dataclass(frozen=True)
class InstanceRecord:
    semantics: SemanticExpression
    verbalizations: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.verbalizations:
            raise CorpusError("record has no verbalizations", field="verbalizations")
        for v in self.verbalizations:
            if not v:
                raise CorpusError("empty verbalization", field="verbalizations")


@dataclass(frozen=True)
class Corpus:
    records: tuple[InstanceRecord, ...] = ()
    vocabulary: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        vocab = set()
        for rec in self.records:
            for v in rec.verbalizations:
                vocab.update(v)
            vocab.update(rec.semantics.term)
            for arg in rec.semantics.args:
                vocab.update(arg.value)
        object.__setattr__(self, "vocabulary", frozenset(vocab))

    def __len__(self):
        return len(self.records)

    def predicates(self) -> list[str]:
        return sorted({r.semantics.name for r in self.records if not r.semantics.is_term})


def is_punctuation(token: str) -> bool:
    return bool(token) and all(unicodedata.category(ch).startswith("P") for ch in token)


def _split_edges(word: str) -> list[str]:
    """Peel quotes, unbalanced brackets and trailing sentence punctuation."""
    lead: list[str] = []
    trail: list[str] = []
    changed = True
    while word and changed:
        changed = False
        if len(word) > 1 and word[0] in _QUOTES:
            lead.append(word[0])
            word = word[1:]
            changed = True
        if len(word) > 1 and word[-1] in _QUOTES:
            trail.append(word[-1])
            word = word[:-1]
            changed = True
        if len(word) > 1 and word[-1] in _TRAILING_PUNCT:
            trail.append(word[-1])
            word = word[:-1]
            changed = True
        if len(word) > 1 and word[0] == "(" and word.count("(") > word.count(")"):
            lead.append("(")
            word = word[1:]
            changed = True
        if len(word) > 1 and word[-1] == ")" and word.count(")") > word.count("("):
            trail.append(")")
            word = word[:-1]
            changed = True
    return lead + [word] + trail[::-1]


def tokenize(text: str) -> list[str]:
    """Split *text* into tokens.

    Whitespace separates tokens; sentence punctuation and quotes are split
    off word edges; formulas written without spaces (``a*b=0``) stay whole.
    Purely alphabetic words are lowercased.

    >>> tokenize("Assume that a=0 and b=0.")
    ['assume', 'that', 'a=0', 'and', 'b=0', '.']
    """
    tokens = []
    for word in text.split():
        for piece in _split_edges(word):
            if piece.isalpha():
                piece = piece.lower()
            tokens.append(piece)
    return tokens


def detokenize(tokens: Sequence[str]) -> str:
    """Join tokens back into text; fused phrases are expanded to words."""
    out = ""
    for tok in tokens:
        tok = tok.replace(PHRASE_JOINER, " ")
        if out and not (len(tok) == 1 and tok in _TRAILING_PUNCT):
            out += " "
        out += tok
    return out


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_BREAK.split(text.strip()) if s]


# --- segmentation -----------------------------------------------------------

def shared_symbols(step: SemanticExpression, sentence: Sequence[str]) -> int:
    """Multiset-intersection size of step symbols and sentence tokens."""
    return sum((Counter(step.symbols()) & Counter(sentence)).values())


def segment_pairs(steps: Sequence[SemanticExpression],
                  sentences: Sequence[Sequence[str]]) -> list[tuple[int, int]]:
    """Monotone one-to-one matching of steps to sentences.

    Maximizes the total shared-symbol count; only pairs sharing at least
    one symbol are matched.  Among equal-score matchings the earlier
    sentence is preferred.
    """
    n, m = len(steps), len(sentences)
    if n == 0 or m == 0:
        return []
    score = [[shared_symbols(s, t) for t in sentences] for s in steps]
    # best[i][j]: optimum over steps[:i] x sentences[:j]
    best = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            s = score[i - 1][j - 1]
            diag = best[i - 1][j - 1] + s if s > 0 else -1
            best[i][j] = max(best[i - 1][j], best[i][j - 1], diag)

    pairs = []
    i, j = n, m
    while i > 0 and j > 0:
        s = score[i - 1][j - 1]
        cur = best[i][j]
        # walking backwards: skipping sentence j first keeps earlier sentences
        if best[i][j - 1] == cur:
            j -= 1
        elif best[i - 1][j] == cur:
            i -= 1
        else:
            assert s > 0 and best[i - 1][j - 1] + s == cur
            pairs.append((i - 1, j - 1))
            i -= 1
            j -= 1
    pairs.reverse()
    return pairs


# --- file formats -----------------------------------------------------------

def _expression_from_json(obj: dict, line: Optional[int]) -> SemanticExpression:
    if not isinstance(obj, dict):
        raise CorpusError("record must be a JSON object", line=line)
    name = obj.get("predicate", "")
    if not isinstance(name, str):
        raise CorpusError("must be a string", line=line, field="predicate")
    try:
        if name == "":
            term = obj.get("term")
            if not isinstance(term, str) or not term.strip():
                raise CorpusError("term records need a non-empty string", line=line, field="term")
            return SemanticExpression(term=tuple(tokenize(term)))
        raw_args = obj.get("args")
        if not isinstance(raw_args, list) or not raw_args:
            raise CorpusError("must be a non-empty array", line=line, field="args")
        args = []
        for a in raw_args:
            if not isinstance(a, dict) or not isinstance(a.get("role"), str) \
                    or not isinstance(a.get("value"), str):
                raise CorpusError("entries need string 'role' and 'value'", line=line, field="args")
            args.append(Argument(a["role"], tuple(tokenize(a["value"]))))
        return SemanticExpression(name=name, args=tuple(args))
    except CorpusError as exc:
        if exc.line is None:
            raise CorpusError(str(exc), line=line) from None
        raise


def expression_to_json(expr: SemanticExpression) -> dict:
    if expr.is_term:
        return {"predicate": "", "term": " ".join(expr.term)}
    return {"predicate": expr.name,
            "args": [{"role": a.role, "value": " ".join(a.value)} for a in expr.args]}


def _json_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            yield lineno, json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON ({exc.msg})", line=lineno) from None


def _decode(data) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusError(f"not UTF-8: {exc}") from None
    return data


def parse_corpus(data) -> Corpus:
    """Parse a JSON-lines corpus document (bytes or str)."""
    records = []
    for lineno, obj in _json_lines(_decode(data)):
        sem = _expression_from_json(obj, lineno)
        verbs = obj.get("verbalizations")
        if not isinstance(verbs, list) or not all(isinstance(v, str) for v in verbs):
            raise CorpusError("must be an array of strings", line=lineno, field="verbalizations")
        if not verbs:
            raise CorpusError("record has no verbalizations", line=lineno, field="verbalizations")
        toks = tuple(tuple(tokenize(v)) for v in verbs)
        if any(not t for t in toks):
            raise CorpusError("empty verbalization", line=lineno, field="verbalizations")
        records.append(InstanceRecord(sem, toks))
    return Corpus(tuple(records))


def serialize_corpus(corpus: Corpus) -> str:
    lines = []
    for rec in corpus.records:
        obj = expression_to_json(rec.semantics)
        obj["verbalizations"] = [" ".join(v) for v in rec.verbalizations]
        lines.append(json.dumps(obj, ensure_ascii=False, sort_keys=True))
    return "".join(line + "\n" for line in lines)


def parse_expressions(data) -> list[SemanticExpression]:
    """Semantic expressions, one JSON object per line (no verbalizations)."""
    return [_expression_from_json(obj, lineno) for lineno, obj in _json_lines(_decode(data))]


def parse_raw_proofs(data) -> Corpus:
    """Build a corpus from raw proof documents.

    Each line holds ``steps`` (array of expression objects) and a free-text
    ``narrative`` (string) or ``narratives`` (array of strings).  Each
    narrative is split into sentences and aligned to the steps; every
    matched sentence becomes a verbalization of its step.
    """
    records = []
    for lineno, obj in _json_lines(_decode(data)):
        if not isinstance(obj, dict):
            raise CorpusError("document must be a JSON object", line=lineno)
        raw_steps = obj.get("steps")
        if not isinstance(raw_steps, list) or not raw_steps:
            raise CorpusError("must be a non-empty array", line=lineno, field="steps")
        steps = [_expression_from_json(s, lineno) for s in raw_steps]
        if "narratives" in obj:
            narratives = obj["narratives"]
        else:
            narratives = [obj.get("narrative")]
        if not isinstance(narratives, list) or not all(isinstance(n, str) for n in narratives):
            raise CorpusError("narrative text missing", line=lineno, field="narrative")
        verbs: list[list[tuple[str, ...]]] = [[] for _ in steps]
        for text in narratives:
            sentences = [tuple(tokenize(s)) for s in split_sentences(text)]
            sentences = [s for s in sentences if s]
            for si, ti in segment_pairs(steps, sentences):
                verbs[si].append(sentences[ti])
        for step, vs in zip(steps, verbs):
            if vs:
                records.append(InstanceRecord(step, tuple(vs)))
    return Corpus(tuple(records))


def fuse_tokens(tokens: Iterable[str], phrases: Iterable[tuple[str, ...]]) -> list[str]:
    """Rewrite word runs matching *phrases* as single fused tokens.

    Existing fused tokens are first expanded, then phrases are applied
    greedily left to right, longest first.
    """
    words = [w for tok in tokens for w in tok.split(PHRASE_JOINER)]
    by_first: dict[str, list[tuple[str, ...]]] = {}
    for p in phrases:
        if len(p) > 1:
            by_first.setdefault(p[0], []).append(p)
    for cands in by_first.values():
        cands.sort(key=lambda p: (-len(p), p))
    out = []
    i = 0
    while i < len(words):
        for p in by_first.get(words[i], ()):
            if tuple(words[i:i + len(p)]) == p:
                out.append(PHRASE_JOINER.join(p))
                i += len(p)
                break
        else:
            out.append(words[i])
            i += 1
    return out


def phrase_words(token: str) -> tuple[str, ...]:
    return tuple(token.split(PHRASE_JOINER))
