"""Template induction: cross-instance alignment, consensus and realization.

The slotted lattices of all instances of one predicate are aligned into a
unified lattice.  Its best path under length-normalized node weight is the
predicate's template.  Templates and term realizations together form the
mapping dictionary.
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .alignment import (DEFAULT_SCORES, SUM_OF_PAIRS, Msa, Scores, Slot,
                        iterative_msa)
from .config import PipelineConfig
from .corpus import Corpus, InstanceRecord, SemanticExpression, is_punctuation
from .lattice import Lattice, msa_to_lattice
from .slotting import SlottedLattice, make_slotted

log = logging.getLogger(__name__)

STOP_WORDS = frozenset({"the", "a", "to", "and", "of"})
_EPS = 1e-9


class RealizationError(LookupError):
    pass


@dataclass(frozen=True, eq=False)
class UnifiedSlottedLattice(SlottedLattice):
    """Slotted lattice merged over every instance of one predicate."""

    instances: int = 1


def _relabel(lattices: Sequence[SlottedLattice]) -> list[tuple[Msa, dict]]:
    seen: set = set()
    clash = False
    for sl in lattices:
        if seen & set(sl.msa.origins):
            clash = True
            break
        seen |= set(sl.msa.origins)
    if not clash:
        return [(sl.msa, sl.fillers) for sl in lattices]
    out, nxt = [], 0
    for sl in lattices:
        mapping = {o: nxt + k for k, o in enumerate(sl.msa.origins)}
        nxt += len(mapping)
        m = Msa(sl.msa.rows, tuple(mapping[o] for o in sl.msa.origins))
        out.append((m, {mapping[o]: f for o, f in sl.fillers.items()}))
    return out


def cross_instance_align(lattices: Sequence[SlottedLattice], thesaurus=None,
                         scores: Scores = DEFAULT_SCORES, mode: str = SUM_OF_PAIRS,
                         threads: int = 1) -> UnifiedSlottedLattice:
    """Align the slotted lattices of one predicate's instances.

    Each lattice enters as the profile of its alignment.  Slots of the same
    role match, anything else involving a slot is a mismatch.  Row origins
    that collide between inputs are renumbered in input order.
    """
    if not lattices:
        raise ValueError("need at least one slotted lattice")
    names = {sl.predicate for sl in lattices}
    if len(names) != 1:
        raise ValueError(f"lattices of different predicates: {sorted(names)}")
    roles: list[str] = []
    for sl in lattices:
        roles.extend(r for r in sl.roles if r not in roles)
    unmatched = tuple(r for r in roles if all(r in sl.unmatched for sl in lattices))
    if len(lattices) == 1:
        sl = lattices[0]
        return UnifiedSlottedLattice(sl.lattice, sl.predicate, tuple(roles), dict(sl.fillers), unmatched, 1)
    parts = _relabel(lattices)
    fillers: dict = {}
    for _, f in parts:
        fillers.update(f)
    merged = iterative_msa([m for m, _ in parts], thesaurus, scores, mode, threads)
    return UnifiedSlottedLattice(msa_to_lattice(merged), lattices[0].predicate, tuple(roles),
                                 fillers, unmatched, len(lattices))


def node_weight(lattice: Lattice, node: int, downweight: float = 0.1,
                stop_words: frozenset = STOP_WORDS) -> float:
    """Traversal count, scaled by *downweight* for punctuation and stop words."""
    if node in (lattice.start, lattice.end):
        raise ValueError("start and end carry no weight")
    count = lattice.paths_through[node]
    if lattice.is_slot(node):
        return float(count)
    words = [c for c in lattice.payloads[node] if isinstance(c, str)]
    if any(w in stop_words or is_punctuation(w) for w in words):
        return count * downweight
    return float(count)


def best_mean_path(n_nodes: int, edges: Iterable[tuple[int, int]], weights: Mapping[int, float],
                   floor: int = 1, labels: Optional[Mapping[int, str]] = None) -> Optional[tuple[int, ...]]:
    """Interior nodes of the start→end path with the highest mean weight.

    Node 0 is start and ``n_nodes - 1`` is end; every edge must point from
    a lower to a higher id.  Only paths with at least *floor* interior
    nodes count, and a path may pass at most one node per label.  Ties go
    to the shorter path, then to the lexicographically smaller one.
    Returns ``None`` when no path qualifies.
    """
    end = n_nodes - 1
    preds: dict[int, list[int]] = defaultdict(list)
    for u, v in sorted(set(edges)):
        if not 0 <= u < v <= end:
            raise ValueError(f"edge {(u, v)} is not in topological order")
        preds[v].append(u)
    labels = labels or {}
    # state (length, labels used) -> (sum, predecessor node, predecessor state)
    table: list[dict] = [dict() for _ in range(n_nodes)]
    table[0][(0, frozenset())] = (0.0, None, None)

    def trace(v, key):
        out = []
        while v != 0:
            out.append(v)
            _, u, key = table[v][key]
            v = u
        return tuple(reversed(out))

    for v in range(1, end):
        here = table[v]
        label = labels.get(v)
        w = weights[v]
        for u in preds[v]:
            for (length, used), (total, _, _) in table[u].items():
                if label is not None and label in used:
                    continue
                key = (length + 1, used | {label} if label is not None else used)
                cand = total + w
                old = here.get(key)
                if old is None or cand > old[0] + _EPS:
                    here[key] = (cand, u, (length, used))
                elif cand > old[0] - _EPS:
                    if trace(u, (length, used)) < trace(old[1], old[2]):
                        here[key] = (cand, u, (length, used))
    best = None
    for u in preds[end]:
        for key, (total, _, _) in table[u].items():
            length = key[0]
            if length < floor or length == 0:
                continue
            mean = total / length
            if best is not None:
                if mean < best[0] - _EPS:
                    continue
                if mean < best[0] + _EPS:
                    if length > best[1]:
                        continue
                    if length == best[1]:
                        path = trace(u, key)
                        if path >= best[2]:
                            continue
                        best = (mean, length, path)
                        continue
            best = (mean, length, trace(u, key))
    return None if best is None else best[2]


@dataclass(frozen=True)
class Template:
    predicate: str
    roles: tuple[str, ...]
    elements: tuple

    @property
    def arity(self) -> int:
        return len(self.roles)

    @property
    def slot_roles(self) -> list[str]:
        return [e.role for e in self.elements if isinstance(e, Slot)]

    def __str__(self):
        return " ".join(str(e).replace("▁", " ") for e in self.elements)

    def to_json(self) -> dict:
        return {
            "predicate": self.predicate,
            "arity": self.arity,
            "roles": list(self.roles),
            "template": [{"slot": e.role} if isinstance(e, Slot) else {"word": e} for e in self.elements],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Template":
        elements = []
        for item in data["template"]:
            if "slot" in item:
                elements.append(Slot(item["slot"]))
            else:
                elements.append(item["word"])
        return cls(data["predicate"], tuple(data.get("roles", ())), tuple(elements))


def consensus(u: SlottedLattice, floor: int = 6, downweight: float = 0.1) -> Optional[Template]:
    """Highest mean-weight path of *u* with at least *floor* elements."""
    lat = u.lattice
    weights = {v: node_weight(lat, v, downweight) for v in lat.inner_nodes}
    path = best_mean_path(len(lat.payloads), lat.edges, weights, floor, lat.slot_nodes())
    if path is None:
        return None
    return Template(u.predicate, tuple(u.roles), tuple(lat.representative(v) for v in path))


@dataclass
class MappingDictionary:
    entries: dict = field(default_factory=dict)
    terms: dict = field(default_factory=dict)
    uncovered: list = field(default_factory=list)
    ties: list = field(default_factory=list)

    def dumps(self) -> str:
        lines = [self.entries[p].to_json() for p in sorted(self.entries)]
        lines += [{"term": k, "realization": list(self.terms[k])} for k in sorted(self.terms)]
        lines.append({"coverage": {"uncovered": sorted(self.uncovered), "ties": sorted(self.ties)}})
        return "".join(json.dumps(x, sort_keys=True, ensure_ascii=False) + "\n" for x in lines)

    @classmethod
    def loads(cls, text: str) -> "MappingDictionary":
        d = cls()
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if "predicate" in obj:
                    d.entries[obj["predicate"]] = Template.from_json(obj)
                elif "term" in obj:
                    d.terms[obj["term"]] = tuple(obj["realization"])
                elif "coverage" in obj:
                    d.uncovered = list(obj["coverage"].get("uncovered", []))
                    d.ties = list(obj["coverage"].get("ties", []))
                else:
                    raise ValueError("unrecognized entry")
            except (ValueError, KeyError, TypeError, AttributeError) as exc:
                raise ValueError(f"dictionary line {lineno}: {exc}") from None
        return d


@dataclass
class PredicateResult:
    predicate: str
    slotted: list
    unified: UnifiedSlottedLattice
    template: Optional[Template]


def _instance_msa(rec: InstanceRecord, first_origin: int, thesaurus, scores, mode) -> Msa:
    items = [Msa.from_sequence(v, first_origin + k) for k, v in enumerate(rec.verbalizations)]
    return iterative_msa(items, thesaurus, scores, mode)


def induce_predicate(name: str, records: Sequence[InstanceRecord], thesaurus=None,
                     scores: Scores = DEFAULT_SCORES, mode: str = SUM_OF_PAIRS,
                     floor: int = 6, downweight: float = 0.1) -> PredicateResult:
    slotted = []
    origin = 0
    for rec in records:
        if not rec.verbalizations:
            continue
        m = _instance_msa(rec, origin, thesaurus, scores, mode)
        origin += m.n_rows
        slotted.append(make_slotted(msa_to_lattice(m), rec, thesaurus))
    unified = cross_instance_align(slotted, thesaurus, scores, mode)
    return PredicateResult(name, slotted, unified, consensus(unified, floor, downweight))


def _term_key(tokens: Sequence[str]) -> str:
    return " ".join(tokens)


def induce_dictionary(corpus: Corpus, thesaurus=None, config=None, threads: int = 1,
                      results: Optional[list] = None) -> MappingDictionary:
    """Build the mapping dictionary for every predicate and term of *corpus*.

    The corpus is expected to carry the thesaurus' phrases already fused
    (see ``fuse_corpus``).  When *results* is a list, the per-predicate
    intermediate lattices are appended to it.
    """
    cfg = config or PipelineConfig()
    scores, mode = cfg.scores, cfg.profile_scoring
    groups: dict[str, list[InstanceRecord]] = defaultdict(list)
    term_verbs: dict[str, list] = defaultdict(list)
    value_keys: set[str] = set()
    for rec in corpus.records:
        sem = rec.semantics
        if sem.is_term:
            term_verbs[_term_key(sem.term)].extend(rec.verbalizations)
        else:
            groups[sem.name].append(rec)
            for a in sem.args:
                value_keys.add(_term_key(a.value))

    def run(name):
        return induce_predicate(name, groups[name], thesaurus, scores, mode,
                                cfg.template_floor, cfg.downweight)

    names = sorted(groups)
    if threads > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            done = list(pool.map(run, names))
    else:
        done = [run(n) for n in names]

    d = MappingDictionary()
    for res in done:
        if res.template is None:
            d.uncovered.append(res.predicate)
        else:
            d.entries[res.predicate] = res.template
        if results is not None:
            results.append(res)

    for key in sorted(term_verbs):
        verbs = [v for v in term_verbs[key] if v]
        if not verbs:
            continue
        items = [Msa.from_sequence(v, k) for k, v in enumerate(verbs)]
        lat = msa_to_lattice(iterative_msa(items, thesaurus, scores, mode))
        weights = {v: node_weight(lat, v, cfg.downweight) for v in lat.inner_nodes}
        path = best_mean_path(len(lat.payloads), lat.edges, weights, 1)
        d.terms[key] = tuple(lat.representative(v) for v in path)

    if thesaurus is not None:
        corpus_terms = set(term_verbs) | value_keys
        for key in sorted(corpus_terms - set(d.terms)):
            if " " in key:
                continue
            options = [p for p in thesaurus.partners(key) if p not in corpus_terms]
            if not options:
                continue
            ranked = sorted(options, key=lambda p: (-thesaurus.witness_count(key, p), p))
            if len(ranked) > 1 and thesaurus.witness_count(key, ranked[0]) == thesaurus.witness_count(key, ranked[1]):
                d.ties.append(key)
            d.terms[key] = (ranked[0],)
    return d


def realize(e: SemanticExpression, d: MappingDictionary) -> list[str]:
    """Token sequence for *e*: the template with values filled in."""
    if e.is_term:
        return list(d.terms.get(_term_key(e.term), e.term))
    tpl = d.entries.get(e.name)
    if tpl is None:
        raise RealizationError(f"no template for predicate {e.name!r}")
    out: list[str] = []
    for el in tpl.elements:
        if isinstance(el, Slot):
            try:
                value = e.value_of(el.role)
            except KeyError:
                raise RealizationError(f"{e.name}: no argument for role {el.role!r}") from None
            out.extend(d.terms.get(_term_key(value), value))
        else:
            out.append(el)
    return out
