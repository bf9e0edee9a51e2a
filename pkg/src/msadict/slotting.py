"""Argument-value matching and slotted lattice construction.

For every argument of a predicate instance, a run of lattice nodes whose
words match the argument value is located and contracted into a single
slot node labelled with the argument role.  Parallel branches inside the
same divergent region (alternative wordings of that argument, such as
"their product" next to "a*b=0") are absorbed into the slot as well.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .alignment import GAP, InvariantError, Msa, Slot
from .corpus import InstanceRecord
from .lattice import Lattice, msa_to_lattice

_ATOM = re.compile(r"<=|>=|!=|==|\w+|[^\w\s]")
_IGNORED_ATOMS = frozenset("()[]{},")

MAX_RUNS = 20000


def value_atoms(token: str) -> frozenset:
    """Atomic symbols of a value token: ``"a*b=0"`` gives a, *, b, =, 0."""
    atoms = frozenset(a for a in _ATOM.findall(token) if a not in _IGNORED_ATOMS)
    return atoms or frozenset((token,))


class ValueMatcher:
    """Decides which words refer to (part of) one argument value."""

    def __init__(self, value: Sequence[str], thesaurus=None):
        if not value:
            raise ValueError("argument value must be non-empty")
        self.tokens = frozenset(value)
        self.atoms = frozenset().union(*(value_atoms(t) for t in value))
        self.thesaurus = thesaurus
        self._cache: dict[str, frozenset] = {}

    def cover(self, word) -> frozenset:
        """Atoms of the value that *word* stands for (empty if none)."""
        if not isinstance(word, str):
            return frozenset()
        try:
            return self._cache[word]
        except KeyError:
            pass
        candidates = {word}
        if self.thesaurus is not None:
            candidates |= self.thesaurus.partners(word)
        out = set()
        for cand in candidates:
            if cand in self.tokens:
                out |= value_atoms(cand)
            if cand in self.atoms:
                out.add(cand)
        result = self._cache[word] = frozenset(out)
        return result

    def node_cover(self, lattice: Lattice, node: int) -> frozenset:
        return frozenset().union(*(self.cover(c) for c in lattice.payloads[node]))


def _maximal_runs(lattice: Lattice, qualifying: set[int]):
    succ = {v: [w for w in lattice.successors[v] if w in qualifying] for v in qualifying}
    has_pred = {w for v in qualifying for w in succ[v]}
    count = 0
    for source in sorted(qualifying - has_pred):
        stack = [(source, (source,))]
        while stack:
            v, path = stack.pop()
            if not succ[v]:
                yield path
                count += 1
                if count >= MAX_RUNS:
                    return
                continue
            for w in reversed(succ[v]):
                stack.append((w, path + (w,)))


def match_argument(lattice: Lattice, value: Sequence[str], thesaurus=None,
                   matcher: Optional[ValueMatcher] = None,
                   exclude: frozenset = frozenset()) -> Optional[tuple[int, ...]]:
    """Best run of consecutive lattice nodes matching an argument value.

    Every node of the run must hold a word identical to, or a paraphrase
    of, a symbol of the value.  Runs covering more distinct value symbols
    win; ties go to the run traversed by more verbalizations, then to the
    earliest run.  Nodes in *exclude* are never used.  Returns ``None``
    when no node matches.
    """
    matcher = matcher or ValueMatcher(value, thesaurus)
    covers = {v: matcher.node_cover(lattice, v) for v in lattice.inner_nodes if v not in exclude}
    qualifying = {v for v, c in covers.items() if c}
    if not qualifying:
        return None
    best_key, best = None, None
    for run in _maximal_runs(lattice, qualifying):
        covered = frozenset().union(*(covers[v] for v in run))
        key = (-len(covered), -sum(lattice.paths_through[v] for v in run), run)
        if best_key is None or key < best_key:
            best_key, best = key, run
    return best


def _dominators(lattice: Lattice, reverse: bool = False) -> dict[int, frozenset]:
    # node ids are a topological order of the lattice
    order = range(len(lattice.payloads))
    if reverse:
        order, parents = reversed(order), lattice.successors
    else:
        parents = lattice.predecessors
    dom: dict[int, frozenset] = {}
    for v in order:
        ps = parents[v]
        if not ps:
            dom[v] = frozenset((v,))
        else:
            dom[v] = frozenset.intersection(*(dom[p] for p in ps)) | {v}
    return dom


def slot_region(lattice: Lattice, run: Sequence[int], matcher: ValueMatcher,
                later: Sequence[ValueMatcher] = ()) -> Optional[frozenset]:
    """Nodes to contract into the slot for *run*.

    The run's convex hull, plus nodes lying on parallel branches between
    the run's immediate dominator and immediate post-dominator.  Parallel
    nodes are dropped (hull only) if any of them is a slot or names a later
    argument without naming this one.  ``None`` if the hull itself holds a
    slot.
    """
    first, last = run[0], run[-1]
    hull = (lattice.descendants(first) | {first}) & (lattice.ancestors(last) | {last})
    slots = lattice.slot_nodes()
    if hull & slots.keys():
        return None
    dom = _dominators(lattice)
    pdom = _dominators(lattice, reverse=True)
    entry = max(dom[first] - {first})
    exit_ = min(pdom[last] - {last})
    between = lattice.descendants(entry) & lattice.ancestors(exit_)
    related = set()
    for h in hull:
        related |= lattice.ancestors(h) | lattice.descendants(h)
    extra = between - hull - related
    for v in extra:
        if v in slots:
            extra = set()
            break
        own = matcher.node_cover(lattice, v)
        if not own and any(m.node_cover(lattice, v) for m in later):
            extra = set()
            break
    return frozenset(hull | extra)


def contract(lattice: Lattice, region: frozenset, role: str, fillers: dict):
    """Replace the columns of *region* by one slot column.

    Returns the new lattice and the updated per-row fillers (row origin ->
    ``{role: absorbed tokens}``).
    """
    m = lattice.msa
    cols = sorted(v - 1 for v in region)
    colset = set(cols)
    keep = [j for j in range(m.n_cols) if j not in colset]
    slot_key = cols[0]
    new_fillers = {o: dict(f) for o, f in fillers.items()}
    rows = []
    visits = []
    for r, row in zip(m.origins, m.rows):
        absorbed = tuple(row[j] for j in cols if row[j] is not GAP)
        if absorbed:
            new_fillers.setdefault(r, {})[role] = absorbed
        rows.append({j: row[j] for j in keep} | {slot_key: Slot(role) if absorbed else GAP})
        # the region is convex, so each row visits it in one contiguous stretch
        seq = []
        for j, c in enumerate(row):
            if c is GAP:
                continue
            k = slot_key if j in colset else j
            if not seq or seq[-1] != k:
                seq.append(k)
        visits.append(seq)
    # topological column order, stable with respect to the old positions
    keys = sorted(keep + [slot_key])
    succ: dict[int, set[int]] = {k: set() for k in keys}
    indeg = dict.fromkeys(keys, 0)
    for seq in visits:
        if len(set(seq)) != len(seq):
            raise InvariantError("slot region is not convex")
        for u, v in zip(seq, seq[1:]):
            if v not in succ[u]:
                succ[u].add(v)
                indeg[v] += 1
    heap = [k for k in keys if indeg[k] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        k = heapq.heappop(heap)
        order.append(k)
        for v in succ[k]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    if len(order) != len(keys):
        raise InvariantError("slot contraction produced a cycle")
    new_rows = tuple(tuple(row[k] for k in order) for row in rows)
    return msa_to_lattice(Msa(new_rows, m.origins)), new_fillers


@dataclass(frozen=True, eq=False)
class SlottedLattice:
    """A lattice whose argument-value runs have become slot nodes."""

    lattice: Lattice
    predicate: str
    roles: tuple[str, ...]
    fillers: dict = field(default_factory=dict)
    unmatched: tuple[str, ...] = ()

    @property
    def msa(self) -> Msa:
        return self.lattice.msa

    @property
    def slot_roles(self) -> list[str]:
        return sorted(set(self.lattice.slot_nodes().values()))

    @property
    def flagged(self) -> bool:
        """True when no argument could be matched."""
        return not self.slot_roles

    def expand(self, origin: int) -> tuple:
        """The source verbalization of row *origin*, slots re-filled."""
        i = self.msa.origins.index(origin)
        out = []
        fill = self.fillers.get(origin, {})
        for c in self.msa.sequence(i):
            if isinstance(c, Slot) and c.role in fill:
                out.extend(fill[c.role])
            else:
                out.append(c)
        return tuple(out)

    def to_dot(self, name: Optional[str] = None) -> str:
        return self.lattice.to_dot(name or self.predicate)


def make_slotted(lattice: Lattice, inst: InstanceRecord, thesaurus=None) -> SlottedLattice:
    """Slot every argument of *inst* that can be found in *lattice*.

    Roles are handled in declaration order; a node absorbed by one slot is
    unavailable to later roles.  After its best run, a role may also claim
    runs on branches that bypass its slot, so no path meets the same role
    twice.  Roles without a match get no slot and are listed in
    ``unmatched``.
    """
    sem = inst.semantics
    if sem.is_term:
        raise ValueError("only predicate instances can be slotted")
    matchers = [ValueMatcher(a.value, thesaurus) for a in sem.args]
    current = lattice
    fillers: dict = {}
    unmatched = []
    for k, arg in enumerate(sem.args):
        placed = False
        rejected: set[int] = set()
        while True:
            blocked = set(rejected)
            for v, role in current.slot_nodes().items():
                if role == arg.role:
                    blocked |= {v} | current.ancestors(v) | current.descendants(v)
            run = match_argument(current, arg.value, matcher=matchers[k], exclude=frozenset(blocked))
            if run is None:
                break
            region = slot_region(current, run, matchers[k], matchers[k + 1:])
            if region is None:
                rejected.update(run)
                continue
            current, fillers = contract(current, region, arg.role, fillers)
            rejected = set()
            placed = True
        if not placed:
            unmatched.append(arg.role)
    return SlottedLattice(current, sem.name, sem.roles, fillers, tuple(unmatched))
