"""Lattices ("sausage graphs") built from multiple sequence alignments.

Node 0 is ``start``, node ``n_cols + 1`` is ``end`` and node ``j + 1``
stands for alignment column ``j``.  Edges are traced from the rows.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property

from .alignment import GAP, Msa, Slot


@dataclass(frozen=True)
class Lattice:
    msa: Msa
    payloads: tuple[frozenset, ...]
    edges: frozenset
    paths: tuple[tuple[int, ...], ...]
    paths_through: tuple[int, ...]

    start = 0

    @property
    def end(self) -> int:
        return len(self.payloads) - 1

    @property
    def inner_nodes(self) -> range:
        return range(1, self.end)

    @cached_property
    def successors(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {v: [] for v in range(len(self.payloads))}
        for u, v in sorted(self.edges):
            out[u].append(v)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def predecessors(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {v: [] for v in range(len(self.payloads))}
        for u, v in sorted(self.edges):
            out[v].append(u)
        return {k: tuple(v) for k, v in out.items()}

    def cell_counts(self, node: int) -> Counter:
        """How many rows carry each token (or slot) at *node*."""
        if node in (self.start, self.end):
            return Counter()
        return Counter(c for c in self.msa.column(node - 1) if c is not GAP)

    def representative(self, node: int):
        """Most frequent cell at *node*; ties go to slots, then the smallest token."""
        counts = self.cell_counts(node)
        return min(counts, key=lambda c: (-counts[c], not isinstance(c, Slot), str(c)))

    def is_slot(self, node: int) -> bool:
        return isinstance(self.representative(node), Slot)

    def slot_nodes(self) -> dict[int, str]:
        return {v: self.representative(v).role for v in self.inner_nodes if self.is_slot(v)}

    def descendants(self, node: int) -> set[int]:
        seen, stack = set(), [node]
        while stack:
            for w in self.successors[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def ancestors(self, node: int) -> set[int]:
        seen, stack = set(), [node]
        while stack:
            for w in self.predecessors[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def node_label(self, node: int) -> str:
        if node == self.start:
            return "start"
        if node == self.end:
            return "end"
        counts = self.cell_counts(node)
        cells = sorted(counts, key=lambda c: (-counts[c], str(c)))
        return "/".join(str(c).replace("▁", " ") for c in cells)

    def to_dot(self, name: str = "lattice") -> str:
        """Graphviz rendering; slot nodes are drawn as ``[role]`` boxes."""
        lines = [f'digraph "{_esc(name)}" {{', "  rankdir=LR;"]
        for v in range(len(self.payloads)):
            label = _esc(self.node_label(v))
            attrs = f'label="{label}"'
            if v in (self.start, self.end):
                attrs += ", shape=plaintext"
            elif self.is_slot(v):
                attrs += ", shape=box, style=bold"
            if v not in (self.start, self.end):
                attrs += f', xlabel="{self.paths_through[v]}"'
            lines.append(f"  n{v} [{attrs}];")
        for u, v in sorted(self.edges):
            lines.append(f"  n{u} -> n{v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _esc(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def msa_to_lattice(m: Msa) -> Lattice:
    """One node per column plus start/end; edges follow each row left to right."""
    end = m.n_cols + 1
    payloads = [frozenset()]
    counts = [0]
    for j in range(m.n_cols):
        col = [c for c in m.column(j) if c is not GAP]
        payloads.append(frozenset(col))
        counts.append(len(col))
    payloads.append(frozenset())
    counts.append(0)
    edges = set()
    paths = []
    for row in m.rows:
        path = [0] + [j + 1 for j, c in enumerate(row) if c is not GAP] + [end]
        edges.update(zip(path, path[1:]))
        paths.append(tuple(path))
    counts[0] = counts[end] = m.n_rows
    return Lattice(m, tuple(payloads), frozenset(edges), tuple(paths), tuple(counts))
