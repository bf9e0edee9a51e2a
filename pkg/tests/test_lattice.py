from hypothesis import given, settings
from hypothesis import strategies as st

from msadict.alignment import GAP, Msa, Slot, iterative_msa
from msadict.lattice import msa_to_lattice


def test_chain():
    lat = msa_to_lattice(Msa.from_sequence(["a", "b", "c"]))
    assert sorted(lat.edges) == [(0, 1), (1, 2), (2, 3), (3, 4)]
    assert lat.end == 4
    assert lat.paths == ((0, 1, 2, 3, 4),)
    assert [lat.payloads[v] for v in lat.inner_nodes] == [{"a"}, {"b"}, {"c"}]


def test_gap_creates_skip_edge():
    lat = msa_to_lattice(Msa((("a", "b", "c"), ("a", GAP, "c")), (0, 1)))
    assert (1, 3) in lat.edges
    assert lat.paths_through[2] == 1
    assert lat.paths_through[1] == 2


def test_five_sequence_lattice_structure():
    seqs = ["abad", "abd", "acd", "abcd", "bad"]
    lat = msa_to_lattice(iterative_msa([Msa.from_sequence(list(s), i) for i, s in enumerate(seqs)]))
    assert sorted(lat.edges) == [(0, 1), (0, 2), (1, 2), (1, 4), (2, 3), (2, 4), (2, 5),
                                 (3, 5), (4, 5), (5, 6)]
    assert lat.paths_through == (5, 4, 4, 2, 2, 5, 5)


def test_representative_and_labels():
    m = Msa((("use",), ("apply",), ("use",)), (0, 1, 2))
    lat = msa_to_lattice(m)
    assert lat.representative(1) == "use"
    assert lat.node_label(1) == "use/apply"
    tie = msa_to_lattice(Msa(((Slot("g"),), ("g",)), (0, 1)))
    assert tie.representative(1) == Slot("g")
    assert tie.slot_nodes() == {1: "g"}


def test_to_dot():
    m = Msa((("use", Slot("lemma"), "are▁equal▁to"),), (0,))
    dot = msa_to_lattice(m).to_dot("x")
    assert dot.startswith('digraph "x" {')
    assert 'label="[lemma]", shape=box' in dot
    assert 'label="are equal to"' in dot
    assert "n0 -> n1;" in dot and "n3 -> n4;" in dot


@settings(max_examples=80, deadline=None)
@given(st.lists(st.text(alphabet="abcde", min_size=1, max_size=6), min_size=1, max_size=5))
def test_lattice_invariants(texts):
    m = iterative_msa([Msa.from_sequence(list(s), i) for i, s in enumerate(texts)])
    lat = msa_to_lattice(m)
    assert all(u < v for u, v in lat.edges)
    for v in lat.inner_nodes:
        assert lat.paths_through[v] >= 1
        assert lat.start in lat.ancestors(v) and lat.end in lat.descendants(v)
    for i, path in enumerate(lat.paths):
        assert all(e in lat.edges for e in zip(path, path[1:]))
        cells = [m.rows[i][v - 1] for v in path[1:-1]]
        assert tuple(cells) == m.sequence(i)
