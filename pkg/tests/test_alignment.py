import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msadict.alignment import (GAP, SET_MAX, InvariantError, Msa, Scorer, Scores, Slot, align_pair,
                               iterative_msa, pair_score, sim, sop_score)
from msadict.thesaurus import Thesaurus

from oracles import all_alignments, best_alignment_score


def seq(text, origin=0):
    return Msa.from_sequence(list(text), origin)


def test_sim_examples():
    t = Thesaurus([("0", "zero")])
    assert sim("0", "0") == 1
    assert sim("0", "zero", t) == 0.5
    assert sim("0", "zero") == -0.5
    assert sim(frozenset({"use", "apply"}), frozenset({"use"})) == 1
    assert sim("a", GAP) == -0.01
    assert sim(GAP, "a") == -0.01
    with pytest.raises(ValueError):
        sim(GAP, GAP)


def test_sim_slots():
    assert sim(Slot("goal"), Slot("goal")) == 1
    assert sim(Slot("goal"), Slot("lemma")) == -0.5
    assert sim(Slot("goal"), "goal") == -0.5


def test_sim_custom_scores():
    s = Scores(match=2.0, paraphrase=1.0, gap=-0.1, mismatch=-3.0)
    assert sim("x", "y", scores=s) == -3.0
    assert sim("x", GAP, scores=s) == -0.1


def test_msa_invariants_checked():
    with pytest.raises(InvariantError):
        Msa((("a", GAP), ("b", GAP)), (0, 1))
    with pytest.raises(InvariantError):
        Msa((("a",), ("b", "c")), (0, 1))
    with pytest.raises(InvariantError):
        Msa((("a",), ("b",)), (0, 0))


def test_sop_score_examples():
    assert sop_score(seq("abcd")) == 0
    assert sop_score(Msa((tuple("abcd"), tuple("abcd")), (0, 1))) == pytest.approx(4.0)
    m = Msa((("a", "b", "x", "c", GAP), ("a", "b", GAP, "c", "y")), (0, 1))
    assert sop_score(m) == pytest.approx(2.98, abs=1e-9)


def test_align_pair_example():
    m = align_pair(seq("abad"), seq("abd", 1))
    assert m.rows == (tuple("abad"), ("a", "b", GAP, "d"))
    assert sop_score(m) == pytest.approx(best_alignment_score(seq("abad"), seq("abd", 1)), abs=1e-9)


@given(st.text(alphabet="abcde", min_size=1, max_size=8))
def test_align_identical_is_gap_free(s):
    m = align_pair(seq(s), seq(s, 1))
    assert all(c is not GAP for row in m.rows for c in row)
    assert m.n_cols == len(s)


def test_pair_score_matches_align_pair():
    rng = random.Random(3)
    scorer = Scorer()
    for _ in range(50):
        x = [rng.choice("abc") for _ in range(rng.randint(1, 6))]
        y = [rng.choice("abc") for _ in range(rng.randint(1, 6))]
        m = align_pair(Msa.from_sequence(x), Msa.from_sequence(y, 1))
        assert pair_score(x, y, scorer) == pytest.approx(sop_score(m), abs=1e-9)


def _random_msa(rng, n_rows, first_origin, alphabet="abcd"):
    items = [Msa.from_sequence([rng.choice(alphabet) for _ in range(rng.randint(1, 4))], first_origin + k)
             for k in range(n_rows)]
    return iterative_msa(items)


def test_profile_alignment_is_optimal():
    rng = random.Random(11)
    t = Thesaurus([("a", "b")])
    for _ in range(40):
        a = _random_msa(rng, rng.randint(1, 2), 0)
        b = _random_msa(rng, rng.randint(1, 2), 10)
        m = align_pair(a, b, t)
        assert sop_score(m, t) == pytest.approx(best_alignment_score(a, b, t), abs=1e-9)


def test_oracle_enumerates_delannoy_many():
    assert sum(1 for _ in all_alignments(seq("ab"), seq("cd", 1))) == 13


def test_set_max_mode_keeps_rows():
    a = iterative_msa([seq("use", 0), seq("usf", 1)])
    b = seq("us", 2)
    m = align_pair(a, b, mode=SET_MAX)
    assert m.sequences() == {0: tuple("use"), 1: tuple("usf"), 2: tuple("us")}


def test_iterative_msa_trivial_cases():
    s = seq("abc")
    assert iterative_msa([s]) == s
    m = iterative_msa([seq("abc", 0), seq("abc", 1)])
    assert m.rows == (tuple("abc"), tuple("abc"))
    with pytest.raises(ValueError):
        iterative_msa([])
    with pytest.raises(InvariantError):
        iterative_msa([seq("a", 0), seq("b", 0)])


def test_iterative_msa_five_sequences():
    seqs = ["abad", "abd", "acd", "abcd", "bad"]
    m = iterative_msa([seq(s, i) for i, s in enumerate(seqs)])
    assert m.table() == "\n".join([
        "a b a _ d",
        "a b _ _ d",
        "a _ _ c d",
        "a b _ c d",
        "_ b a _ d",
    ])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.text(alphabet="abcd", min_size=1, max_size=6), min_size=1, max_size=5),
       st.randoms(use_true_random=False))
def test_iterative_msa_order_independent_and_lossless(texts, rnd):
    items = [seq(s, i) for i, s in enumerate(texts)]
    m = iterative_msa(items)
    shuffled = list(items)
    rnd.shuffle(shuffled)
    assert iterative_msa(shuffled) == m
    assert m.origins == tuple(range(len(texts)))
    assert m.sequences() == {i: tuple(s) for i, s in enumerate(texts)}


def test_iterative_msa_threads_agree():
    rng = random.Random(5)
    items = [Msa.from_sequence([rng.choice("abcde") for _ in range(8)], k) for k in range(7)]
    assert iterative_msa(items, threads=4) == iterative_msa(items)


def test_iterative_msa_accepts_profiles():
    a = iterative_msa([seq("abc", 0), seq("abd", 1)])
    b = iterative_msa([seq("xbc", 2), seq("abc", 3)])
    m = iterative_msa([b, a])
    assert m.origins == (0, 1, 2, 3)
    assert m.sequences()[2] == tuple("xbc")


def test_table_uses_underscores():
    m = align_pair(seq("abad"), seq("abd", 1))
    assert m.table().splitlines()[1] == "a b _ d"
    assert str(Slot("goal")) == "[goal]"
