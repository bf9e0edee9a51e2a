import pytest

from msadict.alignment import Msa, align_pair
from msadict.corpus import Corpus, InstanceRecord, SemanticExpression, tokenize
from msadict.thesaurus import (InductionSettings, Sausage, Thesaurus, extract_sausages, fuse_corpus,
                               induce_thesaurus)


def aligned(x, y, t=None):
    return align_pair(Msa.from_sequence(tokenize(x)), Msa.from_sequence(tokenize(y), 1), t)


def record(*texts, name="p"):
    return InstanceRecord(SemanticExpression.predicate(name, v="q"), tuple(tuple(tokenize(x)) for x in texts))


def test_thesaurus_basics():
    t = Thesaurus([("0", "zero"), ("=", "are equal to")])
    assert t.paraphrases("zero", "0") and t.paraphrases("0", "zero")
    assert not t.paraphrases("0", "0")
    assert ("are equal to", "=") in t
    assert t.partners("=") == {"are▁equal▁to"}
    assert t.phrases() == [("are", "equal", "to")]
    assert len(t) == 2
    with pytest.raises(ValueError):
        t.add("x", "x")
    assert not t.add("zero", "0")


def test_dumps_loads_round_trip():
    t = Thesaurus([("0", "zero"), ("=", "are equal to")])
    t.witnesses[frozenset(("0", "zero"))] = [(0, 0, 1, 1), (1, 0, 1, 1)]
    text = t.dumps(verbose=True)
    assert text == "0\tzero\t2\n=\tare equal to\t0\n"
    back = Thesaurus.loads(text)
    assert back == t and back.witness_count("0", "zero") == 2
    with pytest.raises(ValueError):
        Thesaurus.loads("just one field\n")


def test_extract_sausages_examples():
    assert extract_sausages(aligned("a b c", "a b c")) == []
    s = extract_sausages(aligned("so x are equal to y", "so x = y"))
    assert [x.interiors for x in s] == [(("are", "equal", "to"), ("=",))]
    s = extract_sausages(aligned("the conclusion holds", "the result holds"))
    # the mismatched words go to separate columns, so the bounds are 0 and 3
    assert s == [Sausage(0, 3, (("conclusion",), ("result",)))]


def test_extract_sausages_paraphrase_bounds():
    t = Thesaurus([("show", "prove")])
    m = aligned("we show x holds", "we prove y holds", t)
    assert [x.interiors for x in extract_sausages(m, t)] == [(("x",), ("y",))]
    with pytest.raises(ValueError):
        extract_sausages(Msa.from_sequence(["a"]))


def test_empty_corpus():
    t = induce_thesaurus(Corpus(()))
    assert len(t) == 0 and t.iterations == 1


def test_zero_pair_from_two_records():
    c = Corpus((
        record("it follows that x is 0 in every case", "it follows that x is zero in every case"),
        record("we know that y is 0 in this setting", "we know that y is zero in this setting", name="q"),
    ))
    t = induce_thesaurus(c)
    assert t.pairs() == [("0", "zero")]
    assert sorted(w[:3] for w in t.witnesses[frozenset(("0", "zero"))]) == [(0, 0, 1), (1, 0, 1)]


def test_single_witness_is_not_enough():
    c = Corpus((record("it follows that x is 0 in every case", "it follows that x is zero in every case"),))
    assert len(induce_thesaurus(c)) == 0
    assert len(induce_thesaurus(c, InductionSettings(min_witnesses=1))) == 1


def test_low_scoring_alignments_are_ignored():
    c = Corpus((record("x is 0", "x is zero"), record("y is 0", "y is zero", name="q")))
    assert len(induce_thesaurus(c)) == 0


def test_planted_pairs_in_five_records():
    texts = [
        ("we finish the proof by applying lemma one to the goal",
         "we finish the proof by by lemma one to the goal"),
        ("after expanding the definition the claim is immediate here",
         "after unfolding the definition the claim is immediate here"),
        ("now close the case applying the induction hypothesis and rewriting",
         "now close the case by the induction hypothesis and rewriting"),
        ("simply expanding all terms makes the goal trivial now",
         "simply unfolding all terms makes the goal trivial now"),
        ("the remaining subgoal follows applying arithmetic to both sides",
         "the remaining subgoal follows by arithmetic to both sides"),
    ]
    c = Corpus(tuple(record(a, b, name=f"p{k}") for k, (a, b) in enumerate(texts)))
    t = induce_thesaurus(c)
    assert t.pairs() == [("applying", "by"), ("expanding", "unfolding")]


def test_multiword_phrase_is_fused_and_reused():
    c = Corpus((
        record("then a and b are equal to zero as required", "then a and b = zero as required"),
        record("hence c and d are equal to one as needed", "hence c and d = one as needed", name="q"),
    ))
    t = induce_thesaurus(c)
    assert ("=", "are equal to") in t
    fused = fuse_corpus(c, t)
    assert "are▁equal▁to" in fused.records[0].verbalizations[0]


def test_initial_thesaurus_is_kept_and_not_mutated():
    seed = Thesaurus([("0", "zero")])
    t = induce_thesaurus(Corpus(()), initial=seed)
    assert t.pairs() == [("0", "zero")] and t is not seed


def test_threads_give_same_result():
    c = Corpus((
        record("it follows that x is 0 in every case", "it follows that x is zero in every case"),
        record("we know that y is 0 in this setting", "we know that y is zero in this setting", name="q"),
    ))
    assert induce_thesaurus(c, InductionSettings(threads=4)).pairs() == induce_thesaurus(c).pairs()
