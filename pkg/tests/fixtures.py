"""Hand-transcribed example data shared by several test modules."""

from msadict.corpus import Corpus, InstanceRecord, SemanticExpression, fuse_tokens, tokenize
from msadict.thesaurus import Thesaurus

UNIVCD_TEXTS = [
    "Given a and b as in the theorem statement, prove that a*b=0.",
    "Suppose that a and b are equal to zero. Prove that their product is also zero.",
    "Assume that a=0 and b=0.",
]
UNIVCD_PAIRS = [("0", "zero"), ("=", "are equal to")]


def univcd():
    """(thesaurus, instance record) for the three zero-product verbalizations."""
    t = Thesaurus(UNIVCD_PAIRS)
    verbs = tuple(tuple(fuse_tokens(tokenize(v), t.phrases())) for v in UNIVCD_TEXTS)
    sem = SemanticExpression.predicate("univcd", prem1="a=0", prem2="b=0", goal="a*b=0")
    return t, InstanceRecord(sem, verbs)


REWRITE_I = SemanticExpression.predicate(
    "rewrite", lemma="lemma100", goal="a-n*((-a)/(-n))=-(-a-(-n)*((-a)/(-n)))")
REWRITE_II = SemanticExpression.predicate(
    "rewrite", lemma="lemma104", goal="A-(-(A/(-N)))*N = A-(A/(-N))*(-N)")
REWRITE_TEXTS_I = [
    "Then we can use lemma lemma100 a/n=-a/-n and get a-n*((-a)/(-n))=-(-a-(-n)*((-a)/(-n))).",
    "Now use the fact about division a/n=-a/-n to get the goal a-n*((-a)/(-n))=-(-a-(-n)*((-a)/(-n))).",
]
REWRITE_TEXTS_II = [
    "We can use lemma lemma104 to get A-(-(A/(-N)))*N = A-(A/(-N))*(-N).",
    "Then we apply lemma lemma104 to the left-hand side.",
]
# the verb pair joining the two instances' lattices
REWRITE_PAIRS = [("use", "apply")]


def rewrite_corpus() -> Corpus:
    return Corpus((
        InstanceRecord(REWRITE_I, tuple(tuple(tokenize(v)) for v in REWRITE_TEXTS_I)),
        InstanceRecord(REWRITE_II, tuple(tuple(tokenize(v)) for v in REWRITE_TEXTS_II)),
    ))
