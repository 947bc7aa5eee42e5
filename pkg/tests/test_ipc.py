import random

import pytest
from hypothesis import given, settings

from lewisarrow.formula import has_lewis, parse
from lewisarrow.ipc import (
    KripkeOracle, abstract_many, abstract_strict, ipc_countermodel, ipc_entails, ipc_valid,
    lewis_free_corpus, random_formula,
)
from lewisarrow.kripke import forces

from conftest import formulas

VALID = [
    "p -> p", "p -> q -> p", "(p -> q -> s) -> (p -> q) -> p -> s", "p & q -> q & p",
    "~~(p | ~p)", "~~(~~p -> p)", "~~(((p -> q) -> p) -> p)", "p -> ~~p", "~~~p -> ~p",
    "(~p | ~q) -> ~(p & q)", "F -> p", "p | q -> q | p", "(p -> q) -> ~q -> ~p",
]
INVALID = [
    "p", "F", "p | ~p", "~~p -> p", "((p -> q) -> p) -> p", "(p -> q) | (q -> p)",
    "~(p & q) -> ~p | ~q", "(~q -> ~p) -> p -> q", "~p | ~~p",
]


@pytest.mark.parametrize("text", VALID)
def test_valid(text):
    assert ipc_valid(parse(text))


@pytest.mark.parametrize("text", INVALID)
def test_invalid_with_countermodel(text):
    phi = parse(text)
    assert not ipc_valid(phi)
    model = ipc_countermodel(phi)
    assert model is not None
    assert not forces(model, "a", phi)


def test_lewis_rejected():
    with pytest.raises(ValueError):
        ipc_valid(parse("p => p"))


def test_entailment_abstracts_lewis_terms():
    # same Lewis subterm on both sides behaves like an atom
    assert ipc_entails([parse("p => q"), parse("(p => q) -> s")], parse("s"))
    assert not ipc_entails([parse("p => q")], parse("q => p"))
    assert ipc_entails([], parse("(p => q) -> (p => q)"))


def test_abstraction_round_trip():
    phi = parse("((p => q) & s) -> ([]p | (p => q))")
    a = abstract_strict(phi)
    assert not has_lewis(a.body)
    assert a.restore() == phi
    bodies, table = abstract_many([parse("p => q"), parse("(p => q) & (q => p)")])
    assert len(table) == 2
    assert bodies[0] == bodies[1].left


def test_small_corpus_agrees_with_oracle():
    oracle = KripkeOracle(["p", "q"], 4)
    for phi in lewis_free_corpus(2):
        assert ipc_valid(phi) == (oracle.refute(phi) is None), phi


@settings(max_examples=80, deadline=None)
@given(formulas(atoms=("p", "q"), lewis=False, max_leaves=7))
def test_prover_matches_oracle(phi):
    # the prover and the model enumeration are independent routes
    names = sorted({"p", "q"})
    oracle = KripkeOracle(names, 5)
    assert ipc_valid(phi) == (oracle.refute(phi) is None)


def test_random_formula_shape():
    rng = random.Random(0)
    from lewisarrow.formula import connectives
    for k in range(6):
        assert connectives(random_formula(rng, k)) == k
