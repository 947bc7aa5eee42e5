import pytest
from hypothesis import given, settings

from lewisarrow.formula import (
    BOT, TOP, Atom, Conj, Disj, Impl, Lewis, ParseError, atoms, box, connectives, fresh_atom,
    guarded, normalize, parse, stex, substitute, substitute_many, to_text,
)
from lewisarrow.ipc import ipc_valid
from lewisarrow.formula import iff

from conftest import formulas

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_precedence():
    assert parse("p & q | r") == Disj(Conj(p, q), r)
    assert parse("p -> q -> r") == Impl(p, Impl(q, r))
    assert parse("p -> q => r") == Lewis(Impl(p, q), r)
    assert parse("[]p -> p") == Impl(box(p), p)
    assert parse("~p") == Impl(p, BOT)


def test_constants():
    assert parse("T => F") == Lewis(TOP, BOT)
    assert parse("t") == Atom("t")
    with pytest.raises(ParseError):
        parse("Tx")


def test_lewis_is_not_associative():
    with pytest.raises(ParseError):
        parse("p => q => r")
    assert parse("(p => q) => r") == Lewis(Lewis(p, q), r)


@pytest.mark.parametrize("bad", ["", "p &", "(p", "p q", "p $ q", "p <-> q <-> r"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse(bad)


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse("p & $")
    assert exc.value.position == 4


def test_iff_sugar():
    assert parse("p <-> q") == Conj(Impl(p, q), Impl(q, p))
    assert parse("p <=> q") == Conj(Lewis(p, q), Lewis(q, p))


def test_printing_minimal_parens():
    assert to_text(parse("(p -> q) -> r")) == "(p -> q) -> r"
    assert to_text(parse("p -> (q -> r)")) == "p -> q -> r"
    assert to_text(parse("(p | q) & r")) == "(p | q) & r"
    assert to_text(box(p)) == "T => p"


@given(formulas())
def test_round_trip(phi):
    assert parse(to_text(phi)) == phi


@given(formulas())
def test_substitution_identity(phi):
    assert substitute(phi, "p", p) == phi


@given(formulas(), formulas())
def test_substitution_removes_atom(phi, psi):
    out = substitute(phi, "p", substitute(psi, "p", Atom("e")))
    assert "p" not in atoms(out)


@given(formulas(), formulas(), formulas())
def test_substitution_composes(phi, a, b):
    # phi[p:=a][q:=b] == phi[p:=a[q:=b], q:=b]
    lhs = substitute(substitute(phi, "p", a), "q", b)
    rhs = substitute_many(phi, {"p": substitute(a, "q", b), "q": b})
    assert lhs == rhs


def test_connective_count():
    assert connectives(parse("p")) == 0
    assert connectives(parse("(p => q) & r")) == 2
    # [] is T => so it counts
    assert connectives(parse("[]p")) == 1


def test_guarded():
    assert guarded(parse("p => r"), "r")
    assert guarded(parse("q & []r"), "r")
    assert not guarded(parse("r & []r"), "r")
    assert guarded(parse("p"), "r")


def test_fresh_atom():
    assert fresh_atom(["p"]) == "e"
    assert fresh_atom(["e", "e1"]) == "e2"


def test_stex_shape():
    assert stex(parse("p => q"), "e") == parse("(e -> p) => (e -> q)")
    assert stex(parse("p & q"), "e") == parse("p & q")


def test_stex_capture():
    with pytest.raises(ValueError):
        stex(parse("e => p"), "e")


@given(formulas(lewis=False))
def test_stex_identity_without_lewis(phi):
    assert stex(phi, "e") == phi


@settings(max_examples=60, deadline=None)
@given(formulas(lewis=False, max_leaves=6))
def test_normalize_is_ipc_equivalent(phi):
    assert ipc_valid(iff(phi, normalize(phi)))


@given(formulas())
def test_normalize_idempotent(phi):
    n = normalize(phi)
    assert normalize(n) == n


def test_normalize_rewrites():
    assert normalize(parse("T -> p")) == p
    assert normalize(parse("p -> T")) == TOP
    assert normalize(parse("p & T")) == p
    assert normalize(parse("q -> p -> q -> r")) == parse("p -> q -> r")
    assert normalize(parse("p -> q & r")) == parse("(p -> q) & (p -> r)")
