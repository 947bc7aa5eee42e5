import pytest

from lewisarrow.formula import parse
from lewisarrow.kernel import (
    CATALOG, IPC, Line, ProofScript, ScriptError, check_proof, check_text, dependents, expand_lob,
    formula_mutations, load_script, mutations, parse_script, verify_catalog,
)

HEADER = "logic: iA-\ngoal: {goal}\n"


def script(goal, *lines, logic="iA-"):
    return f"logic: {logic}\ngoal: {goal}\n" + "\n".join(lines) + "\n"


@pytest.mark.parametrize("name", CATALOG)
def test_catalog_accepted(name):
    s = load_script(name)
    assert check_proof(s), str(check_proof(s))


def test_verify_catalog():
    entries = verify_catalog()
    assert [e.name for e in entries] == CATALOG
    assert all(e.verdict for e in entries)


@pytest.mark.parametrize("name", CATALOG)
def test_text_round_trip(name):
    s = load_script(name)
    again = parse_script(s.text(), name)
    assert again.lines == s.lines and again.goal == s.goal and again.axiom_set == s.axiom_set


def test_simple_accept():
    text = script("p => p", "1. p -> p ; ipc", "2. p => p ; na 1")
    assert check_text(text)


@pytest.mark.parametrize("lines, goal, at, reason", [
    (["1. p -> p ; ipc", "2. p => p ; na 3"], "p => p", 2, "not an earlier line"),
    (["1. p -> p ; ipc", "1. p => p ; na 1"], "p => p", 1, "increase"),
    (["1. p -> p ; ipc"], "p => p", 1, "not the goal"),
    (["1. p -> q ; ipc"], "p -> q", 1, "IPC"),
    (["1. p ; ipc", "2. p => p ; na 1"], "p => p", 1, "IPC"),
    (["1. p & p ; ipc"], "p & p", 1, "IPC"),
    (["1. [](p -> p) ; ipc"], "[](p -> p)", 1, "IPC"),
    (["1. ([]p -> p) => p ; ax La {%phi:=p}"], "([]p -> p) => p", 1, "not in iA-"),
    (["1. ((p => q) & (q => s)) -> (p => q) ; ax Tr {%phi:=p, %psi:=q, %chi:=s}"],
     "((p => q) & (q => s)) -> (p => q)", 1, "stated instance"),
    (["1. p -> p ; ax Nope {}"], "p -> p", 1, "unknown scheme"),
    (["1. p -> p ; ax Tr {%phi:=p}"], "p -> p", 1, "missing binding"),
    (["1. p -> p ; ipc", "2. q ; mp 1 1"], "q", 2, "is not line"),
    (["1. p & q -> p ; ipc", "2. p => q ; na 1"], "p => q", 2, "Lewis arrow form"),
    (["1. p | ~p -> p | ~p ; ipc", "2. p => p ; na 1"], "p => p", 2, "Lewis arrow form"),
])
def test_rejections(lines, goal, at, reason):
    v = check_text(script(goal, *lines))
    assert not v
    assert v.line == at
    assert reason in v.reason
    assert str(v).startswith(f"rejected at line {at}")


def test_na_needs_implication():
    v = check_text(script("p => p", "1. T ; ipc", "2. p => p ; na 1"))
    assert not v and "not an implication" in v.reason


def test_unknown_axiom_set():
    v = check_text(script("p -> p", "1. p -> p ; ipc", logic="iZ"))
    assert not v and v.line is None


@pytest.mark.parametrize("text, index", [
    ("goal: p\n1. p ; ipc\n", None),
    ("logic: iA-\n1. p ; ipc\n", None),
    ("logic: iA-\ngoal: p\n1. p ; frob 2\n", 1),
    ("logic: iA-\ngoal: p\n3. p & ; ipc\n", 3),
    ("logic: iA-\ngoal: p\n2. p ; mp 1\n", 2),
    ("logic: iA-\ngoal: p\n2. p ; ax Tr {%phi p}\n", 2),
    ("logic: iA-\ngoal: p\njunk\n", None),
])
def test_parse_errors(text, index):
    with pytest.raises(ScriptError) as exc:
        parse_script(text)
    assert exc.value.index == index
    assert not check_text(text)


def test_comments_ignored():
    text = "# header comment\n" + script("p -> p", "1. p -> p ; ipc  # trivially")
    assert check_text(text)


def test_ipc_treats_lewis_terms_as_atoms():
    assert check_text(script("(p => q) & s -> (p => q)", "1. (p => q) & s -> (p => q) ; ipc"))
    assert not check_text(script("(p => q) -> (q => p)", "1. (p => q) -> (q => p) ; ipc"))
    # the cited line supplies the Lewis term; without the citation it is not IPC
    cited = script("s | (p => p)", "1. p -> p ; ipc", "2. p => p ; na 1", "3. s | (p => p) ; ipc 2")
    assert check_text(cited)
    assert not check_text(cited.replace("ipc 2", "ipc"))


def test_expand_lob():
    lines = [Line(1, parse("[](p -> p) -> p -> p"), IPC())]
    extra = expand_lob(lines, 1, "iGLbox-")
    assert len(extra) == 5
    s = ProofScript("iGLbox-", parse("p -> p"), lines + extra)
    assert check_proof(s)
    assert [ln.index for ln in extra] == [2, 3, 4, 5, 6]


def test_expand_lob_errors():
    lines = [Line(1, parse("[](p -> p) -> p -> p"), IPC())]
    with pytest.raises(ScriptError):
        expand_lob(lines, 1, "iA-")
    with pytest.raises(ScriptError):
        expand_lob(lines, 2, "iGLbox-")
    with pytest.raises(ScriptError):
        expand_lob([Line(1, parse("p -> p"), IPC())], 1, "iGLbox-")


def test_formula_mutations_are_single_token():
    f = parse("p & q")
    muts = list(formula_mutations(f))
    # two leaves, three other connectives at the root
    assert len(muts) == 2 + 3
    assert f not in muts


def test_all_mutants_of_short_script_rejected():
    s = load_script("Lbox-from-La")
    seen = 0
    for index, desc, mutant in mutations(s):
        seen += 1
        v = check_proof(mutant)
        assert not v, desc
        assert v.line == index or v.line in dependents(s, index), (desc, str(v))
    assert seen > 50


def test_dependents():
    s = load_script("Lbox-from-La")
    assert dependents(s, 1) == {3}
    assert dependents(s, 3) == set()
