import pytest

from lewisarrow.fixpoint import (
    FixpointProblem, catalog, collapse_equation, fixpoint, fixpoint_equation, formulas_up_to,
    js_fixpoint, jv_fixpoint, match_family, uniqueness_instance,
)
from lewisarrow.formula import Atom, parse


def prob(psi, chi, kind):
    return FixpointProblem(parse(psi), parse(chi), "r", kind)


def test_js_construction():
    assert js_fixpoint(prob("r", "F", "JS")) == parse("T => F")
    assert js_fixpoint(prob("p & r", "r | p", "js")) == parse("p & T => T | p")


def test_jv_construction():
    # theta = psi[[]chi[T]] => chi[T]
    assert jv_fixpoint(prob("r", "F", "JV")) == parse("[]F => F")
    assert jv_fixpoint(prob("r -> p", "r & p", "JV")) == parse("([](T & p) -> p) => T & p")


def test_equation():
    eq = fixpoint_equation(prob("r", "F", "JS"))
    assert eq == parse("(T => F) <-> ((T => F) => F)")


def test_kind_validation():
    with pytest.raises(ValueError):
        prob("r", "r", "XX")
    assert prob("r", "r", "js").kind == "JS"
    assert fixpoint(prob("r", "r", "jv")) == jv_fixpoint(prob("r", "r", "JV"))


def test_collapse():
    assert collapse_equation(parse("r"), parse("p")) == parse("([]p => p) <-> (T => p)")


def test_uniqueness_instance():
    u = uniqueness_instance(parse("p => r"), "r", "q")
    assert u == parse("([](r <-> (p => r)) & [](q <-> (p => q))) -> [](r <-> q)")
    with pytest.raises(ValueError):
        uniqueness_instance(parse("r & (p => r)"), "r", "q")
    with pytest.raises(ValueError):
        uniqueness_instance(parse("q => r"), "r", "q")


def test_catalog_size():
    # 2 leaves; one connective 4*2*2; two connectives 4*(2*16 + 16*2)
    assert len(catalog(0)) == 2
    assert len(catalog(1)) == 2 + 16
    assert len(catalog(2)) == 2 + 16 + 256
    assert len(formulas_up_to([Atom("p")], 1)) == 1 + 4


@pytest.mark.parametrize("kind", ["JS", "JV"])
def test_match_family_round_trip(kind):
    for psi in catalog(1):
        for chi in catalog(1)[:6]:
            phi = fixpoint_equation(FixpointProblem(psi, chi, "r", kind))
            sigma = match_family(phi, kind)
            assert sigma is not None, (psi, chi)
            again = fixpoint_equation(FixpointProblem(sigma["psi"], sigma["chi"], sigma["r"].name, kind))
            assert again == phi


def test_match_family_x():
    phi = collapse_equation(parse("r & p"), parse("p | r"))
    assert match_family(phi, "X") is not None
    assert match_family(parse("p"), "X") is None
