import pytest
from hypothesis import given

from lewisarrow.formula import Atom, parse, stex, to_text
from lewisarrow.schemes import (
    BASES, SCHEMES, atom_form, axiom_set, get_scheme, match_scheme, parse_axiom_list,
    scheme_instance,
)

from conftest import formulas


def test_atom_forms():
    assert atom_form("Tr") == parse("((p => q) & (q => s)) -> (p => s)")
    assert atom_form("4box") == parse("[]p -> [][]p")
    assert atom_form("La") == parse("([]p -> p) => p")
    # main connective of Lcirca is material implication
    assert to_text(atom_form("Lcirca")).startswith("(p => ")


def test_every_template_uses_listed_metavars():
    for name, scheme in SCHEMES.items():
        if not scheme.family:
            assert set(scheme.metavars) <= {"phi", "psi", "chi"}


def test_family_atom_form_rejected():
    with pytest.raises(ValueError):
        atom_form("JS")


def test_unknown_scheme():
    with pytest.raises(KeyError):
        get_scheme("nope")


def test_instance_and_match():
    inst = scheme_instance("W", {"%phi": "p & q", "psi": "F"})
    assert match_scheme(inst, "W") == {"phi": parse("p & q"), "psi": parse("F")}
    assert match_scheme(parse("p -> p"), "W") is None


def test_missing_binding():
    with pytest.raises(KeyError):
        scheme_instance("Tr", {"phi": "p", "psi": "q"})


@given(formulas(max_leaves=4), formulas(max_leaves=4), formulas(max_leaves=4))
def test_match_recovers_instance(a, b, c):
    for name in ("Tr", "Ka", "Di", "44circa"):
        inst = scheme_instance(name, {"phi": a, "psi": b, "chi": c})
        sigma = match_scheme(inst, name, normalized=False)
        assert sigma is not None
        assert scheme_instance(name, sigma) == inst


def test_stex_of_tr_is_tr():
    inst = scheme_instance("Tr", {"phi": "p", "psi": "q | p", "chi": "[]q"})
    assert match_scheme(stex(inst, "e"), "Tr", normalized=False) is not None


def test_stex_of_ka_needs_normalization():
    inst = atom_form("Ka")
    image = stex(inst, "e")
    assert match_scheme(image, "Ka", normalized=False) is None
    assert match_scheme(image, "Ka") is not None


def test_family_instances():
    js = scheme_instance("JS", {"psi": "r", "chi": "p & r"})
    sigma = match_scheme(js, "JS")
    assert sigma is not None
    assert scheme_instance("JS", sigma) == js
    assert match_scheme(parse("p -> p"), "JS") is None


def test_axiom_sets():
    assert axiom_set("iA-").schemes == {"Tr", "Ka"}
    assert axiom_set("iA-+4circa").schemes == {"Tr", "Ka", "4circa"}
    assert "Lbox" in axiom_set("iGLP-")
    assert parse_axiom_list("iGLa-, Di") == {"Tr", "Ka", "La", "Di"}
    with pytest.raises(KeyError):
        axiom_set("iB")
    with pytest.raises(KeyError):
        axiom_set("iA-+Nope")
    assert all(BASES["iA-"] <= s for s in BASES.values())
