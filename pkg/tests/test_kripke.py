import warnings

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from lewisarrow import algebra as alg
from lewisarrow.formula import parse
from lewisarrow.frames import enumerate_frames
from lewisarrow.kripke import (
    FormatError, FrameError, Model, UnknownAtomWarning, dual_algebra, extension, forces,
    format_model, frame_condition, frame_refutation, frame_validates, in_scheme_class,
    parse_model, satisfies, truth_set, validate_frame, valuations,
)
from lewisarrow.schemes import atom_form

from conftest import formulas

FRAMES3 = list(enumerate_frames(3))


@st.composite
def models(draw):
    frame = draw(st.sampled_from(FRAMES3))
    ups = frame.upsets()
    val = {a: frame.mask_to_set(draw(st.sampled_from(ups))) for a in ("p", "q", "s")}
    return Model(frame, val)


def test_frame_laws():
    with pytest.raises(FrameError):
        validate_frame("ab", [("a", "b"), ("b", "a")])
    # a <= b < c forces a < c
    with pytest.raises(FrameError) as exc:
        validate_frame("abc", [("a", "b")], [("b", "c")])
    assert exc.value.witness == ("a", "b", "c")
    f = validate_frame("abc", [("a", "b"), ("b", "c")], [])
    assert ("a", "c") in f.leq


def test_valuation_must_be_upset():
    f = validate_frame("ab", [("a", "b")])
    with pytest.raises(FrameError):
        Model(f, {"p": {"a"}})


def test_forcing_basics(slimmesmurf):
    m = slimmesmurf
    assert truth_set(m, parse("p")) == {"b"}
    # a sees b and c; b sees c; c sees nothing
    assert truth_set(m, parse("[]F")) == {"c"}
    assert not forces(m, "a", parse("p => []p"))
    assert forces(m, "b", parse("p => []p"))
    assert forces(m, "a", parse("p -> p"))


def test_unknown_atom_warns(slimmesmurf):
    with pytest.warns(UnknownAtomWarning):
        assert not forces(slimmesmurf, "a", parse("zz"))


@settings(max_examples=150, deadline=None)
@given(models(), formulas(max_leaves=7))
def test_persistence(model, phi):
    ext = truth_set(model, phi)
    for a, b in model.frame.leq:
        if a in ext:
            assert b in ext


@settings(max_examples=150, deadline=None)
@given(models(), formulas(max_leaves=7))
def test_three_evaluators_agree(model, phi):
    frame = model.frame
    masks = {a: frame.set_to_mask(ws) for a, ws in model.valuation.items()}
    direct = truth_set(model, phi)
    assert frame.mask_to_set(extension(frame, masks, phi)) == direct
    h = dual_algebra(frame)
    ups = frame.upsets()
    value = alg.eval_formula(h, {a: ups.index(m) for a, m in masks.items()}, phi)
    assert frame.mask_to_set(ups[value]) == direct


def test_dual_algebra_is_hae():
    for frame in FRAMES3[::7]:
        h = dual_algebra(frame)
        assert alg.verify_heyting(h).ok
        assert alg.is_hae(h, normalized=True)


def test_valuations_count():
    f = validate_frame("ab", [("a", "b")])
    # upsets: {}, {b}, {a,b}
    assert len(list(valuations(f, ["p", "q"]))) == 9


def test_tr_valid_everywhere():
    assert all(frame_validates(f, atom_form("Tr")) for f in FRAMES3[::40])


def test_refutation_reports_world(slimmesmurf):
    val, world = frame_refutation(slimmesmurf.frame, parse("p => []p"))
    assert world == "a"
    assert frame_validates(slimmesmurf.frame, atom_form("P"))
    assert frame_validates(slimmesmurf.frame, atom_form("Lbox"))


def test_conditions_on_fixtures(slimmesmurf, querusmurf):
    f = slimmesmurf.frame
    assert satisfies(f, ["lewis", "discrete", "noetherian", "transitive_sub"])
    assert not frame_condition(f, "gathering")
    g = querusmurf.frame
    assert satisfies(g, ["supergathering", "noetherian"])
    assert in_scheme_class(g, ["W", "JS"])


def test_condition_witness():
    f = validate_frame("ab", [], [("a", "b"), ("b", "a")])
    res = frame_condition(f, "noetherian")
    assert not res.holds and res.witness
    with pytest.raises(KeyError):
        frame_condition(f, "shiny")


def test_format_round_trip(querusmurf):
    text = format_model(querusmurf.frame, querusmurf.valuation, "note")
    again = parse_model(text)
    assert again.frame == querusmurf.frame
    assert again.valuation == querusmurf.valuation
    assert text.startswith("# note")


@pytest.mark.parametrize("text", [
    "", "worlds a b", "worlds: a\nfoo: x", "worlds: a b\nleq: a<b", "worlds: a\nval P: a",
    "worlds: a b\nleq: a<=b b<=a", "worlds: a\nsub: a<z",
])
def test_format_errors(text):
    with pytest.raises(FormatError):
        parse_model(text)
