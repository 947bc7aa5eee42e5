import itertools

import numpy as np
import pytest

from lewisarrow import algebra as alg
from lewisarrow.fixtures import fixture
from lewisarrow.formula import parse
from lewisarrow.frames import enumerate_frames
from lewisarrow.kripke import forces, frame_validates, satisfies
from lewisarrow.repro import _iso_to_fixture
from lewisarrow.schemes import atom_form
from lewisarrow.search import (
    SearchSpec, algebra_axioms, bounded_lattices, class_batches, class_validates,
    correspondence_sweep, enumerate_algebras, find_algebra_countermodel, find_frame_countermodel,
    search,
)


def brute_tables(lat, four=False):
    """Every lewis table on the lattice meeting CK, CT and CI, by exhaustion."""
    n = lat.n
    top = 1 if n > 1 else 0
    cells = np.array(list(itertools.product(range(n), repeat=n * n)), dtype=np.int64)
    L = cells.reshape(-1, n, n)
    M, O = lat.meet, lat.order
    keep = np.ones(len(L), dtype=bool)
    k = np.arange(len(L))
    for a in range(n):
        keep &= L[:, a, a] == top
    for a, b, c in itertools.product(range(n), repeat=3):
        keep &= M[L[:, a, b], L[:, a, c]] == L[:, a, M[b, c]]
        keep &= O[M[L[:, a, b], L[:, b, c]], L[:, a, c]]
        if four:
            keep &= O[L[:, a, b], L[k, a, L[:, a, b]]]
    return {tuple(t.ravel()) for t in L[keep]}


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("four", [False, True])
def test_algebra_enumeration_matches_brute_force(n, four):
    axioms = ("CK", "CT", "CI", "4circa") if four else ("CK", "CT", "CI")
    got = {}
    for h in enumerate_algebras(n, axioms):
        got.setdefault(h.meet.tobytes(), set()).add(tuple(h.lewis.ravel()))
    for lat in bounded_lattices(n):
        want = brute_tables(lat, four)
        assert got.get(lat.meet.tobytes(), set()) == want


def test_enumerated_algebras_are_hae():
    for n in (2, 3, 4):
        for h in itertools.islice(enumerate_algebras(n), 50):
            assert alg.is_hae(h)


def test_bounded_lattices_counts():
    # distributive lattices up to iso on 1..6 elements (sizes of a standard table)
    assert [sum(1 for _ in bounded_lattices(n)) for n in range(1, 7)] == [1, 1, 1, 2, 3, 5]


def test_algebra_axioms_mapping():
    assert algebra_axioms(["iA-"]) == {"CK", "CT", "CI"}
    assert algebra_axioms(["iA-", "4circa"]) == {"CK", "CT", "CI", "4circa"}
    assert algebra_axioms(["Tr"]) == {"CT"}
    assert algebra_axioms(["iA"]) == {"CK", "CT", "CI", "CD"}
    with pytest.raises(KeyError):
        algebra_axioms(["nope"])


def test_fortyfour_first_refuted_at_six():
    rep = find_algebra_countermodel(SearchSpec("44circa", {"iA-", "4circa"}, 6, "algebras"))
    assert rep.found and rep.size == 6
    assert rep.detail["exhausted_sizes"] == [1, 2, 3, 4, 5]
    assert alg.is_isomorphic(rep.witness, alg.load_mace4_file(fixture("mace4-6elem.alg")))


def test_tr_has_no_algebraic_countermodel():
    rep = search(SearchSpec("Tr", {"iA-"}, 4, "algebras"))
    assert not rep.found


def test_di_fails_without_cd():
    rep = search(SearchSpec("Di", {"iA-"}, 4, "algebras"))
    assert rep.found
    assert not alg.algebra_validates(rep.witness, atom_form("Di"))
    assert not search(SearchSpec("Di", {"iA"}, 4, "algebras")).found


def test_spec_validation():
    with pytest.raises(ValueError):
        SearchSpec("p", frozenset(), 0)
    with pytest.raises(ValueError):
        SearchSpec("p", frozenset(), 2, "trees")
    with pytest.raises(KeyError):
        SearchSpec("p", {"shiny"}, 2)
    with pytest.raises(ValueError):
        find_frame_countermodel(SearchSpec("p", frozenset(), 6))


def _smaller_all_validate(phi, constraints, below):
    for n in range(1, below):
        for frame in enumerate_frames(n, constraints):
            assert frame_validates(frame, phi)


def test_p_box_countermodel(slimmesmurf):
    cons = {"discrete", "noetherian", "transitive_sub"}
    rep = find_frame_countermodel(SearchSpec("p => []p", cons, 3))
    assert rep.found and rep.size == 3
    model = rep.witness
    assert satisfies(model.frame, cons)
    assert not forces(model, rep.detail["world"], parse("p => []p"))
    for s in ("P", "Lbox"):
        assert frame_validates(model.frame, atom_form(s))
    assert _iso_to_fixture(model, "slimmesmurf.frame")
    _smaller_all_validate(parse("p => []p"), cons, 3)


def test_supergathering_countermodel():
    phi = parse("(p => F) -> [](p => F)")
    cons = {"supergathering", "noetherian"}
    rep = find_frame_countermodel(SearchSpec(phi, cons, 4))
    assert rep.found and rep.size == 4
    assert _iso_to_fixture(rep.witness, "querusmurf.frame")
    _smaller_all_validate(phi, cons, 4)


def test_gathering_countermodel():
    phi = parse("([]F => F) -> []F")
    rep = find_frame_countermodel(SearchSpec(phi, {"noetherian", "gathering"}, 3))
    assert rep.found and rep.size <= 3
    assert not forces(rep.witness, rep.detail["world"], phi)


def test_exhausted_report():
    rep = find_frame_countermodel(SearchSpec("Tr", frozenset(), 2))
    assert not rep.found and rep.witness is None
    assert rep.counts["enumerated"] == 2 + 34
    assert rep.summary().startswith("exhausted")


@pytest.mark.parametrize("scheme, condition", [
    ("Box", "brilliant"), ("4box", "semi_transitive"), ("4sub", "gathering"), ("S", "strong"),
    ("P", "transitive_sub"), ("4circa", "gather_transitive"), ("W", "supergathering"),
])
def test_correspondence_small(scheme, condition):
    res = correspondence_sweep(scheme, condition, 3)
    assert res["frames"] == 2 + 34 + 2942
    assert res["discrepancies"] == [] and res["unconfirmed"] == 0
    assert res["valid"] == res["condition_holds"]


def test_correspondence_detects_mismatch():
    # Box is not characterized by gathering, so the sweep must report frames
    res = correspondence_sweep("Box", "gathering", 2)
    assert res["discrepancies"]
    for frame in res["discrepancies"]:
        assert frame_validates(frame, atom_form("Box")) != satisfies(frame, ["gathering"])


def test_class_batches_and_dedupe():
    full = sum(len(b) for b in class_batches(["noetherian"], 3))
    iso = sum(len(b) for b in class_batches(["noetherian"], 3, dedupe=True))
    assert full == sum(1 for n in (1, 2, 3) for _ in enumerate_frames(n, ["noetherian"]))
    assert iso < full
    count, model = class_validates(atom_form("Lbox"), ["noetherian", "semi_transitive"], 3)
    assert count > 0 and model is None


def test_jobs_do_not_change_result():
    spec = SearchSpec("p => []p", {"discrete", "noetherian", "transitive_sub"}, 3)
    a = find_frame_countermodel(spec, 1)
    b = find_frame_countermodel(spec, 2)
    assert a.witness == b.witness and a.counts == b.counts
