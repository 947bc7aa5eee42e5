import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from lewisarrow import algebra as alg
from lewisarrow.fixtures import fixture
from lewisarrow.formula import parse
from lewisarrow.schemes import atom_form
from lewisarrow.sweeps import lewis_cell_mutations

from conftest import formulas

# the six element interpretation, tables as printed
RPC = [1, 1, 1, 1, 1, 1,
       0, 1, 2, 3, 4, 5,
       3, 1, 1, 3, 4, 4,
       2, 1, 2, 1, 1, 2,
       0, 1, 2, 3, 1, 2,
       3, 1, 1, 3, 1, 1]
LEWIS = [1, 1, 1, 1, 1, 1,
         0, 1, 0, 0, 0, 0,
         5, 1, 1, 5, 2, 2,
         0, 1, 0, 1, 1, 0,
         0, 1, 0, 4, 1, 0,
         4, 1, 1, 4, 1, 1]
MEET = [0, 0, 0, 0, 0, 0,
        0, 1, 2, 3, 4, 5,
        0, 2, 2, 0, 5, 5,
        0, 3, 0, 3, 3, 0,
        0, 4, 5, 3, 4, 5,
        0, 5, 5, 0, 5, 5]


@pytest.fixture(scope="module")
def h():
    return alg.load_mace4_file(fixture("mace4-6elem.alg"))


def test_bit_exact(h):
    assert h.size == 6 and h.bot == 0 and h.top == 1
    assert h.rpc.ravel().tolist() == RPC
    assert h.lewis.ravel().tolist() == LEWIS
    assert h.meet.ravel().tolist() == MEET
    assert h.constants == {"c1": 2, "c2": 4, "c3": 3}


def test_heyting(h):
    assert alg.verify_heyting(h).ok


def test_equations_by_loops(h):
    # independent of the vectorized checks
    L, M, le = h.lewis, h.meet, lambda a, b: M[a, b] == a
    n = 0
    for a, b, c in itertools.product(range(6), repeat=3):
        n += 1
        assert M[L[a, b], L[a, c]] == L[a, M[b, c]]
        assert le(M[L[a, b], L[b, c]], L[a, c])
    assert n == 216
    assert all(L[a, a] == h.top for a in range(6))
    assert alg.check_equations(h).ok


def test_not_normalized(h):
    bad = alg.check_cd(h)
    assert bad and all(type(x) is int for x in bad[0])
    assert not h.normalized


def test_fourcirca_valid(h):
    f = atom_form("4circa")
    vals = [dict(p=p, q=q) for p in range(6) for q in range(6)]
    assert len(vals) == 36
    assert all(alg.eval_formula(h, v, f) == h.top for v in vals)


def test_fortyfour_fails_at_goal(h):
    f = atom_form("44circa")
    assert alg.eval_formula(h, {"p": 2, "q": 4, "s": 3}, f) != h.top
    assert alg.algebra_refutation(h, f) == {"p": 2, "q": 4, "s": 3}


def test_di_fails(h):
    assert alg.eval_formula(h, {"p": 4, "q": 2, "s": 3}, atom_form("Di")) != h.top


def test_format_round_trip(h):
    again = alg.load_mace4(alg.format_mace4(h))
    assert alg.is_isomorphic(h, again)
    assert again.lewis.tolist() == h.lewis.tolist()


def test_isomorphism_relabel(h):
    perm = [0, 1, 3, 2, 5, 4]
    other = alg._relabel(h, perm)
    assert alg.is_isomorphic(h, other)
    broken = other.copy()
    broken.lewis[2, 3] = (broken.lewis[2, 3] + 1) % 6
    assert not alg.is_isomorphic(h, broken)


@settings(max_examples=60, deadline=None)
@given(formulas(max_leaves=6))
def test_vectorized_matches_pointwise(h, phi):
    names = sorted({"p", "q", "s"})
    vals = alg.all_valuations(h, names)
    values = np.broadcast_to(alg.eval_many(h, vals, phi), vals["p"].shape)
    for i in range(0, values.size, 23):
        point = {k: int(v[i]) for k, v in vals.items()}
        assert int(values[i]) == alg.eval_formula(h, point, phi)


def test_mutations_break_something(h):
    rows = lewis_cell_mutations(h)
    assert len(rows) == 36 * 5
    assert all(r["broken"] for r in rows)


@pytest.mark.parametrize("text, msg", [
    ("nothing here", "no interpretation"),
    ("interpretation( 2, [], [ function(^(_,_), [0,0,0]) ])", "entries"),
    ("interpretation( 2, [], [ function(^(_,_), [0,0,0,7]) ])", "range"),
    ("interpretation( 2, [], [ function(^(_,_), [0,0,0,1]), function(*(_,_), [1,1,0,1]) ])", "missing"),
])
def test_format_errors(text, msg):
    with pytest.raises(alg.AlgebraFormatError, match=msg):
        alg.load_mace4(text)


def test_non_heyting_rejected():
    # two element lattice with a wrong implication table
    text = ("interpretation( 2, [], [ function(^(_,_), [0,0,0,1]), function(*(_,_), [0,1,0,1]),"
            " function(+(_,_), [1,1,1,1]) ])")
    with pytest.raises(alg.AlgebraFormatError):
        alg.load_mace4(text)
    assert not alg.verify_heyting(alg.load_mace4(text, check=False)).ok
