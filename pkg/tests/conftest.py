import hypothesis.strategies as st
import pytest

from lewisarrow.formula import BOT, TOP, Atom, Conj, Disj, Impl, Lewis
from lewisarrow.kripke import parse_model
from lewisarrow.fixtures import read

ATOMS = ("p", "q", "s")


def formulas(atoms=ATOMS, lewis=True, max_leaves=8):
    leaves = st.sampled_from([Atom(a) for a in atoms] + [TOP, BOT])
    ops = [Conj, Disj, Impl] + ([Lewis] if lewis else [])

    def extend(children):
        return st.builds(lambda op, a, b: op(a, b), st.sampled_from(ops), children, children)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@pytest.fixture
def slimmesmurf():
    return parse_model(read("slimmesmurf.frame"))


@pytest.fixture
def querusmurf():
    return parse_model(read("querusmurf.frame"))
