"""Finite Heyting algebras with an extra Lewis-arrow operation."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .formula import Atom, Bot, Conj, Disj, Formula, Impl, Lewis, Meta, Top, as_formula, atoms


class AlgebraFormatError(ValueError):
    pass


class HAE:
    """Carrier ``0..size-1`` with meet, join, rpc and lewis tables.

    ``rpc[a, b]`` is ``a -> b`` and ``lewis[a, b]`` is ``a => b``.
    """

    def __init__(self, size: int, meet, join, rpc, lewis, bot: int = 0, top: int = 1,
                 names: Optional[Sequence[str]] = None, constants: Optional[Mapping[str, int]] = None):
        self.size = int(size)
        self.meet = np.asarray(meet, dtype=np.int64).reshape(self.size, self.size)
        self.join = np.asarray(join, dtype=np.int64).reshape(self.size, self.size)
        self.rpc = np.asarray(rpc, dtype=np.int64).reshape(self.size, self.size)
        self.lewis = np.asarray(lewis, dtype=np.int64).reshape(self.size, self.size)
        if self.size == 1:
            bot = top = 0
        self.bot, self.top = int(bot), int(top)
        self.names = list(names) if names is not None else [str(i) for i in range(self.size)]
        self.constants = dict(constants or {})

    def __repr__(self) -> str:
        return f"HAE(size={self.size}, bot={self.bot}, top={self.top})"

    def copy(self) -> "HAE":
        return HAE(self.size, self.meet.copy(), self.join.copy(), self.rpc.copy(), self.lewis.copy(),
                   self.bot, self.top, self.names, self.constants)

    def leq(self, a: int, b: int) -> bool:
        return self.meet[a, b] == a

    @property
    def order(self) -> np.ndarray:
        """Boolean matrix ``order[a, b]`` iff ``a <= b``."""
        return self.meet == np.arange(self.size)[:, None]

    @property
    def normalized(self) -> bool:
        return not check_cd(self)

    def key(self) -> tuple:
        return (self.size, self.bot, self.top, self.meet.tobytes(), self.rpc.tobytes(), self.lewis.tobytes())

    def __eq__(self, other) -> bool:
        return isinstance(other, HAE) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())


# -- Mace4 interpretation blocks ------------------------------------------

_INTERP = re.compile(r"interpretation\(\s*(\d+)\s*,")
_FUNC = re.compile(r"function\(\s*([^\s(,]+)\s*(\(\s*_\s*(?:,\s*_\s*)*\))?\s*,\s*\[([^\]]*)\]\s*\)")


def parse_mace4_tables(text: str) -> tuple[int, dict[str, list[int]], dict[str, int]]:
    m = _INTERP.search(text)
    if not m:
        raise AlgebraFormatError("no interpretation( n, ... ) block found")
    n = int(m.group(1))
    body = text[m.end():]
    tables: dict[str, list[int]] = {}
    constants: dict[str, int] = {}
    for fm in _FUNC.finditer(body):
        name, args, values = fm.group(1), fm.group(2), fm.group(3)
        try:
            nums = [int(v) for v in values.replace("\n", " ").split(",") if v.strip()]
        except ValueError as exc:
            raise AlgebraFormatError(f"non-numeric entry in table for {name}") from exc
        if any(not 0 <= v < n for v in nums):
            raise AlgebraFormatError(f"value out of range in table for {name}")
        if args is None:
            if len(nums) != 1:
                raise AlgebraFormatError(f"constant {name} must have one value")
            constants[name] = nums[0]
        else:
            arity = args.count("_")
            if len(nums) != n ** arity:
                raise AlgebraFormatError(f"table for {name} has {len(nums)} entries, expected {n ** arity}")
            tables[name] = nums
    for op in ("^", "*", "+"):
        if op not in tables:
            raise AlgebraFormatError(f"missing function table for {op}")
    return n, tables, constants


def join_from_meet(meet: np.ndarray) -> np.ndarray:
    """Least upper bounds in the order ``a <= b iff meet(a, b) = a``; fails loudly."""
    n = meet.shape[0]
    order = meet == np.arange(n)[:, None]
    join = np.zeros((n, n), dtype=np.int64)
    for a, b in itertools.product(range(n), repeat=2):
        ups = [c for c in range(n) if order[a, c] and order[b, c]]
        least = [c for c in ups if all(order[c, d] for d in ups)]
        if len(least) != 1:
            raise AlgebraFormatError(f"elements {a} and {b} have no least upper bound")
        join[a, b] = least[0]
    return join


def load_mace4(text: str, check: bool = True) -> HAE:
    """Read a Mace4 interpretation with tables ``^`` (meet), ``*`` (rpc), ``+`` (lewis)."""
    n, tables, constants = parse_mace4_tables(text)
    meet = np.array(tables["^"], dtype=np.int64).reshape(n, n)
    join = join_from_meet(meet)
    order = meet == np.arange(n)[:, None]
    bot = next((a for a in range(n) if order[a].all()), None)
    top = next((a for a in range(n) if order[:, a].all()), None)
    if bot is None or top is None:
        raise AlgebraFormatError("meet order has no bottom or no top")
    hae = HAE(n, meet, join, tables["*"], tables["+"], bot=bot, top=top, constants=constants)
    if check:
        report = verify_heyting(hae)
        if not report.ok:
            raise AlgebraFormatError("not a Heyting algebra: " + "; ".join(report.summary()))
    return hae


def load_mace4_file(path) -> HAE:
    with open(path) as fh:
        return load_mace4(fh.read())


def _relabel(hae: HAE, perm: Sequence[int]) -> HAE:
    """Rename element ``a`` to ``perm[a]``."""
    n = hae.size
    perm = np.asarray(perm)
    inv = np.argsort(perm)
    tabs = [perm[t[np.ix_(inv, inv)]] for t in (hae.meet, hae.join, hae.rpc, hae.lewis)]
    names = [hae.names[i] for i in inv]
    consts = {k: int(perm[v]) for k, v in hae.constants.items()}
    return HAE(n, *tabs, bot=int(perm[hae.bot]), top=int(perm[hae.top]), names=names, constants=consts)


def format_mace4(hae: HAE) -> str:
    """Dump as a Mace4 interpretation, relabelled so that bottom is 0 and top is 1."""
    n = hae.size
    if n >= 2 and (hae.bot, hae.top) != (0, 1):
        rest = [a for a in range(n) if a not in (hae.bot, hae.top)]
        perm = [0] * n
        for new, old in enumerate([hae.bot, hae.top] + rest):
            perm[old] = new
        hae = _relabel(hae, perm)
    out = [f"interpretation( {n}, [number=1, seconds=0], ["]
    parts = [f"        function({k}, [ {v} ])" for k, v in sorted(hae.constants.items())]
    for op, table in (("*", hae.rpc), ("+", hae.lewis), ("^", hae.meet)):
        rows = ",\n".join("\t\t\t   " + ", ".join(str(int(v)) for v in row) for row in table)
        parts.append(f"        function({op}(_,_), [\n{rows} ])")
    out.append(",\n\n".join(parts))
    out.append("]).")
    return "\n".join(out) + "\n"


# -- verification ------------------------------------------------------------

@dataclass
class Report:
    violations: list[tuple[str, tuple]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, witness: tuple) -> None:
        self.violations.append((law, tuple(int(x) for x in witness)))

    def laws(self) -> set[str]:
        return {law for law, _ in self.violations}

    def summary(self, limit: int = 5) -> list[str]:
        return [f"{law} at {w}" for law, w in self.violations[:limit]]


def _witnesses(mask: np.ndarray) -> list[tuple]:
    return [tuple(int(i) for i in ix) for ix in np.argwhere(mask)]


def verify_heyting(hae: HAE) -> Report:
    """Lattice laws, bounds and residuation, checked on every pair and triple."""
    rep = Report()
    n = hae.size
    M, J, R = hae.meet, hae.join, hae.rpc
    e = np.arange(n)
    a, b = np.meshgrid(e, e, indexing="ij")
    x, y, z = np.meshgrid(e, e, e, indexing="ij")
    pair_laws = [
        ("meet idempotent", M[e, e] != e),
        ("join idempotent", J[e, e] != e),
        ("meet commutative", M != M.T),
        ("join commutative", J != J.T),
        ("absorption meet", M[a, J[a, b]] != a),
        ("absorption join", J[a, M[a, b]] != a),
        ("bottom", M[e, hae.bot] != hae.bot),
        ("top", M[e, hae.top] != e),
        ("meet associative", M[x, M[y, z]] != M[M[x, y], z]),
        ("join associative", J[x, J[y, z]] != J[J[x, y], z]),
    ]
    for law, bad in pair_laws:
        for w in _witnesses(bad):
            rep.add(law, w)
    order = hae.order
    # meet(x, y) <= z  iff  x <= rpc(y, z)
    lhs = order[M[x, y], z]
    rhs = order[x, R[y, z]]
    for w in _witnesses(lhs != rhs):
        rep.add("residuation", w)
    return rep


def check_ck(hae: HAE) -> list[tuple]:
    e = np.arange(hae.size)
    a, b, c = np.meshgrid(e, e, e, indexing="ij")
    L, M = hae.lewis, hae.meet
    return _witnesses(M[L[a, b], L[a, c]] != L[a, M[b, c]])


def check_ct(hae: HAE) -> list[tuple]:
    e = np.arange(hae.size)
    a, b, c = np.meshgrid(e, e, e, indexing="ij")
    L, M = hae.lewis, hae.meet
    return _witnesses(~hae.order[M[L[a, b], L[b, c]], L[a, c]])


def check_ci(hae: HAE) -> list[tuple]:
    e = np.arange(hae.size)
    return [(int(a),) for a in e[hae.lewis[e, e] != hae.top]]


def check_cd(hae: HAE) -> list[tuple]:
    e = np.arange(hae.size)
    a, b, c = np.meshgrid(e, e, e, indexing="ij")
    L, M, J = hae.lewis, hae.meet, hae.join
    return _witnesses(M[L[a, c], L[b, c]] != L[J[a, b], c])


EQUATIONS = {"CK": check_ck, "CT": check_ct, "CI": check_ci, "CD": check_cd}


def check_equations(hae: HAE, names=("CK", "CT", "CI")) -> Report:
    rep = Report()
    for name in names:
        for w in EQUATIONS[name](hae):
            rep.add(name, w)
    return rep


def is_hae(hae: HAE, normalized: bool = False) -> bool:
    names = ("CK", "CT", "CI", "CD") if normalized else ("CK", "CT", "CI")
    return verify_heyting(hae).ok and check_equations(hae, names).ok


# -- evaluation --------------------------------------------------------------

def eval_formula(hae: HAE, valuation: Mapping[str, int], phi) -> int:
    """Homomorphic evaluation; every atom of ``phi`` must be bound."""
    phi = as_formula(phi)
    memo: dict[Formula, int] = {}

    def go(f: Formula) -> int:
        hit = memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Top):
            out = hae.top
        elif isinstance(f, Bot):
            out = hae.bot
        elif isinstance(f, Atom):
            if f.name not in valuation:
                raise KeyError(f"no value for atom {f.name!r}")
            out = int(valuation[f.name])
        elif isinstance(f, Meta):
            raise ValueError(f"cannot evaluate metavariable %{f.name}")
        else:
            table = {Conj: hae.meet, Disj: hae.join, Impl: hae.rpc, Lewis: hae.lewis}[type(f)]
            out = int(table[go(f.left), go(f.right)])
        memo[f] = out
        return out

    return go(phi)


def eval_many(hae: HAE, arrays: Mapping[str, np.ndarray], phi: Formula) -> np.ndarray:
    """Vectorized evaluation over arrays of element indices (one entry per valuation)."""
    shape = np.broadcast(*arrays.values()).shape if arrays else ()
    memo: dict[Formula, np.ndarray] = {}
    tables = {Conj: hae.meet, Disj: hae.join, Impl: hae.rpc, Lewis: hae.lewis}

    def go(f: Formula) -> np.ndarray:
        hit = memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Top):
            out = np.full(shape, hae.top)
        elif isinstance(f, Bot):
            out = np.full(shape, hae.bot)
        elif isinstance(f, Atom):
            if f.name not in arrays:
                raise KeyError(f"no value for atom {f.name!r}")
            out = np.broadcast_to(arrays[f.name], shape)
        else:
            out = tables[type(f)][go(f.left), go(f.right)]
        memo[f] = out
        return out

    return go(phi)


def all_valuations(hae: HAE, names: Sequence[str]) -> dict[str, np.ndarray]:
    """Every assignment of the named atoms, in lexicographic order of the names."""
    names = list(names)
    if not names:
        return {}
    grids = np.meshgrid(*[np.arange(hae.size)] * len(names), indexing="ij")
    return {nm: g.ravel() for nm, g in zip(names, grids)}


def algebra_refutation(hae: HAE, phi) -> Optional[dict[str, int]]:
    """First valuation (lexicographic over sorted atom names) with value not top."""
    phi = as_formula(phi)
    names = sorted(atoms(phi))
    vals = all_valuations(hae, names)
    values = eval_many(hae, vals, phi)
    bad = np.flatnonzero(np.atleast_1d(values) != hae.top)
    if bad.size == 0:
        return None
    i = bad[0]
    return {nm: int(vals[nm][i]) for nm in names}


def algebra_validates(hae: HAE, phi) -> bool:
    return algebra_refutation(hae, phi) is None


def is_isomorphic(a: HAE, b: HAE) -> bool:
    """Brute force over bijections fixing bottom and top."""
    if a.size != b.size:
        return False
    n = a.size
    if n == 1:
        return True
    rest_a = [x for x in range(n) if x not in (a.bot, a.top)]
    rest_b = [x for x in range(n) if x not in (b.bot, b.top)]
    for image in itertools.permutations(rest_b):
        perm = np.zeros(n, dtype=np.int64)
        perm[a.bot], perm[a.top] = b.bot, b.top
        perm[rest_a] = image
        ok = all(
            np.array_equal(perm[ta], tb[np.ix_(perm, perm)])
            for ta, tb in ((a.meet, b.meet), (a.rpc, b.rpc), (a.lewis, b.lewis))
        )
        if ok:
            return True
    return False
