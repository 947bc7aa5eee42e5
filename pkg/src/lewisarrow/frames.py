"""Batch enumeration and evaluation of small Lewisian frames.

Frames sharing an order share the Heyting part of their dual algebra, so
they are processed together: each batch holds the ``sub`` rows of many
frames over one order, and formulas are evaluated by table lookup with
the valuations laid out along a second axis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .formula import Atom, Bot, Conj, Disj, Formula, Impl, Lewis, Top, atoms
from .kripke import CONDITIONS, Frame, default_names, frame_from_masks
from .orders import labeled_posets, upsets

FRAME_CAP = 5


class OrderData:
    """The upset algebra of one order together with helper tables."""

    def __init__(self, up: tuple[int, ...]):
        self.up = tuple(up)
        n = self.n = len(up)
        self.ups = upsets(self.up)
        self.u = len(self.ups)
        self.index = np.full(1 << n, -1, dtype=np.int16)
        for i, m in enumerate(self.ups):
            self.index[m] = i
        self.top = int(self.index[(1 << n) - 1])
        self.bot = int(self.index[0])
        U = np.array(self.ups, dtype=np.int64)
        self.meet = self.index[U[:, None] & U[None, :]]
        self.join = self.index[U[:, None] | U[None, :]]
        # bad[i, j] = U_i minus U_j; k is in U_i -> U_j iff up[k] misses bad
        self.bad = U[:, None] & ~U[None, :]
        upm = np.array(self.up, dtype=np.int64)
        imp = np.zeros((self.u, self.u), dtype=np.int64)
        for k in range(n):
            imp |= ((upm[k] & self.bad) == 0).astype(np.int64) << k
        self.rpc = self.index[imp]
        self.leq = np.array([[bool(self.up[k] >> l & 1) for l in range(n)] for k in range(n)])
        self.strict = self.leq & ~np.eye(n, dtype=bool)
        self.masks = U

    @cached_property
    def discrete(self) -> bool:
        return not self.strict.any()

    def grid(self, k: int) -> np.ndarray:
        """All ``u**k`` valuations of ``k`` atoms, shape ``(k, u**k)``."""
        if k == 0:
            return np.zeros((0, 1), dtype=np.int16)
        g = np.meshgrid(*[np.arange(self.u, dtype=np.int16)] * k, indexing="ij")
        return np.stack([x.ravel() for x in g])


@lru_cache(maxsize=None)
def order_data(up: tuple[int, ...]) -> OrderData:
    return OrderData(up)


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.int64)
    out = np.zeros(a.shape, dtype=np.int64)
    while a.any():
        out += a & 1
        a = a >> 1
    return out


def sub_relations(od: OrderData, head: Optional[dict[int, int]] = None, vector_tail: int = 4) -> Iterator[np.ndarray]:
    """All ``sub`` relations obeying the composition law over this order.

    Yields arrays of shape ``(B, n)`` holding one bitmask row per world.
    Rows are fixed from the top of the order downwards, since a world's row
    must contain the rows of everything above it.  When more than
    ``vector_tail`` rows remain, the first is fixed in a Python loop so that
    each chunk stays small; inside a chunk frames are sorted by the number
    of pairs, then by the encoded relation.
    """
    n = od.n
    order = sorted(range(n), key=lambda k: (bin(od.up[k]).count("1"), k))
    head = dict(head or {})
    free = [k for k in order if k not in head]
    if len(free) > vector_tail:
        k = free[0]
        req = 0
        for l in range(n):
            if l != k and od.up[k] >> l & 1:
                req |= head[l]
        for m in range(1 << n):
            if m & req == req:
                yield from sub_relations(od, {**head, k: m}, vector_tail)
        return
    arr = np.zeros((1, n), dtype=np.int64)
    for k, m in head.items():
        arr[:, k] = m
    masks = np.arange(1 << n, dtype=np.int64)
    for k in free:
        req = np.zeros(arr.shape[0], dtype=np.int64)
        for l in range(n):
            if l != k and od.up[k] >> l & 1:
                req |= arr[:, l]
        ok = (masks[None, :] & req[:, None]) == req[:, None]
        bi, mi = np.nonzero(ok)
        arr = arr[bi]
        arr[:, k] = mi
    code = np.zeros(arr.shape[0], dtype=np.int64)
    for k in range(n):
        code |= arr[:, k] << (n * k)
    count = _popcount(arr).sum(axis=1)
    perm = np.lexsort((code, count))
    yield arr[perm]


class FrameBatch:
    """Frames over one order, given by their ``sub`` rows."""

    def __init__(self, od: OrderData, rows: np.ndarray):
        self.od = od
        self.rows = np.asarray(rows, dtype=np.int64)
        self.B = self.rows.shape[0]

    def __len__(self) -> int:
        return self.B

    def select(self, mask: np.ndarray) -> "FrameBatch":
        return FrameBatch(self.od, self.rows[mask])

    @cached_property
    def sub(self) -> np.ndarray:
        n = self.od.n
        bits = np.arange(n)
        return ((self.rows[:, :, None] >> bits[None, None, :]) & 1).astype(bool)

    @cached_property
    def lewis(self) -> np.ndarray:
        """Lewis tables of the dual algebras, shape ``(B, u, u)``."""
        od = self.od
        acc = np.zeros((self.B, od.u, od.u), dtype=np.int64)
        for k in range(od.n):
            acc |= ((self.rows[:, k, None, None] & od.bad[None]) == 0).astype(np.int64) << k
        return od.index[acc]

    def frame(self, b: int, names: Optional[Sequence[str]] = None) -> Frame:
        return frame_from_masks(self.od.n, self.od.up, [int(x) for x in self.rows[b]], names and list(names))

    # -- formulas ------------------------------------------------------

    def evaluate(self, phi: Formula, names: Sequence[str], grid: np.ndarray) -> np.ndarray:
        """Values of ``phi`` with shape ``(B, V)``; ``grid[i]`` holds atom ``names[i]``."""
        od = self.od
        B, V = self.B, grid.shape[1]
        pos = {nm: i for i, nm in enumerate(names)}
        memo: dict[Formula, np.ndarray] = {}
        bidx = np.arange(B)[:, None]

        def go(f: Formula) -> np.ndarray:
            hit = memo.get(f)
            if hit is not None:
                return hit
            if isinstance(f, Atom):
                out = grid[pos[f.name]][None, :] if f.name in pos else np.full((1, 1), od.bot, np.int16)
            elif isinstance(f, Top):
                out = np.full((1, 1), od.top, np.int16)
            elif isinstance(f, Bot):
                out = np.full((1, 1), od.bot, np.int16)
            elif isinstance(f, Lewis):
                x, y = np.broadcast_arrays(go(f.left), go(f.right))
                if x.shape[0] != B:
                    x = np.broadcast_to(x, (B, x.shape[1]))
                    y = np.broadcast_to(y, (B, y.shape[1]))
                out = self.lewis[bidx, x, y]
            else:
                table = {Conj: od.meet, Disj: od.join, Impl: od.rpc}[type(f)]
                out = table[go(f.left), go(f.right)]
            memo[f] = out
            return out

        out = go(phi)
        return np.broadcast_to(out, (B, V))

    def refutations(self, phi: Formula, chunk: int = 1 << 22) -> tuple[np.ndarray, np.ndarray]:
        """For each frame: whether ``phi`` fails, and the first failing valuation index."""
        names = sorted(atoms(phi))
        grid = self.od.grid(len(names))
        V = grid.shape[1]
        step = max(1, chunk // max(V, 1))
        fails = np.zeros(self.B, dtype=bool)
        first = np.full(self.B, -1, dtype=np.int64)
        for s in range(0, self.B, step):
            part = FrameBatch(self.od, self.rows[s:s + step])
            vals = part.evaluate(phi, names, grid)
            bad = vals != self.od.top
            f = bad.any(axis=1)
            fails[s:s + step] = f
            first[s:s + step] = np.where(f, bad.argmax(axis=1), -1)
        return fails, first

    def validates(self, phi: Formula) -> np.ndarray:
        return ~self.refutations(phi)[0]

    def valuation(self, phi: Formula, v: int) -> dict[str, frozenset[str]]:
        names = sorted(atoms(phi))
        grid = self.od.grid(len(names))
        world = default_names(self.od.n)
        out = {}
        for i, nm in enumerate(names):
            mask = self.od.ups[int(grid[i, v])]
            out[nm] = frozenset(world[k] for k in range(self.od.n) if mask >> k & 1)
        return out

    # -- frame conditions ----------------------------------------------

    def condition(self, name: str) -> np.ndarray:
        """Boolean vector: which frames satisfy the named condition."""
        if name not in CONDITIONS:
            raise KeyError(f"unknown frame condition {name!r}")
        S = self.sub
        L = self.od.leq
        St = self.od.strict
        Si = S.astype(np.int64)
        Li = L.astype(np.int64)
        if name == "lewis":
            return ~(((Li[None] @ Si) > 0) & ~S).any(axis=(1, 2))
        if name == "brilliant":
            return ~(((Si @ Li[None]) > 0) & ~S).any(axis=(1, 2))
        if name == "semi_transitive":
            two = (Si @ Si) > 0
            return ~(two & ~((Si @ Li[None]) > 0)).any(axis=(1, 2))
        if name == "gathering":
            has_pred = S.any(axis=1)
            return ~(has_pred[:, :, None] & S & ~L[None]).any(axis=(1, 2))
        if name == "noetherian":
            reach = S.copy()
            for _ in range(self.od.n):
                reach = reach | ((reach.astype(np.int64) @ Si) > 0)
            return ~np.diagonal(reach, axis1=1, axis2=2).any(axis=1)
        if name == "supergathering":
            # T[b,k,l,m]: some x with k sub x, l strictly below x, x <= m
            T = np.einsum("bkx,lx,xm->bklm", Si, St.astype(np.int64), Li) > 0
            trip = S[:, :, :, None] & S[:, None, :, :]
            return ~(trip & ~T).any(axis=(1, 2, 3))
        if name == "strong":
            return ~(S & ~L[None]).any(axis=(1, 2))
        if name == "transitive_sub":
            return ~(((Si @ Si) > 0) & ~S).any(axis=(1, 2))
        if name == "gather_transitive":
            trip = S[:, :, :, None] & S[:, None, :, :]
            ok = S[:, :, None, :] | L[None, None, :, :]
            return ~(trip & ~ok).any(axis=(1, 2, 3))
        if name == "discrete":
            return np.full(self.B, self.od.discrete)
        raise KeyError(name)

    def satisfying(self, conditions: Iterable[str]) -> np.ndarray:
        keep = np.ones(self.B, dtype=bool)
        for c in conditions:
            if not keep.any():
                break
            keep &= self.condition(c)
        return keep

    # -- isomorphism -------------------------------------------------------

    def canonical_codes(self) -> np.ndarray:
        """Isomorphism invariant codes (minimum over relabellings)."""
        n = self.od.n
        up = np.array(self.od.up, dtype=np.int64)
        best = None
        for perm in itertools.permutations(range(n)):
            table = _bit_permutation(n, perm)
            new_up = np.zeros(n, dtype=np.int64)
            new_rows = np.zeros_like(self.rows)
            for k in range(n):
                new_up[perm[k]] = table[up[k]]
                new_rows[:, perm[k]] = table[self.rows[:, k]]
            code = np.zeros(self.B, dtype=np.int64)
            for k in range(n):
                code |= new_up[k] << (n * k + n * n)
                code |= new_rows[:, k] << (n * k)
            best = code if best is None else np.minimum(best, code)
        return best if best is not None else np.zeros(self.B, dtype=np.int64)


@lru_cache(maxsize=None)
def _bit_permutation(n: int, perm: tuple[int, ...]) -> np.ndarray:
    out = np.zeros(1 << n, dtype=np.int64)
    for m in range(1 << n):
        out[m] = sum(1 << perm[k] for k in range(n) if m >> k & 1)
    return out


def batches(n: int, orders: Optional[Sequence[tuple[int, ...]]] = None,
            discrete_only: bool = False) -> Iterator[tuple[int, FrameBatch]]:
    """``(order index, batch)`` pairs covering every labeled frame on ``n`` worlds."""
    if n > FRAME_CAP:
        raise ValueError(f"frame enumeration is capped at {FRAME_CAP} worlds")
    orders = labeled_posets(n) if orders is None else orders
    for oi, up in enumerate(orders):
        od = order_data(up)
        if discrete_only and not od.discrete:
            continue
        for rows in sub_relations(od):
            yield oi, FrameBatch(od, rows)


def count_frames(n: int) -> int:
    return sum(len(b) for _, b in batches(n))


def enumerate_frames(n: int, constraints: Iterable[str] = ()) -> Iterator[Frame]:
    """Every labeled frame on ``n`` worlds satisfying the constraints, in a fixed order."""
    constraints = list(constraints)
    for c in constraints:
        if c not in CONDITIONS:
            raise KeyError(f"unknown frame condition {c!r}")
    for _, batch in batches(n, discrete_only="discrete" in constraints):
        keep = batch.satisfying(constraints)
        for b in np.flatnonzero(keep):
            yield batch.frame(int(b))
