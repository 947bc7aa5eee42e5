"""Small partial orders as tuples of up-set bitmasks.

``up[k]`` is the bitmask of the elements above ``k`` (``k`` included).
"""
from __future__ import annotations

import itertools
from functools import lru_cache


def is_partial_order(up: tuple[int, ...]) -> bool:
    n = len(up)
    for k in range(n):
        if not up[k] >> k & 1:
            return False
        for l in range(n):
            if up[k] >> l & 1:
                if l != k and up[l] >> k & 1:
                    return False
                if up[l] & ~up[k]:
                    return False
    return True


def strict_pairs(up: tuple[int, ...]) -> int:
    return sum(bin(m).count("1") - 1 for m in up)


@lru_cache(maxsize=None)
def labeled_posets(n: int) -> tuple[tuple[int, ...], ...]:
    """Every partial order on ``n`` labeled elements.

    Sorted by number of strict pairs, then lexicographically, so the
    discrete order comes first.
    """
    if n == 0:
        return ((),)
    out = []
    options = [[m for m in range(1 << n) if m >> k & 1] for k in range(n)]

    def extend(prefix: list[int]) -> None:
        k = len(prefix)
        if k == n:
            up = tuple(prefix)
            if is_partial_order(up):
                out.append(up)
            return
        for m in options[k]:
            # cheap partial checks against already chosen rows
            ok = True
            for j in range(k):
                if m >> j & 1 and (prefix[j] >> k & 1 or prefix[j] & ~m):
                    ok = False
                    break
                if prefix[j] >> k & 1 and m & ~prefix[j]:
                    ok = False
                    break
            if ok:
                prefix.append(m)
                extend(prefix)
                prefix.pop()

    extend([])
    out.sort(key=lambda up: (strict_pairs(up), up))
    return tuple(out)


def permute(up: tuple[int, ...], perm: tuple[int, ...]) -> tuple[int, ...]:
    """Relabel element ``k`` as ``perm[k]``."""
    n = len(up)
    out = [0] * n
    for k in range(n):
        m = 0
        for l in range(n):
            if up[k] >> l & 1:
                m |= 1 << perm[l]
        out[perm[k]] = m
    return tuple(out)


def canonical(up: tuple[int, ...]) -> tuple[int, ...]:
    n = len(up)
    return min(permute(up, p) for p in itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def posets_up_to_iso(n: int) -> tuple[tuple[int, ...], ...]:
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    for up in labeled_posets(n):
        seen.setdefault(canonical(up), up)
    return tuple(sorted(seen.values(), key=lambda up: (strict_pairs(up), up)))


def is_rooted_at(up: tuple[int, ...], root: int = 0) -> bool:
    return up[root] == (1 << len(up)) - 1


@lru_cache(maxsize=None)
def rooted_posets(n: int) -> tuple[tuple[int, ...], ...]:
    """Rooted orders on ``n`` elements up to isomorphism, root labeled 0."""
    out = []
    for up in posets_up_to_iso(n):
        roots = [k for k in range(n) if is_rooted_at(up, k)]
        if not roots:
            continue
        r = roots[0]
        perm = list(range(n))
        perm[0], perm[r] = perm[r], perm[0]
        out.append(permute(up, tuple(perm)))
    return tuple(out)


def upsets(up: tuple[int, ...]) -> list[int]:
    n = len(up)
    return [m for m in range(1 << n) if all(up[k] & ~m == 0 for k in range(n) if m >> k & 1)]
