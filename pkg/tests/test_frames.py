import itertools

import numpy as np
import pytest

from lewisarrow.formula import parse
from lewisarrow.frames import FRAME_CAP, batches, count_frames, enumerate_frames, order_data
from lewisarrow.kripke import (
    CONDITIONS, FrameError, frame_condition, frame_refutation, frame_validates, validate_frame,
)
from lewisarrow.orders import (
    canonical, is_partial_order, labeled_posets, permute, posets_up_to_iso, rooted_posets, upsets,
)
from lewisarrow.schemes import atom_form


def brute_orders(n):
    cells = [(a, b) for a in range(n) for b in range(n) if a != b]
    out = set()
    for bits in itertools.product([0, 1], repeat=len(cells)):
        rel = {(a, a) for a in range(n)} | {c for c, x in zip(cells, bits) if x}
        if any((b, a) in rel for a, b in rel if a != b):
            continue
        if any((a, d) not in rel for a, b in rel for c, d in rel if b == c):
            continue
        out.add(tuple(sum(1 << b for b in range(n) if (a, b) in rel) for a in range(n)))
    return out


def brute_lewis_frames(n):
    worlds = "abcd"[:n]
    count = 0
    pairs = [(a, b) for a in worlds for b in worlds]
    for up in brute_orders(n):
        leq = [(worlds[a], worlds[b]) for a in range(n) for b in range(n) if up[a] >> b & 1]
        for bits in itertools.product([0, 1], repeat=len(pairs)):
            sub = [p for p, x in zip(pairs, bits) if x]
            try:
                validate_frame(worlds, leq, sub)
            except FrameError:
                continue
            count += 1
    return count


@pytest.mark.parametrize("n", [1, 2, 3])
def test_labeled_posets_match_brute_force(n):
    assert set(labeled_posets(n)) == brute_orders(n)
    assert len(labeled_posets(n)) == len(set(labeled_posets(n)))
    assert all(is_partial_order(up) for up in labeled_posets(n))


def test_posets_up_to_iso():
    for n in range(1, 5):
        canon = {canonical(up) for up in labeled_posets(n)}
        assert len(posets_up_to_iso(n)) == len(canon)


def test_rooted_posets_have_root():
    for n in range(1, 5):
        for up in rooted_posets(n):
            assert up[0] == (1 << n) - 1


def test_permute_preserves_order():
    for up in labeled_posets(3):
        for perm in itertools.permutations(range(3)):
            assert is_partial_order(permute(up, perm))
            assert canonical(permute(up, perm)) == canonical(up)


def test_upsets_chain():
    # chain 0 <= 1 <= 2: upsets are the final segments
    assert upsets((0b111, 0b110, 0b100)) == [0, 0b100, 0b110, 0b111]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_frame_count_matches_brute_force(n):
    assert count_frames(n) == brute_lewis_frames(n)


def test_frame_cap():
    with pytest.raises(ValueError):
        list(batches(FRAME_CAP + 1))


def test_batch_conditions_match_per_frame_checks():
    for _, batch in batches(3):
        masks = {c: batch.condition(c) for c in CONDITIONS}
        for b in range(len(batch)):
            frame = batch.frame(b)
            for c in CONDITIONS:
                assert bool(masks[c][b]) == frame_condition(frame, c).holds, (frame, c)


@pytest.mark.parametrize("text", ["p => []p", "[]([]p -> p) -> []p", "(p => q) -> [](p -> q)"])
def test_batch_refutations_match(text):
    phi = parse(text)
    for _, batch in batches(3):
        fails, first = batch.refutations(phi)
        for b in range(0, len(batch), 5):
            frame = batch.frame(b)
            assert bool(fails[b]) == (frame_refutation(frame, phi) is not None)
            if fails[b]:
                # the reported valuation really refutes
                from lewisarrow.kripke import Model, truth_set
                model = Model(frame, batch.valuation(phi, int(first[b])))
                assert truth_set(model, phi) != set(frame.worlds)


def test_tr_and_ka_valid_on_all_frames():
    for n in (1, 2, 3):
        for _, batch in batches(n):
            assert batch.validates(atom_form("Tr")).all()
            assert batch.validates(atom_form("Ka")).all()


def test_canonical_codes_are_invariant():
    # relabelling a frame keeps its code; distinct codes are non-isomorphic
    frames = list(enumerate_frames(3, ["noetherian"]))
    codes = {}
    for _, batch in batches(3):
        keep = batch.condition("noetherian")
        for b, c in zip(np.flatnonzero(keep), batch.canonical_codes()[keep]):
            codes.setdefault(int(c), []).append(batch.frame(int(b)))
    assert sum(len(v) for v in codes.values()) == len(frames)

    def relabel(frame, perm):
        m = dict(zip(frame.worlds, (frame.worlds[i] for i in perm)))
        return (frozenset((m[a], m[b]) for a, b in frame.leq), frozenset((m[a], m[b]) for a, b in frame.sub))

    def iso(f, g):
        return any(relabel(f, p) == (g.leq, g.sub) for p in itertools.permutations(range(3)))

    reps = [v[0] for v in codes.values()]
    for group in codes.values():
        assert all(iso(group[0], g) for g in group[1:])
    for f, g in itertools.combinations(reps[:40], 2):
        assert not iso(f, g)


def test_enumerate_frames_constraints():
    frames = list(enumerate_frames(2, ["noetherian", "discrete"]))
    assert frames and all(frame_condition(f, "noetherian").holds for f in frames)
    with pytest.raises(KeyError):
        list(enumerate_frames(2, ["bogus"]))


def test_order_data_tables():
    od = order_data((0b11, 0b10))
    assert od.u == 3
    assert od.ups[od.top] == 0b11 and od.ups[od.bot] == 0
    # {b} -> {} is {} at the root, since b sits above a
    b = od.ups.index(0b10)
    assert od.ups[od.rpc[b, od.bot]] == 0
