import itertools

import numpy as np
import pytest

from ellrc import lrc
from ellrc.availability import all_lines_through, build_avail_code, build_grid, lines_through, repair_symbol
from ellrc.curve import INF
from ellrc.exceptions import InvalidParameters
from ellrc.surface import SurfaceSpec, good_points, twisted_family


@pytest.fixture(scope="module")
def grid(found5):
    return build_grid(SurfaceSpec.constant(found5.curve), 0, 5)


def test_lines_through_hand_example(grid):
    every = all_lines_through(grid, (1, 2))
    assert len(every) == 6
    through_origin = [L for L in every if (0, 0) in L.members]
    assert [L.direction for L in through_origin] == [(1, 2)]
    kept = lines_through(grid, (1, 2))
    assert len(kept) == 5 and (1, 2) not in [L.direction for L in kept]
    horizontal = next(L for L in kept if L.direction == (1, 0))
    assert horizontal.members == ((1, 2), (2, 2), (3, 2), (4, 2), (0, 2))


def test_lines_sum_to_zero_and_meet_only_at_anchor(grid):
    E, B = grid.curve, grid.basis
    for p0 in grid.coords:
        lines = lines_through(grid, p0)
        for L in lines:
            total = INF
            for c in L.members:
                total = E.add(total, B.point(*c))
            assert total.is_infinity
        for L1, L2 in itertools.combinations(lines, 2):
            assert set(L1.members) & set(L2.members) == {p0}


def test_origin_is_not_a_coordinate(grid):
    with pytest.raises(InvalidParameters):
        lines_through(grid, (0, 0))


def test_parameters(avail_result):
    code = avail_result.code
    assert (code.n, code.k) == (96, 8)
    md = code.metadata
    assert md["r"] == 4 and md["t"] == 5 and md["claimed"]["d_floor"] == 60
    assert md["delta_within_hypothesis"] is False


def test_zero_message_gives_zero_word(avail_result):
    assert (avail_result.code.encode(np.zeros(8, dtype=np.int64)) == 0).all()


def test_line_repair_matches_global_decode(avail_result):
    b = avail_result.build
    code = b.code
    rng = np.random.default_rng(0)
    for _ in range(200):
        msg = rng.integers(0, code.field.q, code.k)
        word = code.encode(msg)
        i = int(rng.integers(code.n))
        line = b.lines[i][int(rng.integers(len(b.lines[i])))]
        rec = word.copy()
        rec[i] = -1
        assert repair_symbol(b, i, line, rec) == word[i]
        assert (lrc.erasure_decode(code, rec) == msg).all()


def test_every_line_repairs_every_member(avail_result):
    b = avail_result.build
    word = b.code.encode(np.arange(1, 9))
    for i, lines in b.lines.items():
        assert len(lines) == 5
        for L in lines:
            assert repair_symbol(b, i, L, word) == word[i]


def test_lines_are_local_codes(avail_result):
    code = avail_result.code
    for S in avail_result.structure.levels[0].sets[:40]:
        sub = lrc.puncture(code, S)
        assert lrc.min_distance(sub)["d"] >= 2 and sub.k <= 4


def test_parameter_validation(found5):
    S = SurfaceSpec.constant(found5.curve)
    with pytest.raises(InvalidParameters):
        build_avail_code(S, [0, 1, 2], 5, 3)
    with pytest.raises(InvalidParameters):
        build_avail_code(S, [0, 1, 2], 5, 0)
    with pytest.raises(InvalidParameters):
        build_avail_code(S, [0, 1, 2], 9, 1)
    with pytest.raises(InvalidParameters):
        build_avail_code(S, [0, 0, 2], 5, 1)


def test_twisted_family_build(found5):
    fam = twisted_family(found5.curve, (0, 1), 5)
    fibers = good_points(fam)[:3]
    b = build_avail_code(fam, fibers, 5, 2)
    assert (b.code.n, b.code.k) == (72, 12)
    assert b.code.metadata["delta_within_hypothesis"]
    assert lrc.verify_recovery(b.code, b.structure, trials=10)["passed"]
    # fibers are pairwise distinct curves over the same field
    assert len({g.curve for g in b.grids}) == 3
