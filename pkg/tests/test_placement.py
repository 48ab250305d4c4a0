from fractions import Fraction

import numpy as np
import pytest

from loccache import IntegralityError, cache_volume, place_cache
from loccache.placement import SubfileId, placement_dump_lines

from conftest import EXAMPLE_K

# cached-bitmap golden fixture for the worked example, transcribed by
# hand: per state kind, the subfile index sets each user stores
GOLDEN_BITMAP = {
    "singleton": {1: [{1}], 2: [{2}], 3: [{3}], 4: [{4}]},                 # t = 1
    "pairs": {
        1: [{1, 2}, {1, 3}, {1, 4}],
        2: [{1, 2}, {2, 3}, {2, 4}],
        3: [{1, 3}, {2, 3}, {3, 4}],
        4: [{1, 4}, {2, 4}, {3, 4}],
    },                                                                      # t = 2
    "triples": {
        1: [{1, 2, 3}, {1, 2, 4}, {1, 3, 4}],
        2: [{1, 2, 3}, {1, 2, 4}, {2, 3, 4}],
        3: [{1, 2, 3}, {1, 3, 4}, {2, 3, 4}],
        4: [{1, 2, 4}, {1, 3, 4}, {2, 3, 4}],
    },                                                                      # t = 3
}


@pytest.fixture(scope="module")
def example_placement():
    return place_cache([1, 2, 3, 2, 1], EXAMPLE_K)


def test_subfile_counts_and_sizes(example_placement):
    pl = example_placement
    assert [len(pl.subfiles[j]) for j in pl.state_ids()] == [4, 6, 4, 6, 4]
    assert pl.subfile_size == (
        Fraction(1, 4), Fraction(1, 6), Fraction(1, 4), Fraction(1, 6), Fraction(1, 4),
    )


def test_triple_state_cache_of_user_one(example_placement):
    subs = {s.subset for s in example_placement.cached[1] if s.state == 3}
    assert subs == {(1, 2, 3), (1, 2, 4), (1, 3, 4)}
    assert (2, 3, 4) not in subs


def test_golden_bitmap(example_placement):
    pl = example_placement
    layout = {1: "singleton", 2: "pairs", 3: "triples", 4: "pairs", 5: "singleton"}
    for j, kind in layout.items():
        for user in range(1, 5):
            got = sorted(tuple(sorted(s.subset)) for s in pl.cached[user] if s.state == j)
            want = sorted(tuple(sorted(v)) for v in GOLDEN_BITMAP[kind][user])
            assert got == want, f"state {j} user {user}"


def test_fully_cached_state():
    pl = place_cache([4], 4)
    assert pl.subfiles[1] == (SubfileId(1, (1, 2, 3, 4)),)
    assert cache_volume(pl, 2) == 1


def test_cache_volume_matches_budget(example_placement):
    for user in range(1, 5):
        assert cache_volume(example_placement, user) == Fraction(9, 4)


def test_degenerate_single_user_full_cache():
    pl = place_cache([1, 1, 1], 1)
    assert cache_volume(pl, 1) == 3


def test_cache_volume_random_t():
    rng = np.random.default_rng(5)
    for _ in range(20):
        K = int(rng.integers(1, 7))
        t = rng.integers(0, K + 1, size=int(rng.integers(1, 7)))
        pl = place_cache(t, K)
        expected = sum(Fraction(int(tj), K) for tj in t)
        for user in range(1, K + 1):
            assert cache_volume(pl, user) == expected


def test_per_user_per_state_counts(example_placement):
    # each user holds C(K-1, t-1) subfiles of every state
    from math import comb
    pl = example_placement
    for user in range(1, 5):
        for j, tj in zip(pl.state_ids(), pl.t):
            n = sum(1 for s in pl.cached[user] if s.state == j)
            assert n == comb(EXAMPLE_K - 1, tj - 1)


def test_user_permutation_symmetry(example_placement):
    pl = example_placement
    perm = {1: 3, 2: 1, 3: 4, 4: 2}
    for user in range(1, 5):
        relabeled = {
            SubfileId(s.state, tuple(sorted(perm[u] for u in s.subset)))
            for s in pl.cached[user]
        }
        assert relabeled == pl.cached[perm[user]]


def test_subfiles_disjoint_and_cover(example_placement):
    pl = example_placement
    for j in pl.state_ids():
        subs = pl.subfiles[j]
        assert len(set(subs)) == len(subs)
        assert sum(pl.subfile_size[j - 1] for _ in subs) == 1


def test_lexicographic_enumeration(example_placement):
    for j in example_placement.state_ids():
        subsets = [s.subset for s in example_placement.subfiles[j]]
        assert subsets == sorted(subsets)


def test_zero_multiplicity_state_warns_not_fails():
    pl = place_cache([0, 2], 4)
    assert pl.uncovered_states == (1,)
    assert pl.subfiles[1] == (SubfileId(1, ()),)
    assert all(SubfileId(1, ()) not in pl.cached[u] for u in range(1, 5))


def test_non_integral_t_names_state():
    with pytest.raises(IntegralityError, match=r"t\(2\)"):
        place_cache([1.0, 1.5], 4)
    with pytest.raises(IntegralityError):
        place_cache([5], 4)


def test_dump_format(example_placement):
    lines = placement_dump_lines(example_placement)
    assert lines[0] == "state=1 subset=1 size=1/4"
    assert "state=2 subset=1,2 size=1/6" in lines
    assert len(lines) == 4 + 6 + 4 + 6 + 4
    zero = placement_dump_lines(place_cache([0], 2))
    assert zero == ["state=1 subset= size=1"]
