"""Subfile splitting and cache assignment.

Each state j's file is split into C(K, t(j)) equal subfiles, one per
t(j)-subset of users, and a subfile is stored by exactly the users in
its index set.  Every user then holds C(K-1, t(j)-1) subfiles of state
j, i.e. a fraction t(j)/K = m(j) of that file, so the per-user cache
budget M is met exactly.

Subfile sizes are exact rationals; user ids are 1..K and state ids are
1..S throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import NamedTuple

import numpy as np

from .allocation import INTEGER_T_TOL, MemoryAllocation
from .errors import IntegralityError


class SubfileId(NamedTuple):
    state: int
    subset: tuple[int, ...]  # strictly increasing user ids

    def label(self) -> str:
        return f"({self.state};{','.join(map(str, self.subset))})"


@dataclass(frozen=True, eq=False)
class CachePlacement:
    K: int
    t: tuple[int, ...]
    subfile_size: tuple[Fraction, ...]
    subfiles: dict[int, tuple[SubfileId, ...]]     # state -> all subfiles, lexicographic
    cached: dict[int, frozenset[SubfileId]]        # user -> stored subfiles
    uncovered_states: tuple[int, ...]              # states with t(j) = 0

    @property
    def num_states(self) -> int:
        return len(self.t)

    def state_ids(self):
        return range(1, self.num_states + 1)


def _integer_t_vector(t_values, K: int) -> list[int]:
    out = []
    for j, tj in enumerate(t_values, start=1):
        tj = float(tj)
        rounded = round(tj)
        if abs(tj - rounded) > INTEGER_T_TOL:
            raise IntegralityError(f"t({j}) = {tj!r} is not an integer")
        if rounded < 0 or rounded > K:
            raise IntegralityError(f"t({j}) = {rounded} outside 0..K = {K}")
        out.append(int(rounded))
    return out


def place_cache(alloc, K: int) -> CachePlacement:
    """Build the placement for an allocation (or a raw t vector).

    `alloc` may be a MemoryAllocation or any sequence of per-state
    multiplicities; each t(j) must be integral within 1e-6.  States
    with t(j) = 0 keep their single uncached subfile and are recorded
    in `uncovered_states` (delivery serves them by unicast).
    """
    t_values = alloc.t if isinstance(alloc, MemoryAllocation) else alloc
    t = _integer_t_vector(np.asarray(t_values, dtype=float), K)

    users = range(1, K + 1)
    subfiles: dict[int, tuple[SubfileId, ...]] = {}
    sizes: list[Fraction] = []
    cached: dict[int, set[SubfileId]] = {i: set() for i in users}
    uncovered: list[int] = []
    for j, tj in enumerate(t, start=1):
        per_state = tuple(
            SubfileId(j, subset) for subset in itertools.combinations(users, tj)
        )
        subfiles[j] = per_state
        sizes.append(Fraction(1, comb(K, tj)))
        if tj == 0:
            uncovered.append(j)
            continue
        for sub in per_state:
            for i in sub.subset:
                cached[i].add(sub)

    return CachePlacement(
        K=K,
        t=tuple(t),
        subfile_size=tuple(sizes),
        subfiles=subfiles,
        cached={i: frozenset(s) for i, s in cached.items()},
        uncovered_states=tuple(uncovered),
    )


def cache_volume(placement: CachePlacement, user: int) -> Fraction:
    """Exact cached volume (file-units) held by one user; equals sum_j t(j)/K."""
    total = Fraction(0)
    per_state = {j: 0 for j in placement.state_ids()}
    for sub in placement.cached[user]:
        per_state[sub.state] += 1
    for j, count in per_state.items():
        total += count * placement.subfile_size[j - 1]
    return total


def placement_dump_lines(placement: CachePlacement) -> list[str]:
    """One line per subfile: state=<j> subset=<i1,i2,...> size=<p/q>."""
    lines = []
    for j in placement.state_ids():
        size = placement.subfile_size[j - 1]
        for sub in placement.subfiles[j]:
            lines.append(
                f"state={j} subset={','.join(map(str, sub.subset))} size={size}"
            )
    return lines
