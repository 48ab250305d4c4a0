"""Multi-rate multicast delivery planning and its correctness audit.

Given a placement and one state per user, the planner emits one nested
codeword per (t_hat+1)-subset of users, where t_hat is the smallest
multiplicity among the served users.  Inside a codeword each member i
receives a concatenation of chunks of exactly the subfiles it misses
that every other group member already caches, so nobody sees
interference.  A member with t_i > t_hat has its subfiles cut into
alpha_i = C(t_i, t_hat) chunks; a per-(user, subfile) cursor hands out
chunk indices so no chunk is ever scheduled twice for the same user.

Each member's sub-stream travels at that member's own rate, so a
codeword lasts as long as its slowest member's payload.  Users in
states with t = 0 (nothing cached) are served by per-user unicast legs,
as are any chunks that the group structure cannot cover when such
users exist.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .fmt import fmt_num
from .placement import CachePlacement, SubfileId


@dataclass(frozen=True)
class UserRealization:
    """State id s_i for each user i (users 1..K at tuple index i-1)."""

    states: tuple[int, ...]

    def __post_init__(self):
        if not self.states:
            raise ConfigError("realization must cover at least one user")

    @property
    def K(self) -> int:
        return len(self.states)

    def state_of(self, user: int) -> int:
        return self.states[user - 1]


class ChunkRef(NamedTuple):
    subfile: SubfileId
    chunk_index: int
    size: Fraction

    def label(self) -> str:
        return f"{self.subfile.label()}:{self.chunk_index}"


@dataclass(frozen=True, eq=False)
class Codeword:
    group: tuple[int, ...]
    payloads: dict[int, tuple[ChunkRef, ...]]
    duration: float


@dataclass(frozen=True, eq=False)
class UnicastLeg:
    user: int
    chunks: tuple[ChunkRef, ...]
    volume: Fraction
    duration: float


@dataclass(frozen=True, eq=False)
class DeliveryPlan:
    t_hat: int
    codewords: tuple[Codeword, ...]
    unicast_legs: tuple[UnicastLeg, ...]
    total_time: float


def _check_realization(placement: CachePlacement, realization: UserRealization):
    if realization.K != placement.K:
        raise ConfigError(
            f"realization covers {realization.K} users, placement has K = {placement.K}"
        )
    for i, s in enumerate(realization.states, start=1):
        if not 1 <= s <= placement.num_states:
            raise ConfigError(f"user {i} state {s} outside 1..{placement.num_states}")


def _needed_subfiles(placement: CachePlacement, user: int, state: int):
    """Subfiles of the user's state file absent from its own cache."""
    return [sub for sub in placement.subfiles[state] if user not in sub.subset]


def build_delivery_plan(placement: CachePlacement, realization: UserRealization,
                        rates) -> DeliveryPlan:
    """Plan every transmission needed to serve the realization.

    rates[j-1] is the normalized rate of state j.  Users with t = 0 are
    excluded from multicast groups and do not lower t_hat; whatever the
    multicast pass leaves unscheduled goes out as unicast legs at the
    owner's own rate.
    """
    _check_realization(placement, realization)
    r = np.asarray(rates, dtype=float)
    if r.size != placement.num_states:
        raise ConfigError(f"rate vector length {r.size} != number of states {placement.num_states}")

    K = placement.K
    users = range(1, K + 1)
    t_of = {i: placement.t[realization.state_of(i) - 1] for i in users}
    rate_of = {i: float(r[realization.state_of(i) - 1]) for i in users}
    multicast = [i for i in users if t_of[i] >= 1]
    t_hat = min((t_of[i] for i in multicast), default=0)

    cursor: dict[tuple[int, SubfileId], int] = {}
    codewords: list[Codeword] = []
    for group in itertools.combinations(multicast, t_hat + 1):
        payloads: dict[int, tuple[ChunkRef, ...]] = {}
        duration = 0.0
        for i in group:
            t_i = t_of[i]
            alpha_i = comb(t_i, t_hat)
            state_i = realization.state_of(i)
            chunk_size = placement.subfile_size[state_i - 1] / alpha_i
            others = set(group) - {i}
            pool = [u for u in users if u != i and u not in others]
            subsets = sorted(
                tuple(sorted(others | set(extra)))
                for extra in itertools.combinations(pool, t_i - t_hat)
            )
            chunks = []
            for subset in subsets:
                sub = SubfileId(state_i, subset)
                q = cursor.get((i, sub), 0) + 1
                cursor[(i, sub)] = q
                chunks.append(ChunkRef(sub, q, chunk_size))
            payloads[i] = tuple(chunks)
            volume = chunk_size * len(chunks)
            duration = max(duration, float(volume) / rate_of[i])
        codewords.append(Codeword(group=group, payloads=payloads, duration=duration))

    legs: list[UnicastLeg] = []
    for i in users:
        state_i = realization.state_of(i)
        t_i = t_of[i]
        alpha_i = comb(t_i, t_hat) if i in multicast else 1
        chunk_size = placement.subfile_size[state_i - 1] / alpha_i
        residual: list[ChunkRef] = []
        for sub in _needed_subfiles(placement, i, state_i):
            used = cursor.get((i, sub), 0)
            residual.extend(ChunkRef(sub, q, chunk_size) for q in range(used + 1, alpha_i + 1))
        if residual:
            volume = chunk_size * len(residual)
            legs.append(UnicastLeg(
                user=i,
                chunks=tuple(residual),
                volume=volume,
                duration=float(volume) / rate_of[i],
            ))

    total = sum(cw.duration for cw in codewords) + sum(leg.duration for leg in legs)
    return DeliveryPlan(
        t_hat=t_hat,
        codewords=tuple(codewords),
        unicast_legs=tuple(legs),
        total_time=float(total),
    )


@dataclass(frozen=True, eq=False)
class CertificationReport:
    ok: bool
    failures: tuple[str, ...]
    delivered_volume: dict[int, Fraction]

    def summary(self) -> str:
        if self.ok:
            return "certification PASS"
        return "certification FAIL\n" + "\n".join(self.failures)


def certify_plan(placement: CachePlacement, realization: UserRealization,
                 plan: DeliveryPlan) -> CertificationReport:
    """Audit a plan against the delivery guarantees.

    Checks, per user: (a) no chunk scheduled twice, (b) every delivered
    subfile belongs to the user's own state file and is not already
    cached, (c) delivered volume equals 1 - t_i/K, (d) cached plus
    delivered volume equals 1, and (e) inside every codeword each
    member caches every subfile destined to the other members.
    """
    _check_realization(placement, realization)
    K = placement.K
    failures: list[str] = []

    received: dict[int, list[tuple[str, ChunkRef]]] = {i: [] for i in range(1, K + 1)}
    for cw in plan.codewords:
        tag = f"codeword {','.join(map(str, cw.group))}"
        for i, chunks in cw.payloads.items():
            received[i].extend((tag, c) for c in chunks)
    for leg in plan.unicast_legs:
        received[leg.user].extend((f"unicast user {leg.user}", c) for c in leg.chunks)

    delivered: dict[int, Fraction] = {}
    for i in range(1, K + 1):
        s_i = realization.state_of(i)
        t_i = placement.t[s_i - 1]

        seen: set[tuple[SubfileId, int]] = set()
        for tag, chunk in received[i]:
            key = (chunk.subfile, chunk.chunk_index)
            if key in seen:
                failures.append(f"user {i}, {tag}: check (a) chunk {chunk.label()} repeated")
            seen.add(key)
            if chunk.subfile.state != s_i:
                failures.append(f"user {i}, {tag}: check (b) foreign subfile {chunk.label()}")
            if i in chunk.subfile.subset:
                failures.append(f"user {i}, {tag}: check (b) already-cached subfile {chunk.label()}")

        volume = sum((c.size for _, c in received[i]), Fraction(0))
        delivered[i] = volume
        want = 1 - Fraction(t_i, K)
        if abs(float(volume - want)) > 1e-9:
            failures.append(
                f"user {i}: check (c) delivered volume {volume} != 1 - t_i/K = {want}"
            )
        cached_i = Fraction(t_i, K)  # this state's cached share
        if abs(float(cached_i + volume - 1)) > 1e-9:
            failures.append(f"user {i}: check (d) cached {cached_i} + delivered {volume} != 1")

    for cw in plan.codewords:
        tag = f"codeword {','.join(map(str, cw.group))}"
        for i in cw.group:
            for k in cw.group:
                if k == i:
                    continue
                for chunk in cw.payloads[k]:
                    if chunk.subfile not in placement.cached[i]:
                        failures.append(
                            f"user {i}, {tag}: check (e) cannot cancel {chunk.label()} "
                            f"intended for user {k}"
                        )

    return CertificationReport(
        ok=not failures,
        failures=tuple(failures),
        delivered_volume=delivered,
    )


def plan_dump_lines(plan: DeliveryPlan) -> list[str]:
    """One line per codeword, then unicast legs and the total."""
    lines = []
    for cw in plan.codewords:
        payloads = " ".join(
            f"payload[{i}]={','.join(c.label() for c in cw.payloads[i])}"
            for i in cw.group
        )
        lines.append(f"group={','.join(map(str, cw.group))} dur={fmt_num(cw.duration)} {payloads}")
    for leg in plan.unicast_legs:
        lines.append(
            f"unicast user={leg.user} dur={fmt_num(leg.duration)} "
            f"chunks={','.join(c.label() for c in leg.chunks)}"
        )
    lines.append(f"total={fmt_num(plan.total_time)}")
    return lines
