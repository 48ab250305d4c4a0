"""Min-max cache memory allocation across states.

Given per-state rates r(j) and a total normalized cache budget M, the
allocator splits M into per-state shares m(j) minimizing the worst-case
single-user delivery time

    gamma = max_j (1 - m(j)) / r(j)      s.t.  sum_j m(j) = M,  m >= 0.

The optimum is a water-filling level: m(j) = 1 - r(j)*gamma on the
support, m(j) = 0 for states fast enough that 1/r(j) <= gamma already.
With the full support this is the closed form

    gamma = (S - M) / sum_j r(j).

`allocate_memory` solves the problem exactly by active-set clamping;
`verify_allocation_bruteforce` certifies it by enumerating supports.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import AllocationError, IntegralityError, OracleScopeError
from .fmt import fmt_num

INTEGER_T_TOL = 1e-6
_CLAMP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MemoryAllocation:
    """Per-state shares m, multiplicities t = K*m, and the objective.

    `support` holds the 1-based ids of states with m(j) > 0.  Vectors
    are indexed j-1 for state j.
    """

    m: np.ndarray
    t: np.ndarray
    gamma: float
    support: frozenset[int]

    @property
    def num_states(self) -> int:
        return int(self.m.size)

    @property
    def total_memory(self) -> float:
        return float(self.m.sum())

    def integer_t(self) -> np.ndarray:
        """Rounded t vector; raises unless every t(j) is integral."""
        rounded = np.rint(self.t)
        off = np.abs(self.t - rounded) > INTEGER_T_TOL
        if off.any():
            j = int(np.argmax(off)) + 1
            raise IntegralityError(f"t({j}) = {self.t[j - 1]!r} is not an integer")
        return rounded.astype(int)


def allocate_memory(rates, M: float, K: int, require_integer_t: bool = False) -> MemoryAllocation:
    """Solve the min-max allocation by water-filling with active-set clamping.

    Starts from the full-support closed form and repeatedly clamps
    negative shares to zero (and, defensively, shares above one to one),
    re-solving on the remaining support until a fixed point.  Converges
    in at most S iterations because clamped states never re-enter.

    Raises AllocationError when M <= 0 or M >= S, and IntegralityError
    when require_integer_t is set and some t(j) = K*m(j) is not integral.
    """
    r = np.asarray(rates, dtype=float)
    S = r.size
    if S == 0:
        raise AllocationError("need at least one state")
    if np.any(r <= 0) or not np.all(np.isfinite(r)):
        raise AllocationError("all rates must be positive and finite")
    if K < 1:
        raise AllocationError(f"K must be >= 1 (got {K})")
    if M <= 0:
        raise AllocationError(f"cache size M must be positive (got {M})")
    if M >= S:
        raise AllocationError(f"cache exceeds library: M = {M} >= S = {S}")

    active = np.ones(S, dtype=bool)   # candidate support
    full = np.zeros(S, dtype=bool)    # clamped at m = 1
    m = np.zeros(S)
    for _ in range(S + 1):
        m_budget = M - full.sum()
        n_active = int(active.sum())
        if n_active == 0:
            raise AllocationError("active set emptied; inconsistent instance")
        gamma = (n_active - m_budget) / r[active].sum()
        trial = 1.0 - r[active] * gamma
        if np.any(trial < -_CLAMP_TOL):
            sel = np.where(active)[0][trial < -_CLAMP_TOL]
            active[sel] = False
            continue
        if np.any(trial > 1.0 + _CLAMP_TOL):
            # unreachable for 0 < M < S; kept so a pathological instance
            # converges instead of looping
            sel = np.where(active)[0][trial > 1.0 + _CLAMP_TOL]
            active[sel] = False
            full[sel] = True
            continue
        m[active] = np.maximum(trial, 0.0)
        m[full] = 1.0
        break
    else:
        raise AllocationError("active-set iteration did not converge")

    alloc = MemoryAllocation(
        m=m,
        t=K * m,
        gamma=float(gamma),
        support=frozenset(int(j) + 1 for j in np.where(m > 0)[0]),
    )
    if require_integer_t:
        alloc.integer_t()
    return alloc


def verify_allocation_bruteforce(rates, M: float, K: int) -> MemoryAllocation:
    """Exhaustive oracle: try every support set, keep the best feasible one.

    Exponential in S, so refuses S > 12.  For each candidate support T
    the restricted closed form gives gamma = (|T| - M) / sum_T r; the
    candidate is feasible when 0 <= m <= 1 on T and every off-support
    state already meets 1/r(j) <= gamma.
    """
    r = np.asarray(rates, dtype=float)
    S = r.size
    if S > 12:
        raise OracleScopeError(f"brute-force oracle limited to S <= 12 (got S = {S})")
    if M <= 0:
        raise AllocationError(f"cache size M must be positive (got {M})")
    if M >= S:
        raise AllocationError(f"cache exceeds library: M = {M} >= S = {S}")

    eps = 1e-12
    best = None
    states = range(S)
    for size in range(1, S + 1):
        for support in itertools.combinations(states, size):
            idx = np.array(support)
            gamma = (size - M) / r[idx].sum()
            if gamma < -eps:
                continue
            m_sup = 1.0 - r[idx] * gamma
            if np.any(m_sup < -eps) or np.any(m_sup > 1.0 + eps):
                continue
            rest = np.setdiff1d(np.arange(S), idx)
            if rest.size and np.any(1.0 / r[rest] > gamma + eps):
                continue
            if best is None or gamma < best[0] - eps:
                m = np.zeros(S)
                m[idx] = np.clip(m_sup, 0.0, 1.0)
                best = (gamma, m)
    if best is None:
        raise AllocationError("no feasible support found")
    gamma, m = best
    return MemoryAllocation(
        m=m,
        t=K * m,
        gamma=float(gamma),
        support=frozenset(int(j) + 1 for j in np.where(m > 0)[0]),
    )


def allocation_csv_lines(alloc: MemoryAllocation, rates) -> list[str]:
    """CSV rows: state_index, rate, m, t, gamma."""
    r = np.asarray(rates, dtype=float)
    lines = ["state_index,rate,m,t,gamma"]
    for j in range(alloc.num_states):
        lines.append(",".join([
            str(j + 1),
            fmt_num(r[j]),
            fmt_num(alloc.m[j]),
            fmt_num(alloc.t[j]),
            fmt_num(alloc.gamma),
        ]))
    return lines
