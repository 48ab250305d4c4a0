"""Closed-form delivery-time evaluators, baselines, and bounds.

These evaluators accept real-valued multiplicities, so they cover the
whole (K, M) plane sampled by the Monte Carlo sweeps; the operational
scheduler in `delivery` is restricted to integer t and is used to
certify these formulas on the integer lattice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .allocation import MemoryAllocation, allocate_memory
from .delivery import UserRealization
from .env_model import RoomConfig, build_grid
from .errors import ConfigError, InfeasibleError
from .fmt import fmt_num

_INT_TOL = 1e-9


def common_cache_ratio(alloc: MemoryAllocation, realization: UserRealization, K: int) -> float:
    """t_hat = min over realized users of K * m(s_i); real-valued."""
    return min(K * float(alloc.m[s - 1]) for s in realization.states)


def analytic_tm(alloc: MemoryAllocation, rates, realization: UserRealization,
                K: int) -> float:
    """Multicast total delivery time K/(t_hat+1) * (S-M) / sum_j r(j).

    Applied verbatim with real-valued t_hat; when a realized user sits
    in a zero-memory state t_hat is 0 and the value coincides with the
    unicast time of an equal-time-ratio allocation.
    """
    r = np.asarray(rates, dtype=float)
    S = r.size
    M = alloc.total_memory
    t_hat = common_cache_ratio(alloc, realization, K)
    return K / (t_hat + 1.0) * (S - M) / float(r.sum())


def analytic_tu(alloc: MemoryAllocation, rates, realization: UserRealization) -> float:
    """Unicast total: sum over users of (1 - m(s_i)) / r(s_i)."""
    r = np.asarray(rates, dtype=float)
    return float(sum(
        (1.0 - float(alloc.m[s - 1])) / float(r[s - 1]) for s in realization.states
    ))


def _tx_integer(user_rates: np.ndarray, t: int, K: int) -> float:
    """Uniform-placement baseline time for one integer multiplicity.

    Direct enumeration: one transmission per (t+1)-subset of users,
    each of one subfile (1/C(K,t) file-units) at the slowest member's
    rate.
    """
    if t >= K:
        return 0.0
    size = 1.0 / comb(K, t)
    return float(sum(
        size / min(user_rates[list(group)])
        for group in itertools.combinations(range(K), t + 1)
    ))


@dataclass(frozen=True)
class BaselineSensitivity:
    """Fractional-multiplicity handling alternatives for the baseline."""

    floor_time: float
    ceil_time: float
    interpolated: float


def baseline_tx_parts(rates, M: float, S: int, realization: UserRealization,
                      K: int) -> BaselineSensitivity:
    """Baseline time under floor, ceiling, and memory-shared multiplicity.

    Every state gets m = M/S, so t = K*M/S for all users.  Non-integer
    t is handled by memory sharing: times of the floor and ceiling
    schemes are interpolated by the memory split; the other two values
    report the sensitivity of that choice.
    """
    r = np.asarray(rates, dtype=float)
    if r.size != S:
        raise ConfigError(f"rate vector length {r.size} != S = {S}")
    if K < 1:
        raise ConfigError(f"K must be >= 1 (got {K})")
    if not 0 <= M <= S:
        raise ConfigError(f"baseline needs 0 <= M <= S (got M = {M})")
    user_rates = np.array([r[s - 1] for s in realization.states], dtype=float)
    if user_rates.size != K:
        raise ConfigError(f"realization covers {user_rates.size} users, expected K = {K}")

    t = K * M / S
    if abs(t - round(t)) <= _INT_TOL:
        exact = _tx_integer(user_rates, round(t), K)
        return BaselineSensitivity(exact, exact, exact)
    lo = int(np.floor(t))
    lam = (lo + 1) - t  # memory fraction run at multiplicity lo
    t_lo = _tx_integer(user_rates, lo, K)
    t_hi = _tx_integer(user_rates, lo + 1, K)
    return BaselineSensitivity(t_lo, t_hi, lam * t_lo + (1.0 - lam) * t_hi)


def baseline_tx(rates, M: float, S: int, realization: UserRealization, K: int) -> float:
    """Uniform-placement min-rate multicast baseline (memory-shared)."""
    return baseline_tx_parts(rates, M, S, realization, K).interpolated


@dataclass(frozen=True)
class OptimalityBound:
    """Multiplicative gap bound on T_m over the best uncoded-placement time."""

    bound_rhs: float          # r_max/((m_min + 1/K) sum r) * (S/K + M)
    limit_large_k: float      # r_max * M / (m_min * sum r)
    bound_large_s: float      # r_max / (K (m_min + 1/K) r_min)


def optimality_bound(rates, alloc: MemoryAllocation, M: float, S: int, K: int) -> OptimalityBound:
    r = np.asarray(rates, dtype=float)
    r_max = float(r.max())
    r_min = float(r.min())
    r_sum = float(r.sum())
    m_min = float(alloc.m.min())
    rhs = r_max / ((m_min + 1.0 / K) * r_sum) * (S / K + M)
    limit_k = r_max * M / (m_min * r_sum) if m_min > 0 else float("inf")
    bound_s = r_max / (K * (m_min + 1.0 / K) * r_min)
    return OptimalityBound(bound_rhs=rhs, limit_large_k=limit_k, bound_large_s=bound_s)


def optimal_time_lower_bound(rates, M: float, S: int, K: int) -> float:
    """Lower bound on the best achievable time: K(S-M)/((S+KM) r_max)."""
    r_max = float(np.asarray(rates, dtype=float).max())
    return K * (S - M) / ((S + K * M) * r_max)


def max_file_size(deadline: float, cfg: RoomConfig, M: float, S: int | None = None,
                  rel_tol: float = 1e-9) -> float:
    """Largest file size F (bits) whose optimal worst-case time meets the deadline.

    Found by doubling then bisecting on F.  The optimal allocation's
    support is invariant to F (scaling all rates together leaves the
    shares unchanged), so gamma(F) is exactly linear and, with full
    support, F = deadline * B * sum_j log2(1+SNR_j) / (S - M).
    """
    if deadline <= 0:
        raise ConfigError(f"deadline must be positive (got {deadline})")
    grid = build_grid(cfg)
    if S is not None and S != grid.num_states:
        raise ConfigError(f"S = {S} does not match grid_side^2 = {grid.num_states}")
    unnormalized = grid.rate * cfg.file_bits  # B * log2(1+SNR), files/s at F = 1

    def gamma_of(f_bits: float) -> float:
        return allocate_memory(unnormalized / f_bits, M, K=1).gamma

    lo = 1.0
    if gamma_of(lo) > deadline:
        raise InfeasibleError(
            f"no file of at least one bit meets the {deadline} s deadline"
        )
    hi = 2.0
    while gamma_of(hi) <= deadline:
        lo = hi
        hi *= 2.0
        if hi > 1e30:
            raise InfeasibleError("file-size search diverged")
    while (hi - lo) > rel_tol * lo:
        mid = 0.5 * (lo + hi)
        if gamma_of(mid) <= deadline:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class EvaluationResult:
    K: int
    M: float
    S: int
    t_hat: float
    t_m: float
    t_u: float
    t_x: float
    gain_unicast: float
    gain_baseline: float
    bound_rhs: float

    def csv_row(self) -> str:
        return ",".join([
            str(self.K), fmt_num(self.M), str(self.S), fmt_num(self.t_hat),
            fmt_num(self.t_m), fmt_num(self.t_u), fmt_num(self.t_x),
            fmt_num(self.gain_unicast), fmt_num(self.gain_baseline),
            fmt_num(self.bound_rhs),
        ])

    @staticmethod
    def csv_header() -> str:
        return "K,M,S,t_hat,T_m,T_u,T_x,gain_unicast,gain_baseline,bound_rhs"


def evaluate(rates, M: float, K: int, realization: UserRealization,
             alloc: MemoryAllocation | None = None) -> EvaluationResult:
    """One comparison row: proposed vs unicast vs uniform baseline."""
    r = np.asarray(rates, dtype=float)
    S = r.size
    for i, s in enumerate(realization.states, start=1):
        if not 1 <= s <= S:
            raise ConfigError(f"user {i} state {s} outside 1..{S}")
    if alloc is None:
        alloc = allocate_memory(r, M, K)
    t_m = analytic_tm(alloc, r, realization, K)
    t_u = analytic_tu(alloc, r, realization)
    t_x = baseline_tx(r, M, S, realization, K)
    bound = optimality_bound(r, alloc, M, S, K)
    return EvaluationResult(
        K=K,
        M=M,
        S=S,
        t_hat=common_cache_ratio(alloc, realization, K),
        t_m=t_m,
        t_u=t_u,
        t_x=t_x,
        gain_unicast=t_u / t_m if t_m > 0 else float("inf"),
        gain_baseline=t_x / t_m if t_m > 0 else float("inf"),
        bound_rhs=bound.bound_rhs,
    )
