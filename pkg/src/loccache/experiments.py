"""Monte Carlo sweeps over user count and cache size.

Users are dropped uniformly over the states, and each trial is scored
with the closed-form evaluators (the sampled M values make t(j)
non-integer, where the operational scheduler does not apply).  Every
(sweep point, trial) pair owns a Philox counter-based stream derived
from (base_seed, sweep_index, trial), so reports are bit-identical
regardless of execution order or parallelism.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .allocation import allocate_memory
from .delivery import UserRealization
from .env_model import RoomConfig, StateGrid, build_grid
from .errors import AllocationError, ConfigError
from .evaluation import analytic_tm, analytic_tu, baseline_tx, common_cache_ratio
from .fmt import fmt_num

SWEEP_CSV_HEADER = ("sweep_value,mean_Tm,sd_Tm,mean_Tu,sd_Tu,mean_Tx,sd_Tx,"
                    "ratio_u_m,ratio_u_x")


@dataclass(frozen=True)
class SweepConfig:
    room: RoomConfig
    sweep_variable: str            # "K" or "M"
    sweep_values: tuple
    fixed_K: int | None = None
    fixed_M: float | None = None
    trials: int = 1000
    base_seed: int = 0
    rates: tuple | None = None     # explicit override of the grid rates

    def __post_init__(self):
        if self.sweep_variable not in ("K", "M"):
            raise ConfigError(f"sweep_variable must be 'K' or 'M' (got {self.sweep_variable!r})")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1 (got {self.trials})")
        values = tuple(self.sweep_values)
        if not values or any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("sweep_values must be nonempty and strictly increasing")
        if self.sweep_variable == "K" and self.fixed_M is None:
            raise ConfigError("fixed_M is required when sweeping K")
        if self.sweep_variable == "M" and self.fixed_K is None:
            raise ConfigError("fixed_K is required when sweeping M")
        if self.rates is not None and len(self.rates) != self.room.num_states:
            raise ConfigError(
                f"rates has {len(self.rates)} entries but grid_side^2 = {self.room.num_states}"
            )

    def grid(self) -> StateGrid:
        if self.rates is not None:
            return StateGrid.from_rates(self.rates)
        return build_grid(self.room)

    def point(self, index: int) -> tuple[int, float]:
        """(K, M) at one sweep position."""
        value = self.sweep_values[index]
        if self.sweep_variable == "K":
            return int(value), float(self.fixed_M)
        return int(self.fixed_K), float(value)


def trial_stream(base_seed: int, sweep_index: int, trial: int) -> np.random.Philox:
    """Counter-based stream unique to one (sweep point, trial) pair."""
    return np.random.Philox(
        counter=[0, 0, sweep_index, trial],
        key=[base_seed & 0xFFFFFFFFFFFFFFFF, 0],
    )


def draw_realization(stream: np.random.Philox, K: int, S: int) -> UserRealization:
    """K uniform state draws via the scaled-integer map (x*S) >> 64."""
    raw = stream.random_raw(K)
    return UserRealization(tuple((int(x) * S >> 64) + 1 for x in raw))


@dataclass(frozen=True, eq=False)
class TrialTimes:
    """Per-trial evaluator outputs at one sweep point."""

    t_m: np.ndarray
    t_u: np.ndarray
    t_x: np.ndarray
    t_hat: np.ndarray


def run_point_trials(grid: StateGrid, K: int, M: float, trials: int,
                     base_seed: int, sweep_index: int) -> TrialTimes:
    S = grid.num_states
    alloc = allocate_memory(grid.rate, M, K)
    t_m = np.empty(trials)
    t_u = np.empty(trials)
    t_x = np.empty(trials)
    t_hat = np.empty(trials)
    for trial in range(trials):
        realization = draw_realization(trial_stream(base_seed, sweep_index, trial), K, S)
        t_m[trial] = analytic_tm(alloc, grid.rate, realization, K)
        t_u[trial] = analytic_tu(alloc, grid.rate, realization)
        t_x[trial] = baseline_tx(grid.rate, M, S, realization, K)
        t_hat[trial] = common_cache_ratio(alloc, realization, K)
    return TrialTimes(t_m=t_m, t_u=t_u, t_x=t_x, t_hat=t_hat)


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    mean_tm: float
    sd_tm: float
    mean_tu: float
    sd_tu: float
    mean_tx: float
    sd_tx: float
    ratio_u_m: float
    ratio_u_x: float
    full_support: bool = True
    flagged: str = ""

    def csv_line(self) -> str:
        return ",".join(fmt_num(v) for v in (
            self.sweep_value, self.mean_tm, self.sd_tm, self.mean_tu, self.sd_tu,
            self.mean_tx, self.sd_tx, self.ratio_u_m, self.ratio_u_x,
        ))


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    config: SweepConfig
    rows: tuple[SweepRow, ...]
    metadata: dict = field(default_factory=dict)

    def csv_lines(self) -> list[str]:
        return [SWEEP_CSV_HEADER, *(row.csv_line() for row in self.rows)]

    def metadata_json(self) -> str:
        return json.dumps(self.metadata, indent=2, sort_keys=True)


def _config_metadata(cfg: SweepConfig) -> dict:
    meta = {
        "room": cfg.room.as_dict(),
        "sweep_variable": cfg.sweep_variable,
        "sweep_values": list(cfg.sweep_values),
        "fixed_K": cfg.fixed_K,
        "fixed_M": cfg.fixed_M,
        "trials": cfg.trials,
        "base_seed": cfg.base_seed,
        "rates": list(cfg.rates) if cfg.rates is not None else None,
    }
    digest = hashlib.sha256(json.dumps(meta, sort_keys=True).encode()).hexdigest()
    meta["config_hash"] = digest
    return meta


def run_sweep(cfg: SweepConfig) -> ExperimentReport:
    """Aggregate T_m/T_u/T_x means and standard deviations per sweep value.

    Infeasible points (M >= S) stay in the report as NaN rows and are
    listed under metadata['flagged_rows'] instead of being dropped.
    """
    grid = cfg.grid()
    S = grid.num_states
    rows: list[SweepRow] = []
    flagged: dict[str, str] = {}
    for index in range(len(cfg.sweep_values)):
        K, M = cfg.point(index)
        value = float(cfg.sweep_values[index])
        try:
            times = run_point_trials(grid, K, M, cfg.trials, cfg.base_seed, index)
        except AllocationError as exc:
            flagged[fmt_num(value)] = str(exc)
            nan = float("nan")
            rows.append(SweepRow(value, nan, nan, nan, nan, nan, nan, nan, nan,
                                 full_support=False, flagged=str(exc)))
            continue
        alloc = allocate_memory(grid.rate, M, K)
        rows.append(SweepRow(
            sweep_value=value,
            mean_tm=float(times.t_m.mean()),
            sd_tm=float(times.t_m.std()),
            mean_tu=float(times.t_u.mean()),
            sd_tu=float(times.t_u.std()),
            mean_tx=float(times.t_x.mean()),
            sd_tx=float(times.t_x.std()),
            ratio_u_m=float(times.t_u.mean() / times.t_m.mean()),
            ratio_u_x=float(times.t_u.mean() / times.t_x.mean()),
            full_support=len(alloc.support) == S,
        ))
    metadata = _config_metadata(cfg)
    metadata["flagged_rows"] = flagged
    return ExperimentReport(config=cfg, rows=tuple(rows), metadata=metadata)


CROSSOVER_CSV_HEADER = ("room,S,M,mean_Tm,mean_Tu,mean_Tx,ratio_u_m,ratio_u_x,"
                        "full_support,winner")


@dataclass(frozen=True, eq=False)
class CrossoverReport:
    small: ExperimentReport
    large: ExperimentReport

    def csv_lines(self) -> list[str]:
        lines = [CROSSOVER_CSV_HEADER]
        for label, report in (("small", self.small), ("large", self.large)):
            S = report.config.room.num_states
            for row in report.rows:
                winner = ""
                if not row.flagged:
                    winner = "proposed" if row.mean_tm < row.mean_tx else "baseline"
                lines.append(",".join([
                    label, str(S), fmt_num(row.sweep_value),
                    fmt_num(row.mean_tm), fmt_num(row.mean_tu), fmt_num(row.mean_tx),
                    fmt_num(row.ratio_u_m), fmt_num(row.ratio_u_x),
                    str(row.full_support).lower(), winner,
                ]))
        return lines


def crossover_report(cfg_small: SweepConfig, cfg_large: SweepConfig) -> CrossoverReport:
    """Side-by-side M-sweep comparison of two room sizes."""
    for cfg in (cfg_small, cfg_large):
        if cfg.sweep_variable != "M":
            raise ConfigError("crossover compares M sweeps")
    if cfg_small.fixed_K != cfg_large.fixed_K:
        raise ConfigError("crossover configs must share K")
    if cfg_small.trials != cfg_large.trials:
        raise ConfigError("crossover configs must share the trial count")
    return CrossoverReport(small=run_sweep(cfg_small), large=run_sweep(cfg_large))
