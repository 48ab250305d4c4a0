"""Room geometry and the per-state rate model.

The floor of a rectangular room is tiled by a square grid of states.
Each state j is summarized by the worst-case 3D distance d(j) from the
elevated transmitter at the room center to any point of the cell (the
farthest floor-level corner), and by the normalized rate achievable
there under a pure path-loss link budget:

    rate(j) = B * log2(1 + P * d(j)**(-n) / N0) / F    [files/second]

Rates are normalized by the file size F so that every state's file has
size one; all delivery times downstream are then in plain seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError
from .fmt import fmt_num

DEFAULT_TX_POWER = 1000.0  # 30 dB over unit noise
DEFAULT_BANDWIDTH_HZ = 100e6
DEFAULT_FILE_BITS = 4e9


@dataclass(frozen=True)
class RoomConfig:
    """Static description of the environment and the link budget.

    tx_power and noise_power are linear ratios (the CLI converts dB
    input before building one of these).
    """

    width_m: float
    depth_m: float
    tx_height_m: float
    grid_side: int
    tx_power: float = DEFAULT_TX_POWER
    noise_power: float = 1.0
    pathloss_exp: float = 2.0
    bandwidth_hz: float = DEFAULT_BANDWIDTH_HZ
    file_bits: float = DEFAULT_FILE_BITS

    def __post_init__(self):
        for name in ("width_m", "depth_m", "tx_height_m", "tx_power",
                     "noise_power", "pathloss_exp", "bandwidth_hz", "file_bits"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive finite number (got {value!r})")
        if not (isinstance(self.grid_side, int) and self.grid_side >= 1):
            raise ConfigError(f"grid_side must be an integer >= 1 (got {self.grid_side!r})")

    @property
    def num_states(self) -> int:
        return self.grid_side ** 2

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def per_state_rate(cfg: RoomConfig, d):
    """Normalized achievable rate (files/s) at worst-case distance d.

    Accepts a scalar or an array of distances; every distance must be
    positive.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    snr = cfg.tx_power * d ** (-cfg.pathloss_exp) / cfg.noise_power
    rate = cfg.bandwidth_hz * np.log2(1.0 + snr) / cfg.file_bits
    return float(rate) if rate.ndim == 0 else rate


@dataclass(frozen=True, eq=False)
class StateGrid:
    """Per-state rates, plus cell geometry when grid-derived.

    State j (1-based) lives at vector index j-1.  Grids built from an
    explicit rate vector carry no geometry (worst_distance, cell_x and
    cell_y are None).
    """

    rate: np.ndarray
    worst_distance: np.ndarray | None = None
    cell_x: np.ndarray | None = None
    cell_y: np.ndarray | None = None

    def __post_init__(self):
        if self.rate.size == 0:
            raise ConfigError("rate vector must be nonempty")
        if np.any(self.rate <= 0) or not np.all(np.isfinite(self.rate)):
            raise ConfigError("rate must be positive and finite for every state")
        if self.worst_distance is not None and np.any(self.worst_distance <= 0):
            raise ConfigError("worst_distance must be positive for every state")

    @property
    def num_states(self) -> int:
        return int(self.rate.size)

    @classmethod
    def from_rates(cls, rates) -> "StateGrid":
        """Grid with explicitly given rates and no geometry."""
        return cls(rate=np.asarray(rates, dtype=float).copy())


def build_grid(cfg: RoomConfig) -> StateGrid:
    """Tile the floor with grid_side x grid_side square cells.

    Cells are indexed row-major: state j = iy*grid_side + ix + 1, where
    ix runs along the width and iy along the depth.  d(j) is the 3D
    distance from the transmitter at (width/2, depth/2, tx_height) to
    the farthest floor-level corner of cell j.
    """
    side = cfg.grid_side
    cw = cfg.width_m / side
    cd = cfg.depth_m / side
    tx_x = cfg.width_m / 2.0
    tx_y = cfg.depth_m / 2.0

    idx = np.arange(side)
    # farthest-corner offset per axis: the cell corner further from the
    # transmitter's ground projection
    off_x = np.maximum(np.abs(idx * cw - tx_x), np.abs((idx + 1) * cw - tx_x))
    off_y = np.maximum(np.abs(idx * cd - tx_y), np.abs((idx + 1) * cd - tx_y))

    oy, ox = np.meshgrid(off_y, off_x, indexing="ij")
    dist = np.sqrt(ox ** 2 + oy ** 2 + cfg.tx_height_m ** 2).ravel()

    cy, cx = np.meshgrid((idx + 0.5) * cd, (idx + 0.5) * cw, indexing="ij")
    return StateGrid(
        rate=per_state_rate(cfg, dist),
        worst_distance=dist,
        cell_x=cx.ravel(),
        cell_y=cy.ravel(),
    )


def grid_csv_lines(grid: StateGrid) -> list[str]:
    """CSV rows: state_index, cell_x, cell_y, worst_distance_m, rate_files_per_s."""
    lines = ["state_index,cell_x,cell_y,worst_distance_m,rate_files_per_s"]
    for j in range(grid.num_states):
        geom = (
            ["", "", ""]
            if grid.worst_distance is None
            else [fmt_num(grid.cell_x[j]), fmt_num(grid.cell_y[j]), fmt_num(grid.worst_distance[j])]
        )
        lines.append(",".join([str(j + 1), *geom, fmt_num(grid.rate[j])]))
    return lines
