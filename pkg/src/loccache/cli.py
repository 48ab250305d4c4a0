"""Command-line front end.

Configuration is a flat key=value text file (reproducible experiment
records beat positional flags); `--seed`, `--trials` and `--out`
override the corresponding keys.  Subcommands:

    rates      per-state grid CSV
    allocate   memory allocation CSV
    place      placement dump (one line per subfile)
    deliver    delivery-plan dump plus certification report
    evaluate   one comparison row (proposed / unicast / baseline)
    sweep      Monte Carlo sweep CSV plus metadata sidecar
    crossover  two-room M-sweep comparison table
    maxfile    largest file size meeting a deadline

Exit status: 0 success, 1 configuration error, 2 certification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .allocation import allocate_memory, allocation_csv_lines
from .delivery import UserRealization, build_delivery_plan, certify_plan, plan_dump_lines
from .env_model import RoomConfig, StateGrid, build_grid, grid_csv_lines
from .errors import ConfigError, LoccacheError
from .evaluation import EvaluationResult, evaluate, max_file_size
from .experiments import SweepConfig, crossover_report, run_sweep
from .fmt import fmt_num
from .placement import place_cache, placement_dump_lines

_FLOAT_KEYS = ("width_m", "depth_m", "tx_height_m", "tx_power_db", "noise_power",
               "pathloss_exp", "bandwidth_hz", "file_bits", "cache_size", "deadline_s")
_INT_KEYS = ("grid_side", "users", "seed", "trials")
_STR_KEYS = ("out", "sweep_variable")
_LIST_KEYS = ("rates", "sweep_values")
KNOWN_KEYS = (*_FLOAT_KEYS, *_INT_KEYS, *_STR_KEYS, *_LIST_KEYS)

_DEFAULTS = {
    "width_m": 5.0, "depth_m": 5.0, "tx_height_m": 3.0, "grid_side": 11,
    "tx_power_db": 30.0, "noise_power": 1.0, "pathloss_exp": 2.0,
    "bandwidth_hz": 100e6, "file_bits": 4e9,
    "seed": 0, "trials": 1000, "out": ".",
}


@dataclass
class CliConfig:
    values: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "CliConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value (got {raw!r})")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in KNOWN_KEYS:
                raise ConfigError(f"unknown config key '{key}'")
            values[key] = _parse_value(key, value)
        return cls(values)

    @classmethod
    def from_file(cls, path: str) -> "CliConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        return cls.from_text(text)

    def get(self, key, default=None):
        if key in self.values:
            return self.values[key]
        if key in _DEFAULTS:
            return _DEFAULTS[key]
        return default

    def require(self, key):
        value = self.get(key)
        if value is None:
            raise ConfigError(f"missing config key '{key}'")
        return value

    def set(self, key, value):
        self.values[key] = value

    def to_text(self) -> str:
        lines = []
        for key in KNOWN_KEYS:
            if key not in self.values:
                continue
            value = self.values[key]
            if key in _LIST_KEYS:
                text = ",".join(fmt_num(v) for v in value)
            elif key in _STR_KEYS:
                text = str(value)
            elif key in _INT_KEYS:
                text = str(int(value))
            else:
                text = fmt_num(value)
            lines.append(f"{key}={text}")
        return "\n".join(lines) + "\n"

    def room(self) -> RoomConfig:
        return RoomConfig(
            width_m=self.get("width_m"),
            depth_m=self.get("depth_m"),
            tx_height_m=self.get("tx_height_m"),
            grid_side=self.get("grid_side"),
            tx_power=10.0 ** (self.get("tx_power_db") / 10.0),
            noise_power=self.get("noise_power"),
            pathloss_exp=self.get("pathloss_exp"),
            bandwidth_hz=self.get("bandwidth_hz"),
            file_bits=self.get("file_bits"),
        )

    def grid(self) -> StateGrid:
        """Explicit rates override the grid-derived ones."""
        rates = self.get("rates")
        if rates is not None:
            if "grid_side" in self.values and self.get("grid_side") ** 2 != len(rates):
                raise ConfigError(
                    f"rates has {len(rates)} entries but grid_side^2 = "
                    f"{self.get('grid_side') ** 2}"
                )
            return StateGrid.from_rates(rates)
        return build_grid(self.room())


def _parse_value(key: str, value: str):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _LIST_KEYS:
            items = [v for v in value.split(",") if v.strip()]
            if key == "rates":
                return tuple(float(v) for v in items)
            return tuple(float(v) for v in items)
    except ValueError as exc:
        raise ConfigError(f"config key '{key}': {exc}") from exc
    return value


def _parse_realization(text: str) -> UserRealization:
    try:
        states = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"realization must be comma-separated integers: {exc}") from exc
    if not states:
        raise ConfigError("realization must name at least one state")
    return UserRealization(states)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="loccache", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, realization=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="key=value config file")
        p.add_argument("--seed", type=int, help="override the seed key")
        p.add_argument("--trials", type=int, help="override the trials key")
        p.add_argument("--out", help="override the output directory")
        if realization:
            p.add_argument("--realization", required=True,
                           help="comma-separated state per user, e.g. 1,2,4,5")
        return p

    add("rates", "emit the per-state grid CSV")
    add("allocate", "emit the memory-allocation CSV")
    add("place", "emit the cache-placement dump")
    p = add("deliver", "plan delivery for a realization and certify it", realization=True)
    p.add_argument("--dump-plan", help="plan dump path (default <out>/plan.txt)")
    add("evaluate", "emit one evaluation row for a realization", realization=True)
    add("sweep", "run the configured Monte Carlo sweep")
    p = add("crossover", "compare two room sizes over an M sweep")
    p.add_argument("--config2", required=True, help="config file of the larger room")
    p = add("maxfile", "largest file size meeting a deadline")
    p.add_argument("--deadline", type=float, help="override the deadline_s key")
    return parser


def _apply_overrides(cfg: CliConfig, args) -> CliConfig:
    if getattr(args, "seed", None) is not None:
        cfg.set("seed", args.seed)
    if getattr(args, "trials", None) is not None:
        cfg.set("trials", args.trials)
    if getattr(args, "out", None) is not None:
        cfg.set("out", args.out)
    return cfg


def _outdir(cfg: CliConfig) -> Path:
    out = Path(cfg.get("out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, lines) -> Path:
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path}")
    return path


def _sweep_config(cfg: CliConfig) -> SweepConfig:
    variable = cfg.require("sweep_variable")
    values = cfg.require("sweep_values")
    fixed_k = fixed_m = None
    if variable == "K":
        fixed_m = cfg.require("cache_size")
        values = tuple(int(v) for v in values)
    else:
        fixed_k = cfg.require("users")
    return SweepConfig(
        room=cfg.room(),
        sweep_variable=variable,
        sweep_values=tuple(values),
        fixed_K=fixed_k,
        fixed_M=fixed_m,
        trials=cfg.get("trials"),
        base_seed=cfg.get("seed"),
        rates=cfg.get("rates"),
    )


def _cmd_rates(cfg: CliConfig, args) -> int:
    _write(_outdir(cfg) / "rates.csv", grid_csv_lines(cfg.grid()))
    return 0


def _cmd_allocate(cfg: CliConfig, args) -> int:
    grid = cfg.grid()
    alloc = allocate_memory(grid.rate, cfg.require("cache_size"), cfg.require("users"))
    _write(_outdir(cfg) / "allocation.csv", allocation_csv_lines(alloc, grid.rate))
    return 0


def _cmd_place(cfg: CliConfig, args) -> int:
    grid = cfg.grid()
    alloc = allocate_memory(grid.rate, cfg.require("cache_size"), cfg.require("users"),
                            require_integer_t=True)
    placement = place_cache(alloc, cfg.require("users"))
    _write(_outdir(cfg) / "placement.txt", placement_dump_lines(placement))
    return 0


def _cmd_deliver(cfg: CliConfig, args) -> int:
    grid = cfg.grid()
    K = cfg.require("users")
    alloc = allocate_memory(grid.rate, cfg.require("cache_size"), K, require_integer_t=True)
    placement = place_cache(alloc, K)
    realization = _parse_realization(args.realization)
    plan = build_delivery_plan(placement, realization, grid.rate)
    out = _outdir(cfg)
    plan_path = Path(args.dump_plan) if args.dump_plan else out / "plan.txt"
    _write(plan_path, plan_dump_lines(plan))
    report = certify_plan(placement, realization, plan)
    _write(out / "certification.txt", report.summary().splitlines())
    print(report.summary().splitlines()[0])
    return 0 if report.ok else 2


def _cmd_evaluate(cfg: CliConfig, args) -> int:
    grid = cfg.grid()
    realization = _parse_realization(args.realization)
    result = evaluate(grid.rate, cfg.require("cache_size"), cfg.require("users"), realization)
    lines = [EvaluationResult.csv_header(), result.csv_row()]
    _write(_outdir(cfg) / "evaluate.csv", lines)
    print(lines[1])
    return 0


def _cmd_sweep(cfg: CliConfig, args) -> int:
    report = run_sweep(_sweep_config(cfg))
    out = _outdir(cfg)
    _write(out / "sweep.csv", report.csv_lines())
    meta = dict(report.metadata)
    meta["config_text"] = cfg.to_text()
    (out / "sweep.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out / 'sweep.meta.json'}")
    return 0


def _cmd_crossover(cfg: CliConfig, args) -> int:
    cfg2 = _apply_overrides(CliConfig.from_file(args.config2), args)
    report = crossover_report(_sweep_config(cfg), _sweep_config(cfg2))
    out = _outdir(cfg)
    _write(out / "crossover.csv", report.csv_lines())
    meta = {
        "small": report.small.metadata,
        "large": report.large.metadata,
        "config_text": cfg.to_text(),
        "config2_text": cfg2.to_text(),
    }
    (out / "crossover.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out / 'crossover.meta.json'}")
    return 0


def _cmd_maxfile(cfg: CliConfig, args) -> int:
    deadline = args.deadline if args.deadline is not None else cfg.require("deadline_s")
    bits = max_file_size(deadline, cfg.room(), cfg.require("cache_size"))
    line = f"max_file_bits={fmt_num(bits)}"
    _write(_outdir(cfg) / "maxfile.txt", [line])
    print(line)
    return 0


_COMMANDS = {
    "rates": _cmd_rates,
    "allocate": _cmd_allocate,
    "place": _cmd_place,
    "deliver": _cmd_deliver,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "crossover": _cmd_crossover,
    "maxfile": _cmd_maxfile,
}


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        cfg = _apply_overrides(CliConfig.from_file(args.config), args)
        return _COMMANDS[args.command](cfg, args)
    except LoccacheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
