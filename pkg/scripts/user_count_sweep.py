#!/usr/bin/env python3
"""Average delivery time vs user count.

5m x 5m room, 121 states, 30 dB transmit power, per-user cache
M = (3/4)S; K sweeps over 4..16.  Multicast stays nearly flat while
unicast grows linearly with K.
"""

import argparse
from pathlib import Path

from loccache import RoomConfig
from loccache.experiments import SweepConfig, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", default="user_count_sweep.csv")
    args = ap.parse_args()

    room = RoomConfig(width_m=5.0, depth_m=5.0, tx_height_m=3.0, grid_side=11)
    cfg = SweepConfig(
        room=room,
        sweep_variable="K",
        sweep_values=(4, 6, 8, 10, 12, 14, 16),
        fixed_M=0.75 * room.num_states,
        trials=args.trials,
        base_seed=args.seed,
    )
    report = run_sweep(cfg)
    Path(args.out).write_text("\n".join(report.csv_lines()) + "\n")
    print(f"wrote {args.out}")
    for row in report.rows:
        print(f"K={int(row.sweep_value):3d}  mean_Tm={row.mean_tm:9.4f}  "
              f"mean_Tu={row.mean_tu:9.4f}  mean_Tx={row.mean_tx:9.4f}")


if __name__ == "__main__":
    main()
