"""Report rendering: CSV tables plus matplotlib figures for the CLI.

The pipeline report shows the tracked hand-center path (current point in
red over its trace) and the commanded angles; the simulation report shows
the end-effector path in top and side projection and the torque audit
against the servo rating.  All figures are written as PNG files next to
the CSV they visualize.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .arm import ArmGeometry


class PipelineRow(NamedTuple):
    frame: int
    source: str
    status: str
    center_x: Optional[float]
    center_y: Optional[float]
    center_z: Optional[float]
    dx: Optional[float]
    dy: Optional[float]
    dz: Optional[float]
    cmd_seq: Optional[int]
    cmd_x: Optional[int]
    cmd_y: Optional[int]
    cmd_z: Optional[int]


class SimulateRow(NamedTuple):
    index: int
    cmd_x: int
    cmd_y: int
    cmd_z: int
    fk_x: float
    fk_y: float
    fk_z: float
    shoulder_torque: float
    elbow_torque: float
    flags: str


def _write_csv(path: Path, fieldnames: Sequence[str], rows: Sequence[NamedTuple]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])


def write_pipeline_report(rows: Sequence[PipelineRow], out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out_dir / "pipeline.csv"
    _write_csv(csv_path, PipelineRow._fields, rows)
    written.append(csv_path)

    tracked = [r for r in rows if r.center_x is not None]
    fig, ax = plt.subplots(figsize=(6, 5))
    if tracked:
        xs = [r.center_x for r in tracked]
        ys = [r.center_y for r in tracked]
        ax.plot(xs, ys, "-", color="gold", linewidth=1.5, label="trace")
        ax.plot(xs[-1], ys[-1], "o", color="red", markersize=8, label="current")
    ax.set_xlabel("x (px)")
    ax.set_ylabel("y (px)")
    ax.set_title("Hand center trace")
    ax.invert_yaxis()  # image coordinates: y grows downward
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    trace_path = out_dir / "hand_trace.png"
    fig.savefig(trace_path, dpi=110)
    plt.close(fig)
    written.append(trace_path)

    commanded = [r for r in rows if r.cmd_x is not None]
    fig, ax = plt.subplots(figsize=(7, 4))
    if commanded:
        frames = [r.frame for r in commanded]
        for name, color in (("cmd_x", "tab:blue"), ("cmd_y", "tab:orange"), ("cmd_z", "tab:green")):
            ax.step(frames, [getattr(r, name) for r in commanded], where="post", label=name, color=color)
    ax.set_xlabel("frame")
    ax.set_ylabel("servo angle (deg)")
    ax.set_ylim(-5, 185)
    ax.set_title("Commanded angles")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    angles_path = out_dir / "angles.png"
    fig.savefig(angles_path, dpi=110)
    plt.close(fig)
    written.append(angles_path)
    return written


def write_simulate_report(
    rows: Sequence[SimulateRow], geometry: ArmGeometry, out_dir: Path
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out_dir / "trace.csv"
    _write_csv(csv_path, SimulateRow._fields, rows)
    written.append(csv_path)

    fig, (ax_top, ax_side) = plt.subplots(1, 2, figsize=(10, 4.5))
    if rows:
        xs = [r.fk_x for r in rows]
        ys = [r.fk_y for r in rows]
        zs = [r.fk_z for r in rows]
        radial = [(x**2 + y**2) ** 0.5 for x, y in zip(xs, ys)]
        ax_top.plot(xs, ys, "-o", markersize=3, color="tab:blue")
        ax_side.plot(radial, zs, "-o", markersize=3, color="tab:blue")
    reach = geometry.lower_len + geometry.upper_len + geometry.claw_len
    ax_top.set_xlabel("x (cm)")
    ax_top.set_ylabel("y (cm)")
    ax_top.set_title("End effector, top view")
    ax_top.set_xlim(-reach * 1.1, reach * 1.1)
    ax_top.set_ylim(-reach * 1.1, reach * 1.1)
    ax_top.set_aspect("equal")
    ax_top.grid(True, alpha=0.3)
    ax_side.set_xlabel("radial distance (cm)")
    ax_side.set_ylabel("z (cm)")
    ax_side.set_title("End effector, side view")
    ax_side.grid(True, alpha=0.3)
    path_png = out_dir / "arm_path.png"
    fig.tight_layout()
    fig.savefig(path_png, dpi=110)
    plt.close(fig)
    written.append(path_png)

    fig, ax = plt.subplots(figsize=(7, 4))
    if rows:
        idx = [r.index for r in rows]
        ax.plot(idx, [r.shoulder_torque for r in rows], label="shoulder", color="tab:blue")
        ax.plot(idx, [r.elbow_torque for r in rows], label="elbow", color="tab:orange")
        over = [r for r in rows if r.flags]
        if over:
            ax.plot(
                [r.index for r in over],
                [max(r.shoulder_torque, r.elbow_torque) for r in over],
                "x",
                color="red",
                label="overload",
            )
    ax.axhline(geometry.main_servo_rating, color="red", linestyle="--", alpha=0.7, label="rating")
    ax.set_xlabel("command")
    ax.set_ylabel("torque (kg cm)")
    ax.set_title("Static torque audit")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    torque_png = out_dir / "torque.png"
    fig.savefig(torque_png, dpi=110)
    plt.close(fig)
    written.append(torque_png)
    return written
