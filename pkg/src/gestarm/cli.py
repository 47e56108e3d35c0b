"""Command-line entry point: synth, pipeline, serve, client, simulate.

Exit codes: 0 success, 1 runtime failure, 2 usage error or empty input.
Network defaults can also come from environment variables (GESTARM_LISTEN,
GESTARM_WS_LISTEN, GESTARM_SERIAL_SINK, GESTARM_IDLE_TIMEOUT,
GESTARM_STATE_RATE); explicit flags always win.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import signal
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .arm import ArmGeometry, ArmState, apply_command, forward_kinematics, iter_serial_commands, static_torque
from .client import ClientFsmState, Phase, PipelineConfig, client_step, run_client
from .frameio import (
    DEFAULT_LED_CENTERS,
    GrayFrame,
    PgmError,
    SceneError,
    SynthScene,
    load_pgm,
    save_pgm,
    synth_frame,
)
from .fuzzy import axis_rules, load_rule_bases
from .server import ArmService, GatewayServer, SerialSink, TeleopServer

logger = logging.getLogger("gestarm")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _env(name: str, default: str) -> str:
    return os.environ.get(f"GESTARM_{name}", default)


def _parse_addr(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected HOST:PORT, got {text!r}")
    return host, int(port)


def _parse_centers(text: str) -> list[tuple[float, float]]:
    centers = []
    for chunk in text.split(";"):
        x, _, y = chunk.partition(",")
        try:
            centers.append((float(x), float(y)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad center {chunk!r}") from None
    return centers


def _load_rules(path: Optional[str]):
    if path is None:
        return None
    return axis_rules(load_rule_bases(Path(path).read_text()))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gestarm",
        description="Glove-gesture teleoperation: tracking, fuzzy control, arm service and simulator.",
    )
    parser.add_argument("--version", action="version", version=f"gestarm {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render synthetic LED frames as numbered PGM files")
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.add_argument("--count", type=int, default=1, help="number of frames")
    p.add_argument("--width", type=int, default=320)
    p.add_argument("--height", type=int, default=240)
    p.add_argument("--radius", type=float, default=5.0, help="LED disk radius (px)")
    p.add_argument("--gain", type=float, default=1.0)
    p.add_argument("--offset", type=float, default=0.0)
    p.add_argument("--noise", type=float, default=0.0, help="noise amplitude")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--centers",
        type=_parse_centers,
        default=None,
        help='five LED centers as "x,y;x,y;x,y;x,y;x,y"',
    )
    p.add_argument(
        "--drift",
        type=_parse_centers,
        default=None,
        metavar="DX,DY",
        help="translate all centers by this much every frame",
    )
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", help="replay frames through the tracking pipeline offline")
    p.add_argument("inputs", nargs="+", type=Path, help="PGM files or a directory of them")
    p.add_argument("--r-min", type=int, default=3)
    p.add_argument("--r-max", type=int, default=12)
    p.add_argument("--rules", help="fuzzy rule-base config file")
    p.add_argument("--dump-binary", type=Path, help="write thresholded frames as PGMs here")
    p.add_argument("--report-dir", type=Path, help="write CSV + figures here")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("serve", help="run the multi-client arm server and dashboard gateway")
    p.add_argument("--listen", type=_parse_addr, default=None, help="TCP HOST:PORT")
    p.add_argument("--ws-listen", type=_parse_addr, default=None, help="gateway HOST:PORT")
    p.add_argument("--serial-sink", type=Path, default=None, help="append serial frames to this file")
    p.add_argument("--pace-serial", action="store_true", help="emulate 9600 bps timing")
    p.add_argument("--idle-timeout", type=float, default=None, help="session idle timeout (s)")
    p.add_argument("--state-rate", type=float, default=None, help="max state pushes per second")
    p.add_argument("--rules", help="fuzzy rule-base config file (gateway MOVE path)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("client", help="stream frames to a server as teleop commands")
    p.add_argument("--server", type=_parse_addr, required=True, help="server HOST:PORT")
    p.add_argument("--frames", required=True, type=Path, help="directory of PGM frames")
    p.add_argument("--client-id", default="cli")
    p.add_argument("--fps", type=float, default=None, help="pace frames at this rate")
    p.add_argument("--r-min", type=int, default=3)
    p.add_argument("--r-max", type=int, default=12)
    p.add_argument("--rules", help="fuzzy rule-base config file")
    p.set_defaults(func=cmd_client)

    p = sub.add_parser("simulate", help="replay a command log through the arm model")
    p.add_argument("log", type=Path, help='file of "(x,y,z)" serial frames')
    p.add_argument("--payload", type=float, default=0.0, help="payload at the claw (kg)")
    p.add_argument("--claw-len", type=float, default=None, help="override claw length (cm)")
    p.add_argument("--report-dir", type=Path, help="write CSV + figures here")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except (PgmError, SceneError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        return EXIT_OK


def cmd_synth(args) -> int:
    centers = args.centers or list(DEFAULT_LED_CENTERS)
    if len(centers) != 5:
        print(f"error: need exactly 5 centers, got {len(centers)}", file=sys.stderr)
        return EXIT_USAGE
    drift = args.drift[0] if args.drift else (0.0, 0.0)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {args.out}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for n in range(args.count):
        moved = [(x + n * drift[0], y + n * drift[1]) for x, y in centers]
        scene = SynthScene(
            led_centers=moved,
            led_radius=args.radius,
            gain=args.gain,
            offset=args.offset,
            noise_amplitude=args.noise,
            seed=args.seed + n,
        )
        frame = synth_frame(scene, args.width, args.height, seq=n)
        path = args.out / f"frame_{n:04d}.pgm"
        path.write_bytes(save_pgm(frame))
    print(f"wrote {args.count} frame(s) to {args.out}")
    return EXIT_OK


def _collect_frames(inputs: list[Path]) -> list[Path]:
    files: list[Path] = []
    for item in inputs:
        if item.is_dir():
            files.extend(sorted(item.glob("*.pgm")))
        else:
            files.append(item)
    return files


def cmd_pipeline(args) -> int:
    from .report import PipelineRow, write_pipeline_report

    files = _collect_frames(args.inputs)
    if not files:
        print("error: no input frames", file=sys.stderr)
        return EXIT_USAGE
    try:
        rules = _load_rules(args.rules)
    except (OSError, ValueError) as exc:
        print(f"error: bad rules config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cfg = PipelineConfig(r_min=args.r_min, r_max=args.r_max, rules=rules)
    if args.dump_binary:
        args.dump_binary.mkdir(parents=True, exist_ok=True)

    fsm = ClientFsmState(phase=Phase.CAPTURE)
    rows: list[PipelineRow] = []
    failures = 0
    for path in files:
        try:
            frame = load_pgm(path.read_bytes())
        except (OSError, PgmError) as exc:
            logger.warning("skipping %s: %s", path, exc)
            failures += 1
            continue
        if args.dump_binary:
            from .vision import UniformFrameError, normalize_and_threshold

            try:
                binary = normalize_and_threshold(frame)
            except UniformFrameError:
                pass
            else:
                out = args.dump_binary / f"{path.stem}_binary.pgm"
                out.write_bytes(save_pgm(binary.to_gray()))
        fsm, cmd, center, disp, status = client_step(fsm, frame, cfg)
        rows.append(
            PipelineRow(
                frame=fsm.frame_count,
                source=path.name,
                status=status.value,
                center_x=None if center is None else center.x,
                center_y=None if center is None else center.y,
                center_z=None if center is None else center.z,
                dx=None if disp is None else disp.dx,
                dy=None if disp is None else disp.dy,
                dz=None if disp is None else disp.dz,
                cmd_seq=None if cmd is None else cmd.seq,
                cmd_x=None if cmd is None else cmd.x,
                cmd_y=None if cmd is None else cmd.y,
                cmd_z=None if cmd is None else cmd.z,
            )
        )
        if not args.json:
            print(_format_pipeline_row(rows[-1]))
    if args.json:
        print(json.dumps([row._asdict() for row in rows], indent=2))
    if args.report_dir:
        written = write_pipeline_report(rows, args.report_dir)
        for path in written:
            logger.info("wrote %s", path)
    if not rows:
        print("error: all input frames failed to load", file=sys.stderr)
        return EXIT_RUNTIME
    skipped = fsm.skipped_frames
    print(
        f"# processed {len(rows)} frame(s), skipped {skipped}, "
        f"tracking losses {fsm.tracking_losses}, load failures {failures}"
    )
    return EXIT_OK


def _format_pipeline_row(row) -> str:
    if row.center_x is None:
        center = "center    -        -        -   "
        disp = "d -      -      -   "
    else:
        center = f"center {row.center_x:8.2f} {row.center_y:8.2f} {row.center_z:8.2f}"
        disp = f"d {row.dx:+6.1f} {row.dy:+6.1f} {row.dz:+6.1f}"
    if row.cmd_x is None:
        cmd = f"[{row.status}]"
    else:
        cmd = f"cmd #{row.cmd_seq} ({row.cmd_x},{row.cmd_y},{row.cmd_z})"
        if row.status != "ok":
            cmd += f" [{row.status}]"
    return f"frame {row.frame:4d} {row.source:<20s} {center}  {disp}  {cmd}"


def cmd_serve(args) -> int:
    listen = args.listen or _parse_addr(_env("LISTEN", "127.0.0.1:7420"))
    ws_listen = args.ws_listen or _parse_addr(_env("WS_LISTEN", "127.0.0.1:7421"))
    sink_path = args.serial_sink or (
        Path(p) if (p := os.environ.get("GESTARM_SERIAL_SINK")) else None
    )
    idle_timeout = args.idle_timeout or float(_env("IDLE_TIMEOUT", "30"))
    state_rate = args.state_rate or float(_env("STATE_RATE", "30"))
    try:
        rules = _load_rules(args.rules)
    except (OSError, ValueError) as exc:
        print(f"error: bad rules config: {exc}", file=sys.stderr)
        return EXIT_USAGE

    sink = SerialSink(sink_path, pace=args.pace_serial) if sink_path else None
    arm = ArmService(serial_sink=sink)
    server = TeleopServer(listen[0], listen[1], arm, idle_timeout=idle_timeout).start()
    gateway = GatewayServer(
        ws_listen[0], ws_listen[1], arm, state_rate=state_rate, rules=rules
    ).start()
    print(f"teleop server on {server.address[0]}:{server.address[1]}")
    print(f"dashboard gateway on ws://{gateway.address[0]}:{gateway.address[1]}")

    stop = {"flag": False}

    def _stop(signum, _frame):
        stop["flag"] = True

    signal.signal(signal.SIGINT, _stop)
    signal.signal(signal.SIGTERM, _stop)
    try:
        import time

        while not stop["flag"]:
            time.sleep(0.2)
    finally:
        gateway.shutdown()
        server.shutdown()
        if sink:
            sink.close()
    return EXIT_OK


def cmd_client(args) -> int:
    files = _collect_frames([args.frames])
    if not files:
        print("error: no input frames", file=sys.stderr)
        return EXIT_USAGE
    try:
        rules = _load_rules(args.rules)
    except (OSError, ValueError) as exc:
        print(f"error: bad rules config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    frames = []
    for path in files:
        try:
            frames.append(load_pgm(path.read_bytes()))
        except (OSError, PgmError) as exc:
            logger.warning("skipping %s: %s", path, exc)
    if not frames:
        print("error: all input frames failed to load", file=sys.stderr)
        return EXIT_RUNTIME
    cfg = PipelineConfig(r_min=args.r_min, r_max=args.r_max, rules=rules)
    try:
        replies = run_client(
            args.server[0], args.server[1], frames, args.client_id, cfg, fps=args.fps
        )
    except (ConnectionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    acks = sum(1 for r in replies if type(r).__name__ == "Ack")
    print(f"sent {len(replies)} command(s), {acks} acked")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .report import SimulateRow, write_simulate_report

    try:
        data = args.log.read_bytes()
    except OSError as exc:
        print(f"error: cannot read {args.log}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    geometry = (
        ArmGeometry(claw_len=args.claw_len) if args.claw_len is not None else ArmGeometry()
    )
    state = ArmState()
    rows: list[SimulateRow] = []
    for idx, cmd in enumerate(iter_serial_commands(data), start=1):
        state = apply_command(state, cmd)
        fk = forward_kinematics(state, geometry)
        torques = static_torque(state, geometry, payload_kg=args.payload)
        flags = ",".join(sorted(torques.flags()))
        rows.append(
            SimulateRow(
                index=idx,
                cmd_x=cmd.x,
                cmd_y=cmd.y,
                cmd_z=cmd.z,
                fk_x=fk[0],
                fk_y=fk[1],
                fk_z=fk[2],
                shoulder_torque=torques.shoulder,
                elbow_torque=torques.elbow,
                flags=flags,
            )
        )
    if args.json:
        print(json.dumps([row._asdict() for row in rows], indent=2))
    else:
        for row in rows:
            flag_text = f"  OVERLOAD[{row.flags}]" if row.flags else ""
            print(
                f"#{row.index:4d} cmd ({row.cmd_x},{row.cmd_y},{row.cmd_z})"
                f"  fk ({row.fk_x:7.2f}, {row.fk_y:7.2f}, {row.fk_z:7.2f}) cm"
                f"  torque shoulder {row.shoulder_torque:6.2f} elbow {row.elbow_torque:6.2f} kg·cm"
                f"{flag_text}"
            )
    if args.report_dir:
        written = write_simulate_report(rows, geometry, args.report_dir)
        for path in written:
            logger.info("wrote %s", path)
    print(f"# replayed {len(rows)} command(s), payload {args.payload} kg")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
