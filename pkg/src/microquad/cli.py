"""Command-line entry point.

Subcommands: sweep, figure-data, run, metrics, linkdump, serve. All accept
--config for the key-value parameter file; seeds are always explicit flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .config import load_config
from .gait import GaitParams, GaitType
from .link import (
    Channel,
    ChannelModel,
    Receiver,
    decode_command,
    encode_command,
    frame_to_hex,
    stream_frames,
)
from .metrics import (
    cost_of_transport,
    normalized_payload,
    normalized_speed,
    normalized_workload,
)
from .errors import ZeroVelocity
from .simulator import RobotConfig, run_episode, samples_for_frequency, trace_csv_rows
from .sweeps import SweepSpec, fmt, figure_data, sweep, write_csv
from .teleop import TeleopSession


def _floats(text):
    return tuple(float(part) for part in text.split(","))


def _gaits(text):
    return tuple(GaitType(part.strip()) for part in text.split(","))


def _load(args) -> tuple[RobotConfig, GaitParams]:
    if getattr(args, "config", None):
        return load_config(args.config)
    return RobotConfig(), GaitParams()


def _channel_from(args) -> ChannelModel | None:
    if args.drop == 0.0 and args.latency_ticks == 0 and args.jitter_ticks == 0:
        return None
    return ChannelModel(
        drop_prob=args.drop,
        latency_ticks=args.latency_ticks,
        jitter_ticks=args.jitter_ticks,
        seed=args.seed,
    )


def _add_channel_flags(parser, default_drop=0.0):
    parser.add_argument("--drop", type=float, default=default_drop,
                        help="frame drop probability")
    parser.add_argument("--latency-ticks", type=int, default=0)
    parser.add_argument("--jitter-ticks", type=int, default=0)
    parser.add_argument("--seed", type=int, default=0)


def cmd_sweep(args) -> int:
    cfg, base = _load(args)
    spec = SweepSpec(
        stride_len=_floats(args.stride),
        frequency=_floats(args.freq),
        duty=_floats(args.duty),
        gait=_gaits(args.gait),
        payload=_floats(args.payload),
        duration=args.duration,
        seed=args.seed,
        base_gait=base,
    )
    print(f"sweep: {spec.size} combinations", file=sys.stderr)
    rows, ok = sweep(cfg, spec, workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "sweep.csv")
    write_csv(path, rows)
    failures = [r for r in rows[1:] if r[-1]]
    if failures:
        print(f"{len(failures)} of {spec.size} combinations failed", file=sys.stderr)
    print(path)
    return 0 if ok else 1


def cmd_figure_data(args) -> int:
    cfg, base = _load(args)
    paths = figure_data(args.which, args.out, cfg, base)
    for path in paths.values():
        print(path)
    return 0


def cmd_run(args) -> int:
    cfg, base = _load(args)
    cfg = replace(cfg, payload=args.payload)
    gait = replace(
        base,
        stride_len=args.stride,
        frequency=args.freq,
        duty=args.duty,
        gait=GaitType(args.gait),
        turn=args.turn,
    )
    report = run_episode(
        cfg, gait, args.duration,
        seed=args.seed,
        channel=_channel_from(args),
        record_trace=args.trace is not None,
    )
    payload = report.to_json_dict()
    payload.pop("trace", None)
    text = json.dumps(payload, indent=2)
    if args.out == "-":
        print(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(args.out)
    if args.trace is not None:
        write_csv(args.trace, trace_csv_rows(report))
        print(args.trace)
    return 0


def cmd_metrics(args) -> int:
    cfg, _ = _load(args)
    with open(args.report, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    v_ss = report["v_ss"]
    payload = report["params"]["payload"]
    mass_total = report.get("mass_total", cfg.mass + payload)
    ns = normalized_speed(v_ss, cfg.body_len)
    np_ = normalized_payload(payload, cfg.mass)
    try:
        cot = cost_of_transport(
            report["bus_voltage"], report["mean_current"], mass_total, v_ss
        )
    except ZeroVelocity:
        cot = None
    row = {
        "ground_velocity": v_ss,
        "normalized_speed": ns,
        "turning_rate": report.get("yaw_rate", 0.0),
        "max_payload": payload,
        "normalized_payload": np_,
        "normalized_workload": normalized_workload(ns, np_),
        "cot": cot,
    }
    if args.format == "json":
        print(json.dumps(row, indent=2))
    else:
        print(",".join(row))
        print(",".join(fmt(v) for v in row.values()))
    return 0


def cmd_linkdump(args) -> int:
    cfg, base = _load(args)
    model = ChannelModel(
        drop_prob=args.drop,
        latency_ticks=args.latency_ticks,
        jitter_ticks=args.jitter_ticks,
        seed=args.seed,
    )
    channel = Channel(model)
    receiver = Receiver(params=cfg.act)
    n = samples_for_frequency(base.frequency)
    from .gait import gait_joint_schedule

    schedule = gait_joint_schedule(cfg.geom, base, n)
    frames = stream_frames(
        (schedule.targets_at(k) for k in range(args.ticks)), cfg.act
    )
    for tick in range(args.ticks):
        frame = next(frames)
        data = encode_command(frame)
        before = channel.dropped
        channel.submit(data, tick)
        print(f"[{tick:05d}] send seq={frame.seq:5d} mode={frame.mode.name:7s} "
              f"{frame_to_hex(data)}")
        if channel.dropped > before:
            print(f"[{tick:05d}]   dropped by channel")
        for payload in channel.poll(tick):
            decoded = decode_command(payload)
            accepted = receiver.apply(decoded)
            verdict = "apply " if accepted else "reject"
            print(f"[{tick:05d}]   {verdict} seq={decoded.seq:5d} "
                  f"positions={decoded.positions}")
    print(f"sent={channel.submitted} dropped={channel.dropped} "
          f"delivered={channel.delivered} applied={receiver.applied} "
          f"stale={receiver.rejected_stale}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    cfg, base = _load(args)
    model = ChannelModel(
        drop_prob=args.drop,
        latency_ticks=args.latency_ticks,
        jitter_ticks=args.jitter_ticks,
        seed=args.seed,
    )
    session = TeleopSession(cfg, base, model)
    static_dir = args.static if args.static and os.path.isdir(args.static) else None
    print(f"serving on http://{args.host}:{args.port} "
          f"(drop={args.drop}, fast={args.fast})", file=sys.stderr)
    serve(session, args.host, args.port, fast=args.fast, static_dir=static_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microquad",
        description="Desk-scale quadruped twin: kinematics, gaits, lossy link, "
                    "simulator, metrics, teleop.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="cartesian gait-parameter sweep to CSV")
    p.add_argument("--stride", default="0.01,0.02,0.03")
    p.add_argument("--freq", default="0.5,1,2")
    p.add_argument("--duty", default="0.5")
    p.add_argument("--gait", default="trot")
    p.add_argument("--payload", default="0")
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure-data", help="regenerate plot source data")
    p.add_argument("--which", choices=("workspace", "gaitplot", "sweep"),
                   required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_figure_data)

    p = sub.add_parser("run", help="single headless episode -> report JSON")
    p.add_argument("--stride", type=float, default=0.03)
    p.add_argument("--freq", type=float, default=1.0)
    p.add_argument("--duty", type=float, default=0.5)
    p.add_argument("--gait", default="trot")
    p.add_argument("--turn", type=float, default=0.0)
    p.add_argument("--payload", type=float, default=0.0)
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--trace", help="also write a trace CSV to this path")
    p.add_argument("--config")
    p.add_argument("--out", default="-")
    _add_channel_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("metrics", help="episode report JSON -> metrics row")
    p.add_argument("--report", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--config")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("linkdump", help="print streamed frames as hex + fields")
    p.add_argument("--ticks", type=int, default=20)
    p.add_argument("--config")
    _add_channel_flags(p)
    p.set_defaults(func=cmd_linkdump)

    p = sub.add_parser("serve", help="live teleoperation server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--config")
    p.add_argument("--fast", action="store_true",
                   help="run unpaced instead of wall-clock 200 Hz")
    p.add_argument("--static", default="frontend/dist",
                   help="directory of cockpit assets to serve at /")
    _add_channel_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
