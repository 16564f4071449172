"""Command-line front end: run, matrix, replay, serve."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .config import RunConfig, build, degrees_to_radians, load_config
from .engine import replay as engine_replay
from .engine import run as engine_run
from .errors import ArenaError, ConfigError
from .matrix import render_table, run_matrix
from .traces import load_schedule, load_trace, write_trace


def _add_run_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run-config file; flags override nothing when given")
    p.add_argument("--problem", choices=("eqosc", "ae", "rendezvous"))
    p.add_argument("--algo", help="algorithm name (eo-sta, eo-com, ae-fv, rv-mid, null)")
    p.add_argument("--model", choices=("oblot", "fsta", "fcom", "lumi"))
    p.add_argument(
        "--sched",
        choices=("fsynch", "round-robin", "random-fair", "alt-terminals", "scripted"),
        default="fsynch",
    )
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--sched-seed", type=int, default=0)
    p.add_argument("--frame-seed", type=int, default=0)
    p.add_argument("--window", type=int, default=None, help="random-fair fairness window")
    p.add_argument("--schedule", help="schedule file for --sched scripted")
    p.add_argument("--terminals", help="two indices for alt-terminals, e.g. 0,2")
    p.add_argument("--frames", choices=("identity", "fixed", "fresh"), default="identity")
    # problem parameters
    p.add_argument("--d", type=float, help="eqosc terminal distance")
    p.add_argument("--vr", type=float, help="eqosc visibility radius (default 7d/6)")
    p.add_argument("--osc-window", type=int, default=8, help="eqosc oscillation window")
    p.add_argument("--theta1", type=float, help="ae smaller angle, degrees")
    p.add_argument("--theta2", type=float, help="ae larger angle, degrees")
    p.add_argument("--ab", type=float, help="ae endpoint arm |AB|")
    p.add_argument("--bc", type=float, help="ae base |BC|")
    p.add_argument("--cd", type=float, help="ae endpoint arm |CD|")
    p.add_argument("--side", choices=("same", "opposite"), default="same")
    p.add_argument("--vis", choices=("full", "limited"), help="visibility regime")
    p.add_argument("--epsilon", type=float, help="ae limited-gap slack over |BC|")
    p.add_argument("--d0", type=float, help="rendezvous starting distance")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config:
        return load_config(args.config)
    if not args.problem:
        raise ConfigError("problem", "required (or pass --config)")
    if not args.algo:
        raise ConfigError("algo", "required (or pass --config)")
    if not args.model:
        raise ConfigError("model", "required (or pass --config)")
    params: dict = {}
    if args.problem == "eqosc":
        if args.d is None:
            raise ConfigError("d", "eqosc needs --d")
        params["d"] = args.d
        if args.vr is not None:
            params["vr"] = args.vr
        if args.vis is not None:
            params["vis"] = args.vis
    elif args.problem == "ae":
        for name in ("theta1", "theta2", "ab", "bc", "cd"):
            if getattr(args, name) is None:
                raise ConfigError(name, f"ae needs --{name}")
        params.update(
            theta1=degrees_to_radians(args.theta1),
            theta2=degrees_to_radians(args.theta2),
            ab=args.ab,
            bc=args.bc,
            cd=args.cd,
            side=args.side,
        )
        if args.vis is not None:
            params["vis"] = args.vis
        if args.epsilon is not None:
            params["epsilon"] = args.epsilon
    elif args.problem == "rendezvous":
        if args.d0 is None:
            raise ConfigError("d0", "rendezvous needs --d0")
        params["d0"] = args.d0

    script = None
    if args.sched == "scripted":
        if not args.schedule:
            raise ConfigError("schedule", "scripted scheduler needs --schedule FILE")
        script = tuple(tuple(s) for s in load_schedule(args.schedule))
    terminals = None
    if args.terminals:
        try:
            a, b = (int(x) for x in args.terminals.split(","))
        except ValueError:
            raise ConfigError("terminals", "expected two comma-separated indices") from None
        terminals = (a, b)

    return RunConfig(
        problem=args.problem,
        algo=args.algo,
        model=args.model,
        sched=args.sched,
        params=params,
        sched_seed=args.sched_seed,
        sched_window=args.window,
        script=script,
        terminals=terminals,
        frames=args.frames,
        frame_seed=args.frame_seed,
        horizon=args.horizon,
        osc_window=args.osc_window,
    )


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    built = build(cfg)
    result = engine_run(
        built.instance, built.algorithm, built.scheduler, built.run_model, built.frames
    )
    write_trace(args.trace, (e.to_record() for e in result.events))

    print(f"verdict: {result.verdict.encode()}")
    gaps = ", ".join(f"r{i}={g}" for i, g in enumerate(result.fairness.max_gaps))
    fair = "fair" if result.fairness.ok else "NOT fair"
    print(f"fairness: {fair} within window {result.fairness.window} (max gaps {gaps})")
    if not result.fairness.ok and cfg.sched in ("scripted", "alt-terminals"):
        print("warning: adversarial schedule is a finite prefix; fairness not enforced")
    final = result.events[-1].after if result.events else built.instance.initial
    print(f"rounds executed: {len(result.events)}")
    print("final configuration:")
    for i, r in enumerate(final.robots):
        print(f"  robot {i}: pos=({r.pos.x:.12g}, {r.pos.y:.12g}) light={r.light}")
    print(f"trace written to {args.trace}")
    return 0


def _cmd_matrix(args: argparse.Namespace) -> int:
    cells = run_matrix()
    if args.json:
        payload = [
            {
                "id": c.result_id,
                "relation": c.relation,
                "ok": c.ok,
                "witnesses": [
                    {
                        "label": w.label,
                        "expected": w.expected.value,
                        "observed": w.observed.encode() if w.observed else None,
                        "ok": w.ok,
                    }
                    for w in c.witnesses
                ],
            }
            for c in cells
        ]
        print(json.dumps(payload, indent=2))
    else:
        print(render_table(cells))
    return 0 if all(c.ok for c in cells) else 1


def _cmd_replay(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    built = build(cfg)
    records = load_trace(args.trace)
    report = engine_replay(
        records,
        built.instance,
        built.algorithm,
        built.run_model,
        built.frames,
        horizon=built.instance.horizon,
    )
    if report.ok:
        print(f"replay identical over {len(records)} rounds")
        return 0
    print(f"replay diverged at round {report.round}, field {report.field}: {report.detail}")
    return 1


def _cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    return serve(args.host, args.port)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lcm-arena",
        description="Deterministic look-compute-move robot simulator "
        "(angles on the command line are degrees)",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one simulation and write its trace")
    _add_run_config_flags(p_run)
    p_run.add_argument("--trace", default="trace.jsonl", help="output trace path")
    p_run.set_defaults(fn=_cmd_run)

    p_matrix = sub.add_parser("matrix", help="run the 16 separation witnesses")
    p_matrix.add_argument("--json", action="store_true", help="machine-readable output")
    p_matrix.set_defaults(fn=_cmd_matrix)

    p_replay = sub.add_parser("replay", help="re-execute a trace and compare bit-for-bit")
    _add_run_config_flags(p_replay)
    p_replay.add_argument("--trace", required=True, help="trace file to replay")
    p_replay.set_defaults(fn=_cmd_replay)

    p_serve = sub.add_parser("serve", help="host interactive adversary sessions")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8736)
    p_serve.set_defaults(fn=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except ArenaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
