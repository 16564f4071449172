"""The deterministic round loop.

Each round: the scheduler picks an activation set; every activated robot
gets a frame from the frame policy, takes its snapshot from the round-start
configuration, and computes a decision; then all movements happen
simultaneously, light writes commit, and the monitor judges the new
boundary. Everything is a pure function of the inputs and the recorded
seeds, so traces replay bit-for-bit.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .algorithms import AlgorithmSpec, Decision
from .errors import CapabilityError, ConfigError, InsufficientInformation, ProtocolError
from .geometry import ORIGIN, Frame, MotionSegment, Point, min_separation, to_global
from .models import (
    Configuration,
    ModelKind,
    RobotState,
    Visibility,
    apply_light_write,
    build_snapshot,
    can_execute,
)
from .problems import (
    COLLISION_TOL,
    Monitor,
    ProblemInstance,
    Verdict,
    monitor_for,
)
from .scheduling import FairnessReport, SchedulerStrategy, fairness_check, validate_activation


class FrameMode(Enum):
    IDENTITY = "identity"
    FIXED_PER_ROBOT = "fixed"
    FRESH_PER_ACTIVATION = "fresh"


def _seeded_rng(seed: int, *key: int) -> random.Random:
    # stable across platforms and processes, independent of iteration order
    material = ":".join(str(k) for k in (seed, *key)).encode()
    return random.Random(int.from_bytes(hashlib.sha256(material).digest()[:8], "big"))


@dataclass(frozen=True)
class FramePolicy:
    """How the adversary assigns local frames to activated robots.

    Generated frames are random isometries (rotation plus possible
    reflection) anchored at the robot's position; IDENTITY uses the global
    frame and is the default for reproducible desk runs.
    """

    mode: FrameMode = FrameMode.IDENTITY
    seed: int = 0

    def frame_for(self, robot: int, round_: int, origin: Point) -> Frame:
        if self.mode is FrameMode.IDENTITY:
            return Frame(origin)
        if self.mode is FrameMode.FIXED_PER_ROBOT:
            rng = _seeded_rng(self.seed, robot)
        else:
            rng = _seeded_rng(self.seed, robot, round_)
        return Frame(
            origin,
            rotation=rng.uniform(0.0, 2.0 * math.pi),
            reflected=rng.random() < 0.5,
        )


@dataclass(frozen=True)
class DecisionRecord:
    robot: int
    dest: Point  # local frame
    light: str  # effective light after the round


@dataclass(frozen=True)
class TraceEvent:
    round: int
    activated: tuple[int, ...]
    before: Configuration
    after: Configuration
    decisions: tuple[DecisionRecord, ...]
    motions: tuple[MotionSegment, ...]  # one per robot, static segments included
    info_failures: tuple[int, ...]
    verdict: Verdict

    def to_record(self) -> dict:
        """The five-field trace schema (see traces module for the line format)."""
        return {
            "round": self.round,
            "activated": list(self.activated),
            "robots": [
                {"pos": [r.pos.x, r.pos.y], "light": r.light} for r in self.after.robots
            ],
            "decisions": [
                {"robot": d.robot, "dest": [d.dest.x, d.dest.y], "light": d.light}
                for d in self.decisions
            ],
            "verdict": self.verdict.encode(),
        }


@dataclass(frozen=True)
class RunResult:
    verdict: Verdict
    events: tuple[TraceEvent, ...]
    fairness: FairnessReport

    @property
    def history(self) -> tuple[Configuration, ...]:
        if not self.events:
            return ()
        return (self.events[0].before,) + tuple(e.after for e in self.events)


class SimulationRun:
    """One owned, strictly sequential run: problem, algorithm, model, frames.

    Drives :func:`step` round by round; the interactive server advances it
    one wire message at a time while :func:`run` loops a scheduler over it.
    """

    def __init__(
        self,
        instance: ProblemInstance,
        algorithm: AlgorithmSpec,
        run_model: ModelKind,
        frames: FramePolicy = FramePolicy(),
        monitor: Monitor | None = None,
        horizon: int | None = None,
    ):
        if not can_execute(run_model, algorithm.native_model):
            raise ConfigError(
                "model",
                f"{run_model.value} robots cannot execute {algorithm.name} "
                f"(written for {algorithm.native_model.value})",
            )
        if run_model is ModelKind.OBLOT and len(algorithm.palette.colors) != 1:
            raise ConfigError(
                "model", f"oblivious robots admit a single color, {algorithm.name} uses more"
            )
        self.instance = instance
        self.algorithm = algorithm
        self.run_model = run_model
        self.frames = frames
        self.horizon = instance.horizon if horizon is None else horizon
        self.monitor = monitor if monitor is not None else monitor_for(instance)
        start = Configuration(
            tuple(
                RobotState(r.ident, r.pos, algorithm.palette.initial)
                for r in instance.initial.robots
            ),
            round=0,
        )
        self.config = start
        self.history: list[Configuration] = [start]
        self.events: list[TraceEvent] = []
        self.verdict: Verdict = self.monitor.judge([start], [], [])

    @property
    def round(self) -> int:
        return self.config.round

    @property
    def finished(self) -> bool:
        return self.verdict.terminal or self.round >= self.horizon

    def advance(self, activation: Iterable[int], _order: Sequence[int] | None = None) -> TraceEvent:
        if self.finished:
            raise ProtocolError("run already finished")
        act = validate_activation(activation, len(self.config))
        config, event = step(
            self.config,
            act,
            model=self.run_model,
            vis=self.instance.vis,
            algorithm=self.algorithm,
            frames=self.frames,
            monitor=self.monitor,
            history=self.history,
            past_motions=[e.motions for e in self.events],
            past_info=[e.info_failures for e in self.events],
            _order=_order,
        )
        self.config = config
        self.history.append(config)
        self.events.append(event)
        self.verdict = event.verdict
        return event

    def result(self, fairness_window: int | None = None) -> RunResult:
        n = len(self.config)
        window = fairness_window if fairness_window is not None else 2 * n
        fairness = fairness_check([e.activated for e in self.events], n, window)
        return RunResult(self.verdict, tuple(self.events), fairness)


def step(
    config: Configuration,
    act: frozenset,
    *,
    model: ModelKind,
    vis: Visibility,
    algorithm: AlgorithmSpec,
    frames: FramePolicy,
    monitor: Monitor,
    history: Sequence[Configuration] | None = None,
    past_motions: Sequence[Sequence[MotionSegment]] | None = None,
    past_info: Sequence[Sequence[int]] | None = None,
    _order: Sequence[int] | None = None,
) -> tuple[Configuration, TraceEvent]:
    """Execute one synchronous round and judge the resulting boundary.

    All snapshots are taken from the round-start configuration before any
    movement, so the outcome does not depend on the iteration order over the
    activated robots (``_order`` exists so tests can assert exactly that).
    Snapshots are filtered at the algorithm's native model: a stronger run
    model executes a weaker algorithm by discarding what the algorithm may
    not use.
    """
    act = validate_activation(act, len(config))
    order = list(_order) if _order is not None else sorted(act)
    if frozenset(order) != act:
        raise ProtocolError("iteration order must cover exactly the activated robots")

    decisions: dict[int, Decision] = {}
    global_dest: dict[int, Point] = {}
    info_failures: list[int] = []
    for i in order:
        me = config.robots[i]
        frame = frames.frame_for(i, config.round, me.pos)
        snap = build_snapshot(config, i, algorithm.native_model, vis, frame)
        try:
            decision = algorithm.fn(snap)
        except InsufficientInformation:
            info_failures.append(i)
            decision = Decision(ORIGIN, None)
        except CapabilityError as e:
            raise CapabilityError(f"robot {i}: {e}") from e
        decisions[i] = decision
        global_dest[i] = to_global(frame, decision.dest)

    motions = tuple(
        MotionSegment(r.pos, global_dest.get(i, r.pos))
        for i, r in enumerate(config.robots)
    )
    moved = Configuration(
        tuple(
            RobotState(r.ident, motions[i].end, r.light)
            for i, r in enumerate(config.robots)
        ),
        round=config.round,
    )
    for i in sorted(act):
        light = decisions[i].light
        if light is not None:
            try:
                moved = apply_light_write(moved, i, light, model, algorithm.palette)
            except (CapabilityError, ProtocolError) as e:
                raise type(e)(f"robot {i}: {e}") from e
    after = Configuration(moved.robots, round=config.round + 1)

    records = tuple(
        DecisionRecord(i, decisions[i].dest, after.robots[i].light) for i in sorted(act)
    )
    full_history = list(history) if history is not None else [config]
    full_history.append(after)
    all_motions = list(past_motions) if past_motions is not None else []
    all_motions.append(motions)
    all_info = list(past_info) if past_info is not None else []
    all_info.append(tuple(info_failures))
    verdict = monitor.judge(full_history, all_motions, all_info)

    event = TraceEvent(
        round=config.round,
        activated=tuple(sorted(act)),
        before=config,
        after=after,
        decisions=records,
        motions=motions,
        info_failures=tuple(info_failures),
        verdict=verdict,
    )
    return after, event


def run(
    instance: ProblemInstance,
    algorithm: AlgorithmSpec,
    scheduler: SchedulerStrategy,
    run_model: ModelKind,
    frames: FramePolicy = FramePolicy(),
    *,
    horizon: int | None = None,
    monitor: Monitor | None = None,
    fairness_window: int | None = None,
) -> RunResult:
    """Iterate rounds until the monitor goes terminal or the horizon is reached."""
    sim = SimulationRun(instance, algorithm, run_model, frames, monitor, horizon)
    n = len(sim.config)
    while not sim.finished:
        sim.advance(scheduler.next_activation(sim.round, n))
    return sim.result(fairness_window)


@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    round: int | None = None
    field: str | None = None
    detail: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def replay(
    records: Sequence[Mapping],
    instance: ProblemInstance,
    algorithm: AlgorithmSpec,
    run_model: ModelKind,
    frames: FramePolicy = FramePolicy(),
    *,
    horizon: int | None = None,
) -> ReplayReport:
    """Re-execute a recorded trace and compare every field bit-for-bit.

    The activation sets are read off the trace itself; everything else must
    be supplied exactly as in the original run (same seeds, same instance).
    """
    sim = SimulationRun(instance, algorithm, run_model, frames, horizon=horizon)
    for expected in records:
        if sim.finished:
            return ReplayReport(False, expected["round"], "round", "run ended before trace did")
        event = sim.advance(expected["activated"])
        got = event.to_record()
        for field in ("round", "activated", "robots", "decisions", "verdict"):
            if got[field] != expected[field]:
                return ReplayReport(
                    False,
                    event.round,
                    field,
                    f"expected {expected[field]!r}, replayed {got[field]!r}",
                )
    # a trace may be the prefix of a still-running session; matching every
    # recorded event is the whole contract
    return ReplayReport(True)


def collision_audit(
    events: Sequence[TraceEvent], threshold: float = COLLISION_TOL
) -> list[tuple[int, tuple[int, int], float]]:
    """Every pair of robots whose simultaneous motions came within ``threshold``."""
    findings = []
    for e in events:
        n = len(e.motions)
        for i in range(n):
            for j in range(i + 1, n):
                sep = min_separation(e.motions[i], e.motions[j])
                if sep <= threshold:
                    findings.append((e.round, (i, j), sep))
    return findings
