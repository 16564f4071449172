"""Run configuration: validation, JSON round-trip, and wiring into the engine.

Every rejected configuration names the offending field. The environment
variable ``LCM_ARENA_SEED`` overrides both the scheduler and the frame
seed, for reproducing a whole batch under one seed.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from .algorithms import AlgorithmSpec, get_algorithm
from .engine import FrameMode, FramePolicy
from .errors import ArenaError, ConfigError
from .models import ModelKind, Visibility, can_execute
from .problems import ProblemInstance, gen_ae, gen_eqosc, gen_rendezvous
from .scheduling import (
    AlternatingTerminals,
    FsynchAll,
    Interactive,
    RandomFair,
    RoundRobinSingleton,
    SchedulerStrategy,
    Scripted,
)

ENV_SEED = "LCM_ARENA_SEED"

PROBLEMS = ("eqosc", "ae", "rendezvous")
SCHEDULERS = ("fsynch", "round-robin", "random-fair", "alt-terminals", "scripted", "interactive")


@dataclass(frozen=True)
class RunConfig:
    problem: str
    algo: str
    model: str
    sched: str = "fsynch"
    params: Mapping[str, Any] = field(default_factory=dict)
    sched_seed: int = 0
    sched_window: int | None = None
    script: tuple[tuple[int, ...], ...] | None = None
    terminals: tuple[int, int] | None = None
    frames: str = "identity"
    frame_seed: int = 0
    horizon: int | None = None
    osc_window: int = 8

    def to_json(self) -> dict:
        out = {
            "problem": self.problem,
            "algo": self.algo,
            "model": self.model,
            "sched": self.sched,
            "params": dict(self.params),
            "sched_seed": self.sched_seed,
            "frames": self.frames,
            "frame_seed": self.frame_seed,
            "osc_window": self.osc_window,
        }
        if self.sched_window is not None:
            out["sched_window"] = self.sched_window
        if self.script is not None:
            out["script"] = [list(s) for s in self.script]
        if self.terminals is not None:
            out["terminals"] = list(self.terminals)
        if self.horizon is not None:
            out["horizon"] = self.horizon
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "RunConfig":
        known = {
            "problem", "algo", "model", "sched", "params", "sched_seed",
            "sched_window", "script", "terminals", "frames", "frame_seed",
            "horizon", "osc_window",
        }
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown configuration field")
        for key in ("problem", "algo", "model"):
            if key not in data:
                raise ConfigError(key, "required field missing")
        script = data.get("script")
        terminals = data.get("terminals")
        return cls(
            problem=str(data["problem"]),
            algo=str(data["algo"]),
            model=str(data["model"]),
            sched=str(data.get("sched", "fsynch")),
            params=dict(data.get("params", {})),
            sched_seed=int(data.get("sched_seed", 0)),
            sched_window=None if data.get("sched_window") is None else int(data["sched_window"]),
            script=None if script is None else tuple(tuple(int(i) for i in s) for s in script),
            terminals=None if terminals is None else (int(terminals[0]), int(terminals[1])),
            frames=str(data.get("frames", "identity")),
            frame_seed=int(data.get("frame_seed", 0)),
            horizon=None if data.get("horizon") is None else int(data["horizon"]),
            osc_window=int(data.get("osc_window", 8)),
        )


@dataclass(frozen=True)
class BuiltRun:
    instance: ProblemInstance
    algorithm: AlgorithmSpec
    scheduler: SchedulerStrategy
    run_model: ModelKind
    frames: FramePolicy


def _param(params: Mapping[str, Any], name: str, field_name: str) -> float:
    if name not in params:
        raise ConfigError(field_name, f"problem parameter {name!r} is required")
    try:
        return float(params[name])
    except (TypeError, ValueError):
        raise ConfigError(field_name, f"parameter {name!r} must be a number") from None


def build_instance(cfg: RunConfig) -> ProblemInstance:
    params = cfg.params
    horizon = cfg.horizon if cfg.horizon is not None else 200
    if horizon < 1:
        raise ConfigError("horizon", "must be at least 1")
    try:
        if cfg.problem == "eqosc":
            vis = None
            if str(params.get("vis", "limited")) == "full":
                vis = Visibility.full()
            v_r = params.get("vr")
            return gen_eqosc(
                _param(params, "d", "params.d"),
                None if v_r is None else float(v_r),
                vis=vis,
                horizon=horizon,
                osc_window=cfg.osc_window,
            )
        if cfg.problem == "ae":
            vis_kind = str(params.get("vis", "full"))
            if vis_kind not in ("full", "limited"):
                raise ConfigError("params.vis", "must be 'full' or 'limited'")
            epsilon = params.get("epsilon")
            if vis_kind == "limited" and epsilon is None:
                raise ConfigError("params.epsilon", "limited-gap visibility requires epsilon")
            if vis_kind == "full":
                epsilon = None
            return gen_ae(
                _param(params, "theta1", "params.theta1"),
                _param(params, "theta2", "params.theta2"),
                _param(params, "ab", "params.ab"),
                _param(params, "bc", "params.bc"),
                _param(params, "cd", "params.cd"),
                side=str(params.get("side", "same")),
                epsilon=None if epsilon is None else float(epsilon),
                horizon=horizon,
            )
        if cfg.problem == "rendezvous":
            return gen_rendezvous(_param(params, "d0", "params.d0"), horizon=horizon)
    except ConfigError:
        raise
    except ArenaError as e:
        raise ConfigError("params", str(e)) from e
    raise ConfigError("problem", f"unknown problem {cfg.problem!r}; available: {', '.join(PROBLEMS)}")


def build(cfg: RunConfig) -> BuiltRun:
    """Validate the whole configuration and construct the run components."""
    instance = build_instance(cfg)

    try:
        algorithm = get_algorithm(cfg.algo)
    except ArenaError as e:
        raise ConfigError("algo", str(e)) from e

    try:
        run_model = ModelKind(cfg.model)
    except ValueError:
        raise ConfigError(
            "model", f"unknown model {cfg.model!r}; available: {', '.join(m.value for m in ModelKind)}"
        ) from None
    if not can_execute(run_model, algorithm.native_model):
        raise ConfigError(
            "model",
            f"{cfg.algo} is written for {algorithm.native_model.value}; "
            f"{run_model.value} robots cannot execute it",
        )
    if run_model is ModelKind.OBLOT and len(algorithm.palette.colors) != 1:
        raise ConfigError("model", f"oblot admits a single color, {cfg.algo} uses more")

    env_seed = os.environ.get(ENV_SEED)
    sched_seed = int(env_seed) if env_seed is not None else cfg.sched_seed
    frame_seed = int(env_seed) if env_seed is not None else cfg.frame_seed

    n = len(instance.initial.robots)
    if cfg.sched == "fsynch":
        scheduler: SchedulerStrategy = FsynchAll()
    elif cfg.sched == "round-robin":
        scheduler = RoundRobinSingleton()
    elif cfg.sched == "random-fair":
        window = cfg.sched_window if cfg.sched_window is not None else 2 * n
        if window < 1:
            raise ConfigError("sched_window", "must be at least 1")
        scheduler = RandomFair(sched_seed, window)
    elif cfg.sched == "alt-terminals":
        terminals = cfg.terminals
        if terminals is None:
            inferred = instance.params.get("terminals")
            if inferred is None:
                raise ConfigError("terminals", "alt-terminals needs two robot indices")
            terminals = (int(inferred[0]), int(inferred[1]))
        for i in terminals:
            if not 0 <= i < n:
                raise ConfigError("terminals", f"index {i} out of range for {n} robots")
        scheduler = AlternatingTerminals(*terminals)
    elif cfg.sched == "scripted":
        if not cfg.script:
            raise ConfigError("script", "scripted scheduler needs a schedule")
        scheduler = Scripted(cfg.script)
    elif cfg.sched == "interactive":
        scheduler = Interactive()
    else:
        raise ConfigError(
            "sched", f"unknown scheduler {cfg.sched!r}; available: {', '.join(SCHEDULERS)}"
        )

    try:
        mode = FrameMode(cfg.frames)
    except ValueError:
        raise ConfigError(
            "frames",
            f"unknown frame mode {cfg.frames!r}; available: {', '.join(m.value for m in FrameMode)}",
        ) from None
    frames = FramePolicy(mode, frame_seed)

    return BuiltRun(instance, algorithm, scheduler, run_model, frames)


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"invalid JSON: {e}") from e
    return RunConfig.from_json(data)


def degrees_to_radians(value: float) -> float:
    return value * math.pi / 180.0
