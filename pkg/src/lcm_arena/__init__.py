"""Deterministic simulator for look-compute-move mobile-robot systems.

Robots are anonymous points in the plane running synchronous
look-compute-move cycles under one of four capability models (oblivious,
internal light, external light, full light), with full or limited
visibility, driven by fully or semi-synchronous schedulers, including the
adversaries that separate those settings. Runs are judged by problem
monitors and recorded as replayable JSONL traces.
"""

__version__ = "0.1.0"

from .algorithms import Decision, RoleView, classify_role, get_algorithm
from .engine import FrameMode, FramePolicy, RunResult, SimulationRun, collision_audit, replay, run, step
from .geometry import Frame, MotionSegment, Point, Side, distance, min_separation
from .models import (
    Configuration,
    ModelKind,
    Palette,
    RobotState,
    Snapshot,
    SnapshotEntry,
    Visibility,
    build_snapshot,
    is_connected,
    visibility_graph,
)
from .problems import (
    ProblemInstance,
    Verdict,
    VerdictKind,
    gen_ae,
    gen_eqosc,
    gen_rendezvous,
)
from .scheduling import (
    AlternatingTerminals,
    FairnessReport,
    FsynchAll,
    Interactive,
    RandomFair,
    RoundRobinSingleton,
    SchedulerStrategy,
    Scripted,
    fairness_check,
)

__all__ = [
    "__version__",
    "Decision",
    "RoleView",
    "classify_role",
    "get_algorithm",
    "FrameMode",
    "FramePolicy",
    "RunResult",
    "SimulationRun",
    "collision_audit",
    "replay",
    "run",
    "step",
    "Frame",
    "MotionSegment",
    "Point",
    "Side",
    "distance",
    "min_separation",
    "Configuration",
    "ModelKind",
    "Palette",
    "RobotState",
    "Snapshot",
    "SnapshotEntry",
    "Visibility",
    "build_snapshot",
    "is_connected",
    "visibility_graph",
    "ProblemInstance",
    "Verdict",
    "VerdictKind",
    "gen_ae",
    "gen_eqosc",
    "gen_rendezvous",
    "AlternatingTerminals",
    "FairnessReport",
    "FsynchAll",
    "Interactive",
    "RandomFair",
    "RoundRobinSingleton",
    "SchedulerStrategy",
    "Scripted",
    "fairness_check",
]
