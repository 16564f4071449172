"""Problem instances and runtime monitors.

Generators enforce each problem's visibility constraints at construction
time and refuse geometrically broken instances. Monitors are deterministic
folds over a run's history that turn the problem conditions into verdicts;
they are omniscient (they may use fixed robot identities), unlike the
anonymous algorithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Protocol, Sequence

from .errors import ConstraintError, PreconditionError
from .geometry import (
    GEOM_TOL,
    MotionSegment,
    Point,
    Side,
    acute_angle_at,
    distance,
    min_separation,
    point_at_angle,
)
from .models import Configuration, Visibility, is_connected, make_configuration, visibility_graph

#: Two robots collide when their motions come at least this close.
COLLISION_TOL = 1e-9
#: Rendezvous counts as met only when positions agree this tightly.
MEET_TOL = 1e-12


class VerdictKind(Enum):
    RUNNING = "RUNNING"
    SOLVED = "SOLVED"
    SAFETY_VIOLATION = "SAFETY_VIOLATION"
    LIVENESS_STALL = "LIVENESS_STALL"
    INSUFFICIENT_INFO = "INSUFFICIENT_INFO"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    round: int | None = None
    reason: str | None = None

    @property
    def terminal(self) -> bool:
        return self.kind is not VerdictKind.RUNNING

    def encode(self) -> str:
        if self.kind is VerdictKind.RUNNING:
            return "RUNNING"
        s = f"{self.kind.value}@{self.round}"
        if self.reason:
            s += f":{self.reason}"
        return s

    @classmethod
    def decode(cls, text: str) -> "Verdict":
        if text == "RUNNING":
            return RUNNING
        head, _, reason = text.partition(":")
        kind_name, _, round_str = head.partition("@")
        return cls(VerdictKind(kind_name), int(round_str), reason or None)


RUNNING = Verdict(VerdictKind.RUNNING)


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    initial: Configuration
    vis: Visibility
    params: Mapping[str, object] = field(default_factory=dict)
    horizon: int = 200
    osc_window: int = 8


def _check_connected(config: Configuration, vis: Visibility) -> None:
    if not is_connected(visibility_graph(config, vis)):
        raise ConstraintError("initial visibility graph must be connected")


def gen_eqosc(
    d: float,
    v_r: float | None = None,
    *,
    vis: Visibility | None = None,
    horizon: int = 200,
    osc_window: int = 8,
) -> ProblemInstance:
    """Three collinear robots: terminals at distance d either side of a middle robot.

    The visibility radius must satisfy d < V_r < 4d/3 so that each terminal
    sees exactly the middle robot in both oscillation phases (after the near
    move the terminals are only 4d/3 apart). Defaults to the window
    midpoint V_r = 7d/6. Pass an explicit ``vis`` to override the regime
    entirely (e.g. full visibility for adversarial runs).
    """
    if not d > 0:
        raise ConstraintError(f"d must be positive, got {d}")
    if vis is None:
        if v_r is None:
            v_r = 7.0 * d / 6.0
        if not v_r > d:
            raise ConstraintError(
                f"visibility radius must exceed the terminal distance: need V_r > d, got {v_r} <= {d}"
            )
        if not v_r < 4.0 * d / 3.0:
            raise ConstraintError(
                "visibility radius too large: need V_r < 4d/3 or the terminals see "
                f"each other after the near move, got {v_r} >= {4.0 * d / 3.0}"
            )
        vis = Visibility.limited(v_r)
    elif v_r is not None:
        raise ConstraintError("pass either v_r or vis, not both")
    config = make_configuration([Point(-d, 0.0), Point(0.0, 0.0), Point(d, 0.0)])
    _check_connected(config, vis)
    return ProblemInstance(
        name="eqosc",
        initial=config,
        vis=vis,
        params={"d": d, "middle": 1, "terminals": (0, 2)},
        horizon=horizon,
        osc_window=osc_window,
    )


def gen_ae(
    theta1: float,
    theta2: float,
    ab: float,
    bc: float,
    cd: float,
    side: str = "same",
    epsilon: float | None = None,
    *,
    horizon: int = 200,
) -> ProblemInstance:
    """Four-robot chain with unequal acute angles at the inner segment's ends.

    Angles are radians with 0 < theta1 < theta2 < pi/2. With ``epsilon``
    the instance gets visibility radius bc + epsilon, and the generator
    verifies the chain stays connected while each endpoint is blind to the
    whole far half of the chain.
    """
    if not 0.0 < theta1:
        raise ConstraintError(f"theta1 must be positive, got {theta1}")
    if not theta1 < theta2:
        raise ConstraintError(f"need theta1 < theta2 strictly, got {theta1} >= {theta2}")
    if not theta2 < math.pi / 2:
        raise ConstraintError(f"theta2 must stay below pi/2, got {theta2}")
    for label, value in (("ab", ab), ("bc", bc), ("cd", cd)):
        if not value > 0:
            raise ConstraintError(f"{label} must be positive, got {value}")
    if side not in ("same", "opposite"):
        raise ConstraintError(f"side must be 'same' or 'opposite', got {side!r}")

    b = Point(0.0, 0.0)
    c = Point(bc, 0.0)
    a = point_at_angle(b, Point(-1.0, 0.0), theta1, ab, Side.LEFT)  # upper half-plane
    d_side = Side.RIGHT if side == "same" else Side.LEFT  # upper for 'same'
    d = point_at_angle(c, Point(bc + 1.0, 0.0), theta2, cd, d_side)

    if epsilon is None:
        vis = Visibility.full()
    else:
        if not epsilon > 0:
            raise ConstraintError(f"epsilon must be positive, got {epsilon}")
        v_r = bc + epsilon
        chain_edges = (("|AB|", distance(a, b)), ("|BC|", bc), ("|CD|", distance(c, d)))
        for label, value in chain_edges:
            if value > v_r:
                raise ConstraintError(
                    f"visibility gap requires {label} <= V_r, got {value:.6g} > {v_r:.6g}"
                )
        blind_pairs = (
            ("|AC|", distance(a, c)),
            ("|BD|", distance(b, d)),
            ("|AD|", distance(a, d)),
        )
        for label, value in blind_pairs:
            if value <= v_r:
                raise ConstraintError(
                    f"visibility gap requires {label} > V_r, got {value:.6g} <= {v_r:.6g}"
                )
        vis = Visibility.limited(v_r)

    config = make_configuration([a, b, c, d])
    _check_connected(config, vis)
    return ProblemInstance(
        name="ae",
        initial=config,
        vis=vis,
        params={
            "theta1": theta1,
            "theta2": theta2,
            "ab": ab,
            "bc": bc,
            "cd": cd,
            "side": side,
            "epsilon": epsilon,
            "endpoints": (0, 3),
            "fixed": (1, 2),
        },
        horizon=horizon,
    )


def gen_rendezvous(d0: float, *, horizon: int = 200) -> ProblemInstance:
    """Two mutually visible robots a distance d0 apart.

    With two robots a connected initial visibility graph means each sees the
    other, so the instance carries full-visibility semantics outright.
    """
    if not d0 > 0:
        raise ConstraintError(f"d0 must be positive, got {d0} (robots would already be met)")
    config = make_configuration([Point(0.0, 0.0), Point(d0, 0.0)])
    return ProblemInstance(
        name="rendezvous",
        initial=config,
        vis=Visibility.full(),
        params={"d0": d0},
        horizon=horizon,
    )


class Monitor(Protocol):
    """Judges a run after every round.

    ``history`` holds the configurations at boundaries 0..t; ``motions``
    and ``info`` hold, per executed round, every robot's motion segment and
    the robots that reported insufficient information.
    """

    def judge(
        self,
        history: Sequence[Configuration],
        motions: Sequence[Sequence[MotionSegment]],
        info: Sequence[Sequence[int]],
    ) -> Verdict: ...


def monitor_eqosc(
    history: Sequence[Configuration],
    window: int,
    *,
    middle: int = 1,
    d: float | None = None,
    tol: float = GEOM_TOL,
) -> Verdict:
    """Equidistance safety plus bounded-window oscillation liveness.

    Safety: at every boundary both terminals are equidistant from the
    middle robot and the middle robot has not moved. Liveness: the pose
    must flip between terminal distance d and 2d/3 within ``window`` rounds
    of the previous flip, judged over the horizon (the task itself never
    terminates).
    """
    if len(history[0]) != 3:
        raise PreconditionError(f"expected 3 robots, got {len(history[0])}")
    t0 = history[0]
    terminals = [i for i in range(3) if i != middle]
    a0 = t0.robots[middle].pos
    if d is None:
        d = distance(t0.robots[terminals[0]].pos, a0)
    near_d = 2.0 * d / 3.0

    anchor_is_near = False  # the initial pose has both terminals at distance d
    anchor_round = 0
    for t, cfg in enumerate(history):
        apos = cfg.robots[middle].pos
        if t > 0 and distance(apos, a0) > tol:
            return Verdict(VerdictKind.SAFETY_VIOLATION, t, "middle robot moved")
        dl = distance(cfg.robots[terminals[0]].pos, apos)
        dr = distance(cfg.robots[terminals[1]].pos, apos)
        if abs(dl - dr) > tol:
            return Verdict(
                VerdictKind.SAFETY_VIOLATION,
                t,
                f"equidistant condition violated ({dl:.6g} vs {dr:.6g})",
            )
        if t > 0:
            at_far = abs(dl - d) <= tol and abs(dr - d) <= tol
            at_near = abs(dl - near_d) <= tol and abs(dr - near_d) <= tol
            want_near = not anchor_is_near
            if at_near if want_near else at_far:
                anchor_is_near = want_near
                anchor_round = t
            if t - anchor_round >= window:
                return Verdict(VerdictKind.LIVENESS_STALL, t)
    return RUNNING


class EqOscMonitor:
    def __init__(self, instance: ProblemInstance, tol: float = GEOM_TOL):
        self.window = instance.osc_window
        self.middle = int(instance.params.get("middle", 1))
        self.d = float(instance.params["d"])
        self.tol = tol

    def judge(self, history, motions, info) -> Verdict:
        return monitor_eqosc(
            history, self.window, middle=self.middle, d=self.d, tol=self.tol
        )


def monitor_ae(
    history: Sequence[Configuration],
    instance: ProblemInstance,
    motions: Sequence[Sequence[MotionSegment]] = (),
    info: Sequence[Sequence[int]] = (),
    *,
    tol: float = GEOM_TOL,
    collision_tol: float = COLLISION_TOL,
) -> Verdict:
    """Solved when both endpoint angles reach theta2; safe while nothing collides
    and the inner robots stay fixed; insufficient information when the
    algorithm reported it."""
    if len(history[0]) != 4:
        raise PreconditionError(f"expected 4 robots, got {len(history[0])}")
    theta2 = float(instance.params["theta2"])
    ia, ib, ic, id_ = 0, 1, 2, 3
    b0 = history[0].robots[ib].pos
    c0 = history[0].robots[ic].pos
    ext_b = b0 + (b0 - c0)
    ext_c = c0 + (c0 - b0)

    for t, cfg in enumerate(history):
        if t > 0:
            if t - 1 < len(info) and info[t - 1]:
                return Verdict(
                    VerdictKind.INSUFFICIENT_INFO,
                    t,
                    f"robots {sorted(info[t - 1])} could not decide",
                )
            if t - 1 < len(motions):
                segs = motions[t - 1]
                for i in range(len(segs)):
                    for j in range(i + 1, len(segs)):
                        sep = min_separation(segs[i], segs[j])
                        if sep <= collision_tol:
                            return Verdict(
                                VerdictKind.SAFETY_VIOLATION,
                                t,
                                f"collision between robots {i} and {j}",
                            )
            for fixed, p0 in ((ib, b0), (ic, c0)):
                if distance(cfg.robots[fixed].pos, p0) > tol:
                    return Verdict(
                        VerdictKind.SAFETY_VIOLATION, t, f"fixed robot {fixed} moved"
                    )
            angle_a = acute_angle_at(b0, ext_b, cfg.robots[ia].pos)
            angle_d = acute_angle_at(c0, ext_c, cfg.robots[id_].pos)
            if abs(angle_a - theta2) <= tol and abs(angle_d - theta2) <= tol:
                return Verdict(VerdictKind.SOLVED, t)
    if len(history) - 1 >= instance.horizon:
        return Verdict(VerdictKind.LIVENESS_STALL, instance.horizon)
    return RUNNING


class AEMonitor:
    def __init__(
        self,
        instance: ProblemInstance,
        tol: float = GEOM_TOL,
        collision_tol: float = COLLISION_TOL,
    ):
        self.instance = instance
        self.tol = tol
        self.collision_tol = collision_tol

    def judge(self, history, motions, info) -> Verdict:
        return monitor_ae(
            history,
            self.instance,
            motions,
            info,
            tol=self.tol,
            collision_tol=self.collision_tol,
        )


def monitor_rendezvous(
    history: Sequence[Configuration],
    horizon: int,
    *,
    tol: float = MEET_TOL,
) -> Verdict:
    """Solved at the first meeting that stays put for one further round.

    Meeting means distance within ``tol``; staying put is bit-for-bit, so a
    pair that keeps creeping below the tolerance (e.g. geometric halving)
    never counts as met.
    """
    if len(history[0]) != 2:
        raise PreconditionError(f"expected 2 robots, got {len(history[0])}")

    def met(cfg: Configuration) -> bool:
        return distance(cfg.robots[0].pos, cfg.robots[1].pos) <= tol

    for t in range(len(history) - 1):
        if met(history[t]) and met(history[t + 1]):
            stable = all(
                history[t].robots[i].pos == history[t + 1].robots[i].pos for i in range(2)
            )
            if stable:
                return Verdict(VerdictKind.SOLVED, t)
    if len(history) - 1 >= horizon:
        return Verdict(VerdictKind.LIVENESS_STALL, horizon)
    return RUNNING


class RendezvousMonitor:
    def __init__(self, instance: ProblemInstance, tol: float = MEET_TOL):
        self.horizon = instance.horizon
        self.tol = tol

    def judge(self, history, motions, info) -> Verdict:
        return monitor_rendezvous(history, self.horizon, tol=self.tol)


def monitor_for(instance: ProblemInstance, *, tol: float = GEOM_TOL, collision_tol: float = COLLISION_TOL) -> Monitor:
    if instance.name == "eqosc":
        return EqOscMonitor(instance, tol=tol)
    if instance.name == "ae":
        return AEMonitor(instance, tol=tol, collision_tol=collision_tol)
    if instance.name == "rendezvous":
        return RendezvousMonitor(instance)
    raise PreconditionError(f"unknown problem {instance.name!r}")
