"""Configurations, lights, the four robot models as snapshot filters, and visibility.

The model kinds differ only in what a snapshot reveals and what a light
write may do; positions are treated identically everywhere. Snapshots are
the anonymity boundary: algorithms never see robot identifiers.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

from .errors import CapabilityError, PreconditionError, ProtocolError
from .geometry import Frame, Point, distance, to_local


class ModelKind(Enum):
    OBLOT = "oblot"
    FSTA = "fsta"
    FCOM = "fcom"
    LUMI = "lumi"


#: Models in which a robot can read its own light during Compute.
SEES_OWN_LIGHT = frozenset({ModelKind.FSTA, ModelKind.LUMI})
#: Models in which a robot sees the lights carried by other robots.
SEES_OTHER_LIGHTS = frozenset({ModelKind.FCOM, ModelKind.LUMI})


def can_execute(run_model: ModelKind, native_model: ModelKind) -> bool:
    """Whether a robot of ``run_model`` can execute an algorithm written for ``native_model``.

    A stronger model simulates a weaker one by discarding snapshot
    information: LUMI covers everything, FSTA and FCOM cover OBLOT, and
    FSTA/FCOM are mutually incomparable.
    """
    if run_model is native_model:
        return True
    if native_model is ModelKind.OBLOT:
        return True
    return run_model is ModelKind.LUMI


@dataclass(frozen=True)
class Palette:
    """Finite set of light colors with a distinguished initial color."""

    colors: tuple[str, ...]
    initial: str

    def __post_init__(self) -> None:
        if len(set(self.colors)) != len(self.colors):
            raise ProtocolError("palette colors must be distinct")
        if self.initial not in self.colors:
            raise ProtocolError(f"initial color {self.initial!r} not in palette")

    def __contains__(self, color: str) -> bool:
        return color in self.colors


@dataclass(frozen=True)
class Visibility:
    """Sensing range: unlimited when ``radius`` is None, else inclusive up to ``radius``."""

    radius: float | None = None

    def __post_init__(self) -> None:
        if self.radius is not None and not self.radius > 0.0:
            raise ProtocolError(f"visibility radius must be positive, got {self.radius}")

    @classmethod
    def full(cls) -> "Visibility":
        return cls(None)

    @classmethod
    def limited(cls, radius: float) -> "Visibility":
        return cls(radius)

    @property
    def is_limited(self) -> bool:
        return self.radius is not None

    def reaches(self, d: float) -> bool:
        # boundary inclusive: a robot exactly at the radius is visible
        return self.radius is None or d <= self.radius


@dataclass(frozen=True)
class RobotState:
    """Engine-side robot record. The identifier never crosses into a snapshot."""

    ident: int
    pos: Point
    light: str


@dataclass(frozen=True)
class Configuration:
    """Global state at a round boundary: the ground truth of a simulation."""

    robots: tuple[RobotState, ...]
    round: int = 0

    def __post_init__(self) -> None:
        if not self.robots:
            raise ProtocolError("configuration must contain at least one robot")

    def __len__(self) -> int:
        return len(self.robots)

    def positions(self) -> tuple[Point, ...]:
        return tuple(r.pos for r in self.robots)


def make_configuration(positions: Iterable[Point], light: str = "Off") -> Configuration:
    return Configuration(
        tuple(RobotState(i, p, light) for i, p in enumerate(positions)), round=0
    )


@dataclass(frozen=True)
class SnapshotEntry:
    """One occupied position as seen by an observer, in the observer's local frame.

    Co-located robots merge into a single entry; ``colors`` is the multiset
    of lights visible there under the observer's model (empty when the model
    hides other robots' lights).
    """

    pos: Point
    colors: tuple[str, ...] = ()


@dataclass(frozen=True)
class Snapshot:
    """Everything one activated robot perceives during Look."""

    entries: tuple[SnapshotEntry, ...]
    own_light: str | None = None


def build_snapshot(
    config: Configuration,
    observer: int,
    model: ModelKind,
    vis: Visibility,
    frame: Frame,
) -> Snapshot:
    """Model- and visibility-filtered view of ``config`` for one robot.

    Entries cover every other robot within range (inclusive boundary),
    mapped into ``frame``; robots sharing a global position merge into one
    entry. Own light is present only under FSTA/LUMI; other robots' lights
    appear only under FCOM/LUMI.
    """
    if not 0 <= observer < len(config.robots):
        raise PreconditionError(f"observer index {observer} out of range")
    me = config.robots[observer]
    if frame.origin != me.pos:
        raise PreconditionError("snapshot frame must be anchored at the observer")

    groups: dict[tuple[float, float], list[str]] = defaultdict(list)
    for i, r in enumerate(config.robots):
        if i == observer:
            continue
        if not vis.reaches(distance(me.pos, r.pos)):
            continue
        groups[(r.pos.x, r.pos.y)].append(r.light)

    show_colors = model in SEES_OTHER_LIGHTS
    entries = []
    for (gx, gy), lights in groups.items():
        local = to_local(frame, Point(gx, gy))
        colors = tuple(sorted(lights)) if show_colors else ()
        entries.append(SnapshotEntry(local, colors))
    entries.sort(key=lambda e: (e.pos.x, e.pos.y, e.colors))

    own = me.light if model in SEES_OWN_LIGHT else None
    return Snapshot(tuple(entries), own)


def apply_light_write(
    config: Configuration,
    index: int,
    new_color: str,
    model: ModelKind,
    palette: Palette,
) -> Configuration:
    """Commit one light write, enforcing palette membership and model capability.

    Under OBLOT the light does not exist: writing the initial color is a
    no-op and anything else is a capability violation.
    """
    if not 0 <= index < len(config.robots):
        raise PreconditionError(f"robot index {index} out of range")
    if new_color not in palette:
        raise ProtocolError(f"color {new_color!r} outside the session palette")
    if model is ModelKind.OBLOT:
        if new_color != palette.initial:
            raise CapabilityError("oblivious silent robots cannot set a light")
        return config
    robots = list(config.robots)
    robots[index] = replace(robots[index], light=new_color)
    return Configuration(tuple(robots), config.round)


@dataclass(frozen=True)
class VisibilityGraph:
    """Mutual-visibility relation over robot indices; edges are (i, j) with i < j."""

    n: int
    edges: frozenset[tuple[int, int]]

    def neighbors(self, i: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == i:
                out.add(b)
            elif b == i:
                out.add(a)
        return out


def visibility_graph(config: Configuration, vis: Visibility) -> VisibilityGraph:
    n = len(config.robots)
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if vis.reaches(distance(config.robots[i].pos, config.robots[j].pos)):
                edges.add((i, j))
    return VisibilityGraph(n, frozenset(edges))


def is_connected(g: VisibilityGraph) -> bool:
    if g.n <= 1:
        return True
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in g.neighbors(i):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == g.n
