"""Robot decision rules: pure functions from a snapshot to a destination and light write.

Every rule works purely in the observer's local frame and uses only
relative, chirality-free geometry, so its global effect is independent of
the frame the adversary hands the robot. Each rule also asserts that its
input matches the capabilities of the model it was written for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .errors import (
    CapabilityError,
    InsufficientInformation,
    PreconditionError,
    ProtocolError,
    UnreachableStateError,
)
from .geometry import (
    GEOM_TOL,
    ORIGIN,
    Point,
    acute_angle_at,
    distance,
    point_at_angle,
    side_of,
)
from .models import ModelKind, Palette, Snapshot


@dataclass(frozen=True)
class Decision:
    """Computed destination in the local frame plus an optional light write.

    ``dest`` at the local origin means "stay"; ``light`` None means the
    current color is left untouched.
    """

    dest: Point
    light: str | None = None


STAY = Decision(ORIGIN, None)


class RoleView(Enum):
    """Self-classification from nothing but the number of visible robots."""

    MIDDLE = "middle"
    TERMINAL = "terminal"
    UNKNOWN = "unknown"


def classify_role(snap: Snapshot) -> RoleView:
    if len(snap.entries) == 2:
        return RoleView.MIDDLE
    if len(snap.entries) == 1:
        return RoleView.TERMINAL
    return RoleView.UNKNOWN


def _near_point(m: Point) -> Point:
    # on the segment self->m at distance (2/3)|m| from m
    return Point(m.x / 3.0, m.y / 3.0)


def _far_point(m: Point) -> Point:
    # on the line through self and m, own side, at distance (3/2)|m| from m
    return Point(-m.x / 2.0, -m.y / 2.0)


EO_STA_PALETTE = Palette(("Off", "N", "F"), "Off")


def alg_eo_sta(snap: Snapshot) -> Decision:
    """Oscillation via an internal state light: near on Off/F, far on N.

    A terminal robot alternates between two-thirds of and one-and-a-half
    times its current distance from the middle robot; the middle robot never
    moves. Requires a self-readable light and a colorless view of others.
    """
    if snap.own_light is None:
        raise CapabilityError("eo-sta needs a self-readable light")
    if any(e.colors for e in snap.entries):
        raise CapabilityError("eo-sta must not see other robots' lights")
    if snap.own_light not in EO_STA_PALETTE:
        raise ProtocolError(f"unknown light {snap.own_light!r}")
    if classify_role(snap) is not RoleView.TERMINAL:
        return STAY
    m = snap.entries[0].pos
    if snap.own_light in ("Off", "F"):
        return Decision(_near_point(m), "N")
    return Decision(_far_point(m), "F")


EO_COM_PALETTE = Palette(("NIL", "NEAR", "FAR"), "NIL")


def alg_eo_com(snap: Snapshot) -> Decision:
    """Oscillation via externally visible lights only.

    The middle robot echoes the phase it reads off the terminals (NIL/FAR ->
    FAR, NEAR -> NEAR) and stays put; a terminal robot reads the middle's
    light and moves near on NIL/NEAR, far on FAR. No robot can read its own
    light, so the middle's color is the only shared state.
    """
    if snap.own_light is not None:
        raise CapabilityError("eo-com must not read its own light")
    role = classify_role(snap)
    if role is RoleView.MIDDLE:
        seen = [c for e in snap.entries for c in e.colors]
        if not seen:
            raise CapabilityError("eo-com needs to see other robots' lights")
        for c in seen:
            if c not in EO_COM_PALETTE:
                raise ProtocolError(f"unknown light {c!r}")
        if all(c in ("NIL", "FAR") for c in seen):
            return Decision(ORIGIN, "FAR")
        if all(c == "NEAR" for c in seen):
            return Decision(ORIGIN, "NEAR")
        # mixed NEAR with NIL/FAR cannot arise from the legal start under
        # full synchrony; refuse to guess
        raise UnreachableStateError(f"middle robot saw mixed terminal lights {sorted(seen)}")
    if role is RoleView.TERMINAL:
        entry = snap.entries[0]
        if not entry.colors:
            raise CapabilityError("eo-com needs to see other robots' lights")
        if len(entry.colors) != 1:
            raise UnreachableStateError("terminal robot expected exactly one visible light")
        middle_light = entry.colors[0]
        if middle_light not in EO_COM_PALETTE:
            raise ProtocolError(f"unknown light {middle_light!r}")
        if middle_light in ("NIL", "NEAR"):
            return Decision(_near_point(entry.pos), "NEAR")
        return Decision(_far_point(entry.pos), "FAR")
    return Decision(ORIGIN, "NIL")


OBLOT_PALETTE = Palette(("Off",), "Off")

#: Angle equality tolerance for the chain solver and its monitors.
ANGLE_TOL = GEOM_TOL


def _reconstruct_chain(pts: list[Point]) -> tuple[int, int, int, int]:
    """Order four robots into a chain (endpoint, inner, inner, endpoint).

    The two inner robots are the pair minimising the sum of distances to
    the other three; each endpoint attaches to its nearest inner robot.
    """
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            if distance(pts[i], pts[j]) <= GEOM_TOL:
                raise PreconditionError("chain robots must occupy distinct positions")
    sums = [sum(distance(pts[i], pts[j]) for j in range(n) if j != i) for i in range(n)]
    order = sorted(range(n), key=lambda i: (sums[i], i))
    inner = order[:2]
    outer = order[2:]
    if sums[order[1]] > sums[order[2]] - GEOM_TOL:
        raise PreconditionError("ambiguous chain: inner robots not separated")
    attach = []
    for e in outer:
        d0 = distance(pts[e], pts[inner[0]])
        d1 = distance(pts[e], pts[inner[1]])
        attach.append(inner[0] if d0 < d1 else inner[1])
    if attach[0] == attach[1]:
        raise PreconditionError("not a chain: both endpoints closest to the same inner robot")
    return outer[0], attach[0], attach[1], outer[1]


def ae_full_visibility(snap: Snapshot) -> Decision:
    """Single-move angle equalisation along a four-robot chain.

    Reconstructs the chain, measures the angle each endpoint forms with the
    outward extension of the inner segment, and moves only when the observer
    is the endpoint with the strictly smaller angle: to the point at its
    current radius from its inner neighbour forming the larger angle, on its
    own side. Reports insufficient information when fewer than three robots
    are visible.
    """
    if len(snap.entries) < 3:
        raise InsufficientInformation(
            f"chain not fully visible: {len(snap.entries)} of 3 other robots in view"
        )
    if len(snap.entries) > 3:
        raise PreconditionError("expected a four-robot configuration")
    pts = [ORIGIN] + [e.pos for e in snap.entries]
    end_a, inner_a, inner_b, end_b = _reconstruct_chain(pts)
    if 0 not in (end_a, end_b):
        return STAY
    if end_a == 0:
        b, c, d = pts[inner_a], pts[inner_b], pts[end_b]
    else:
        b, c, d = pts[inner_b], pts[inner_a], pts[end_a]
    ext_self = b + (b - c)
    ext_other = c + (c - b)
    theta_self = acute_angle_at(b, ext_self, ORIGIN)
    theta_other = acute_angle_at(c, ext_other, d)
    for theta in (theta_self, theta_other):
        if not (GEOM_TOL < theta < math.pi / 2):
            raise PreconditionError("chain angles must be acute and non-degenerate")
    if abs(theta_self - theta_other) <= ANGLE_TOL:
        return STAY
    if theta_self > theta_other:
        return STAY
    side = side_of(b, ext_self, ORIGIN)
    dest = point_at_angle(b, ext_self, theta_other, distance(b, ORIGIN), side)
    return Decision(dest, None)


def rendezvous_midpoint(snap: Snapshot) -> Decision:
    """Move to the midpoint of the segment joining the two robots."""
    if len(snap.entries) != 1:
        raise PreconditionError(
            f"midpoint rendezvous needs exactly one visible robot, saw {len(snap.entries)}"
        )
    other = snap.entries[0].pos
    return Decision(Point(other.x / 2.0, other.y / 2.0), None)


def null_stay(snap: Snapshot) -> Decision:
    return STAY


@dataclass(frozen=True)
class AlgorithmSpec:
    """Registry entry: the rule, the model it is written for, and its palette."""

    name: str
    native_model: ModelKind
    palette: Palette
    fn: Callable[[Snapshot], Decision]


REGISTRY: dict[str, AlgorithmSpec] = {
    "eo-sta": AlgorithmSpec("eo-sta", ModelKind.FSTA, EO_STA_PALETTE, alg_eo_sta),
    "eo-com": AlgorithmSpec("eo-com", ModelKind.FCOM, EO_COM_PALETTE, alg_eo_com),
    "ae-fv": AlgorithmSpec("ae-fv", ModelKind.OBLOT, OBLOT_PALETTE, ae_full_visibility),
    "rv-mid": AlgorithmSpec("rv-mid", ModelKind.OBLOT, OBLOT_PALETTE, rendezvous_midpoint),
    "null": AlgorithmSpec("null", ModelKind.OBLOT, OBLOT_PALETTE, null_stay),
}


def get_algorithm(name: str) -> AlgorithmSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ProtocolError(
            f"unknown algorithm {name!r}; available: {', '.join(sorted(REGISTRY))}"
        ) from None
