"""Planar geometry: points, rigid local frames, angle measures, moving-point separation.

Everything here is a pure value-level function over double-precision
coordinates. Geometric equality anywhere in the simulator means "within
``GEOM_TOL`` absolute" unless a caller overrides it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import GeometryDomainError

#: Default absolute tolerance for geometric equality tests.
GEOM_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryDomainError(f"non-finite coordinates ({self.x}, {self.y})")

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> "Point":
        return Point(self.x * k, self.y * k)

    def dot(self, other: "Point") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


ORIGIN = Point(0.0, 0.0)


def distance(p: Point, q: Point) -> float:
    """Euclidean distance between two points."""
    return math.hypot(p.x - q.x, p.y - q.y)


@dataclass(frozen=True, slots=True)
class Frame:
    """Rigid local coordinate frame of an observer anchored at ``origin``.

    The local->global map applies an optional reflection about the local
    x-axis, then a rotation by ``rotation`` radians, then the translation to
    ``origin``; global->local is the inverse. Both maps are isometries and
    the frame owner always sits at local (0, 0). ``reflected`` frames have a
    linear part with determinant -1 (no shared handedness is assumed).
    """

    origin: Point
    rotation: float = 0.0
    reflected: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.rotation):
            raise GeometryDomainError("non-finite frame rotation")


def to_local(f: Frame, p: Point) -> Point:
    """Map a global point into the frame's local coordinates."""
    dx = p.x - f.origin.x
    dy = p.y - f.origin.y
    c = math.cos(f.rotation)
    s = math.sin(f.rotation)
    lx = c * dx + s * dy
    ly = -s * dx + c * dy
    if f.reflected:
        ly = -ly
    return Point(lx, ly)


def to_global(f: Frame, p: Point) -> Point:
    """Map a local point of the frame back to global coordinates. Inverse of :func:`to_local`."""
    x = p.x
    y = -p.y if f.reflected else p.y
    c = math.cos(f.rotation)
    s = math.sin(f.rotation)
    return Point(f.origin.x + c * x - s * y, f.origin.y + s * x + c * y)


def acute_angle_at(vertex: Point, ray_toward: Point, target: Point) -> float:
    """Unsigned angle in [0, pi] between rays vertex->ray_toward and vertex->target.

    Raises :class:`GeometryDomainError` when either ray is degenerate
    (``ray_toward`` or ``target`` coincides with ``vertex``).
    """
    u = ray_toward - vertex
    v = target - vertex
    nu = u.norm()
    nv = v.norm()
    if nu == 0.0 or nv == 0.0:
        raise GeometryDomainError("angle undefined: ray endpoint coincides with vertex")
    c = u.dot(v) / (nu * nv)
    c = max(-1.0, min(1.0, c))
    return math.acos(c)


class Side(Enum):
    """Half-plane selector relative to a directed ray.

    ``LEFT`` is the half-plane where cross(ray_direction, p - vertex) < 0;
    concretely, for a ray pointing along -x the LEFT side is y > 0.
    """

    LEFT = "left"
    RIGHT = "right"


def side_of(vertex: Point, ray_toward: Point, p: Point) -> Side:
    """Which side of the line through vertex and ray_toward the point lies on."""
    u = ray_toward - vertex
    c = u.cross(p - vertex)
    if c == 0.0:
        raise GeometryDomainError("point lies on the ray's supporting line")
    return Side.LEFT if c < 0.0 else Side.RIGHT


def point_at_angle(
    vertex: Point, ray_toward: Point, theta: float, radius: float, side: Side
) -> Point:
    """Point at ``radius`` from ``vertex`` whose ray makes angle ``theta`` with vertex->ray_toward.

    ``theta`` must lie in (0, pi/2) and ``radius`` must be positive; the
    result lands on the requested :class:`Side` of the ray's supporting line.
    """
    if not (0.0 < theta < math.pi / 2):
        raise GeometryDomainError(f"theta must be in (0, pi/2), got {theta}")
    if not (radius > 0.0) or not math.isfinite(radius):
        raise GeometryDomainError(f"radius must be positive, got {radius}")
    u = ray_toward - vertex
    n = u.norm()
    if n == 0.0:
        raise GeometryDomainError("ray direction undefined: ray_toward equals vertex")
    ux, uy = u.x / n, u.y / n
    k = -1.0 if side is Side.LEFT else 1.0
    c = math.cos(theta)
    s = math.sin(theta) * k
    # rotate the unit ray direction by +/-theta: n_ccw = (-uy, ux)
    wx = c * ux - s * uy
    wy = c * uy + s * ux
    return Point(vertex.x + radius * wx, vertex.y + radius * wy)


@dataclass(frozen=True, slots=True)
class MotionSegment:
    """Linear motion start->end over the unit time parameter s in [0, 1].

    A static robot is a segment with start == end.
    """

    start: Point
    end: Point

    def at(self, s: float) -> Point:
        return Point(
            self.start.x + s * (self.end.x - self.start.x),
            self.start.y + s * (self.end.y - self.start.y),
        )


def min_separation(m1: MotionSegment, m2: MotionSegment) -> float:
    """Minimum distance between two points moving simultaneously along their segments.

    The relative position is affine in s, so the squared distance is a
    quadratic whose minimiser over [0, 1] has a closed form.
    """
    a = m1.start - m2.start
    b = (m1.end - m1.start) - (m2.end - m2.start)
    bb = b.dot(b)
    if bb == 0.0:
        return a.norm()
    s = -a.dot(b) / bb
    s = max(0.0, min(1.0, s))
    return (a + b.scaled(s)).norm()
