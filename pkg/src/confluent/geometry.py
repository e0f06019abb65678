"""Segment predicates for polylines.

Orientation is evaluated in floating point first and re-evaluated with exact
rationals whenever the float result is too close to zero to be trusted.
Float inputs convert to :class:`fractions.Fraction` without rounding, so the
fallback is exact on the coordinates as stored.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Point = tuple[float, float]

EPS = 1e-9


def orient(a: Point, b: Point, c: Point) -> int:
    det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    scale = (abs(b[0] - a[0]) + abs(b[1] - a[1])) * (abs(c[0] - a[0]) + abs(c[1] - a[1]))
    if abs(det) > 1e-12 * scale:
        return 1 if det > 0 else -1
    fa = [Fraction(v) for v in a]
    fb = [Fraction(v) for v in b]
    fc = [Fraction(v) for v in c]
    d = (fb[0] - fa[0]) * (fc[1] - fa[1]) - (fb[1] - fa[1]) * (fc[0] - fa[0])
    return (d > 0) - (d < 0)


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    # assumes collinear
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed-segment intersection test (touching counts)."""
    if max(a[0], b[0]) < min(c[0], d[0]) or max(c[0], d[0]) < min(a[0], b[0]):
        return False
    if max(a[1], b[1]) < min(c[1], d[1]) or max(c[1], d[1]) < min(a[1], b[1]):
        return False
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False


def segment_intersection_kind(a: Point, b: Point, c: Point, d: Point) -> tuple[str, Point | None]:
    """Classify the intersection of closed segments ab and cd.

    Returns ``("none", None)``, ``("point", p)`` or ``("overlap", None)`` for
    collinear segments sharing more than one point.
    """
    if not segments_intersect(a, b, c, d):
        return "none", None
    if orient(a, b, c) == 0 and orient(a, b, d) == 0:
        # collinear: overlap length decides
        ab = sorted([(Fraction(a[0]), Fraction(a[1])), (Fraction(b[0]), Fraction(b[1]))])
        cd = sorted([(Fraction(c[0]), Fraction(c[1])), (Fraction(d[0]), Fraction(d[1]))])
        lo = max(ab[0], cd[0])
        hi = min(ab[1], cd[1])
        if lo == hi:
            return "point", (float(lo[0]), float(lo[1]))
        return "overlap", None
    return "point", intersection_point(a, b, c, d)


def intersection_point(a: Point, b: Point, c: Point, d: Point) -> Point:
    fa = [Fraction(v) for v in a]
    fb = [Fraction(v) for v in b]
    fc = [Fraction(v) for v in c]
    fd = [Fraction(v) for v in d]
    r = (fb[0] - fa[0], fb[1] - fa[1])
    s = (fd[0] - fc[0], fd[1] - fc[1])
    den = r[0] * s[1] - r[1] * s[0]
    if den == 0:
        # collinear touch at an endpoint
        for p in (a, b):
            if _on_segment(c, d, p):
                return p
        return c
    t = ((fc[0] - fa[0]) * s[1] - (fc[1] - fa[1]) * s[0]) / den
    return (float(fa[0] + t * r[0]), float(fa[1] + t * r[1]))


def same_point(p: Point, q: Point, tol: float = 0.0) -> bool:
    if tol == 0.0:
        return p[0] == q[0] and p[1] == q[1]
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol


def polyline_length(pts: Sequence[Point]) -> float:
    return sum(math.dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    l2 = dx * dx + dy * dy
    if l2 == 0:
        return math.dist(p, a)
    t = max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / l2))
    return math.dist(p, (ax + t * dx, ay + t * dy))


def segment_distance(a: Point, b: Point, c: Point, d: Point) -> float:
    if segments_intersect(a, b, c, d):
        return 0.0
    return min(point_segment_distance(a, c, d), point_segment_distance(b, c, d),
               point_segment_distance(c, a, b), point_segment_distance(d, a, b))


def fit_circle(points: Sequence[Point]) -> tuple[Point, float]:
    """Circle through the given points (algebraic least-squares fit)."""
    n = len(points)
    if n == 0:
        return (0.0, 0.0), 1.0
    if n == 1:
        return points[0], 0.0
    if n == 2:
        (x1, y1), (x2, y2) = points
        c = ((x1 + x2) / 2, (y1 + y2) / 2)
        return c, math.dist(c, points[0])
    import numpy as np

    pts = np.asarray(points, dtype=float)
    A = np.column_stack([pts[:, 0], pts[:, 1], np.ones(n)])
    rhs = -(pts[:, 0] ** 2 + pts[:, 1] ** 2)
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    cx, cy = -sol[0] / 2, -sol[1] / 2
    r = math.sqrt(max(cx * cx + cy * cy - sol[2], 0.0))
    return (float(cx), float(cy)), r
