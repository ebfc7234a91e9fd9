"""Two-dimensional rate-region geometry.

Regions are convex polygons in the nonnegative quadrant that contain the
origin and are closed downward (any rate pair dominated by an achievable one
is achievable).  They are stored as exact vertex lists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from twrelay.channel import DomainError

DEDUP_TOL = 1e-12
COLLINEAR_TOL = 1e-12
CONTAIN_TOL = 1e-9


@dataclass(frozen=True)
class RatePentagon:
    """The polytope ``{R1 <= r1_max, R2 <= r2_max, R1 + R2 <= sum_max}``."""

    r1_max: float
    r2_max: float
    sum_max: float

    def __post_init__(self):
        for name in ("r1_max", "r2_max", "sum_max"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"{name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, name, v)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r1_max, self.r2_max, self.sum_max)


@dataclass(frozen=True, eq=False)
class RateRegion:
    """Convex rate polygon; vertices run counterclockwise from the origin."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 2)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, RateRegion):
            return NotImplemented
        return self.vertices.shape == other.vertices.shape and bool(
            np.all(self.vertices == other.vertices)
        )

    __hash__ = None

    @property
    def pareto(self) -> np.ndarray:
        """Vertices on the outer boundary, ordered by decreasing R2."""
        return _pareto_filter(self.vertices)[::-1]

    def max_r1(self) -> float:
        return float(self.vertices[:, 0].max())

    def max_r2(self) -> float:
        return float(self.vertices[:, 1].max())

    def max_sum(self) -> float:
        return float(self.vertices.sum(axis=1).max())

    def to_list(self) -> list[list[float]]:
        return [[float(a), float(b)] for a, b in self.vertices]


def pentagon_points(a, b, c) -> np.ndarray:
    """Candidate corner points of many pentagons at once, shape ``(5n, 2)``.

    ``a``, ``b``, ``c`` are broadcastable arrays of constraint values.
    """
    a, b, c = np.broadcast_arrays(*(np.asarray(x, dtype=float).ravel() for x in (a, b, c)))
    a = np.minimum(a, c)
    b = np.minimum(b, c)
    zero = np.zeros_like(a)
    upper = np.column_stack([np.maximum(c - b, 0.0), b])
    lower = np.column_stack([a, np.maximum(c - a, 0.0)])
    lower[:, 1] = np.minimum(lower[:, 1], b)
    upper[:, 0] = np.minimum(upper[:, 0], a)
    return np.vstack(
        [np.column_stack([a, zero]), np.column_stack([zero, b]), lower, upper]
    )


def _pareto_filter(pts: np.ndarray) -> np.ndarray:
    # keep points not weakly dominated in both coordinates
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    s = pts[order]
    best = np.maximum.accumulate(s[:, 1])
    keep = np.ones(len(s), dtype=bool)
    keep[1:] = s[1:, 1] > best[:-1]
    return s[keep]


def hull_of_points(points) -> RateRegion:
    """Downward-closed convex hull of nonnegative rate points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise DomainError("cannot take the hull of an empty point set")
    if not np.all(np.isfinite(pts)):
        raise DomainError("rate points must be finite")
    pts = np.maximum(pts, 0.0)
    xmax = float(pts[:, 0].max())
    ymax = float(pts[:, 1].max())
    front = _pareto_filter(pts)
    # front is sorted by decreasing r1 with increasing r2; walk from the
    # r2-axis anchor toward the r1-axis anchor
    chain_pts = [(0.0, ymax)]
    chain_pts.extend(map(tuple, front[::-1]))
    chain_pts.append((xmax, 0.0))
    chain: list[tuple[float, float]] = []
    for p in chain_pts:
        if chain and abs(p[0] - chain[-1][0]) <= DEDUP_TOL and abs(p[1] - chain[-1][1]) <= DEDUP_TOL:
            continue
        while len(chain) >= 2:
            (ox, oy), (ax, ay) = chain[-2], chain[-1]
            cross = (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox)
            if cross >= -COLLINEAR_TOL:
                chain.pop()
            else:
                break
        chain.append(p)
    verts = [(0.0, 0.0)]
    for p in reversed(chain):
        q = verts[-1]
        if abs(p[0] - q[0]) <= DEDUP_TOL and abs(p[1] - q[1]) <= DEDUP_TOL:
            continue
        verts.append(p)
    if len(verts) > 1 and abs(verts[-1][0]) <= DEDUP_TOL and abs(verts[-1][1]) <= DEDUP_TOL:
        verts.pop()
    return RateRegion(np.array(verts))


def pentagon_vertices(p: RatePentagon) -> RateRegion:
    """Vertex set of one pentagon, degenerate corners merged."""
    return hull_of_points(pentagon_points(p.r1_max, p.r2_max, p.sum_max))


def convex_union(regions) -> RateRegion:
    """Time-sharing closure of a collection of regions."""
    regions = list(regions)
    if not regions:
        raise DomainError("convex_union needs at least one region")
    return hull_of_points(np.vstack([r.vertices for r in regions]))


def _segment_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return np.hypot(*(pts - a).T)
    t = np.clip(((pts - a) @ d) / dd, 0.0, 1.0)
    proj = a + t[:, None] * d
    return np.hypot(*(pts - proj).T)


def distance_outside(region: RateRegion, points) -> np.ndarray:
    """Euclidean distance from each point to the region (0 when inside)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    v = region.vertices
    n = len(v)
    if n == 1:
        return np.hypot(*(pts - v[0]).T)
    # half-plane test for inside; edges are CCW so inside is left of each edge
    inside = np.ones(len(pts), dtype=bool)
    best = np.full(len(pts), np.inf)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        e = b - a
        cross = e[0] * (pts[:, 1] - a[1]) - e[1] * (pts[:, 0] - a[0])
        inside &= cross >= 0.0
        best = np.minimum(best, _segment_distance(pts, a, b))
    if n < 3:
        inside[:] = False
    return np.where(inside, 0.0, best)


def exceedance(outer: RateRegion, inner: RateRegion) -> float:
    """Largest distance of an ``inner`` vertex outside ``outer``."""
    return float(distance_outside(outer, inner.vertices).max())


def contains(outer: RateRegion, inner: RateRegion, tol: float = CONTAIN_TOL) -> bool:
    """True iff every vertex of ``inner`` lies within ``tol`` of ``outer``."""
    if tol < 0:
        raise DomainError("tol must be >= 0")
    return exceedance(outer, inner) <= tol


def hausdorff(a: RateRegion, b: RateRegion) -> float:
    """Symmetric Hausdorff distance between two convex polygons."""
    return max(exceedance(a, b), exceedance(b, a))


def support_value(region: RateRegion, weight_r1: float) -> float:
    """``max R2 + weight_r1 * R1`` over the region."""
    if weight_r1 < 0:
        raise DomainError("weight_r1 must be >= 0")
    v = region.vertices
    return float(np.max(v[:, 1] + weight_r1 * v[:, 0]))


def support_directions(n: int) -> np.ndarray:
    """``n`` unit normals spread over the closed first quadrant."""
    theta = np.linspace(0.0, math.pi / 2, n)
    return np.column_stack([np.cos(theta), np.sin(theta)])


def support_gap(outer: RateRegion, inner: RateRegion, n: int = 181) -> float:
    """Largest amount by which ``inner`` pushes past ``outer`` along a normal."""
    d = support_directions(n)
    so = (outer.vertices @ d.T).max(axis=0)
    si = (inner.vertices @ d.T).max(axis=0)
    return float((si - so).max())
