"""Integer points, closed axis-parallel boxes, and the configurations they form.

All coordinates are Python ints. Degenerate boxes (``lo[i] == hi[i]``) are
allowed and stand in for lines, flats and hyperplanes.
"""
from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .setsystem import SetSystem

Point = tuple[int, ...]

_INT64_MIN = -(2**63)
_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class Box:
    lo: Point
    hi: Point

    def __post_init__(self):
        lo = tuple(int(v) for v in self.lo)
        hi = tuple(int(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("lo and hi must be non-empty and of equal dimension")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"empty box: lo={lo} hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def corners(self) -> list[Point]:
        return sorted(set(product(*zip(self.lo, self.hi))))

    def interior_contains(self, p: Sequence[int]) -> bool:
        return all(a < v < b for a, v, b in zip(self.lo, p, self.hi))

    def grid_size(self) -> tuple[int, ...]:
        """Number of integral points along each axis."""
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    @classmethod
    def bounding(cls, points: Iterable[Sequence[int]]) -> "Box":
        pts = list(points)
        if not pts:
            raise ValueError("bounding box of an empty point set")
        return cls(tuple(map(min, zip(*pts))), tuple(map(max, zip(*pts))))


def contains(box: Box, p: Sequence[int]) -> bool:
    """Closed containment: ``lo_i <= p_i <= hi_i`` on every axis."""
    if len(p) != box.dim:
        raise ValueError(f"dimension mismatch: box is {box.dim}-d, point is {len(p)}-d")
    return all(a <= v <= b for a, v, b in zip(box.lo, p, box.hi))


def corners(boxes: Iterable[Box]) -> list[Point]:
    """All distinct box corners, sorted."""
    out: set[Point] = set()
    for b in boxes:
        out.update(b.corners())
    return sorted(out)


@dataclass(frozen=True)
class Config:
    """Labelled points and labelled boxes in Z^dim, plus free-form ``claims`` metadata."""

    dim: int
    points: tuple[Point, ...]
    boxes: tuple[Box, ...] = ()
    point_labels: tuple[str, ...] | None = None
    box_labels: tuple[str, ...] | None = None
    claims: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        pts = tuple(tuple(int(v) for v in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "boxes", tuple(self.boxes))
        for p in pts:
            if len(p) != self.dim:
                raise ValueError(f"point {p} is not {self.dim}-dimensional")
        for b in self.boxes:
            if b.dim != self.dim:
                raise ValueError(f"box {b} is not {self.dim}-dimensional")
        pl = self.point_labels or tuple(f"p{i}" for i in range(len(pts)))
        bl = self.box_labels or tuple(f"b{j}" for j in range(len(self.boxes)))
        pl, bl = tuple(map(str, pl)), tuple(map(str, bl))
        if len(pl) != len(pts) or len(bl) != len(self.boxes):
            raise ValueError("label count does not match point/box count")
        if len(set(pl)) != len(pl) or len(set(bl)) != len(bl):
            raise ValueError("labels must be unique")
        object.__setattr__(self, "point_labels", pl)
        object.__setattr__(self, "box_labels", bl)

    def replace(self, **changes) -> "Config":
        fields = dict(
            dim=self.dim,
            points=self.points,
            boxes=self.boxes,
            point_labels=self.point_labels,
            box_labels=self.box_labels,
            claims=dict(self.claims),
        )
        fields.update(changes)
        return Config(**fields)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "points": [
                {"label": lab, "coords": [_enc(v) for v in p]}
                for lab, p in zip(self.point_labels, self.points)
            ],
            "boxes": [
                {"label": lab, "lo": [_enc(v) for v in b.lo], "hi": [_enc(v) for v in b.hi]}
                for lab, b in zip(self.box_labels, self.boxes)
            ],
            "claims": self.claims,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Config":
        pts = data.get("points", [])
        bxs = data.get("boxes", [])
        return cls(
            dim=int(data["dim"]),
            points=tuple(tuple(int(v) for v in p["coords"]) for p in pts),
            boxes=tuple(Box(tuple(map(int, b["lo"])), tuple(map(int, b["hi"]))) for b in bxs),
            point_labels=tuple(p["label"] for p in pts) or None,
            box_labels=tuple(b["label"] for b in bxs) or None,
            claims=dict(data.get("claims") or {}),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Config":
        return cls.from_json(json.loads(text))


def _enc(v: int):
    return v if _INT64_MIN <= v <= _INT64_MAX else str(v)


def _fits_int64(c: Config) -> bool:
    vals = [v for p in c.points for v in p]
    vals += [v for b in c.boxes for v in b.lo + b.hi]
    return not vals or (_INT64_MIN <= min(vals) and max(vals) <= _INT64_MAX)


def incidence_matrix(c: Config) -> np.ndarray:
    """Boolean ``(points, boxes)`` containment matrix."""
    m, n = len(c.points), len(c.boxes)
    if m == 0 or n == 0:
        return np.zeros((m, n), dtype=bool)
    if _fits_int64(c):
        P = np.array(c.points, dtype=np.int64)
        lo = np.array([b.lo for b in c.boxes], dtype=np.int64)
        hi = np.array([b.hi for b in c.boxes], dtype=np.int64)
        out = np.ones((m, n), dtype=bool)
        for i in range(c.dim):
            col = P[:, i][:, None]
            out &= (lo[:, i][None, :] <= col) & (col <= hi[:, i][None, :])
        return out
    return np.array([[contains(b, p) for b in c.boxes] for p in c.points], dtype=bool)


def induce(c: Config) -> SetSystem:
    """The abstract set system: item ``i`` lies in test ``j`` iff box ``j`` contains point ``i``.

    Duplicate boxes stay separate tests so the test count equals the box count.
    """
    if not c.points:
        raise ValueError("cannot induce a set system from a configuration without points")
    inc = incidence_matrix(c)
    rows = []
    for r in inc:
        packed = np.packbits(r, bitorder="little").tobytes()
        rows.append(int.from_bytes(packed, "little"))
    return SetSystem(len(c.points), len(c.boxes), tuple(rows), c.point_labels, c.box_labels)


def is_general_position(c: Config) -> bool:
    """Per axis, every point coordinate and every box facet coordinate is distinct."""
    for i in range(c.dim):
        vals = [p[i] for p in c.points]
        for b in c.boxes:
            vals.append(b.lo[i])
            vals.append(b.hi[i])
        if len(set(vals)) != len(vals):
            return False
    return True


# Event classes at a shared coordinate value; this order keeps closed containment intact.
_LO, _PT, _HI = 0, 1, 2


def to_general_position(c: Config) -> Config:
    """Combinatorially equivalent configuration in general position.

    Per axis, values are multiplied by ``s`` (one more than the largest number
    of objects sharing a value) and the objects that shared a value get
    distinct offsets ``0..s-1``: lower facets first, then points, then upper
    facets, ties broken by index. That ordering is exactly what keeps every
    closed containment unchanged. Coincident points are therefore always
    separable; their labels are recorded under
    ``claims["general_position"]["separated_coincident_points"]``.
    """
    new_pts = [list(p) for p in c.points]
    new_lo = [list(b.lo) for b in c.boxes]
    new_hi = [list(b.hi) for b in c.boxes]
    for i in range(c.dim):
        groups: dict[int, list[tuple[int, int]]] = {}
        for k, p in enumerate(c.points):
            groups.setdefault(p[i], []).append((_PT, k))
        for j, b in enumerate(c.boxes):
            groups.setdefault(b.lo[i], []).append((_LO, j))
            groups.setdefault(b.hi[i], []).append((_HI, j))
        scale = max((len(g) for g in groups.values()), default=1) + 1
        for value, events in groups.items():
            for off, (cls, k) in enumerate(sorted(events)):
                v = value * scale + off
                if cls == _PT:
                    new_pts[k][i] = v
                elif cls == _LO:
                    new_lo[k][i] = v
                else:
                    new_hi[k][i] = v
    seen: dict[Point, int] = {}
    coincident = []
    for k, p in enumerate(c.points):
        if p in seen:
            coincident.append(c.point_labels[k])
        seen.setdefault(p, k)
    claims = dict(c.claims)
    if coincident:
        claims["general_position"] = {"separated_coincident_points": coincident}
    return c.replace(
        points=tuple(map(tuple, new_pts)),
        boxes=tuple(Box(lo, hi) for lo, hi in zip(new_lo, new_hi)),
        claims=claims,
    )


def compress_to_grid(c: Config) -> Config:
    """Equivalent configuration with all coordinates in ``[1, 4n]`` (``n`` boxes).

    After moving to general position, the ``2n`` facet coordinates on each
    axis cut the line into strips; points in the same strip (or outside every
    box on that axis) are aligned, and the surviving values are ranked.
    Point coordinates never coincide with facet coordinates afterwards.
    """
    n = len(c.boxes)
    if n == 0:
        if len(c.points) > 1:
            raise ValueError("without boxes all points collapse to one grid cell")
        return c.replace(points=tuple((1,) * c.dim for _ in c.points))
    g = to_general_position(c)
    new_pts = [list(p) for p in g.points]
    new_lo = [list(b.lo) for b in g.boxes]
    new_hi = [list(b.hi) for b in g.boxes]
    for i in range(c.dim):
        facets = sorted({b.lo[i] for b in g.boxes} | {b.hi[i] for b in g.boxes})
        # ranks: strip s (0 = outside) sits just after facet s; outside goes first
        key_of_point = []
        for p in g.points:
            s = bisect_left(facets, p[i])
            if s == 0 or s == len(facets):
                key_of_point.append((facets[0] - 1, 1))
            else:
                key_of_point.append((facets[s - 1], 1))
        keys = sorted({(f, 0) for f in facets} | set(key_of_point))
        rank = {k: r + 1 for r, k in enumerate(keys)}
        for k, key in enumerate(key_of_point):
            new_pts[k][i] = rank[key]
        for j, b in enumerate(g.boxes):
            new_lo[j][i] = rank[(b.lo[i], 0)]
            new_hi[j][i] = rank[(b.hi[i], 0)]
    return g.replace(
        points=tuple(map(tuple, new_pts)),
        boxes=tuple(Box(lo, hi) for lo, hi in zip(new_lo, new_hi)),
    )

