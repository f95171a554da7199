"""Generators for the lower-bound configurations.

Every generator returns a :class:`~geogt.geometry.Config` whose ``claims``
record the construction, its parameters and the separability/disjunctness
levels it is known to have (``holds``) or known to violate (``fails``).
:func:`verify_claims` re-checks them with the exact verifiers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Sequence

from .geometry import Box, Config, induce, to_general_position
from .setsystem import DEFAULT_BUDGET, SetSystem, verify_disjunct, verify_separable


class EquivalenceError(RuntimeError):
    """A realized configuration is not combinatorially equivalent to its source."""


def _label(coords: Sequence) -> str:
    return "(" + ",".join(str(v) for v in coords) + ")"


def _claims(name: str, params: dict, disjunct=None, separable=None) -> dict:
    claims = {"construction": name, "params": dict(params)}
    for key, spec in (("disjunct", disjunct), ("separable", separable)):
        if spec:
            holds, fails = spec
            claims[key] = {"holds": list(holds), "fails": list(fails)}
    return claims


def _grid(m: int, d: int) -> list[tuple[int, ...]]:
    return list(product(range(1, m + 1), repeat=d))


def _flats(m: int, d: int, k: int) -> tuple[list[Box], list[str]]:
    """All axis-parallel k-flats through [m]^d as degenerate boxes.

    Ordered by the set of free axes (lexicographic), then by the fixed
    coordinates. Labels mark free axes with ``*``.
    """
    boxes, labels = [], []
    for free in combinations(range(d), k):
        fixed_axes = [i for i in range(d) if i not in free]
        for vals in product(range(1, m + 1), repeat=d - k):
            lo, hi, lab = [1] * d, [m] * d, ["*"] * d
            for i, v in zip(fixed_axes, vals):
                lo[i] = hi[i] = v
                lab[i] = v
            boxes.append(Box(tuple(lo), tuple(hi)))
            labels.append(_label(lab))
    return boxes, labels


def _grid_line_claims(d: int) -> tuple[tuple, tuple]:
    if d == 1:
        return ((), (1,)), ((), (1,))
    if d == 2:
        sep = ((1,), (2,))
    elif d == 3:
        sep = ((3,), (4,))
    else:
        sep = ((2 * d - 2,), (2 * d - 1,))
    return ((d - 1,), (d,)), sep


def grid_lines(n: int, d: int) -> Config:
    """The grid [n]^d with every axis-parallel grid line as a (degenerate box) test."""
    if n < 2 or d < 1:
        raise ValueError("grid_lines needs n >= 2 and d >= 1")
    pts = _grid(n, d)
    boxes, labels = _flats(n, d, 1)
    disj, sep = _grid_line_claims(d)
    return Config(
        d, tuple(pts), tuple(boxes), tuple(map(_label, pts)), tuple(labels),
        _claims("grid_lines", {"n": n, "d": d}, disj, sep),
    )


def _realize(source: Config, f: Callable[[tuple[int, ...]], tuple[int, ...]], dim: int,
             name: str, params: dict) -> Config:
    """Map points through ``f``; each box becomes the bounding box of its mapped points.

    The result is checked against ``source`` and rejected unless the induced
    incidence is bit-identical.
    """
    src = induce(source)
    pts = [f(p) for p in source.points]
    boxes = []
    for j in range(len(source.boxes)):
        members = [pts[i] for i in range(len(pts)) if (src.rows[i] >> j) & 1]
        boxes.append(Box.bounding(members))
    claims = dict(source.claims)
    claims["construction"] = name
    claims["params"] = dict(params)
    out = Config(dim, tuple(pts), tuple(boxes), source.point_labels, source.box_labels, claims)
    if induce(out).rows != src.rows:
        raise EquivalenceError(f"{name}{params}: realized configuration is not equivalent")
    return out


def embed_grid_lines_2d(n: int, d: int) -> Config:
    """Planar configuration equivalent to ``grid_lines(n, d)``.

    A point goes to (its digits read most-significant-first, read
    least-significant-first) in base ``n + 1``, so the two coordinates order
    points lexicographically and reverse-lexicographically. Each line becomes
    the bounding rectangle of its image.
    """
    if n < 2 or d < 2:
        raise ValueError("embed_grid_lines_2d needs n >= 2 and d >= 2")
    base = n + 1

    def f(x):
        return (
            sum(base ** (d - 1 - i) * v for i, v in enumerate(x)),
            sum(base**i * v for i, v in enumerate(x)),
        )

    return _realize(grid_lines(n, d), f, 2, "grid_lines_2d", {"n": n, "d": d})


@dataclass(frozen=True)
class Partition:
    universe_size: int
    parts: tuple[tuple[int, ...], ...]
    part_labels: tuple[str, ...] | None = None
    item_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        parts = tuple(tuple(sorted(p)) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        flat = [x for p in parts for x in p]
        if len(flat) != len(set(flat)):
            raise ValueError("parts overlap")
        if set(flat) != set(range(self.universe_size)):
            raise ValueError("parts do not cover the universe")
        if any(not p for p in parts):
            raise ValueError("empty part")
        if self.part_labels is not None and len(self.part_labels) != len(parts):
            raise ValueError("part label count mismatch")

    def part_of(self) -> list[int]:
        owner = [0] * self.universe_size
        for j, p in enumerate(self.parts):
            for x in p:
                owner[x] = j
        return owner


def vandermonde_normals(k: int, t: int) -> list[tuple[int, ...]]:
    """The ``(k-1)t + 1`` normals ``(1, i, i^2, ..., i^(k-1))`` for ``i = 0, 1, ...``."""
    ell = (k - 1) * t + 1
    return [tuple(i**e for e in range(k)) for i in range(ell)]


def hyperplane_partitions(k: int, t: int, m: int) -> list[Partition]:
    """Partition [m]^k into parallel hyperplane classes, one partition per normal.

    Only non-empty classes are kept. Taken together as tests the classes form
    a t-disjunct system, because any k of the normals are linearly
    independent, so two distinct points share at most k - 1 classes.
    """
    if k < 1 or t < 1 or m <= k:
        raise ValueError("hyperplane_partitions needs k >= 1, t >= 1 and m > k")
    pts = _grid(m, k)
    item_labels = tuple(map(_label, pts))
    out = []
    for i, c in enumerate(vandermonde_normals(k, t), start=1):
        classes: dict[int, list[int]] = {}
        for idx, x in enumerate(pts):
            classes.setdefault(sum(a * b for a, b in zip(c, x)), []).append(idx)
        values = sorted(classes)
        out.append(Partition(
            len(pts),
            tuple(tuple(classes[v]) for v in values),
            tuple(f"H{i},{v}" for v in values),
            item_labels,
        ))
    return out


def partition_system(parts: Sequence[Partition]) -> SetSystem:
    """Abstract set system whose tests are all parts of all partitions."""
    m = parts[0].universe_size
    if any(p.universe_size != m for p in parts):
        raise ValueError("partitions live on different universes")
    sets: list[list[int]] = [[] for _ in range(m)]
    labels = []
    j = 0
    for p in parts:
        for part, lab in zip(p.parts, p.part_labels or (None,) * len(p.parts)):
            for x in part:
                sets[x].append(j)
            labels.append(lab or f"S{j}")
            j += 1
    return SetSystem.from_sets(j, sets, item_labels=parts[0].item_labels, test_labels=tuple(labels))


def partitions_to_boxes(parts: Sequence[Partition], labels: Sequence[str] | None = None,
                        claims: dict | None = None) -> Config:
    """Encode D partitions as a D-dimensional configuration.

    Item x sits at (index of its part in partition 1, ..., in partition D);
    part j of partition i becomes the slab fixing axis i to j.
    """
    if not parts:
        raise ValueError("need at least one partition")
    m = parts[0].universe_size
    if any(p.universe_size != m for p in parts):
        raise ValueError("partitions live on different universes")
    D = len(parts)
    q = max(len(p.parts) for p in parts)
    owners = [p.part_of() for p in parts]
    pts = [tuple(owners[i][x] + 1 for i in range(D)) for x in range(m)]
    boxes, box_labels = [], []
    for i, p in enumerate(parts):
        for j in range(len(p.parts)):
            lo, hi = [1] * D, [q] * D
            lo[i] = hi[i] = j + 1
            boxes.append(Box(tuple(lo), tuple(hi)))
            box_labels.append(p.part_labels[j] if p.part_labels else f"S{i + 1},{j + 1}")
    if labels is not None:
        box_labels = list(labels)
    item_labels = parts[0].item_labels or tuple(f"x{x}" for x in range(m))
    return Config(D, tuple(pts), tuple(boxes), item_labels, tuple(box_labels), claims or {})


def hyperplane_config(k: int, t: int, m: int) -> Config:
    """Box realization of :func:`hyperplane_partitions` in dimension ``(k-1)t + 1``."""
    parts = hyperplane_partitions(k, t, m)
    return partitions_to_boxes(
        parts, claims=_claims("hyperplanes", {"k": k, "t": t, "m": m}, ((t,), ())),
    )


def _max_claim(c: Config, prop: str) -> int | None:
    holds = (c.claims.get(prop) or {}).get("holds") or []
    return max(holds) if holds else None


def long_rect_step(c: Config, k: int, t: int | None = None) -> Config:
    """Lift a t-disjunct configuration to a (t+1)-disjunct one.

    The input is first made canonical: general position, point coordinates
    ranked to ``1..m`` per axis, every box shrunk to the bounding box of the
    points it contains (boxes containing no point are parked at the origin,
    where no point can reach them). Then ``k`` copies are laid side by side
    along axis 1 with stride ``m``, and for every original point a long
    degenerate box spans all copies while fixing the remaining coordinates.
    Sizes become ``k*m`` points and ``k*n + m`` boxes.

    ``t`` defaults to the largest disjunctness level in ``c.claims``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if c.dim < 2:
        raise ValueError("the long-rectangle step needs dimension >= 2")
    if t is None:
        t = _max_claim(c, "disjunct")
        if t is None:
            raise ValueError("input carries no disjunctness claim; pass t explicitly")
    m, n, d = len(c.points), len(c.boxes), c.dim
    g = to_general_position(c)
    ranks = []
    for i in range(d):
        order = sorted(range(m), key=lambda a: g.points[a][i])
        r = [0] * m
        for pos, a in enumerate(order):
            r[a] = pos + 1
        ranks.append(r)
    canon = [tuple(ranks[i][a] for i in range(d)) for a in range(m)]
    sys = induce(g)
    shrunk: list[Box | None] = []
    for j in range(n):
        members = [canon[a] for a in range(m) if (sys.rows[a] >> j) & 1]
        shrunk.append(Box.bounding(members) if members else None)
    parked = Box((0,) * d, (0,) * d)

    pts, pt_labels, boxes, box_labels = [], [], [], []
    for copy in range(k):
        shift = copy * m
        for a in range(m):
            p = canon[a]
            pts.append((p[0] + shift,) + p[1:])
            pt_labels.append(f"{copy + 1}:{c.point_labels[a]}")
        for j, b in enumerate(shrunk):
            if b is None:
                boxes.append(parked)
            else:
                boxes.append(Box((b.lo[0] + shift,) + b.lo[1:], (b.hi[0] + shift,) + b.hi[1:]))
            box_labels.append(f"{copy + 1}:{c.box_labels[j]}")
    for a in range(m):
        p = canon[a]
        boxes.append(Box((1,) + p[1:], (k * m,) + p[1:]))
        box_labels.append(f"R:{c.point_labels[a]}")
    base = {key: c.claims[key] for key in ("construction", "params") if key in c.claims}
    claims = _claims("long_rect", {"k": k, "t": t, "base": base}, ((t + 1,), ()))
    out = Config(d, tuple(pts), tuple(boxes), tuple(pt_labels), tuple(box_labels), claims)
    assert len(out.points) == k * m and len(out.boxes) == k * n + m
    return out


def _iroot_ceil(n: int, r: int) -> int:
    """Smallest integer k with k**r >= n."""
    k = max(1, round(n ** (1.0 / r)))
    while k**r < n:
        k += 1
    while k > 1 and (k - 1) ** r >= n:
        k -= 1
    return k


def long_rect_tower(d: int, t: int, m: int, k: int | None = None) -> Config:
    """Start from the (d-1)-disjunct hyperplane configuration in dimension d and
    apply :func:`long_rect_step` until the system is t-disjunct.

    Without an explicit ``k``, step ``j`` (counting from 0) uses
    ``k = ceil(n ** (1 / (j + 1)))`` with ``n`` the current box count; this
    is the ``ceil(n^(c-1))`` choice for the running exponent
    ``c = (j + 2) / (j + 1)``.
    """
    if d < 2:
        raise ValueError("long_rect_tower needs d >= 2")
    cfg = hyperplane_config(2, d - 1, m)
    level, step = d - 1, 0
    while level < t:
        kk = k if k is not None else _iroot_ceil(len(cfg.boxes), step + 1)
        cfg = long_rect_step(cfg, kk, level)
        level += 1
        step += 1
    cfg.claims["construction"] = "long_rect_tower"
    cfg.claims["params"] = {"d": d, "t": t, "m": m, "k": k}
    cfg.claims["disjunct"] = {"holds": [level], "fails": []}
    return cfg


def subspace_config(k: int, d: int, m: int) -> Config:
    """The grid [m]^d with every axis-parallel k-flat as a test; (d-k)-disjunct."""
    if not 1 <= k <= d - 1 or m < 2:
        raise ValueError("subspace_config needs 1 <= k <= d-1 and m >= 2")
    pts = _grid(m, d)
    boxes, labels = _flats(m, d, k)
    return Config(
        d, tuple(pts), tuple(boxes), tuple(map(_label, pts)), tuple(labels),
        _claims("subspaces", {"k": k, "d": d, "m": m}, ((d - k,), ())),
    )


def project_subspace_config(k: int, d: int, m: int) -> Config:
    """(d-1)-dimensional configuration equivalent to ``subspace_config(k, d, m)``.

    Coordinate i becomes ``(m + 1) * x_i + x_d``: the last coordinate is
    folded into every other one as a tie-breaker.
    """
    if k > d - 2:
        raise ValueError("projection needs k <= d - 2")
    src = subspace_config(k, d, m)
    base = m + 1

    def f(x):
        return tuple(base * v + x[-1] for v in x[:-1])

    return _realize(src, f, d - 1, "subspaces_projected", {"k": k, "d": d, "m": m})


def single_defective_grid(n: int) -> Config:
    """n x n points with one thin rectangle per row and per column (1-disjunct)."""
    if n < 1:
        raise ValueError("n must be positive")
    pts, labels = [], []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            pts.append((4 * i - 2, 4 * j - 2))
            labels.append(_label((i, j)))
    boxes, box_labels = [], []
    for j in range(1, n + 1):
        boxes.append(Box((0, 4 * j - 3), (4 * n, 4 * j - 1)))
        box_labels.append(f"row{j}")
        boxes.append(Box((4 * j - 3, 0), (4 * j - 1, 4 * n)))
        box_labels.append(f"col{j}")
    disj = ((1,), ()) if n >= 2 else None
    sep = ((1,), (2,)) if n >= 2 else None
    return Config(2, tuple(pts), tuple(boxes), tuple(labels), tuple(box_labels),
                  _claims("single_defective_grid", {"n": n}, disj, sep))


def disjoint_boxes(m: int, d: int) -> Config:
    """m pairwise disjoint boxes, each with one point strictly inside."""
    if m < 1 or d < 1:
        raise ValueError("disjoint_boxes needs m >= 1 and d >= 1")
    pts = [(3 * i + 1,) + (1,) * (d - 1) for i in range(m)]
    boxes = [Box((3 * i,) + (0,) * (d - 1), (3 * i + 2,) + (2,) * (d - 1)) for i in range(m)]
    disj = ((m - 1,), ()) if m >= 2 else None
    return Config(d, tuple(pts), tuple(boxes), tuple(f"x{i}" for i in range(m)),
                  tuple(f"B{i}" for i in range(m)), _claims("disjoint", {"m": m, "d": d}, disj))


@dataclass(frozen=True)
class ClaimCheck:
    prop: str
    t: int
    expected: bool
    holds: bool
    witness: object = None

    @property
    def ok(self) -> bool:
        return self.expected == self.holds


def verify_claims(c: Config, budget: int = DEFAULT_BUDGET, n_jobs: int = 1) -> list[ClaimCheck]:
    """Run every ``holds``/``fails`` claim in ``c.claims`` through the exact verifiers."""
    sys = induce(c)
    checks = []
    for prop in ("disjunct", "separable"):
        spec = c.claims.get(prop) or {}
        for expected, key in ((True, "holds"), (False, "fails")):
            for t in spec.get(key, []):
                if sys.m <= t:
                    continue
                if prop == "disjunct":
                    v = verify_disjunct(sys, t, budget=budget, n_jobs=n_jobs)
                else:
                    v = verify_separable(sys, t, budget=budget)
                checks.append(ClaimCheck(prop, t, expected, v.holds, v.witness))
    return checks


def size_formula(name: str, **p) -> tuple[int, int]:
    """Closed-form (points, boxes) for the named construction."""
    if name == "grid_lines":
        return p["n"] ** p["d"], p["d"] * p["n"] ** (p["d"] - 1)
    if name == "subspaces":
        return p["m"] ** p["d"], math.comb(p["d"], p["k"]) * p["m"] ** (p["d"] - p["k"])
    if name == "long_rect":
        return p["k"] * p["m"], p["k"] * p["n"] + p["m"]
    raise KeyError(name)
