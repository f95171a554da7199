"""Forbidden point patterns, stabbing, weight functions and grid coverings.

Pattern kinds:

``induced_rectangle``
    four points at the corners of an axis-parallel rectangle (2-d).
``z_shape``
    ``w, x, y, z`` with ``w1 < x1 = y1 < z1`` and ``w2 = x2 < y2 = z2`` (2-d).
``star``
    a center plus, for every axis, one more point differing from the center
    in that coordinate only (any dimension).

A covering of ``[n]^d`` is valid for ``V`` when no covering box has a
``V``-point strictly inside it. Its weight sums, per box, a certified upper
bound on how many points fit in the box without creating the pattern.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .geometry import Box, Point
from .setsystem import Verdict, Witness

INDUCED_RECTANGLE = "induced_rectangle"
Z_SHAPE = "z_shape"
STAR = "star"
KINDS = (INDUCED_RECTANGLE, Z_SHAPE, STAR)

SCHEMES = {"zar": INDUCED_RECTANGLE, "zshape": Z_SHAPE, "star": STAR}
_SCHEME_OF = {v: k for k, v in SCHEMES.items()}

# Integer ceiling of calibrate_z_constant() (10/7 on grids up to 5 x 5). The
# raw ratio is not safe beyond that range: z'(2 x 7) = 14 > ceil(10/7 * 9).
# The exact values p + 2q - 2 (p >= 2) stay below 2 * (p + q) everywhere.
# Coverings use at most 2n pieces of weight <= 2c * sqrt(n), hence 4c.
Z_SHAPE_CONSTANT = 2
Z_COVER_CONSTANT = 4 * Z_SHAPE_CONSTANT

DEFAULT_CELL_BUDGET = {INDUCED_RECTANGLE: 25, Z_SHAPE: 25}


def _kind(kind: str) -> str:
    kind = SCHEMES.get(kind, kind)
    if kind not in KINDS:
        raise ValueError(f"unknown pattern kind {kind!r}")
    return kind


@dataclass(frozen=True)
class PatternOccurrence(Witness):
    pattern: str
    points: tuple[Point, ...]
    kind = "pattern"

    @property
    def rect(self) -> Box:
        return Box.bounding(self.points)


def _canon(points: Iterable[Sequence[int]]) -> list[Point]:
    return sorted({tuple(int(v) for v in p) for p in points})


def _dim_check(points: list[Point], kind: str) -> int:
    dims = {len(p) for p in points}
    if len(dims) > 1:
        raise ValueError("points of mixed dimension")
    d = dims.pop() if dims else (2 if kind != STAR else 0)
    if kind in (INDUCED_RECTANGLE, Z_SHAPE) and points and d != 2:
        raise ValueError(f"{kind} is a planar pattern, got {d}-d points")
    return d


def _rectangles(points: list[Point]) -> Iterator[tuple[Point, ...]]:
    cols: dict[int, list[int]] = {}
    for x, y in points:
        cols.setdefault(x, []).append(y)
    xs = sorted(cols)
    colsets = {x: set(cols[x]) for x in xs}
    for ia, a in enumerate(xs):
        for b in xs[ia + 1:]:
            common = sorted(colsets[a] & colsets[b])
            for c, d in zip(common, common[1:]):
                yield ((a, c), (a, d), (b, c), (b, d))


def _z_shapes(points: list[Point], mirrored: bool) -> Iterator[tuple[Point, ...]]:
    rows: dict[int, list[int]] = {}
    cols: dict[int, list[int]] = {}
    for x, y in points:
        rows.setdefault(y, []).append(x)
        cols.setdefault(x, []).append(y)
    for r in rows.values():
        r.sort()
    for a in sorted(cols):
        ys = sorted(cols[a])
        for i, r in enumerate(ys):
            left = [x for x in rows[r] if (x > a if mirrored else x < a)]
            if not left:
                continue
            w1 = min(left) if mirrored else max(left)
            for s in ys[i + 1:]:
                right = [x for x in rows[s] if (x < a if mirrored else x > a)]
                if right:
                    z1 = max(right) if mirrored else min(right)
                    yield ((w1, r), (a, r), (a, s), (z1, s))


def _stars(points: list[Point]) -> Iterator[tuple[Point, ...]]:
    if not points:
        return
    d = len(points[0])
    lines: list[dict[tuple, list[int]]] = [{} for _ in range(d)]
    for p in points:
        for i in range(d):
            lines[i].setdefault(p[:i] + p[i + 1:], []).append(p[i])
    for ln in lines:
        for v in ln.values():
            v.sort()
    for p in points:
        choices = []
        for i in range(d):
            vals = lines[i][p[:i] + p[i + 1:]]
            k = vals.index(p[i])
            near = [vals[j] for j in (k - 1, k + 1) if 0 <= j < len(vals)]
            if not near:
                break
            choices.append([p[:i] + (v,) + p[i + 1:] for v in near])
        else:
            for arms in product(*choices):
                yield (p,) + arms


def occurrences(points: Iterable[Sequence[int]], kind: str, *, mirrored: bool = False
                ) -> Iterator[PatternOccurrence]:
    """Occurrences whose bounding boxes are inclusion-minimal among related ones.

    Every occurrence of the pattern in ``points`` has a bounding box that
    contains the bounding box of some yielded occurrence, which is all that
    stabbing checks need. The first yielded occurrence is the one reported
    by :func:`find_pattern`.
    """
    kind = _kind(kind)
    pts = _canon(points)
    _dim_check(pts, kind)
    if kind == INDUCED_RECTANGLE:
        gen = _rectangles(pts)
    elif kind == Z_SHAPE:
        gen = _z_shapes(pts, False)
        if mirrored:
            gen = _chain(gen, _z_shapes(pts, True))
    else:
        gen = _stars(pts)
    for occ in gen:
        yield PatternOccurrence(kind, occ)


def _chain(*gens):
    for g in gens:
        yield from g


def find_pattern(points: Iterable[Sequence[int]], kind: str, *, mirrored: bool = False
                 ) -> PatternOccurrence | None:
    """First occurrence of ``kind`` in ``points``, or ``None``.

    Search order: induced rectangles by (left column, right column, lower
    row); Z-shapes by (middle column, lower row, upper row); stars by center
    in lexicographic order.
    """
    return next(occurrences(points, kind, mirrored=mirrored), None)


def stabs(V: Iterable[Sequence[int]], P: Iterable[Sequence[int]], kind: str, *,
          mirrored: bool = False) -> Verdict:
    """Whether every occurrence of ``kind`` in ``P`` has a ``V``-point strictly
    inside its bounding box; otherwise the first unstabbed occurrence."""
    vs = _canon(V)
    arr = np.array(vs, dtype=object) if vs else None
    for occ in occurrences(P, kind, mirrored=mirrored):
        r = occ.rect
        if arr is None or not _any_strictly_inside(arr, r):
            return Verdict(False, occ)
    return Verdict(True)


def _any_strictly_inside(arr: np.ndarray, box: Box) -> bool:
    mask = np.ones(len(arr), dtype=bool)
    for i, (a, b) in enumerate(zip(box.lo, box.hi)):
        col = arr[:, i]
        mask &= (col > a) & (col < b)
        if not mask.any():
            return False
    return bool(mask.any())


def _ceil_sqrt(p: int) -> int:
    r = math.isqrt(p)
    return r if r * r == p else r + 1


def weight(*args, kind: str | None = None) -> int:
    """Certified upper bound on pattern-free points in a box, given its grid points per axis.

    Called as ``weight(p, q, ..., kind)``, ``weight(dims, kind)`` or with
    ``kind=`` as a keyword.

    * induced rectangle, ``p >= q``: ``ceil(sqrt(p)) * q + p``
    * Z-shape: ``ceil(Z_SHAPE_CONSTANT * (p + q))``
    * star: the number of axis-parallel grid lines through the box,
      ``sum_i prod_{j != i} dims_j`` (``d * p**(d-1)`` for a cube)
    """
    if kind is None:
        *args, kind = args
    if len(args) == 1 and not isinstance(args[0], (int, np.integer)):
        args = tuple(args[0])
    kind = _kind(kind)
    dims = tuple(int(v) for v in args)
    if not dims or any(v < 1 for v in dims):
        raise ValueError("every side needs at least one grid point")
    if kind == STAR:
        return sum(math.prod(dims[:i] + dims[i + 1:]) for i in range(len(dims)))
    if len(dims) != 2:
        raise ValueError(f"{kind} weights are defined for 2-d boxes")
    p, q = max(dims), min(dims)
    if kind == INDUCED_RECTANGLE:
        return _ceil_sqrt(p) * q + p
    return math.ceil(Fraction(Z_SHAPE_CONSTANT) * (p + q))


# --- exact extremal oracles -------------------------------------------------

def _max_rectangle_free(p: int, q: int) -> int:
    """Columns left to right; state = set of row pairs already used by some column."""
    pair_bit = {}
    for r in range(q):
        for s in range(r + 1, q):
            pair_bit[(r, s)] = 1 << len(pair_bit)
    col_pairs = []
    for mask in range(1 << q):
        rows = [r for r in range(q) if mask >> r & 1]
        used = 0
        for i, r in enumerate(rows):
            for s in rows[i + 1:]:
                used |= pair_bit[(r, s)]
        col_pairs.append((bin(mask).count("1"), used))
    best = {0: 0}
    for _ in range(p):
        nxt: dict[int, int] = {}
        for used, val in best.items():
            for cnt, pairs in col_pairs:
                if pairs & used:
                    continue
                key = used | pairs
                if nxt.get(key, -1) < val + cnt:
                    nxt[key] = val + cnt
        best = nxt
    return max(best.values())


def _max_z_free(p: int, q: int) -> int:
    """Columns left to right; state = (rows seen so far, rows closed to the right).

    A row ``s`` closes once some column holds rows ``r < s`` with ``r``
    already seen further left: any later point in row ``s`` completes a Z.
    """
    best = {(0, 0): 0}
    full = (1 << q) - 1
    for _ in range(p):
        nxt: dict[tuple[int, int], int] = {}
        for (seen, closed), val in best.items():
            for col in range(full + 1):
                if col & closed:
                    continue
                newly = 0
                for s in range(q):
                    if col >> s & 1 and col & seen & ((1 << s) - 1):
                        newly |= 1 << s
                key = (seen | col, closed | newly)
                v = val + bin(col).count("1")
                if nxt.get(key, -1) < v:
                    nxt[key] = v
        best = nxt
    return max(best.values())


def _max_star_free(dims: Sequence[int]) -> int:
    """Branch and bound over cells in lexicographic order.

    A chosen point is dead once each of its lines holds another chosen point;
    adding points never revives it, so a dead point prunes the branch.
    """
    d = len(dims)
    cells = list(product(*(range(s) for s in dims)))
    index = {c: i for i, c in enumerate(cells)}
    line_id: list[list[int]] = []
    line_keys: dict[tuple, int] = {}
    for c in cells:
        ids = []
        for i in range(d):
            key = (i, c[:i] + c[i + 1:])
            ids.append(line_keys.setdefault(key, len(line_keys)))
        line_id.append(ids)
    members: list[list[int]] = [[] for _ in line_keys]
    for ci, ids in enumerate(line_id):
        for lid in ids:
            members[lid].append(ci)
    count = [0] * len(line_keys)
    chosen = [False] * len(cells)
    ncell = len(cells)
    best = 0

    def dead(ci: int) -> bool:
        return all(count[lid] >= 2 for lid in line_id[ci])

    def rec(pos: int, size: int):
        nonlocal best
        if size > best:
            best = size
        if pos == ncell or size + (ncell - pos) <= best:
            return
        # include cell pos
        for lid in line_id[pos]:
            count[lid] += 1
        chosen[pos] = True
        ok = not dead(pos)
        if ok:
            for lid in line_id[pos]:
                if count[lid] == 2:
                    for other in members[lid]:
                        if other != pos and chosen[other] and dead(other):
                            ok = False
                            break
                if not ok:
                    break
        if ok:
            rec(pos + 1, size + 1)
        chosen[pos] = False
        for lid in line_id[pos]:
            count[lid] -= 1
        rec(pos + 1, size)

    rec(0, 0)
    del index
    return best


def brute_pattern_free_max(dims: Sequence[int], kind: str, *, budget: int | None = None) -> int:
    """Exact maximum number of grid points in a box of ``dims`` avoiding ``kind``.

    ``budget`` caps the number of cells (default 25 for the planar patterns,
    ``4**d`` for stars).
    """
    kind = _kind(kind)
    dims = tuple(int(v) for v in dims)
    if any(v < 1 for v in dims):
        raise ValueError("every side needs at least one grid point")
    if budget is None:
        budget = DEFAULT_CELL_BUDGET.get(kind, 4 ** len(dims))
    cells = math.prod(dims)
    if cells > budget:
        from .setsystem import BudgetExceeded
        raise BudgetExceeded(f"{cells} cells exceeds oracle budget {budget}")
    if kind == STAR:
        return _max_star_free(dims)
    if len(dims) != 2:
        raise ValueError(f"{kind} is a planar pattern")
    p, q = dims
    if kind == INDUCED_RECTANGLE:
        return _max_rectangle_free(p, q)
    return _max_z_free(p, q)


def calibrate_z_constant(max_side: int = 5) -> Fraction:
    """Largest ratio ``z'(p x q) / (p + q)`` over grids up to ``max_side`` on both axes."""
    return max(
        Fraction(brute_pattern_free_max((p, q), Z_SHAPE), p + q)
        for p in range(1, max_side + 1)
        for q in range(1, max_side + 1)
    )


def hard_instance(k: int) -> list[Point]:
    """``k**3`` points in ``[k**3]^2``: a ``k x k`` array of ``k^2 x k^2`` cells,
    each holding ``k`` points spaced ``k`` apart on its diagonal."""
    if k < 1:
        raise ValueError("k must be positive")
    return sorted(
        (I * k * k + s * k + 1, J * k * k + s * k + 1)
        for I in range(k) for J in range(k) for s in range(k)
    )


# --- coverings --------------------------------------------------------------

@dataclass
class Covering:
    grid_side: int
    dim: int
    boxes: list[Box]
    scheme: str
    requested_side: int | None = None
    density: Fraction = field(default=Fraction(1))

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "grid_side": self.grid_side,
            "requested_side": self.requested_side or self.grid_side,
            "dim": self.dim,
            "density": str(self.density),
            "boxes": [
                {"label": f"Q{j}", "lo": list(b.lo), "hi": list(b.hi)}
                for j, b in enumerate(self.boxes)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Covering":
        return cls(
            grid_side=int(data["grid_side"]),
            dim=int(data["dim"]),
            boxes=[Box(tuple(b["lo"]), tuple(b["hi"])) for b in data["boxes"]],
            scheme=data["scheme"],
            requested_side=int(data.get("requested_side") or data["grid_side"]),
            density=Fraction(data.get("density", "1")),
        )

    def bound(self) -> Fraction:
        """Closed-form ceiling on the total weight of coverings built by :func:`cover`."""
        n, d = self.grid_side, self.dim
        if self.scheme == "zar":
            k = _iroot(n, 3)
            return Fraction(4 * k**5)
        if self.scheme == "zshape":
            k = _iroot(n, 2)
            return Fraction(Z_COVER_CONSTANT * k**3)
        k = _iroot(n, d)
        return (1 + self.density) * d * k ** (d * (d - 1) + 1)


@dataclass(frozen=True)
class WeightReport:
    scheme: str
    weights: tuple[int, ...]
    dims: tuple[tuple[int, ...], ...]
    total: int

    def to_csv(self) -> str:
        lines = ["box,dims,weight"]
        for j, (dm, w) in enumerate(zip(self.dims, self.weights)):
            lines.append(f"Q{j},{'x'.join(map(str, dm))},{w}")
        lines.append(f"total,,{self.total}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class UncoveredPoint(Witness):
    point: Point
    kind = "uncovered_point"


@dataclass(frozen=True)
class InteriorPoint(Witness):
    box: int
    point: Point
    kind = "interior_point"


def _iroot(n: int, r: int) -> int:
    """Smallest k with k**r >= n."""
    k = max(1, int(round(n ** (1.0 / r))))
    while k**r < n:
        k += 1
    while k > 1 and (k - 1) ** r >= n:
        k -= 1
    return k


def _split(box: Box, V: list[Point], axis: int) -> list[Box]:
    cuts = sorted({v[axis] for v in V if box.interior_contains(v)})
    if not cuts:
        return [box]
    edges = [box.lo[axis]] + cuts + [box.hi[axis]]
    out = []
    for a, b in zip(edges, edges[1:]):
        lo = box.lo[:axis] + (a,) + box.lo[axis + 1:]
        hi = box.hi[:axis] + (b,) + box.hi[axis + 1:]
        out.append(Box(lo, hi))
    return out


def cover(n: int, d: int, V: Iterable[Sequence[int]], scheme: str, *,
          split_axis: int = 0, density: int | Fraction | None = None) -> Covering:
    """Build a covering of ``[n]^d`` valid for ``V``.

    Start from a regular tiling (``zar``: ``k^2 x k`` tiles with ``n = k^3``;
    ``zshape``: ``k x k`` squares with ``n = k^2``; ``star``: cubes of side
    ``k^(d-1)`` with ``n = k^d``), then cut every tile through each ``V``-point
    in its interior with a hyperplane orthogonal to ``split_axis``. A side
    that is not a perfect power is padded up to the next one.

    For ``star`` the bound uses ``|V| <= density * n``; ``density`` defaults
    to the smallest integer ``>= 1`` that satisfies it.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {sorted(SCHEMES)}")
    pts = _canon(V)
    if scheme in ("zar", "zshape") and d != 2:
        raise ValueError(f"scheme {scheme} is planar")
    if not 0 <= split_axis < d:
        raise ValueError("split axis out of range")
    if scheme == "zar":
        k = _iroot(n, 3)
        N = k**3
        tile = (k * k, k)
    elif scheme == "zshape":
        k = _iroot(n, 2)
        N = k * k
        tile = (k, k)
    else:
        k = _iroot(n, d)
        N = k**d
        tile = (k ** (d - 1),) * d
    for v in pts:
        if len(v) != d or not all(1 <= c <= N for c in v):
            raise ValueError(f"point {v} lies outside [1, {N}]^{d}")
    if scheme == "star":
        if density is None:
            density = max(1, -(-len(pts) // N))
        density = Fraction(density)
        if density < 1 or len(pts) > density * N:
            raise ValueError(f"|V| = {len(pts)} exceeds density {density} * {N}")
    else:
        density = Fraction(1)
        if len(pts) > N:
            raise ValueError(f"|V| = {len(pts)} exceeds n = {N}")
    counts = [N // s for s in tile]
    boxes: list[Box] = []
    for idx in product(*(range(c) for c in counts)):
        lo = tuple(i * s + 1 for i, s in zip(idx, tile))
        hi = tuple((i + 1) * s for i, s in zip(idx, tile))
        boxes.extend(_split(Box(lo, hi), pts, split_axis))
    return Covering(N, d, boxes, scheme, requested_side=n, density=density)


def covering_check(cov: Covering, V: Iterable[Sequence[int]]) -> WeightReport | Witness:
    """Weight report if ``cov`` covers ``[n]^d`` and is valid for ``V``; otherwise
    the first uncovered grid point or the first box with a ``V``-point inside."""
    N, d = cov.grid_side, cov.dim
    hit = np.zeros((N,) * d, dtype=bool)
    for b in cov.boxes:
        sl = tuple(slice(max(a, 1) - 1, min(c, N)) for a, c in zip(b.lo, b.hi))
        hit[sl] = True
    if not hit.all():
        missing = np.argwhere(~hit)[0]
        return UncoveredPoint(tuple(int(v) + 1 for v in missing))
    pts = _canon(V)
    for j, b in enumerate(cov.boxes):
        for v in pts:
            if b.interior_contains(v):
                return InteriorPoint(j, v)
    kind = SCHEMES[cov.scheme]
    dims = tuple(b.grid_size() for b in cov.boxes)
    ws = tuple(weight(dm, kind) for dm in dims)
    return WeightReport(cov.scheme, ws, dims, sum(ws))


def pigeonhole(cov: Covering, P: Iterable[Sequence[int]], *, mirrored: bool = False) -> Verdict:
    """Holds when ``|P|`` is at most the covering weight. Otherwise some box holds
    more points than its weight allows, and the pattern found inside it is
    returned as the witness."""
    pts = _canon(P)
    kind = SCHEMES[cov.scheme]
    ws = [weight(b.grid_size(), kind) for b in cov.boxes]
    if len(pts) <= sum(ws):
        return Verdict(True)
    for b, w in zip(cov.boxes, ws):
        inside = [p for p in pts if all(a <= v <= c for a, v, c in zip(b.lo, p, b.hi))]
        if len(inside) > w:
            occ = find_pattern(inside, kind, mirrored=mirrored)
            if occ is None:
                raise AssertionError(f"box {b} exceeds its weight {w} without a {kind}")
            return Verdict(False, occ)
    raise AssertionError("points outside the covered grid")
