"""Abstract set systems: exact separability/disjunctness checks and decoding.

Incidence rows are stored as Python ``int`` bitmasks (bit ``j`` set iff the
item lies in test ``j``), so unions are a single ``|`` and the width is
unbounded.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

DEFAULT_BUDGET = 10**8

EXACTLY = "exactly"
AT_MOST = "at_most"
_MODES = (EXACTLY, AT_MOST)


class BudgetExceeded(RuntimeError):
    """Raised instead of silently truncating an exhaustive search."""


class DecodeError(ValueError):
    pass


class CardinalityMismatch(DecodeError):
    def __init__(self, survivors: tuple[int, ...], expected: int):
        self.survivors = survivors
        self.expected = expected
        super().__init__(
            f"{len(survivors)} items survive the negative tests, expected {expected}"
        )


class NoConsistentSet(DecodeError):
    pass


class AmbiguousDecode(DecodeError):
    def __init__(self, witness: "SeparabilityCollision"):
        self.witness = witness
        super().__init__(
            f"outcome is explained by both {witness.first} and {witness.second}"
        )


@dataclass(frozen=True)
class Witness:
    """Base class for counterexamples returned by the verifiers."""

    kind = "witness"


@dataclass(frozen=True)
class SeparabilityCollision(Witness):
    first: tuple[int, ...]
    second: tuple[int, ...]
    kind = "separability_collision"


@dataclass(frozen=True)
class DisjunctCover(Witness):
    item: int
    cover: tuple[int, ...]
    kind = "disjunct_cover"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verifier. Truthy iff the property holds."""

    holds: bool
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class SetSystem:
    """``m`` items by ``n`` tests; ``rows[i]`` is the bitmask of tests containing item ``i``."""

    m: int
    n: int
    rows: tuple[int, ...]
    item_labels: tuple[str, ...] | None = None
    test_labels: tuple[str, ...] | None = None
    _full: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("a set system needs at least one item")
        if self.n < 0:
            raise ValueError("test count must be non-negative")
        rows = tuple(int(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != self.m:
            raise ValueError(f"expected {self.m} rows, got {len(rows)}")
        full = (1 << self.n) - 1
        object.__setattr__(self, "_full", full)
        for i, r in enumerate(rows):
            if r < 0 or r & ~full:
                raise ValueError(f"row {i} references a test index outside [0, {self.n})")
        for name, labels, size in (
            ("item_labels", self.item_labels, self.m),
            ("test_labels", self.test_labels, self.n),
        ):
            if labels is not None:
                labels = tuple(str(s) for s in labels)
                object.__setattr__(self, name, labels)
                if len(labels) != size:
                    raise ValueError(f"{name} has {len(labels)} entries, expected {size}")

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]], **labels) -> "SetSystem":
        rows = []
        for s in sets:
            r = 0
            for j in s:
                if not 0 <= j < n:
                    raise ValueError(f"test index {j} outside [0, {n})")
                r |= 1 << j
            rows.append(r)
        return cls(len(rows), n, tuple(rows), **labels)

    @classmethod
    def from_matrix(cls, matrix) -> "SetSystem":
        """Build from an ``m x n`` 0/1 incidence matrix (items are rows)."""
        matrix = [list(r) for r in matrix]
        n = len(matrix[0]) if matrix else 0
        return cls.from_sets(n, ([j for j, v in enumerate(r) if v] for r in matrix))

    def row_sets(self) -> list[list[int]]:
        return [mask_to_indices(r) for r in self.rows]

    def to_matrix(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.n)] for r in self.rows]

    def item_label(self, i: int) -> str:
        return self.item_labels[i] if self.item_labels else str(i)

    def test_label(self, j: int) -> str:
        return self.test_labels[j] if self.test_labels else str(j)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "rows": self.row_sets(),
            "item_labels": list(self.item_labels) if self.item_labels else [],
            "test_labels": list(self.test_labels) if self.test_labels else [],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SetSystem":
        n = int(data["n"])
        sys = cls.from_sets(
            n,
            data["rows"],
            item_labels=tuple(data.get("item_labels") or ()) or None,
            test_labels=tuple(data.get("test_labels") or ()) or None,
        )
        if sys.m != int(data["m"]):
            raise ValueError(f"declared m={data['m']} but {sys.m} rows given")
        return sys


def mask_to_indices(mask: int) -> list[int]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def _check_items(sys: SetSystem, items: Iterable[int]) -> tuple[int, ...]:
    items = tuple(sorted(set(items)))
    for i in items:
        if not 0 <= i < sys.m:
            raise IndexError(f"item index {i} outside [0, {sys.m})")
    return items


def _check_mode(mode: str) -> None:
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")


def signature(sys: SetSystem, items: Iterable[int]) -> int:
    """Bitmask of the tests hit by ``items``; 0 for the empty set."""
    sig = 0
    for i in _check_items(sys, items):
        sig |= sys.rows[i]
    return sig


def signature_vector(sys: SetSystem, items: Iterable[int]) -> tuple[bool, ...]:
    sig = signature(sys, items)
    return tuple(bool((sig >> j) & 1) for j in range(sys.n))


def run_tests(sys: SetSystem, defectives: Iterable[int]) -> tuple[bool, ...]:
    """Simulate every test: a test is positive iff it contains a defective item."""
    return signature_vector(sys, defectives)


def _as_mask(sys: SetSystem, outcome) -> int:
    if isinstance(outcome, int):
        mask = outcome
    else:
        outcome = list(outcome)
        if len(outcome) != sys.n:
            raise ValueError(f"outcome has width {len(outcome)}, expected {sys.n}")
        mask = 0
        for j, v in enumerate(outcome):
            if v:
                mask |= 1 << j
    if mask < 0 or mask & ~sys._full:
        raise ValueError("outcome references tests outside the system")
    return mask


def _sizes(t: int, mode: str, include_empty: bool) -> range:
    if mode == EXACTLY:
        return range(t, t + 1)
    return range(0 if include_empty else 1, t + 1)


def count_subsets(m: int, t: int, mode: str = EXACTLY, include_empty: bool = True) -> int:
    return sum(math.comb(m, s) for s in _sizes(t, mode, include_empty))


def _combos_with_signature(
    rows: Sequence[int], items: Sequence[int], size: int
) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(subset, signature)`` for all ``size``-subsets of ``items`` in lexicographic order."""
    k = len(items)
    if size == 0:
        yield (), 0
        return
    if size > k:
        return
    idx = [0] * size
    sigs = [0] * (size + 1)
    depth = 0
    idx[0] = 0
    while depth >= 0:
        i = idx[depth]
        if i > k - (size - depth):
            depth -= 1
            if depth >= 0:
                idx[depth] += 1
            continue
        sigs[depth + 1] = sigs[depth] | rows[items[i]]
        if depth == size - 1:
            yield tuple(items[j] for j in idx), sigs[size]
            idx[depth] += 1
        else:
            depth += 1
            idx[depth] = i + 1


def verify_separable(
    sys: SetSystem,
    t: int,
    mode: str = EXACTLY,
    *,
    include_empty: bool = True,
    budget: int = DEFAULT_BUDGET,
) -> Verdict:
    """Check ``t``-separability (``mode="exactly"``) or t-bar-separability (``"at_most"``).

    Subsets are enumerated by size, then lexicographically; the first subset
    whose signature was already seen yields a
    :class:`SeparabilityCollision` ``(earlier, later)``. In ``at_most`` mode
    the empty set is admissible unless ``include_empty`` is false, so an item
    that lies in no test collides with it.
    """
    _check_mode(mode)
    if t < 1:
        raise ValueError("t must be positive")
    if sys.m <= t:
        raise ValueError(f"separability needs more than t={t} items, system has {sys.m}")
    total = count_subsets(sys.m, t, mode, include_empty)
    if total > budget:
        raise BudgetExceeded(f"{total} subsets to enumerate exceeds budget {budget}")
    seen: dict[int, tuple[int, ...]] = {}
    items = range(sys.m)
    for size in _sizes(t, mode, include_empty):
        for subset, sig in _combos_with_signature(sys.rows, items, size):
            prev = seen.setdefault(sig, subset)
            if prev is not subset:
                # int keys compare exactly; the recheck guards the dict contract only
                assert signature(sys, prev) == signature(sys, subset)
                return Verdict(False, SeparabilityCollision(prev, subset))
    return Verdict(True)


def _cover_candidates(rows: Sequence[int], x: int) -> list[tuple[int, int]]:
    """Trace-maximal ``(item, trace)`` pairs that can help cover ``rows[x]``."""
    target = rows[x]
    first_by_trace: dict[int, int] = {}
    for y, r in enumerate(rows):
        if y == x:
            continue
        tr = r & target
        if tr and tr not in first_by_trace:
            first_by_trace[tr] = y
    traces = list(first_by_trace)
    maximal = [
        tr for tr in traces
        if not any(o != tr and (o & tr) == tr for o in traces)
    ]
    return sorted((first_by_trace[tr], tr) for tr in maximal)


def _find_cover(target: int, cands: list[tuple[int, int]], t: int, budget: int) -> tuple[int, ...] | None:
    """Depth-first exact search for at most ``t`` candidates whose traces cover ``target``.

    Branches on the lowest uncovered test, trying candidates in item order.
    """
    nodes = 0

    def rec(covered: int, chosen: list[int], depth: int):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"cover search exceeded budget {budget}")
        missing = target & ~covered
        if not missing:
            return tuple(chosen)
        if depth == t:
            return None
        low = missing & -missing
        for y, tr in cands:
            if tr & low:
                chosen.append(y)
                found = rec(covered | tr, chosen, depth + 1)
                chosen.pop()
                if found is not None:
                    return found
        return None

    return rec(0, [], 0)


def _disjunct_witness_for(rows: Sequence[int], x: int, t: int, budget: int) -> DisjunctCover | None:
    m = len(rows)
    if rows[x] == 0:
        cover: tuple[int, ...] = ()
    else:
        found = _find_cover(rows[x], _cover_candidates(rows, x), t, budget)
        if found is None:
            return None
        cover = found
    chosen = set(cover)
    padded = list(cover)
    for y in range(m):
        if len(padded) == t:
            break
        if y != x and y not in chosen:
            padded.append(y)
    return DisjunctCover(x, tuple(sorted(padded)))


def _disjunct_chunk(args) -> DisjunctCover | None:
    rows, xs, t, budget = args
    for x in xs:
        w = _disjunct_witness_for(rows, x, t, budget)
        if w is not None:
            return w
    return None


def verify_disjunct(
    sys: SetSystem,
    t: int,
    *,
    budget: int = DEFAULT_BUDGET,
    n_jobs: int = 1,
) -> Verdict:
    """Check ``t``-disjunctness: no item's tests are covered by ``t`` other items.

    Items are examined in index order; for each, a cover is searched among
    the trace-maximal other items (one representative per distinct trace).
    Dropping dominated or duplicate traces cannot turn a coverable item into
    an uncoverable one, so the verdict is exact. ``budget`` bounds the search
    nodes spent on a single item. With ``n_jobs > 1`` items are split across
    processes and the lowest-indexed witness is reported, matching the serial
    result.
    """
    if t < 1:
        raise ValueError("t must be positive")
    if sys.m <= t:
        raise ValueError(f"disjunctness needs more than t={t} items, system has {sys.m}")
    rows = sys.rows
    if n_jobs <= 1 or sys.m < 2 * n_jobs:
        w = _disjunct_chunk((rows, range(sys.m), t, budget))
    else:
        bounds = [sys.m * k // n_jobs for k in range(n_jobs + 1)]
        jobs = [(rows, range(bounds[k], bounds[k + 1]), t, budget) for k in range(n_jobs)]
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            found = [w for w in ex.map(_disjunct_chunk, jobs) if w is not None]
        w = min(found, key=lambda w: w.item) if found else None
    return Verdict(w is None, w)


def decode_disjunct(sys: SetSystem, outcome, t: int) -> tuple[int, ...]:
    """Discard every item that lies in a negative test; exactly ``t`` must remain."""
    positive = _as_mask(sys, outcome)
    survivors = tuple(i for i, r in enumerate(sys.rows) if r & ~positive == 0)
    if len(survivors) != t:
        raise CardinalityMismatch(survivors, t)
    return survivors


def decode_by_signature(
    sys: SetSystem,
    outcome,
    t: int,
    mode: str = EXACTLY,
    *,
    include_empty: bool = True,
    budget: int = DEFAULT_BUDGET,
) -> tuple[int, ...]:
    """Return the unique admissible subset whose signature equals ``outcome``.

    Only items whose tests are all positive can belong to a consistent set,
    so enumeration runs over those; the answer is the same as enumerating
    every admissible subset.
    """
    _check_mode(mode)
    target = _as_mask(sys, outcome)
    cands = [i for i, r in enumerate(sys.rows) if r & ~target == 0]
    total = count_subsets(len(cands), t, mode, include_empty)
    if total > budget:
        raise BudgetExceeded(f"{total} candidate subsets exceeds budget {budget}")
    match = None
    for size in _sizes(t, mode, include_empty):
        for subset, sig in _combos_with_signature(sys.rows, cands, size):
            if sig != target:
                continue
            if match is not None:
                raise AmbiguousDecode(SeparabilityCollision(match, subset))
            match = subset
    if match is None:
        raise NoConsistentSet("no admissible subset reproduces the outcome")
    return match
