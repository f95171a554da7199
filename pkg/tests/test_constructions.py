import math
from itertools import product

import pytest

import oracles
from geogt.constructions import (
    EquivalenceError,
    Partition,
    _realize,
    disjoint_boxes,
    embed_grid_lines_2d,
    grid_lines,
    hyperplane_config,
    hyperplane_partitions,
    long_rect_step,
    long_rect_tower,
    partition_system,
    partitions_to_boxes,
    project_subspace_config,
    single_defective_grid,
    size_formula,
    subspace_config,
    vandermonde_normals,
    verify_claims,
)
from geogt.geometry import contains, induce
from geogt.setsystem import verify_disjunct


def point(c, label):
    return c.points[c.point_labels.index(label)]


def box(c, label):
    return c.boxes[c.box_labels.index(label)]


# --- grid lines -------------------------------------------------------------

@pytest.mark.parametrize("n,d,m,tests", [(5, 2, 25, 10), (3, 3, 27, 27), (2, 1, 2, 1), (2, 4, 16, 32)])
def test_grid_lines_sizes(n, d, m, tests):
    c = grid_lines(n, d)
    assert (len(c.points), len(c.boxes)) == (m, tests) == size_formula("grid_lines", n=n, d=d)


def test_grid_lines_rejects_side_one():
    with pytest.raises(ValueError):
        grid_lines(1, 2)


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4)])
def test_grid_line_claims_verified(n, d):
    checks = verify_claims(grid_lines(n, d))
    assert checks and all(chk.ok for chk in checks)


def test_grid_line_claim_levels():
    assert grid_lines(3, 3).claims["separable"] == {"holds": [3], "fails": [4]}
    assert grid_lines(2, 5).claims["separable"] == {"holds": [8], "fails": [9]}
    assert grid_lines(2, 4).claims["disjunct"] == {"holds": [3], "fails": [4]}


# --- 2-d embedding ----------------------------------------------------------

@pytest.mark.parametrize("n,d", [(2, 2), (3, 3), (2, 4), (3, 4)])
def test_embedding_is_equivalent(n, d):
    e = embed_grid_lines_2d(n, d)
    assert e.dim == 2
    assert induce(e).rows == induce(grid_lines(n, d)).rows


def test_embedding_orders_points_lexicographically_both_ways():
    e = embed_grid_lines_2d(2, 2)
    labels = e.point_labels
    by_x = [labels[i] for i in sorted(range(4), key=lambda i: e.points[i][0])]
    by_y = [labels[i] for i in sorted(range(4), key=lambda i: e.points[i][1])]
    assert len({p[0] for p in e.points}) == 4 and len({p[1] for p in e.points}) == 4
    assert by_x == ["(1,1)", "(1,2)", "(2,1)", "(2,2)"]
    assert by_y == ["(1,1)", "(2,1)", "(1,2)", "(2,2)"]


def test_embedded_point_on_its_line():
    e = embed_grid_lines_2d(3, 3)
    assert contains(box(e, "(1,1,*)"), point(e, "(1,1,2)"))
    assert point(e, "(1,1,2)") == (1 * 16 + 1 * 4 + 2, 1 + 1 * 4 + 2 * 16)


def test_realize_aborts_on_non_equivalent_map():
    src = grid_lines(2, 2)
    with pytest.raises(EquivalenceError):
        _realize(src, lambda x: (x[0], 0), 2, "broken", {})


# --- hyperplanes and partitions ---------------------------------------------

def test_vandermonde_normals():
    assert vandermonde_normals(2, 2) == [(1, 0), (1, 1), (1, 2)]
    assert vandermonde_normals(3, 1) == [(1, 0, 0), (1, 1, 1), (1, 2, 4)]


def test_hyperplane_partitions_group_by_dot_product():
    parts = hyperplane_partitions(2, 2, 5)
    assert len(parts) == 3
    grid = list(product(range(1, 6), repeat=2))
    for c, part in zip(vandermonde_normals(2, 2), parts):
        values = {sum(a * b for a, b in zip(c, x)) for x in grid}
        assert len(part.parts) == len(values)
        for S in part.parts:
            assert len({sum(a * b for a, b in zip(c, grid[i])) for i in S}) == 1
    assert sum(len(p.parts) for p in parts) <= 3 ** 2 * 5


def test_single_normal_gives_singletons():
    (p,) = hyperplane_partitions(1, 3, 4)
    assert sorted(map(tuple, p.parts)) == [(0,), (1,), (2,), (3,)]


def test_hyperplane_system_is_t_disjunct():
    sys = partition_system(hyperplane_partitions(2, 2, 5))
    assert verify_disjunct(sys, 2)
    assert oracles.disjunct(sys.rows, 2)


def test_partitions_to_boxes_matches_membership():
    parts = hyperplane_partitions(2, 2, 5)
    c = partitions_to_boxes(parts)
    assert c.dim == 3 and len(c.points) == 25
    assert len(c.boxes) == sum(len(p.parts) for p in parts)
    assert induce(c).rows == partition_system(parts).rows
    assert verify_disjunct(induce(c), 2)


def test_identical_partitions_put_points_on_a_diagonal():
    p = Partition(4, ((0, 1), (2,), (3,)))
    c = partitions_to_boxes([p, p])
    assert all(x == y for x, y in c.points)
    rows = induce(c).to_matrix()
    for j in range(3):
        assert [r[j] for r in rows] == [r[j + 3] for r in rows]


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition(3, ((0, 1), (1, 2)))
    with pytest.raises(ValueError):
        Partition(3, ((0,), (1,)))
    with pytest.raises(ValueError):
        partitions_to_boxes([Partition(2, ((0, 1),)), Partition(3, ((0, 1, 2),))])


def test_hyperplane_config_claims():
    assert all(chk.ok for chk in verify_claims(hyperplane_config(2, 2, 5)))


# --- long rectangles --------------------------------------------------------

@pytest.mark.parametrize("k", [1, 2, 3])
def test_long_rect_step_sizes_and_disjunctness(k):
    c = long_rect_step(single_defective_grid(3), k)
    assert (len(c.points), len(c.boxes)) == (9 * k, 6 * k + 9)
    assert (len(c.points), len(c.boxes)) == size_formula("long_rect", k=k, m=9, n=6)
    assert c.claims["disjunct"]["holds"] == [2]
    assert verify_disjunct(induce(c), 2)


def test_long_rect_step_on_embedded_grid_lines():
    c = long_rect_step(embed_grid_lines_2d(3, 2), 2)
    assert oracles.disjunct(induce(c).rows, 2)


def test_long_rect_step_twice():
    c = long_rect_step(long_rect_step(single_defective_grid(3), 2), 2)
    assert c.claims["disjunct"]["holds"] == [3]
    assert oracles.disjunct(induce(c).rows, 3)


def test_long_rect_step_needs_claim_or_t():
    plain = single_defective_grid(2).replace(claims={})
    with pytest.raises(ValueError):
        long_rect_step(plain, 2)
    assert verify_disjunct(induce(long_rect_step(plain, 2, t=1)), 2)


def test_long_rect_step_rejects_one_dimension():
    with pytest.raises(ValueError):
        long_rect_step(disjoint_boxes(3, 1), 2)


@pytest.mark.parametrize("d,t,m", [(2, 2, 3), (2, 3, 3), (3, 3, 3)])
def test_tower_reaches_requested_level(d, t, m):
    c = long_rect_tower(d, t, m)
    assert c.dim == d
    assert c.claims["disjunct"]["holds"] == [t]
    assert verify_disjunct(induce(c), t)


# --- subspaces --------------------------------------------------------------

@pytest.mark.parametrize("k,d,m", [(1, 2, 3), (2, 3, 3), (2, 4, 2), (1, 3, 2)])
def test_subspace_sizes(k, d, m):
    c = subspace_config(k, d, m)
    assert (len(c.points), len(c.boxes)) == (m**d, math.comb(d, k) * m ** (d - k))
    assert (len(c.points), len(c.boxes)) == size_formula("subspaces", k=k, d=d, m=m)


def test_lines_are_one_dimensional_subspaces():
    a, b = subspace_config(1, 2, 3), grid_lines(3, 2)
    assert induce(a).rows == induce(b).rows
    assert a.box_labels == b.box_labels


@pytest.mark.parametrize("k,d,m,t", [(2, 4, 2, 2), (2, 3, 3, 1), (1, 3, 2, 2)])
def test_subspace_disjunctness(k, d, m, t):
    c = subspace_config(k, d, m)
    assert c.claims["disjunct"]["holds"] == [t]
    assert oracles.disjunct(induce(c).rows, t)


@pytest.mark.parametrize("k,d,m", [(2, 4, 2), (1, 3, 2), (1, 3, 3)])
def test_projection_is_equivalent(k, d, m):
    p = project_subspace_config(k, d, m)
    assert p.dim == d - 1
    assert induce(p).rows == induce(subspace_config(k, d, m)).rows


def test_projected_lines_match_embedded_grid_lines():
    a, b = project_subspace_config(1, 3, 2), embed_grid_lines_2d(2, 3)
    assert a.point_labels == b.point_labels and a.box_labels == b.box_labels
    assert induce(a).rows == induce(b).rows


def test_projection_needs_room():
    with pytest.raises(ValueError):
        project_subspace_config(2, 3, 2)


# --- small generators -------------------------------------------------------

def test_single_defective_grid():
    c = single_defective_grid(4)
    assert (len(c.points), len(c.boxes)) == (16, 8)
    assert verify_disjunct(induce(c), 1)
    assert (len(single_defective_grid(1).points), len(single_defective_grid(1).boxes)) == (1, 2)


def test_single_defective_grid_has_row_and_column_per_point():
    c = single_defective_grid(3)
    for p in c.points:
        hits = [lab for lab, b in zip(c.box_labels, c.boxes) if contains(b, p)]
        assert len(hits) == 2 and {h[:3] for h in hits} == {"row", "col"}


@pytest.mark.parametrize("m,d", [(3, 2), (5, 1), (6, 3)])
def test_disjoint_boxes(m, d):
    c = disjoint_boxes(m, d)
    sys = induce(c)
    assert sys.rows == tuple(1 << i for i in range(m))
    assert all(b.interior_contains(p) for p, b in zip(c.points, c.boxes))
    assert oracles.disjunct(sys.rows, m - 1)
