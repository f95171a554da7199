import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from geogt.constructions import (
    disjoint_boxes,
    grid_lines,
    long_rect_step,
    single_defective_grid,
    subspace_config,
)
from geogt.geometry import (
    Box,
    Config,
    compress_to_grid,
    contains,
    corners,
    incidence_matrix,
    induce,
    is_general_position,
    to_general_position,
)


def test_closed_boundary_is_contained():
    assert contains(Box((0, 0), (2, 2)), (2, 2))


def test_outside_point():
    assert not contains(Box((0, 0), (2, 2)), (3, 1))


def test_degenerate_box_contains_points_on_it():
    assert contains(Box((1, 0), (1, 5)), (1, 3))


def test_contains_dimension_mismatch():
    with pytest.raises(ValueError):
        contains(Box((0, 0), (1, 1)), (0, 0, 0))


def test_empty_box_rejected():
    with pytest.raises(ValueError):
        Box((2, 0), (1, 0))


def test_box_corners_and_interior():
    b = Box((0, 0), (2, 1))
    assert b.corners() == [(0, 0), (0, 1), (2, 0), (2, 1)]
    assert not b.interior_contains((1, 1))
    assert Box((0, 0), (2, 2)).interior_contains((1, 1))
    assert corners([b, b]) == b.corners()


def test_degenerate_box_has_fewer_corners():
    assert len(Box((1, 0), (1, 5)).corners()) == 2


def test_config_rejects_duplicate_labels():
    with pytest.raises(ValueError):
        Config(1, ((1,), (2,)), point_labels=("a", "a"))


def test_config_rejects_mixed_dimensions():
    with pytest.raises(ValueError):
        Config(2, ((1, 2),), boxes=(Box((0,), (1,)),))


def test_config_json_round_trip_with_big_ints():
    big = 2**70
    c = Config(2, ((big, 1), (3, -big)), (Box((0, -big), (big, 5)),), claims={"x": 1})
    data = c.to_json()
    assert data["points"][0]["coords"][0] == str(big)
    back = Config.loads(c.dumps())
    assert back == c
    assert back.claims == {"x": 1}
    assert induce(back).rows == induce(c).rows


def test_disjoint_boxes_identity_incidence():
    sys = induce(disjoint_boxes(3, 2))
    assert sys.rows == (1, 2, 4)


def test_grid_lines_items_on_two_lines():
    sys = induce(grid_lines(2, 2))
    assert (sys.m, sys.n) == (4, 4)
    assert all(bin(r).count("1") == 2 for r in sys.rows)


def test_no_boxes_gives_empty_rows():
    sys = induce(Config(2, ((1, 1), (2, 2))))
    assert sys.n == 0 and sys.rows == (0, 0)


def test_induce_keeps_duplicate_boxes():
    b = Box((0,), (3,))
    sys = induce(Config(1, ((1,),), (b, b)))
    assert sys.n == 2 and sys.rows == (3,)


def test_incidence_matches_oracle_on_big_coordinates():
    big = 2**80
    pts = ((big, 0), (big + 1, 1), (0, 0))
    boxes = (Box((big, 0), (big, 1)), Box((0, 0), (big + 1, 0)))
    c = Config(2, pts, boxes)
    want = oracles.incidence_rows(pts, [(b.lo, b.hi) for b in boxes])
    assert list(induce(c).rows) == want
    assert incidence_matrix(c).shape == (3, 2)


# --- normalizations ---------------------------------------------------------

LIBRARY = {
    "grid_lines(3,2)": lambda: grid_lines(3, 2),
    "grid_lines(2,3)": lambda: grid_lines(2, 3),
    "single_defective(3)": lambda: single_defective_grid(3),
    "disjoint(4,2)": lambda: disjoint_boxes(4, 2),
    "subspaces(2,3,2)": lambda: subspace_config(2, 3, 2),
    "long_rect(sd3,k=2)": lambda: long_rect_step(single_defective_grid(3), 2),
}


@pytest.mark.parametrize("name", sorted(LIBRARY))
def test_general_position_preserves_incidence(name):
    c = LIBRARY[name]()
    g = to_general_position(c)
    assert is_general_position(g)
    assert induce(g).rows == induce(c).rows


@pytest.mark.parametrize("name", sorted(LIBRARY))
def test_compression_preserves_incidence_and_range(name):
    c = LIBRARY[name]()
    g = compress_to_grid(c)
    n = len(c.boxes)
    assert induce(g).rows == induce(c).rows
    coords = [v for p in g.points for v in p] + [v for b in g.boxes for v in b.lo + b.hi]
    assert 1 <= min(coords) and max(coords) <= 4 * n


def test_grid_lines_not_in_general_position():
    assert not is_general_position(grid_lines(2, 2))


def test_single_point_is_in_general_position():
    assert is_general_position(Config(2, ((0, 0),)))


def test_general_position_input_is_only_rescaled():
    c = Config(1, ((1,), (5,)), (Box((0,), (3,)),))
    g = to_general_position(c)
    order = sorted([("p", v) for (v,) in g.points] + [("lo", g.boxes[0].lo[0]), ("hi", g.boxes[0].hi[0])],
                   key=lambda e: e[1])
    assert [e[0] for e in order] == ["lo", "p", "hi", "p"]
    assert induce(g).rows == induce(c).rows


def test_coincident_points_are_separated_and_flagged():
    c = Config(2, ((1, 1), (1, 1), (3, 3)), (Box((0, 0), (2, 2)),), point_labels=("a", "b", "c"))
    g = to_general_position(c)
    assert is_general_position(g)
    assert induce(g).rows == induce(c).rows
    assert g.claims["general_position"]["separated_coincident_points"] == ["b"]


def test_points_in_one_strip_are_aligned():
    c = Config(1, ((10,), (11,), (50,)), (Box((0,), (20,)), Box((40,), (60,))))
    g = compress_to_grid(c)
    assert g.points[0] == g.points[1]
    assert induce(g).rows == induce(c).rows


def test_points_outside_every_box_are_aligned():
    c = Config(1, ((-100,), (100,), (5,)), (Box((0,), (10,)),))
    g = compress_to_grid(c)
    assert g.points[0] == g.points[1]
    assert induce(g).rows == induce(c).rows


def test_compress_without_boxes():
    assert compress_to_grid(Config(2, ((7, 9),))).points == ((1, 1),)
    with pytest.raises(ValueError):
        compress_to_grid(Config(2, ((7, 9), (1, 1))))


def test_huge_spans_compress():
    c = long_rect_step(long_rect_step(single_defective_grid(2), 3), 2)
    g = compress_to_grid(c)
    assert induce(g).rows == induce(c).rows
    assert max(max(p) for p in g.points) <= 4 * len(c.boxes)


# --- properties -------------------------------------------------------------

coord = st.integers(-6, 6)


@st.composite
def configs(draw, dim=None):
    d = dim or draw(st.integers(1, 3))
    pts = draw(st.lists(st.tuples(*[coord] * d), min_size=1, max_size=6))
    boxes = []
    for _ in range(draw(st.integers(0, 5))):
        a = draw(st.tuples(*[coord] * d))
        b = draw(st.tuples(*[coord] * d))
        boxes.append(Box(tuple(map(min, a, b)), tuple(map(max, a, b))))
    return Config(d, tuple(pts), tuple(boxes))


@settings(max_examples=150, deadline=None)
@given(configs())
def test_normalizations_preserve_incidence(c):
    want = oracles.incidence_rows(c.points, [(b.lo, b.hi) for b in c.boxes])
    assert list(induce(c).rows) == want
    g = to_general_position(c)
    assert is_general_position(g)
    assert list(induce(g).rows) == want
    if c.boxes:
        z = compress_to_grid(c)
        assert list(induce(z).rows) == want
        n = len(c.boxes)
        assert all(1 <= v <= 4 * n for p in z.points for v in p)
        corner_vals = {v for b in z.boxes for v in b.lo + b.hi}
        for i in range(c.dim):
            facets = {b.lo[i] for b in z.boxes} | {b.hi[i] for b in z.boxes}
            assert not facets & {p[i] for p in z.points}
        assert corner_vals <= set(range(1, 4 * n + 1))


@settings(max_examples=150, deadline=None)
@given(st.tuples(coord, coord), st.tuples(coord, coord), st.tuples(coord, coord),
       st.tuples(st.integers(0, 3), st.integers(0, 3)), st.tuples(st.integers(0, 3), st.integers(0, 3)))
def test_containment_monotone_under_inflation(a, b, p, grow_lo, grow_hi):
    box = Box(tuple(map(min, a, b)), tuple(map(max, a, b)))
    big = Box(tuple(x - g for x, g in zip(box.lo, grow_lo)), tuple(x + g for x, g in zip(box.hi, grow_hi)))
    if contains(box, p):
        assert contains(big, p)
