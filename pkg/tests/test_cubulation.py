import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubewalk.cubulation import (
    TooLarge,
    cubulate,
    enumerate_cubes,
    enumerate_vertices,
    graph_from_orientations,
    helly_check,
    majority,
    verify_median,
)
from cubewalk.pocset import Orientation, chain_pocset, cube_pocset, is_consistent, tree_pocset

from conftest import brute_force_vertices, random_pocsets


def test_square():
    g = cubulate(cube_pocset(2))
    assert len(g.vertices) == 4 and len(g.edges) == 4
    assert enumerate_cubes(g) == {0: 4, 1: 4, 2: 1}


def test_nested_pair_is_a_path():
    g = cubulate(chain_pocset(2))
    assert len(g.vertices) == 3
    degrees = sorted(len(a) for a in g.adjacency)
    assert degrees == [1, 1, 2]
    signs = {v.signs for v in g.vertices}
    # h = 0 inside k = 2: "h and not k" is excluded
    assert 0b01 not in signs


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_transverse_walls_give_cube(n):
    g = cubulate(cube_pocset(n))
    assert {v.signs for v in g.vertices} == set(range(1 << n))


def test_three_cube_census():
    g = cubulate(cube_pocset(3))
    assert enumerate_cubes(g) == {0: 8, 1: 12, 2: 6, 3: 1}


def test_tree_has_no_squares():
    p, _ = tree_pocset(7, [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (4, 6)])
    g = cubulate(p)
    census = enumerate_cubes(g, max_dim=2)
    assert census[2] == 0 and census[1] == 6 and census[0] == 7


def test_cap():
    with pytest.raises(TooLarge):
        cubulate(cube_pocset(3), cap=2)


@given(st.integers(0, 100_000))
@settings(max_examples=60, deadline=None)
def test_vertices_match_brute_force(seed):
    (p, _), = random_pocsets(seed, 1, 9)
    got = {v.signs for v in enumerate_vertices(p)}
    assert got == brute_force_vertices(p)


def test_every_vertex_consistent_and_edges_flip_one_wall(corpus):
    for p, _ in corpus[:20]:
        g = cubulate(p)
        for v in g.vertices:
            assert is_consistent(p, v)
        for i, j, w in g.edges:
            assert g.vertices[i].signs ^ g.vertices[j].signs == 1 << w


def test_points_of_walled_set_are_vertices(corpus):
    for p, pts in corpus:
        signs = {v.signs for v in cubulate(p).vertices}
        assert {x.signs for x in pts} <= signs


def test_graph_distance_equals_wall_distance(corpus):
    for p, _ in corpus[:15]:
        g = cubulate(p)
        d = g.distance_matrix()
        for i, j in itertools.combinations(range(len(g.vertices)), 2):
            assert d[i, j] == bin(g.vertices[i].signs ^ g.vertices[j].signs).count("1")


# -- median verification ------------------------------------------------------

def test_square_is_median():
    assert verify_median(cubulate(cube_pocset(2))).passed


def test_path_median_is_middle():
    g = cubulate(chain_pocset(2))
    ends = [i for i, a in enumerate(g.adjacency) if len(a) == 1]
    mid = next(i for i, a in enumerate(g.adjacency) if len(a) == 2)
    m = majority(g.vertices[ends[0]], g.vertices[ends[1]], g.vertices[mid])
    assert m == g.vertices[mid]


def test_hexagon_fails_with_witness():
    # a 6-cycle inside the 3-cube: no vertex lies between alternate corners
    cyc = [0b000, 0b001, 0b011, 0b111, 0b110, 0b100]
    g = graph_from_orientations([Orientation.total(3, s) for s in cyc])
    rep = verify_median(g)
    assert not rep.passed
    assert rep.witness is not None


def test_corpus_is_median(corpus):
    for p, _ in corpus:
        assert verify_median(cubulate(p)).passed


# -- Helly ---------------------------------------------------------------------

def test_helly_square_corner():
    v = helly_check(cube_pocset(2), [0, 2])
    assert v is not None and v.signs == 0b11


def test_helly_disjoint_pair_absent():
    assert helly_check(chain_pocset(2), [0, 3]) is None


def test_helly_tripod_centre():
    p, verts = tree_pocset(4, [(0, 1), (0, 2), (0, 3)])
    v = helly_check(p, [1, 3])  # complements of the first two leaves
    # enumerating all consistent orientations inside both: centre and third leaf
    inside = [x for x in enumerate_vertices(p) if x.contains(1) and x.contains(3)]
    assert {x.signs for x in inside} == {verts[0].signs, verts[3].signs}
    assert v.signs in {x.signs for x in inside}


@given(st.integers(0, 100_000))
@settings(max_examples=40, deadline=None)
def test_helly_pairwise_intersecting_means_common_vertex(seed):
    (p, _), = random_pocsets(seed, 1, 7)
    verts = enumerate_vertices(p)
    for hs in itertools.combinations(range(p.n_halfspaces), 3):
        if len({h >> 1 for h in hs}) < 3:
            continue
        common = [v for v in verts if all(v.contains(h) for h in hs)]
        got = helly_check(p, list(hs))
        assert (got is not None) == bool(common)
