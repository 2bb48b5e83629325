import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubewalk.cubulation import cubulate
from cubewalk.group_action import (
    RAAG,
    Essentiality,
    FreeAbelian,
    FreeGroup,
    HalfSpace,
    NotNested,
    PresetError,
    ProductWall,
    TableInvalid,
    UnknownGenerator,
    ball,
    build_table,
    double_skewer_search,
    essentiality,
    facing_tuple_search,
    flip_search,
    from_spec,
    normal_form,
    pentagon,
    ping_pong_verify,
    side,
    truncate,
)
from cubewalk.median import Verdict
from cubewalk.pocset import Relation, is_consistent, wall_pseudo_distance

from raag_oracle import cayley_ball, projection_key


def path_graph_raag():
    # a - b - c - d : squares, free products and everything between
    return RAAG(list("abcd"), [("a", "b"), ("b", "c"), ("c", "d")])


PRESETS = {
    "f2": FreeGroup(2),
    "z2": FreeAbelian(2),
    "pentagon": pentagon(),
    "path4": path_graph_raag(),
    "generic_f2": RAAG(["a", "b"], []),
    "generic_z3": RAAG(list("abc"), [("a", "b"), ("b", "c"), ("a", "c")]),
}


def random_word(rng, preset, n):
    return [rng.choice(preset.letters()) for _ in range(n)]


# -- words --------------------------------------------------------------------

def test_free_cancellation():
    f = FreeGroup(2)
    assert f.is_identity(f.parse("aA"))


def test_commutation_shortlex():
    r = RAAG(["a", "b"], [("a", "b")])
    assert r.parse("ba") == r.parse("ab") == (1, 2)


def test_abelian_normal_form():
    z = FreeAbelian(2)
    g = z.parse("aba")
    assert z.format(g) == "aab" and z.length(g) == 3


def test_parse_powers_and_errors():
    f = FreeGroup(2)
    assert f.parse("a^3 b^-1") == (1, 1, 1, -2)
    assert f.parse("1") == ()
    with pytest.raises(UnknownGenerator):
        f.parse("x")
    assert normal_form(f, [1, -1, 2]) == (2,)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_word_problem_against_projections(name):
    preset = PRESETS[name]
    rng = random.Random(17)
    for _ in range(300):
        w1 = random_word(rng, preset, rng.randint(0, 12))
        if rng.random() < 0.5:
            # same element: insert a cancelling pair and swap a commuting neighbour pair
            w2 = list(w1)
            x = rng.choice(preset.letters())
            i = rng.randint(0, len(w2))
            w2[i:i] = [x, -x]
            for j in range(len(w2) - 1):
                a, b = abs(w2[j]) - 1, abs(w2[j + 1]) - 1
                if b in preset.adj[a] and rng.random() < 0.5:
                    w2[j], w2[j + 1] = w2[j + 1], w2[j]
        else:
            w2 = random_word(rng, preset, rng.randint(0, 12))
        same = projection_key(preset, w1) == projection_key(preset, w2)
        assert (preset.word(w1) == preset.word(w2)) == same


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_group_axioms(name):
    preset = PRESETS[name]
    rng = random.Random(3)
    for _ in range(100):
        g, h, k = (preset.word(random_word(rng, preset, 6)) for _ in range(3))
        assert preset.mul(preset.mul(g, h), k) == preset.mul(g, preset.mul(h, k))
        assert preset.is_identity(preset.mul(g, preset.inv(g)))
        x = rng.choice(preset.letters())
        assert preset.mul_letter(g, x) == preset.mul(g, preset.letter_element(x))


@pytest.mark.parametrize("name,radius", [("f2", 4), ("z2", 4), ("pentagon", 3), ("path4", 3), ("generic_z3", 3)])
def test_ball_and_length_against_cayley_graph(name, radius):
    preset = PRESETS[name]
    dist, words = cayley_ball(preset, radius)
    elems = preset.ball(radius)
    assert len(elems) == len(dist)
    for key, w in words.items():
        assert preset.length(preset.word(w)) == dist[key]


def test_ball_sizes():
    assert len(ball(FreeGroup(2), 1)) == 5
    assert len(ball(FreeGroup(2), 3)) == 53
    assert len(ball(FreeAbelian(2), 2)) == 13


def test_fast_free_matches_generic():
    fast, slow = FreeGroup(2), RAAG(["a", "b"], [])
    rng = random.Random(8)
    for _ in range(200):
        w = random_word(rng, fast, 10)
        g = fast.word(w)
        assert g == slow.word(w)
        x = rng.choice(fast.letters())
        assert fast.edge_halfspace(g, x) == slow.edge_halfspace(g, x)
        h = fast.edge_halfspace(fast.word(random_word(rng, fast, 4)), x)
        y = fast.word(random_word(rng, fast, 8))
        assert fast.side(y, h.wall) == slow.side(y, h.wall)


def test_fast_abelian_matches_generic():
    fast, slow = FreeAbelian(3), PRESETS["generic_z3"]
    rng = random.Random(9)
    for _ in range(200):
        w = random_word(rng, fast, 10)
        g = fast.word(w)
        assert g == slow.word(w)
        x = rng.choice(fast.letters())
        hs = fast.edge_halfspace(g, x)
        assert hs == slow.edge_halfspace(g, x)
        y = fast.word(random_word(rng, fast, 8))
        assert fast.side(y, hs.wall) == slow.side(y, hs.wall)
        k = fast.edge_halfspace(fast.word(random_word(rng, fast, 5)), rng.choice(fast.letters()))
        if k.wall != hs.wall:
            assert fast.relation(hs, k) == slow.relation(hs, k)


# -- walls against the word metric -------------------------------------------------

def _dist(preset, g, h):
    return preset.length(preset.mul(preset.inv(g), h))


def _edges(preset, radius):
    out = []
    for g in preset.ball(radius):
        for x in preset.letters():
            h = preset.mul_letter(g, x)
            if preset.length(h) == preset.length(g) + 1 and preset.length(h) <= radius:
                out.append((g, x, h))
    return out


@pytest.mark.parametrize("name", ["f2", "z2", "pentagon", "path4"])
def test_sides_match_metric(name):
    """x is on the far side of the wall of edge (u, v) iff it is closer to v."""
    preset = PRESETS[name]
    verts = preset.ball(3)
    for u, x, v in _edges(preset, 2):
        hs = preset.edge_halfspace(u, x)
        assert preset.side(v, hs.wall) == hs.sign
        assert preset.side(u, hs.wall) == -hs.sign
        for y in verts:
            closer_to_v = _dist(preset, y, v) < _dist(preset, y, u)
            assert (preset.side(y, hs.wall) == hs.sign) == closer_to_v


@pytest.mark.parametrize("name", ["f2", "z2", "pentagon", "path4"])
def test_walls_match_djokovic_winkler(name):
    """Two edges are dual to one wall iff d(u1,u2) + d(v1,v2) != d(u1,v2) + d(v1,u2)."""
    preset = PRESETS[name]
    edges = _edges(preset, 2)
    walls = [preset.edge_halfspace(u, x).wall for u, x, _ in edges]
    for (e1, w1), (e2, w2) in itertools.combinations(zip(edges, walls), 2):
        u1, _, v1 = e1
        u2, _, v2 = e2
        theta = _dist(preset, u1, u2) + _dist(preset, v1, v2) != _dist(preset, u1, v2) + _dist(preset, v1, u2)
        assert (w1 == w2) == theta


@pytest.mark.parametrize("name", ["f2", "z2", "pentagon", "path4"])
def test_relations_match_quadrants(name):
    """Transverse iff all four quadrants meet the ball; otherwise exactly the
    quadrant ruled out by the reported relation is empty."""
    preset = PRESETS[name]
    verts = preset.ball(4)
    hs = preset.ball_halfspaces(2)
    signs = {h.wall: [preset.side(y, h.wall) for y in verts] for h in hs}
    for h, k in itertools.combinations(hs, 2):
        r = preset.relation(h, k)
        quads = {(a * h.sign, b * k.sign) for a, b in zip(signs[h.wall], signs[k.wall])}
        if r is Relation.TRANSVERSE:
            assert len(quads) == 4
            continue
        missing = {(1, 1), (1, -1), (-1, 1), (-1, -1)} - quads
        expected = {
            Relation.CONTAINED_IN: (1, -1),
            Relation.CONTAINS: (-1, 1),
            Relation.DISJOINT_FROM: (1, 1),
            Relation.UNION_ALL: (-1, -1),
        }[r]
        assert missing == {expected}


@pytest.mark.parametrize("name", ["f2", "z2", "pentagon", "path4"])
def test_strong_separation_against_wall_scan(name):
    preset = PRESETS[name]
    near = preset.ball_halfspaces(2)
    pool = preset.ball_halfspaces(3)
    for h, k in itertools.combinations(near, 2):
        cert = preset.strongly_separated(h, k)
        crossing = preset.transverse(h.wall, k.wall) or any(
            preset.transverse(w.wall, h.wall) and preset.transverse(w.wall, k.wall) for w in pool
        )
        assert (cert.verdict is Verdict.NO) == crossing
        if cert.witness is not None:
            assert preset.transverse(cert.witness, h.wall) and preset.transverse(cert.witness, k.wall)


def test_tree_and_lattice_ground_truth():
    f, z = FreeGroup(2), FreeAbelian(2)
    for h, k in itertools.combinations(f.ball_halfspaces(3), 2):
        assert f.strongly_separated(h, k).verdict is Verdict.YES
    for h, k in itertools.combinations(z.ball_halfspaces(3), 2):
        assert z.strongly_separated(h, k).verdict is Verdict.NO


@pytest.mark.parametrize("name", ["f2", "pentagon", "path4"])
def test_action_equivariance(name):
    preset = PRESETS[name]
    rng = random.Random(4)
    hs = preset.ball_halfspaces(2)
    for _ in range(60):
        g = preset.word(random_word(rng, preset, 5))
        y = preset.word(random_word(rng, preset, 5))
        h, k = rng.choice(hs), rng.choice(hs)
        gh = preset.act(g, h)
        assert preset.side(preset.mul(g, y), gh.wall) * gh.sign == preset.side(y, h.wall) * h.sign
        if h.wall != k.wall:
            assert preset.relation(gh, preset.act(g, k)) == preset.relation(h, k)


@pytest.mark.parametrize("name", ["f2", "z2", "pentagon"])
def test_truncation_distances_match_norms(name):
    """Ball elements give consistent orientations of the truncated pocset at the right distance."""
    preset = PRESETS[name]
    t = truncate(preset, 2)
    e = t.orientation(preset.identity)
    for x in preset.ball(2):
        o = t.orientation(x)
        assert is_consistent(t.pocset, o)
        assert wall_pseudo_distance(t.pocset, e, o) == preset.length(x)


def test_sides_helper():
    f = FreeGroup(2)
    h = f.edge_halfspace(f.identity, 1)
    assert side(f, f.identity, h.wall) == -1
    assert side(f, f.parse("a"), h.wall) == 1
    assert side(f, f.parse("ab"), h.wall) == 1
    z = FreeAbelian(2)
    assert z.side(z.from_exponents([3, 5]), z.wall_at(0, 0)) == 1


@pytest.mark.parametrize("name", ["f2", "pentagon"])
def test_depth_counts_nested_halfspaces(name):
    preset = PRESETS[name]
    # a half-space between x and the wall of h is dual to an edge of B_2; B_3 leaves margin
    pool = preset.ball_halfspaces(3)
    sides = [s for h in pool for s in (h, h.complement)]
    for h in preset.unit_halfspaces():
        for x in preset.ball(2):
            brute = sum(
                1
                for l in sides
                if preset.side(x, l.wall) == l.sign and preset.relation(l, h) in (Relation.EQUAL, Relation.CONTAINED_IN)
            )
            assert preset.depth(x, h) == brute


# -- products -----------------------------------------------------------------------

def test_product_walls():
    p = from_spec("f2xf2")
    assert p.names == ["a", "b", "c", "d"]
    g = p.parse("ac")
    assert p.length(g) == 2
    h1 = p.edge_halfspace(p.identity, 1)
    h2 = p.edge_halfspace(p.identity, 3)
    assert isinstance(h1.wall, ProductWall)
    assert p.relation(h1, h2) is Relation.TRANSVERSE
    assert p.strongly_separated(h1, h2).verdict is Verdict.NO
    h3 = p.edge_halfspace(p.identity, 2)
    assert p.strongly_separated(h1, h3).verdict is Verdict.YES
    assert p.mul(p.parse("ca"), p.parse("C")) == p.parse("a")


def test_product_dimension():
    assert from_spec("f2xf2").dimension == 2
    assert from_spec("z2").dimension == 2
    assert pentagon().dimension == 2


# -- presets --------------------------------------------------------------------------

def test_preset_specs_round_trip():
    for text in ["f2", "z2", "pentagon", "f2xf2", "f3xz1"]:
        p = from_spec(text)
        q = from_spec(p.to_spec())
        assert q.to_spec() == p.to_spec()


def test_raag_json_spec():
    p = from_spec({"kind": "raag", "graph": {"vertices": ["a", "b", "c"], "edges": [["a", "b"]]}})
    assert p.parse("ba") == p.parse("ab")
    assert p.parse("ca") != p.parse("ac")


def test_raag_file_spec(tmp_path):
    f = tmp_path / "g.json"
    f.write_text('{"vertices": ["a", "b"], "edges": []}')
    assert from_spec(f"raag:{f}").rank == 2


@pytest.mark.parametrize("bad", ["q7", "f0", {"kind": "nope"}, {"kind": "raag"}, 3])
def test_bad_presets(bad):
    with pytest.raises(PresetError):
        from_spec(bad)


# -- searches -------------------------------------------------------------------------

def test_essentiality():
    f = FreeGroup(2)
    h = f.unit_halfspaces()[0]
    assert essentiality(f, h, 6).kind is Essentiality.ESSENTIAL
    z1 = FreeAbelian(1)
    assert essentiality(z1, z1.unit_halfspaces()[0], 6).kind is Essentiality.ESSENTIAL
    assert essentiality(f, h, 6, generators=[f.identity]).kind is Essentiality.TRIVIAL


def test_flip_in_free_group():
    f = FreeGroup(2)
    h = f.edge_halfspace(f.identity, 1)  # side containing a
    g = flip_search(f, h, 4)
    assert g is not None
    # h* properly inside g h, checked on a ball by sides
    gh = f.act(g, h)
    assert f.relation(h.complement, gh) is Relation.CONTAINED_IN
    for y in f.ball(4):
        if f.side(y, h.wall) != h.sign:
            assert f.side(y, gh.wall) == gh.sign
    # no shorter flip exists
    assert all(
        f.relation(h.complement, f.act(x, h)) is not Relation.CONTAINED_IN
        for x in f.ball(f.length(g) - 1)
    )
    assert f.format(g) == "abA"


def test_no_flip_in_lattice():
    z = FreeAbelian(2)
    assert flip_search(z, z.unit_halfspaces()[0], 5) is None
    f = FreeGroup(2)
    assert flip_search(f, f.unit_halfspaces()[0], 5, generators=[f.identity]) is None


def test_double_skewer():
    f = FreeGroup(2)
    # h = side of a^3-edge far from o, k = side of the a-edge far from o: h inside k
    k = f.edge_halfspace(f.identity, 1)
    h = f.edge_halfspace(f.parse("aa"), 1)
    g = double_skewer_search(f, h, k, 6)
    assert f.relation(f.act(g, k), h) is Relation.CONTAINED_IN
    assert f.format(g) == "aaa"
    with pytest.raises(NotNested):
        double_skewer_search(f, k, h, 6)
    assert double_skewer_search(f, h, k, 1) is None


def test_double_skewer_on_integers():
    z = FreeAbelian(1)
    k = HalfSpace(z.wall_at(0, 0), -1)  # x <= 0
    h = HalfSpace(z.wall_at(0, -3), -1)  # x <= -3, inside k
    g = double_skewer_search(z, h, k, 8)
    # the shortest translation pushing k inside h moves it by the delta count, 4
    assert z.exponents(g) == [-4]


def test_facing_tuples():
    f = FreeGroup(2)
    quad = facing_tuple_search(f, 4, 3)
    assert quad is not None and len({h.wall for h in quad}) == 4
    assert all(f.length(h.wall.rep) <= 1 for h in quad)
    for a, b in itertools.combinations(quad, 2):
        assert f.facing(a, b)
    triple = facing_tuple_search(f, 3, 3, require_strong_separation=True)
    assert triple is not None
    z = FreeAbelian(2)
    assert facing_tuple_search(z, 3, 3, require_strong_separation=True) is None


def test_ping_pong_free_group():
    f = FreeGroup(2)
    t = build_table(f, 8)
    rep = ping_pong_verify(f, t.A, t.aA_star, t.B, t.bB_star, t.a, t.b, 8)
    assert rep.free and rep.words_checked == sum(4 * 3 ** (n - 1) for n in range(1, 9))


def test_ping_pong_degenerate():
    f = FreeGroup(2)
    t = build_table(f, 8)
    with pytest.raises(TableInvalid):
        ping_pong_verify(f, t.A, t.aA_star, t.B, t.bB_star, t.a, t.a, 4)


def test_ping_pong_lattice_refuses():
    assert build_table(FreeAbelian(2), 4) is None


def test_ping_pong_pentagon():
    p = pentagon()
    t = build_table(p, 8)
    assert t is not None
    rep = ping_pong_verify(p, t.A, t.aA_star, t.B, t.bB_star, t.a, t.b, 8)
    assert rep.free
    # independent word problem: no reduced word in a, b of length <= 6 is trivial
    gens = {"a": p.to_letters(t.a), "A": p.to_letters(p.inv(t.a)), "b": p.to_letters(t.b), "B": p.to_letters(p.inv(t.b))}
    trivial = projection_key(p, ())
    inverse = {"a": "A", "A": "a", "b": "B", "B": "b"}
    frontier = [("", ())]
    for _ in range(6):
        nxt = []
        for text, letters in frontier:
            for c, w in gens.items():
                if text and inverse[c] == text[-1]:
                    continue
                nl = letters + tuple(w)
                assert projection_key(p, nl) != trivial
                nxt.append((text + c, nl))
        frontier = nxt


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_relation_antisymmetry_property(seed):
    rng = random.Random(seed)
    p = pentagon()
    hs = p.ball_halfspaces(2)
    h, k = rng.choice(hs), rng.choice(hs)
    if h.wall == k.wall:
        return
    mirror = {
        Relation.CONTAINED_IN: Relation.CONTAINS,
        Relation.CONTAINS: Relation.CONTAINED_IN,
        Relation.DISJOINT_FROM: Relation.DISJOINT_FROM,
        Relation.UNION_ALL: Relation.UNION_ALL,
        Relation.TRANSVERSE: Relation.TRANSVERSE,
    }
    assert p.relation(k, h) is mirror[p.relation(h, k)]
    flipped = {
        Relation.CONTAINED_IN: Relation.DISJOINT_FROM,
        Relation.DISJOINT_FROM: Relation.CONTAINED_IN,
        Relation.CONTAINS: Relation.UNION_ALL,
        Relation.UNION_ALL: Relation.CONTAINS,
        Relation.TRANSVERSE: Relation.TRANSVERSE,
    }
    assert p.relation(h, k.complement) is flipped[p.relation(h, k)]


def test_small_truncation_cubulates_to_ball_plus_boundary():
    """Radius-1 truncation of the pentagon: the cubulation contains the ball and is median."""
    from cubewalk.cubulation import verify_median

    p = pentagon()
    t = truncate(p, 1)
    g = cubulate(t.pocset)
    signs = {v.signs for v in g.vertices}
    assert {t.orientation(x).signs for x in p.ball(1)} <= signs
    assert verify_median(g).passed
