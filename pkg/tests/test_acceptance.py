"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed as they happen (visible with ``-s``) and repeated in
the terminal summary.  Heavy Monte Carlo criteria share module fixtures so
the walks are sampled once.
"""
import itertools
import json
import random
import time

import numpy as np
import pytest

from cubewalk.cli import EXIT_EXHAUSTED, EXIT_OK, main
from cubewalk.cubulation import cubulate, enumerate_vertices, verify_median
from cubewalk.group_action import FreeAbelian, FreeGroup, from_spec
from cubewalk.median import (
    Verdict,
    bridge,
    classify_measure,
    dilworth_embed,
    endpoint_pairs,
    has_facing_triple,
    interval,
    interval_vertices,
    median,
    strongly_separated,
)
from cubewalk.pocset import Relation, grid_pocset, relation, tree_pocset
from cubewalk.roller_walk import (
    StepDistribution,
    drift,
    hitting_measure,
    regular_certificate,
    sample_paths,
    strip_growth_check,
    verify_chain,
)

from conftest import ACCEPTANCE_LINES, brute_force_vertices, random_pocsets

STEPS = 10_000
WINDOW = 1_000
CORPUS_SEED = 20_241


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def random_tree(rng: random.Random, n: int):
    edges = [(rng.randrange(i), i) for i in range(1, n)]
    return tree_pocset(n, edges)


@pytest.fixture(scope="module")
def corpus200():
    return random_pocsets(CORPUS_SEED, 200, 12)


@pytest.fixture(scope="module")
def complexes(corpus200):
    return [(p, cubulate(p)) for p, _ in corpus200]


# -- combinatorial criteria ------------------------------------------------------

def test_criterion_1_cubulation_matches_brute_force(corpus200):
    t0 = time.perf_counter()
    graphs = [cubulate(p) for p, _ in corpus200]
    elapsed = time.perf_counter() - t0
    mismatches = sum(
        {v.signs for v in g.vertices} != brute_force_vertices(p) for (p, _), g in zip(corpus200, graphs)
    )
    record(1, mismatches == 0 and elapsed < 10.0,
           f"{len(graphs)} pocsets, {mismatches} mismatches, cubulation {elapsed:.2f}s (limit 10s)")


def _median_vs_intervals(g) -> int:
    """Count triples where the library median is not the unique common interval vertex."""
    n = len(g.vertices)
    d = g.distance_matrix().astype(np.int32)
    # between[a, x, c]: x lies on a geodesic from a to c
    between = d[:, :, None] + d[None, :, :] == d[:, None, :]
    index = {v.signs: i for i, v in enumerate(g.vertices)}
    bad = 0
    for a, b in itertools.combinations(range(n), 2):
        common = between[a, :, b][:, None] & between[b] & between[a]  # (x, c)
        counts = common.sum(axis=0)
        where = common.argmax(axis=0)
        for c in range(b + 1, n):
            m = median(g.vertices[a], g.vertices[b], g.vertices[c])
            if counts[c] != 1 or index.get(m.signs) != where[c]:
                bad += 1
    return bad


@pytest.mark.slow
def test_criterion_2_median_verification(complexes):
    failed = sum(not verify_median(g).passed for _, g in complexes)
    small = [g for _, g in complexes if len(g.vertices) <= 200]
    triples = sum(len(g.vertices) * (len(g.vertices) - 1) * (len(g.vertices) - 2) // 6 for g in small)
    bad = sum(_median_vs_intervals(g) for g in small)
    record(2, failed == 0 and bad == 0,
           f"verify_median failed on {failed}/{len(complexes)}; "
           f"majority vs interval intersection: {bad} mismatches over {triples} triples in {len(small)} complexes")


def _interval_cases(complexes, count: int):
    rng = random.Random(3)
    cases = []
    for i in range(count):
        kind = i % 3
        if kind == 0:
            sides = tuple(rng.randint(1, 3) for _ in range(rng.randint(1, 3)))
            p = grid_pocset(*sides)
        elif kind == 1:
            p, _ = random_tree(rng, rng.randint(3, 12))
        else:
            p, _ = rng.choice(complexes)
        verts = enumerate_vertices(p)
        cases.append((p, rng.choice(verts), rng.choice(verts)))
    return cases


def test_criterion_3_interval_embedding(complexes):
    distortion = width_bad = pairs_bad = 0
    for p, v, w in _interval_cases(complexes, 100):
        iv = interval(v, w)
        verts = interval_vertices(p, iv)
        emb = dilworth_embed(p, iv, verts)
        for x, y in itertools.combinations(verts, 2):
            a, b = emb.coordinates[x.signs], emb.coordinates[y.signs]
            if sum(abs(i - j) for i, j in zip(a, b)) != bin(x.signs ^ y.signs).count("1"):
                distortion += 1
        width_bad += emb.dimension > p.dimension_bound
        pairs_bad += len(endpoint_pairs(p, iv, verts)) > 2 ** p.dimension_bound
    record(3, distortion == width_bad == pairs_bad == 0,
           f"100 intervals: {distortion} distorted pairs, {width_bad} over-wide, {pairs_bad} over the 2^D endpoint bound")


def test_criterion_4_tree_bridges():
    rng = random.Random(4)
    bridges = failures = 0
    for _ in range(12):
        p, _ = random_tree(rng, rng.randint(4, 12))
        verts = enumerate_vertices(p)
        for h1, h2 in itertools.permutations(range(p.n_halfspaces), 2):
            if h1 >> 1 == h2 >> 1 or relation(p, h1, h2) is not Relation.DISJOINT_FROM:
                continue
            bridges += 1
            b = bridge(p, h1, h2)
            beta = b.beta_list
            ok = b.endpoints is not None
            ok &= len({h >> 1 for h in beta}) == len(beta)
            ok &= all(not p.leq(x, y ^ 1) for x, y in itertools.combinations(beta, 2))
            # a finite pocset has no infinite descending chains, so DCC holds once beta is finite
            in1 = [x for x in verts if x.contains(h1)]
            in2 = [x for x in verts if x.contains(h2)]
            for _ in range(50):
                xi1, xi2 = rng.choice(in1), rng.choice(in2)
                ok &= all(median(xi1, q, xi2) == q for q in b.vertices)
            failures += not ok
    record(4, failures == 0 and bridges > 0, f"{bridges} bridges on 12 random trees, {failures} failures")


def test_criterion_5_strong_separation(corpus200):
    rng = random.Random(5)
    tree_bad = lattice_bad = scan_bad = checked = 0
    for _ in range(10):
        p, _ = random_tree(rng, rng.randint(3, 12))
        for h, k in itertools.permutations(range(p.n_halfspaces), 2):
            if h >> 1 != k >> 1 and relation(p, h, k) is Relation.DISJOINT_FROM:
                tree_bad += strongly_separated(p, h, k).verdict is not Verdict.YES
    f = FreeGroup(2)
    for h, k in itertools.combinations(f.ball_halfspaces(3), 2):
        tree_bad += f.strongly_separated(h, k).verdict is not Verdict.YES
    for sides in [(3, 3), (2, 2, 2), (4, 1)]:
        g = grid_pocset(*sides)
        for h, k in itertools.combinations(range(g.n_halfspaces), 2):
            if h >> 1 != k >> 1:
                lattice_bad += strongly_separated(g, h, k).verdict is not Verdict.NO
    for n in (2, 3):
        z = FreeAbelian(n)
        for h, k in itertools.combinations(z.ball_halfspaces(2), 2):
            lattice_bad += z.strongly_separated(h, k).verdict is not Verdict.NO
    for p, pts in corpus200:
        everything = set(range(len(pts)))
        side = [{i for i, x in enumerate(pts) if x.contains(2 * w)} for w in range(p.n_walls)]

        def crosses(w1, w2):
            a, b = side[w1], side[w2]
            return bool(a & b and a - b and b - a and everything - a - b)

        for w1, w2 in itertools.combinations(range(p.n_walls), 2):
            expect_no = crosses(w1, w2) or any(
                crosses(w, w1) and crosses(w, w2) for w in range(p.n_walls) if w not in (w1, w2)
            )
            checked += 1
            got = strongly_separated(p, 2 * w1, 2 * w2).verdict
            scan_bad += got is not (Verdict.NO if expect_no else Verdict.YES)
    record(5, tree_bad == lattice_bad == scan_bad == 0,
           f"trees {tree_bad} non-Yes, lattices {lattice_bad} non-No, "
           f"random pocsets {scan_bad}/{checked} disagreements with the point scan")


def test_criterion_6_measure_classification(complexes):
    rng = random.Random(6)
    violations = 0
    for _ in range(500):
        p, g = rng.choice(complexes)
        pts = [rng.choice(g.vertices) for _ in range(rng.randint(1, 6))]
        weights = [rng.randint(1, 6) for _ in pts]
        m = classify_measure(p, pts, weights, denominator=sum(weights))
        violations += any(p.leq(a, b ^ 1) for a, b in itertools.combinations(m.heavy, 2))
        balanced_sides = [2 * w + s for w in m.balanced for s in (0, 1)]
        violations += has_facing_triple(p, balanced_sides) is not None
    record(6, violations == 0, f"500 rational measures, {violations} violations")


# -- Monte Carlo criteria ---------------------------------------------------------

@pytest.fixture(scope="module")
def f2_runs():
    f = FreeGroup(2)
    t0 = time.perf_counter()
    runs = sample_paths(f, StepDistribution.uniform(f), STEPS, 1000, seed=0)
    return f, runs, time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_7_drift(f2_runs):
    f, runs, sampled = f2_runs
    t0 = time.perf_counter()
    d = drift(runs)
    elapsed = sampled + time.perf_counter() - t0
    record(7, abs(d.estimate - 0.5) <= 0.02 and elapsed < 60.0,
           f"drift {d.estimate:.5f} (CI {d.low:.5f}-{d.high:.5f}) over {len(runs)} x {STEPS}, {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_8_hitting_symmetry(f2_runs):
    f, runs, _ = f2_runs
    ok = True
    parts = []
    for h in f.unit_halfspaces():
        est = hitting_measure(runs, h, WINDOW)
        ok &= est.stabilized >= 900 and abs(est.frequency - 0.25) <= 0.03
        parts.append(f"{est.frequency:.3f}/{est.stabilized}")
    record(8, ok, "frequency/stabilized runs: " + ", ".join(parts))


@pytest.mark.slow
def test_criterion_9_regular_point_chains(f2_runs):
    f, runs, _ = f2_runs
    good = 0
    for r in runs:
        chain = regular_certificate(r, window=WINDOW).factors[0].chain
        good += len(chain) >= 10 and verify_chain(f, chain)
    p = from_spec("f2xf2")
    prod = sample_paths(p, StepDistribution.uniform(p), STEPS, 200, seed=0)
    prod_good = 0
    for r in prod:
        est = regular_certificate(r, window=WINDOW)
        prod_good += all(c.length >= 5 and verify_chain(r.tracks[c.factor].preset, c.chain) for c in est.factors)
    z = FreeAbelian(2)
    lat = sample_paths(z, StepDistribution.uniform(z), STEPS, 200, seed=0)
    lat_max = max(regular_certificate(r, window=WINDOW).lengths[0] for r in lat)
    ok = good >= 0.95 * len(runs) and prod_good >= 0.95 * len(prod) and lat_max <= 1
    record(9, ok, f"F2 {good}/{len(runs)} chains >= 10, F2xF2 {prod_good}/{len(prod)} per-factor >= 5, "
                  f"Z2 longest chain {lat_max}")


def _strip_series(spec: str, pairs: int):
    p = from_spec(spec)
    mu = StepDistribution.uniform(p)
    fwd = sample_paths(p, mu, STEPS, pairs, seed=0, monitor_radius=1)
    bwd = sample_paths(p, mu.reflected(), STEPS, pairs, seed=0, stream=1, monitor_radius=1)
    return strip_growth_check(p, fwd, bwd)


@pytest.mark.slow
def test_criterion_10_strip_growth():
    ok = True
    parts = []
    for spec in ("f2", "f2xf2"):
        s = _strip_series(spec, 200)
        tail = [m for n, m in zip(s.schedule, s.median) if n >= 1000]
        decreasing = all(a > b for a, b in zip(tail, tail[1:]))
        ok &= decreasing and s.median[-1] < 0.05
        parts.append(f"{spec}: median at 1e4 {s.median[-1]:.5f}, decreasing past 1e3 {decreasing}")
    record(10, ok, "; ".join(parts))


# -- CLI criteria -------------------------------------------------------------------

def _cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_criterion_11_ping_pong(capsys):
    ok = True
    parts = []
    for preset in ("f2", "pentagon"):
        code, out = _cli(capsys, "pingpong", "--preset", preset, "--length", "8")
        fac = json.loads(out)["factors"][0]
        ok &= code == EXIT_OK and fac["free"] is True
        parts.append(f"{preset} exit {code} free {fac['free']}")
    code, _ = _cli(capsys, "pingpong", "--preset", "z2")
    ok &= code == EXIT_EXHAUSTED
    parts.append(f"z2 exit {code}")
    record(11, ok, ", ".join(parts))


def test_criterion_12_reproducibility(capsys, tmp_path):
    pocset = tmp_path / "tree.json"
    pocset.write_text(random_tree(random.Random(12), 9)[0].to_json())
    commands = [
        ["walk", "--steps", "3000", "--paths", "30", "--seed", "12"],
        ["certify", "--preset", "f2xf2", "--steps", "2000", "--paths", "10", "--seed", "12"],
        ["pingpong", "--preset", "pentagon", "--length", "5"],
        ["cubulate", "--pocset", str(pocset)],
        ["inspect", "--preset", "f2", "--radius", "2"],
    ]
    differing = []
    files = 0
    for i, cmd in enumerate(commands):
        outs = []
        for rep in ("a", "b"):
            d = tmp_path / f"{i}{rep}"
            _, stdout = _cli(capsys, *cmd, "--out", str(d))
            outs.append((stdout, {f.name: f.read_bytes() for f in sorted(d.iterdir())}))
        files += len(outs[0][1])
        if outs[0] != outs[1]:
            differing.append(cmd[0])
    record(12, not differing, f"{len(commands)} commands, {files} artifact files, differing: {differing or 'none'}")
