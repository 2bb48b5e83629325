"""Dual cube complex of a finite pocset: vertices, edges, cubes, median checks."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .pocset import Orientation, Pocset, Relation, _bits, relation


class TooLarge(Exception):
    pass


class DefectReport(Exception):
    """The dual graph came out disconnected, which a valid pocset cannot produce."""


DEFAULT_CAP = 24


def enumerate_vertices(
    p: Pocset, fixed: int = 0, limit: int | None = None
) -> list[Orientation]:
    """All total consistent orientations selecting every half-space in mask ``fixed``.

    Depth-first sign assignment; selecting h forces every k >= h, and a
    branch dies as soon as both sides of a wall are forced.
    """
    n = p.n_walls
    up = p.up
    start = 0
    for h in _bits(fixed):
        start |= up[h]
    if _clash(start):
        return []
    out: list[Orientation] = []

    def walk(sel: int, wall: int) -> bool:
        while wall < n and (sel >> (2 * wall)) & 3:
            wall += 1
        if wall == n:
            signs = 0
            for w in range(n):
                if sel >> (2 * w) & 1:
                    signs |= 1 << w
            out.append(Orientation.total(n, signs))
            return limit is not None and len(out) >= limit
        for h in (2 * wall, 2 * wall + 1):
            nxt = sel | up[h]
            if not _clash(nxt):
                if walk(nxt, wall + 1):
                    return True
        return False

    walk(start, 0)
    return out


def _clash(sel: int) -> bool:
    even = sel & _EVEN(sel.bit_length())
    return bool(even & (sel >> 1))


_even_cache: dict[int, int] = {}


def _EVEN(nbits: int) -> int:
    m = _even_cache.get(nbits)
    if m is None:
        m = sum(1 << i for i in range(0, nbits + 2, 2))
        _even_cache[nbits] = m
    return m


@dataclass
class MedianGraph:
    pocset: Pocset | None
    vertices: list[Orientation]
    edges: list[tuple[int, int, int]]
    index: dict[int, int] = field(default_factory=dict)
    adjacency: list[list[tuple[int, int]]] = field(default_factory=list)

    def __post_init__(self):
        if not self.index:
            self.index = {v.signs: i for i, v in enumerate(self.vertices)}
        if not self.adjacency:
            self.adjacency = [[] for _ in self.vertices]
            for i, j, w in self.edges:
                self.adjacency[i].append((j, w))
                self.adjacency[j].append((i, w))

    @property
    def n_walls(self) -> int:
        return self.vertices[0].n_walls if self.vertices else 0

    def bfs(self, source: int) -> list[int]:
        dist = [-1] * len(self.vertices)
        dist[source] = 0
        q = deque([source])
        while q:
            v = q.popleft()
            for w, _ in self.adjacency[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q.append(w)
        return dist

    def distance_matrix(self) -> np.ndarray:
        return np.array([self.bfs(i) for i in range(len(self.vertices))], dtype=np.int32)

    def to_json(self, census: dict[int, int] | None = None) -> str:
        return json.dumps(
            {
                "vertices": [v.as_list() for v in self.vertices],
                "edges": [list(e) for e in self.edges],
                "cubes": {str(k): c for k, c in sorted((census or enumerate_cubes(self)).items())},
            },
            sort_keys=True,
        )

    def to_dot(self) -> str:
        lines = ["graph median {"]
        for i, v in enumerate(self.vertices):
            label = "".join("+" if s > 0 else "-" for s in v.as_list())
            lines.append(f'  v{i} [label="{label}"];')
        for i, j, w in self.edges:
            lines.append(f'  v{i} -- v{j} [label="{w}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def graph_from_orientations(vertices: Sequence[Orientation], pocset: Pocset | None = None) -> MedianGraph:
    """Graph on the given orientations joining those that differ on exactly one wall."""
    vertices = list(vertices)
    index = {v.signs: i for i, v in enumerate(vertices)}
    edges = []
    n = vertices[0].n_walls if vertices else 0
    for i, v in enumerate(vertices):
        for w in range(n):
            if not v.signs >> w & 1:
                j = index.get(v.signs | (1 << w))
                if j is not None:
                    edges.append((i, j, w))
    return MedianGraph(pocset, vertices, edges, index)


def cubulate(p: Pocset, cap: int = DEFAULT_CAP) -> MedianGraph:
    if p.n_walls > cap:
        raise TooLarge(f"{p.n_walls} walls exceeds enumeration cap {cap}")
    g = graph_from_orientations(enumerate_vertices(p), p)
    if g.vertices:
        dist = g.bfs(0)
        if min(dist) < 0:
            raise DefectReport(f"dual graph disconnected: {dist.count(-1)} unreachable vertices")
    return g


@dataclass(frozen=True)
class MedianReport:
    passed: bool
    triples_checked: int
    witness: tuple[int, int, int] | None = None
    reason: str = ""


def majority(u: Orientation, v: Orientation, w: Orientation) -> Orientation:
    return Orientation(u.n_walls, (u.signs & v.signs) | (v.signs & w.signs) | (u.signs & w.signs), u.domain)


def verify_median(g: MedianGraph) -> MedianReport:
    """Every triple must have exactly one vertex in the intersection of its
    three geodesic intervals, and it must equal the majority orientation.

    Intervals come from BFS distances, independently of wall signs.
    """
    nv = len(g.vertices)
    if nv == 0:
        return MedianReport(True, 0)
    d = g.distance_matrix()
    if (d < 0).any():
        i, j = map(int, np.argwhere(d < 0)[0])
        return MedianReport(False, 0, (i, j, j), "graph disconnected")
    # between[u, v, x]: d(u, x) + d(x, v) == d(u, v)
    between = (d[:, None, :] + d.T[None, :, :]) == d[:, :, None]
    signs = np.array([[s > 0 for s in x.as_list()] for x in g.vertices], dtype=bool).reshape(nv, -1)
    checked = 0
    for u in range(nv):
        for v in range(u, nv):
            ws = np.arange(v, nv)
            inter = between[u, v][None, :] & between[v, ws] & between[ws, u]
            counts = inter.sum(axis=1)
            checked += len(ws)
            bad = np.nonzero(counts != 1)[0]
            if len(bad):
                w = int(ws[bad[0]])
                return MedianReport(False, checked, (u, v, w), f"{int(counts[bad[0]])} median candidates")
            mids = inter.argmax(axis=1)
            su, sv, sw = signs[u], signs[v], signs[ws]
            maj = (su & sv) | (sv & sw) | (su & sw)
            wrong = np.nonzero((maj != signs[mids]).any(axis=1))[0]
            if len(wrong):
                w = int(ws[wrong[0]])
                return MedianReport(False, checked, (u, v, w), "median differs from majority rule")
    return MedianReport(True, checked)


def helly_check(p: Pocset, hs: Sequence[int]) -> Orientation | None:
    """A vertex lying in every half-space of ``hs``, or None if two of them are disjoint."""
    for h in hs:
        p.check(h)
    for a, b in combinations(hs, 2):
        if relation(p, a, b) is Relation.DISJOINT_FROM:
            return None
    fixed = 0
    for h in hs:
        fixed |= 1 << h
    found = enumerate_vertices(p, fixed, limit=1)
    return found[0] if found else None


def enumerate_cubes(g: MedianGraph, max_dim: int | None = None) -> dict[int, int]:
    """Number of k-cubes for each k <= max_dim.

    A cube is counted once, at its corner where all its walls read -.
    """
    p = g.pocset
    if max_dim is None:
        max_dim = p.dimension_bound if p is not None else g.n_walls
    census = {k: 0 for k in range(max_dim + 1)}
    census[0] = len(g.vertices)
    if max_dim == 0:
        return census
    for i, v in enumerate(g.vertices):
        ups = [w for j, w in g.adjacency[i] if not v.signs >> w & 1]
        if not ups:
            continue
        trans = {}
        for w in ups:
            mask = 0
            for x in ups:
                if x != w and _transverse(g, p, w, x):
                    mask |= 1 << x
            trans[w] = mask

        def grow(size: int, cand: int) -> None:
            census[size] += 1
            if size == max_dim:
                return
            while cand:
                w = (cand & -cand).bit_length() - 1
                cand &= ~(1 << w)
                grow(size + 1, cand & trans[w])

        allups = 0
        for w in ups:
            allups |= 1 << w
        while allups:
            w = (allups & -allups).bit_length() - 1
            allups &= ~(1 << w)
            grow(1, allups & trans[w])
    return census


def _transverse(g: MedianGraph, p: Pocset | None, a: int, b: int) -> bool:
    if p is not None:
        return p.transverse(2 * a, 2 * b)
    # graphs without a pocset: walls cross iff all four sign patterns occur
    seen = set()
    for v in g.vertices:
        seen.add((v.signs >> a & 1, v.signs >> b & 1))
    return len(seen) == 4
