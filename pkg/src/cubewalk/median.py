"""Median calculus on finite pocsets: medians, intervals, embeddings into Z^d,
lifting decompositions, bridges, strong separation, measures on vertices."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cubulation import enumerate_vertices
from .pocset import (
    Orientation,
    Pocset,
    PocsetError,
    Relation,
    _bits,
    is_consistent,
    relation,
)


class IncompatibleDomains(PocsetError, ValueError):
    pass


class NotFinite(PocsetError):
    pass


class NotAPartition(PocsetError, ValueError):
    pass


class InconsistentS(PocsetError, ValueError):
    pass


class NotDisjoint(PocsetError, ValueError):
    pass


class NoEndpoints(PocsetError):
    def __init__(self, bridge: "Bridge"):
        self.bridge = bridge
        super().__init__("half-spaces are not strongly separated; bridge has no unique endpoints")


class NotAProbability(PocsetError, ValueError):
    pass


class UnknownSigns(PocsetError, ValueError):
    pass


def _same_domain(*os: Orientation) -> None:
    n = os[0].n_walls
    for o in os:
        if o.n_walls != n:
            raise IncompatibleDomains("orientations live on different wall sets")
        if not o.is_total:
            raise IncompatibleDomains("orientation is not total")


def median(u: Orientation, v: Orientation, w: Orientation) -> Orientation:
    """Wall-wise majority of three total orientations."""
    _same_domain(u, v, w)
    return Orientation(u.n_walls, (u.signs & v.signs) | (v.signs & w.signs) | (u.signs & w.signs), u.domain)


# -- intervals ---------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    separating: int  # mask of walls on which the endpoints differ
    shared_plus: int  # mask of half-spaces containing both endpoints
    endpoints: tuple[Orientation, Orientation]

    @property
    def walls(self) -> list[int]:
        return list(_bits(self.separating))

    def contains(self, x: Orientation) -> bool:
        _same_domain(self.endpoints[0], x)
        return self.shared_plus & ~x.selected() == 0

    def oriented_toward_end(self) -> list[int]:
        """Separating half-spaces containing the second endpoint (U_w minus U_v)."""
        w = self.endpoints[1]
        return [2 * i + (0 if w.signs >> i & 1 else 1) for i in self.walls]


def interval(v: Orientation, w: Orientation) -> Interval:
    _same_domain(v, w)
    return Interval(v.signs ^ w.signs, v.selected() & w.selected(), (v, w))


def interval_vertices(p: Pocset, iv: Interval) -> list[Orientation]:
    return enumerate_vertices(p, fixed=iv.shared_plus)


@dataclass
class Embedding:
    chains: list[list[int]]  # each chain listed from largest to smallest half-space
    coordinates: dict[int, tuple[int, ...]]  # orientation signs -> point of Z^d

    @property
    def dimension(self) -> int:
        return len(self.chains)


def _min_chain_cover(p: Pocset, elems: Sequence[int]) -> list[list[int]]:
    """Minimum chain partition of ``elems`` under strict containment.

    Maximum bipartite matching (augmenting paths, ids in ascending order
    for determinism) between each element and a strictly larger one.
    """
    elems = sorted(elems)
    succ_of: dict[int, int] = {}  # matched: a -> b with a < b
    pred_of: dict[int, int] = {}
    larger = {a: [b for b in elems if p.lt(a, b)] for a in elems}

    def augment(a: int, seen: set[int]) -> bool:
        for b in larger[a]:
            if b in seen:
                continue
            seen.add(b)
            if b not in pred_of or augment(pred_of[b], seen):
                pred_of[b] = a
                succ_of[a] = b
                return True
        return False

    for a in elems:
        augment(a, set())
    chains = []
    for a in elems:
        if a in pred_of:
            continue
        chain = [a]
        while chain[-1] in succ_of:
            chain.append(succ_of[chain[-1]])
        chains.append(chain[::-1])
    return chains


def dilworth_embed(
    p: Pocset, iv: Interval, vertices: Sequence[Orientation] | None = None, cap: int = 4096
) -> Embedding:
    """Isometric embedding of a finite interval into (Z^d, l1), d = width of its separating order."""
    if bin(iv.separating).count("1") > cap:
        raise NotFinite("interval too large to embed")
    elems = iv.oriented_toward_end()
    chains = _min_chain_cover(p, elems)
    if vertices is None:
        vertices = interval_vertices(p, iv)
    coords = {}
    for x in vertices:
        sel = x.selected()
        coords[x.signs] = tuple(sum(1 for h in chain if sel >> h & 1) for chain in chains)
    return Embedding(chains, coords)


def endpoint_pairs(p: Pocset, iv: Interval, vertices: Sequence[Orientation] | None = None):
    """All ordered pairs (x, y) of vertices with I(x, y) = I(v, w)."""
    if vertices is None:
        vertices = interval_vertices(p, iv)
    present = {x.signs for x in vertices}
    out = []
    for x in vertices:
        y = x.signs ^ iv.separating
        if y in present:
            out.append((x, Orientation.total(x.n_walls, y)))
    return out


# -- lifting decompositions -------------------------------------------

@dataclass
class LiftedView:
    pocset: Pocset  # the pocset on the kept walls
    keep: list[int]  # new wall index -> original wall
    s: int  # half-space mask over the original pocset
    n_walls: int

    def lift(self, o: Orientation) -> Orientation:
        signs = 0
        for h in _bits(self.s):
            if h & 1 == 0:
                signs |= 1 << (h >> 1)
        for i, w in enumerate(self.keep):
            if o.signs >> i & 1:
                signs |= 1 << w
        return Orientation.total(self.n_walls, signs)

    def vertices(self) -> list[Orientation]:
        return [self.lift(o) for o in enumerate_vertices(self.pocset)]


def lifting_project(p: Pocset, keep: Iterable[int], s: Iterable[int]) -> LiftedView:
    keep = sorted(set(keep))
    s = list(s)
    s_walls = [h >> 1 for h in s]
    if len(set(s_walls)) != len(s_walls):
        raise NotAPartition("s selects both sides of a wall or repeats one")
    if set(keep) & set(s_walls) or set(keep) | set(s_walls) != set(range(p.n_walls)):
        raise NotAPartition("kept walls and the walls of s must partition the walls")
    smask = 0
    for h in s:
        p.check(h)
        smask |= 1 << h
    if not is_consistent(p, Orientation.from_halfspaces(p.n_walls, s)):
        raise InconsistentS("s contains two disjoint half-spaces")
    sub, walls = p.restrict(keep)
    return LiftedView(sub, walls, smask, p.n_walls)


# -- strong separation ---------------------------------------------------

class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SeparationCertificate:
    verdict: Verdict
    witness: object = None  # a wall transverse to both, when verdict is NO
    radius: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.verdict is Verdict.YES


def strongly_separated(space, h, k, radius: int | None = None) -> SeparationCertificate:
    """Three-valued strong separation test.

    Finite pocsets are scanned exhaustively; group presets answer through
    their own ``strongly_separated`` method.  Transverse pairs are never
    strongly separated.
    """
    if not isinstance(space, Pocset):
        return space.strongly_separated(h, k, radius)
    p = space
    p.check(h)
    p.check(k)
    if h >> 1 == k >> 1:
        raise ValueError("strong separation needs two distinct walls")
    if p.transverse(h, k):
        return SeparationCertificate(Verdict.NO, None, None, "the half-spaces are transverse")
    both = p.transverse_walls(h >> 1) & p.transverse_walls(k >> 1)
    if both:
        w = (both & -both).bit_length() - 1
        return SeparationCertificate(Verdict.NO, w, None, "wall transverse to both")
    return SeparationCertificate(Verdict.YES, None, None, "exhaustive scan")


def delta_count(p: Pocset, h: int, k: int) -> int:
    """Number of half-spaces l with h <= l <= k* (inclusive)."""
    if relation(p, h, k) is not Relation.DISJOINT_FROM or h == k ^ 1:
        raise NotDisjoint(f"{h} and {k} are not disjoint")
    return bin(p.up[h] & p.down[k ^ 1]).count("1")


# -- bridges -----------------------------------------------------------

@dataclass
class Bridge:
    h1: int
    h2: int
    beta: int  # half-space mask
    vertices: list[Orientation]
    endpoints: tuple[Orientation, Orientation] | None = None
    separation: SeparationCertificate | None = None

    @property
    def beta_list(self) -> list[int]:
        return list(_bits(self.beta))


def _properly_above_wall(p: Pocset, wall_h: int, h: int) -> bool:
    """Either side of the wall of ``wall_h`` is a proper subset of ``h``."""
    a, b = wall_h, wall_h ^ 1
    return p.lt(a, h) or p.lt(b, h)


def bridge_beta(p: Pocset, h1: int, h2: int) -> int:
    beta = 0
    for h in range(p.n_halfspaces):
        above1 = _properly_above_wall(p, h1, h)
        above2 = _properly_above_wall(p, h2, h)
        if (
            (above1 and p.transverse(h2, h))
            or (above2 and p.transverse(h1, h))
            or (above1 and above2)
        ):
            beta |= 1 << h
    return beta


def bridge(p: Pocset, h1: int, h2: int, require_endpoints: bool = False) -> Bridge:
    if h1 == h2 ^ 1 or relation(p, h1, h2) is not Relation.DISJOINT_FROM:
        raise NotDisjoint(f"bridge needs h1 properly inside h2*, got {h1}, {h2}")
    beta = bridge_beta(p, h1, h2)
    verts = enumerate_vertices(p, fixed=beta)
    cert = strongly_separated(p, h1, h2)
    b = Bridge(h1, h2, beta, verts, None, cert)
    if cert.verdict is Verdict.YES:
        s1 = [x for x in verts if x.contains(h1)]
        s2 = [x for x in verts if x.contains(h2)]
        if len(s1) == 1 and len(s2) == 1:
            b.endpoints = (s1[0], s2[0])
    if b.endpoints is None and require_endpoints:
        raise NoEndpoints(b)
    return b


# -- measures ----------------------------------------------------------

@dataclass
class MeasureClassification:
    balanced: list[int]  # walls with mass exactly 1/2 on each side
    heavy: list[int]  # half-spaces of mass > 1/2
    light: list[int]
    masses: dict[int, Fraction] = field(repr=False, default_factory=dict)


def _as_fractions(weights: Sequence, denominator: int | None) -> list[Fraction]:
    out = []
    for w in weights:
        if denominator is not None:
            out.append(Fraction(w, denominator))
        else:
            out.append(Fraction(w))
    return out


def classify_measure(
    p: Pocset,
    points: Sequence[Orientation],
    weights: Sequence,
    denominator: int | None = None,
    tol: float = 1e-12,
) -> MeasureClassification:
    """Split half-spaces into heavy (> 1/2), light (< 1/2) and balanced walls.

    Masses are exact fractions; pass integer weights with ``denominator``
    or Fractions directly.
    """
    if len(points) != len(weights):
        raise NotAProbability("points and weights differ in length")
    ws = _as_fractions(weights, denominator)
    if any(w < 0 for w in ws):
        raise NotAProbability("negative weight")
    if abs(float(sum(ws, Fraction(0)) - 1)) > tol:
        raise NotAProbability(f"weights sum to {float(sum(ws))}")
    for x in points:
        if x.n_walls != p.n_walls or not x.is_total:
            raise UnknownSigns("support point without a sign on every wall")
    half = Fraction(1, 2)
    balanced, heavy, light = [], [], []
    masses = {}
    for wall in range(p.n_walls):
        m = sum((w for x, w in zip(points, ws) if x.signs >> wall & 1), Fraction(0))
        masses[2 * wall] = m
        masses[2 * wall + 1] = 1 - m
        if m == half:
            balanced.append(wall)
        elif m > half:
            heavy.append(2 * wall)
            light.append(2 * wall + 1)
        else:
            heavy.append(2 * wall + 1)
            light.append(2 * wall)
    return MeasureClassification(balanced, heavy, light, masses)


def has_facing_triple(p: Pocset, hs: Sequence[int]) -> tuple[int, int, int] | None:
    hs = list(hs)
    for i, a in enumerate(hs):
        for j in range(i + 1, len(hs)):
            b = hs[j]
            if a >> 1 == b >> 1 or not p.up[a ^ 1] >> b & 1:
                continue
            for c in hs[j + 1 :]:
                if c >> 1 in (a >> 1, b >> 1):
                    continue
                if p.up[a ^ 1] >> c & 1 and p.up[b ^ 1] >> c & 1:
                    return (a, b, c)
    return None


# -- terminal elements ---------------------------------------------------

def _is_minimal(p: Pocset, h: int, H: Iterable[int]) -> bool:
    for k in H:
        if not (p.transverse(h, k) or p.leq(h, k) or p.leq(h, k ^ 1)):
            return False
    return True


def terminal_elements(p: Pocset, H: Iterable[int]) -> set[int]:
    """Elements of H that are minimal or maximal in H."""
    H = list(H)
    out = set()
    for h in H:
        if _is_minimal(p, h, H):
            out.add(h)
        elif all(p.transverse(h, k) or p.leq(k, h) or p.leq(k ^ 1, h) for k in H):
            out.add(h)
    return out
