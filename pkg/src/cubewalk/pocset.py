"""Half-space systems (pocsets), their pairwise relations and orientations.

Half-spaces are dense integer ids ``0 .. 2N-1``; the complement of ``h`` is
``h ^ 1`` so wall ``i`` is the pair ``{2i, 2i+1}``.  Containment is stored
transitively closed as one bitmask per half-space, which keeps relation
queries O(1).
"""
from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class PocsetError(Exception):
    pass


class ViolationList(PocsetError):
    """Raised when candidate relation data fails one or more pocset axioms."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnknownHalfSpace(PocsetError, KeyError):
    pass


class PartialOrientation(PocsetError, ValueError):
    pass


def complement(h: int) -> int:
    return h ^ 1


def wall_of(h: int) -> int:
    return h >> 1


def halfspace(wall: int, sign: int) -> int:
    """The half-space of ``wall`` selected by ``sign`` (+1 -> 2i, -1 -> 2i+1)."""
    return 2 * wall if sign > 0 else 2 * wall + 1


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Relation(enum.Enum):
    EQUAL = "equal"
    CONTAINED_IN = "contained_in"  # h < k
    CONTAINS = "contains"  # k < h
    DISJOINT_FROM = "disjoint_from"  # h < k*
    UNION_ALL = "union_all"  # h* < k
    TRANSVERSE = "transverse"


@dataclass(frozen=True)
class Orientation:
    """A partial or total sign assignment on the walls of an N-wall pocset.

    Bit ``i`` of ``domain`` marks wall ``i`` as oriented; bit ``i`` of
    ``signs`` set means the + side (half-space ``2i``) is selected.
    """

    n_walls: int
    signs: int
    domain: int

    @classmethod
    def total(cls, n_walls: int, signs: int) -> "Orientation":
        full = (1 << n_walls) - 1
        return cls(n_walls, signs & full, full)

    @classmethod
    def from_signs(cls, values: Sequence[int | None]) -> "Orientation":
        signs = domain = 0
        for i, s in enumerate(values):
            if s is None or s == 0:
                continue
            domain |= 1 << i
            if s > 0:
                signs |= 1 << i
        return cls(len(values), signs, domain)

    @classmethod
    def from_halfspaces(cls, n_walls: int, hs: Iterable[int]) -> "Orientation":
        signs = domain = 0
        for h in hs:
            w = h >> 1
            if domain >> w & 1 and ((signs >> w & 1) != (h & 1 == 0)):
                raise ValueError(f"both sides of wall {w} selected")
            domain |= 1 << w
            if h & 1 == 0:
                signs |= 1 << w
        return cls(n_walls, signs, domain)

    @property
    def is_total(self) -> bool:
        return self.domain == (1 << self.n_walls) - 1

    def sign(self, wall: int) -> int | None:
        if not self.domain >> wall & 1:
            return None
        return 1 if self.signs >> wall & 1 else -1

    def selected(self) -> int:
        """Bitmask over half-space ids of the selected sides."""
        out = 0
        for w in _bits(self.domain):
            out |= 1 << (2 * w + (0 if self.signs >> w & 1 else 1))
        return out

    def halfspaces(self) -> list[int]:
        return list(_bits(self.selected()))

    def as_list(self) -> list[int]:
        return [self.sign(i) or 0 for i in range(self.n_walls)]

    def flip(self, wall: int) -> "Orientation":
        return Orientation(self.n_walls, self.signs ^ (1 << wall), self.domain)

    def contains(self, h: int) -> bool:
        """True iff the oriented point lies in half-space ``h``."""
        s = self.sign(h >> 1)
        if s is None:
            raise PartialOrientation(f"wall {h >> 1} not oriented")
        return (s > 0) == (h & 1 == 0)


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: list[str]
    closure_added: list[tuple[int, int]]
    width: int | None = None
    width_exact: bool = True
    pocset: "Pocset | None" = None


@dataclass(frozen=True, eq=False)
class Pocset:
    n_walls: int
    up: tuple[int, ...]  # up[h]: mask of k with h <= k (reflexive, closed)
    down: tuple[int, ...]
    dimension_bound: int
    _transverse: tuple[int, ...] = field(repr=False)  # wall -> mask of transverse walls

    # -- construction -------------------------------------------------
    @classmethod
    def from_relations(
        cls, n_walls: int, leq: Iterable[tuple[int, int]], dimension_bound: int | None = None
    ) -> "Pocset":
        report = validate_pocset(n_walls, leq, dimension_bound)
        assert report.pocset is not None
        return report.pocset

    @classmethod
    def from_json(cls, text: str) -> "Pocset":
        try:
            data = json.loads(text)
            walls = int(data["walls"])
            leq = [(int(a), int(b)) for a, b in data.get("leq", [])]
            dim = data.get("dimension_bound")
        except (ValueError, KeyError, TypeError) as exc:
            raise ViolationList([f"malformed pocset file: {exc}"]) from exc
        return cls.from_relations(walls, leq, None if dim is None else int(dim))

    @classmethod
    def load(cls, path) -> "Pocset":
        with open(path) as fh:
            return cls.from_json(fh.read())

    def to_json(self) -> str:
        return json.dumps(
            {"walls": self.n_walls, "leq": self.cover_pairs(), "dimension_bound": self.dimension_bound}
        )

    # -- basic queries -----------------------------------------------
    @property
    def n_halfspaces(self) -> int:
        return 2 * self.n_walls

    def check(self, h: int) -> None:
        if not 0 <= h < 2 * self.n_walls:
            raise UnknownHalfSpace(h)

    def leq(self, h: int, k: int) -> bool:
        return bool(self.up[h] >> k & 1)

    def lt(self, h: int, k: int) -> bool:
        return h != k and bool(self.up[h] >> k & 1)

    def transverse(self, h: int, k: int) -> bool:
        return bool(self._transverse[h >> 1] >> (k >> 1) & 1)

    def transverse_walls(self, wall: int) -> int:
        return self._transverse[wall]

    def disjoint_mask(self, h: int) -> int:
        """Mask of half-spaces k with h <= k*, i.e. h and k disjoint."""
        return _swap_pairs(self.up[h])

    def cover_pairs(self) -> list[list[int]]:
        out = []
        for h in range(2 * self.n_walls):
            for k in _bits(self.up[h] & ~(1 << h)):
                mid = self.up[h] & self.down[k] & ~(1 << h) & ~(1 << k)
                if not mid:
                    out.append([h, k])
        return out

    def relations(self) -> list[tuple[int, int]]:
        return [(h, k) for h in range(2 * self.n_walls) for k in _bits(self.up[h]) if h != k]

    def restrict(self, walls: Sequence[int]) -> tuple["Pocset", list[int]]:
        """Induced pocset on a subset of walls; returns it with the wall map new->old."""
        walls = list(walls)
        index = {w: i for i, w in enumerate(walls)}
        pairs = []
        for w in walls:
            for s in (0, 1):
                h = 2 * w + s
                for k in _bits(self.up[h]):
                    if k != h and (k >> 1) in index:
                        pairs.append((2 * index[w] + s, 2 * index[k >> 1] + (k & 1)))
        return Pocset.from_relations(len(walls), pairs, self.dimension_bound), walls


def _swap_pairs(mask: int) -> int:
    """Apply the involution h -> h ^ 1 to every bit of a half-space mask."""
    even = mask & _EVEN_MASKS.get(mask.bit_length(), _even_mask(mask.bit_length()))
    odd = mask ^ even
    return (even << 1) | (odd >> 1)


_EVEN_MASKS: dict[int, int] = {}


def _even_mask(nbits: int) -> int:
    m = int("01" * ((nbits + 2) // 2), 2) if nbits else 0
    # "0101..01" read as binary has bit 0 set, bit 1 clear, ...
    _EVEN_MASKS[nbits] = m
    return m


def _max_transverse_clique(adj: list[int], target: int, budget: int = 200_000) -> tuple[int, bool]:
    """Largest clique size found in the transversality graph (capped at ``target``).

    Returns (size, exact).  Search stops early once ``target`` is reached.
    """
    best = 0
    nodes = 0
    exhausted = False

    def expand(size: int, cand: int) -> None:
        nonlocal best, nodes, exhausted
        if size > best:
            best = size
        if best >= target or exhausted:
            return
        nodes += 1
        if nodes > budget:
            exhausted = True
            return
        if size + bin(cand).count("1") <= best:
            return
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= ~(1 << v)
            expand(size + 1, cand & adj[v])
            if best >= target or exhausted or size + bin(cand).count("1") <= best:
                return

    expand(0, (1 << len(adj)) - 1)
    return best, not exhausted


def _sampled_clique(adj: list[int], trials: int = 200, seed: int = 0) -> int:
    rng = random.Random(seed)
    n = len(adj)
    best = 0
    for _ in range(trials):
        order = list(range(n))
        rng.shuffle(order)
        clique = 0
        size = 0
        cand = (1 << n) - 1
        for v in order:
            if cand >> v & 1:
                clique |= 1 << v
                size += 1
                cand &= adj[v]
        best = max(best, size)
    return best


def validate_pocset(
    n_walls: int,
    leq: Iterable[tuple[int, int]],
    dimension_bound: int | None = None,
    exact_width_walls: int = 12,
) -> ValidationReport:
    """Check the pocset axioms and return the transitively closed relation.

    Raises :class:`ViolationList` listing every failure.  Antisymmetry
    failures are reported, never repaired.
    """
    violations: list[str] = []
    if n_walls < 0:
        raise ViolationList(["negative wall count"])
    n = 2 * n_walls
    given: set[tuple[int, int]] = set()
    for h, k in leq:
        if not (0 <= h < n and 0 <= k < n):
            violations.append(f"unknown half-space in pair ({h}, {k})")
            continue
        given.add((h, k))
    if violations:
        raise ViolationList(violations)

    up = [1 << h for h in range(n)]
    for h, k in given:
        up[h] |= 1 << k
        up[k ^ 1] |= 1 << (h ^ 1)
    # Warshall closure over bitsets
    for m in range(n):
        bit = 1 << m
        um = up[m]
        for i in range(n):
            if up[i] & bit:
                up[i] |= um
    closure_added = []
    for h in range(n):
        for k in _bits(up[h]):
            if k != h and (h, k) not in given:
                closure_added.append((h, k))

    for h in range(n):
        if up[h] >> (h ^ 1) & 1:
            violations.append(f"half-space below its complement: {h} <= {h ^ 1}")
    for h in range(n):
        for k in _bits(up[h]):
            if k > h and up[k] >> h & 1:
                violations.append(f"antisymmetry failure: {h} <= {k} and {k} <= {h}")

    down = [0] * n
    for h in range(n):
        for k in _bits(up[h]):
            down[k] |= 1 << h

    trans = [0] * n_walls
    for i in range(n_walls):
        nested = up[2 * i] | up[2 * i + 1] | down[2 * i] | down[2 * i + 1]
        for j in range(n_walls):
            if j != i and not (nested >> (2 * j) & 1 or nested >> (2 * j + 1) & 1):
                trans[i] |= 1 << j

    target = (dimension_bound + 1) if dimension_bound is not None else n_walls + 1
    if n_walls <= exact_width_walls:
        width, exact = _max_transverse_clique(trans, target, budget=10**9)
    else:
        width, exact = _max_transverse_clique(trans, target)
        if not exact:
            width = max(width, _sampled_clique(trans))
    if dimension_bound is not None and width > dimension_bound:
        violations.append(
            f"transverse antichain of size {width} exceeds dimension bound {dimension_bound}"
        )
    if dimension_bound is not None and dimension_bound < 1 and n_walls > 0:
        violations.append("dimension bound must be positive")
    if violations:
        raise ViolationList(violations)

    dim = dimension_bound if dimension_bound is not None else max(width, 1)
    p = Pocset(n_walls, tuple(up), tuple(down), dim, tuple(trans))
    return ValidationReport(True, [], closure_added, width, exact, p)


def relation(p: Pocset, h: int, k: int) -> Relation:
    p.check(h)
    p.check(k)
    if h == k:
        return Relation.EQUAL
    if h == k ^ 1:
        return Relation.DISJOINT_FROM
    if p.up[h] >> k & 1:
        return Relation.CONTAINED_IN
    if p.up[k] >> h & 1:
        return Relation.CONTAINS
    if p.up[h] >> (k ^ 1) & 1:
        return Relation.DISJOINT_FROM
    if p.up[h ^ 1] >> k & 1:
        return Relation.UNION_ALL
    return Relation.TRANSVERSE


def _check_domain(p: Pocset, o: Orientation) -> None:
    if o.n_walls != p.n_walls:
        raise ValueError(f"orientation has {o.n_walls} walls, pocset has {p.n_walls}")


def is_consistent(p: Pocset, o: Orientation) -> bool:
    """No two selected sides are disjoint (equivalently, upward closure holds on the domain)."""
    _check_domain(p, o)
    sel = o.selected()
    for h in _bits(sel):
        if p.disjoint_mask(h) & sel:
            return False
    return True


def is_facing(p: Pocset, hs: Sequence[int]) -> bool:
    """True iff the complements of ``hs`` are pairwise disjoint."""
    for h in hs:
        p.check(h)
    walls = [h >> 1 for h in hs]
    if len(set(hs)) != len(hs) or len(set(walls)) != len(walls):
        raise ValueError("half-spaces must be distinct and non-complementary")
    for i, h in enumerate(hs):
        for k in hs[i + 1 :]:
            if not p.up[h ^ 1] >> k & 1:
                return False
    return True


def wall_pseudo_distance(p: Pocset, u: Orientation, v: Orientation) -> int:
    _check_domain(p, u)
    _check_domain(p, v)
    if not (u.is_total and v.is_total):
        raise PartialOrientation("wall distance needs total orientations")
    return bin(u.signs ^ v.signs).count("1")


# -- corpus constructors ---------------------------------------------

def cube_pocset(n: int) -> Pocset:
    """``n`` pairwise transverse walls (the n-cube)."""
    return Pocset.from_relations(n, [], max(n, 1))


def chain_pocset(n: int) -> Pocset:
    """``n`` nested walls: half-space 2i contained in 2(i+1) (a path of n edges)."""
    return Pocset.from_relations(n, [(2 * i, 2 * i + 2) for i in range(n - 1)], 1)


def grid_pocset(*sides: int) -> Pocset:
    """The box ``[0, s1] x ... x [0, sd]`` of Z^d.

    Walls are numbered axis by axis; wall ``c`` of an axis separates
    coordinate ``c`` from ``c + 1`` and its + side is ``x > c``.
    """
    pairs = []
    offset = 0
    for s in sides:
        for c in range(s - 1):
            # {x > c+1} inside {x > c}
            pairs.append((2 * (offset + c + 1), 2 * (offset + c)))
        offset += s
    return Pocset.from_relations(offset, pairs, max(len([s for s in sides if s]), 1))


def grid_orientation(sides: Sequence[int], point: Sequence[int]) -> Orientation:
    signs = []
    for s, x in zip(sides, point):
        signs.extend(1 if x > c else -1 for c in range(s))
    return Orientation.from_signs(signs)


def pocset_from_partitions(n_points: int, sides: Sequence[frozenset[int]], dimension_bound=None):
    """Pocset of a finite walled set: each wall is given by the point set of its + side.

    Containment is inclusion of point sets.  Sides must be proper, nonempty
    and pairwise distinct up to complement.
    """
    universe = frozenset(range(n_points))
    sets = []
    for s in sides:
        sets.append(frozenset(s))
        sets.append(universe - frozenset(s))
    pairs = []
    for a, sa in enumerate(sets):
        for b, sb in enumerate(sets):
            if a != b and sa <= sb:
                pairs.append((a, b))
    return Pocset.from_relations(len(sides), pairs, dimension_bound)


def tree_pocset(n_vertices: int, edges: Sequence[tuple[int, int]]) -> tuple[Pocset, list[Orientation]]:
    """Pocset of a finite tree; wall ``i`` is edge ``edges[i]`` with + side containing ``edges[i][1]``.

    Returns the pocset and the orientations of the tree's vertices.
    """
    adj: dict[int, list[int]] = {v: [] for v in range(n_vertices)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    sides = []
    for a, b in edges:
        seen = {b}
        stack = [b]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen and not (v == b and w == a):
                    seen.add(w)
                    stack.append(w)
        sides.append(frozenset(seen))
    p = pocset_from_partitions(n_vertices, sides, 1)
    verts = [
        Orientation.from_signs([1 if v in s else -1 for s in sides]) for v in range(n_vertices)
    ]
    return p, verts


def random_walled_set(rng: random.Random, n_points: int, n_walls: int) -> tuple[Pocset, list[Orientation]]:
    """Random finite walled set: ``n_walls`` distinct random bipartitions of ``n_points`` points."""
    universe = frozenset(range(n_points))
    chosen: list[frozenset[int]] = []
    seen: set[frozenset[int]] = set()
    attempts = 0
    while len(chosen) < n_walls and attempts < 50 * n_walls + 100:
        attempts += 1
        s = frozenset(i for i in range(n_points) if rng.random() < 0.5)
        if not s or s == universe or s in seen or (universe - s) in seen:
            continue
        seen.add(s)
        chosen.append(s)
    p = pocset_from_partitions(n_points, chosen, None)
    pts = [Orientation.from_signs([1 if x in s else -1 for s in chosen]) for x in range(n_points)]
    return p, pts
