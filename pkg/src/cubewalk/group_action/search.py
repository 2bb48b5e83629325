"""Searches over balls: finite truncations, essentiality, flips, skewers,
facing tuples and ping-pong tables."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from ..median import Verdict
from ..pocset import Orientation, Pocset, Relation
from .base import GroupPreset, HalfSpace, TooLarge

DEFAULT_RADIUS = 8


class NotNested(ValueError):
    pass


class TableInvalid(ValueError):
    pass


# -- finite truncations ------------------------------------------------------

@dataclass
class Truncation:
    """Walls dual to edges of B_R, realised as a finite pocset.

    Wall ``i`` has + side ``halfspaces[i]`` (the side away from the basepoint).
    """

    preset: GroupPreset
    radius: int
    pocset: Pocset
    halfspaces: list[HalfSpace]
    elements: list
    index: dict = field(default_factory=dict)

    def orientation(self, g) -> Orientation:
        return Orientation.from_signs(
            [1 if self.preset.contains(h, g) else -1 for h in self.halfspaces]
        )

    def halfspace_id(self, hs: HalfSpace) -> int:
        i = self.index[hs.wall]
        return 2 * i if hs.sign == self.halfspaces[i].sign else 2 * i + 1


def truncate(preset: GroupPreset, radius: int) -> Truncation:
    hs = preset.ball_halfspaces(radius)
    n = len(hs)
    pairs = []
    rel = preset.relation
    for i in range(n):
        for j in range(i + 1, n):
            r = rel(hs[i], hs[j])
            if r is Relation.CONTAINED_IN:
                pairs.append((2 * i, 2 * j))
            elif r is Relation.CONTAINS:
                pairs.append((2 * j, 2 * i))
            elif r is Relation.DISJOINT_FROM:
                pairs.append((2 * i, 2 * j + 1))
            elif r is Relation.UNION_ALL:
                pairs.append((2 * i + 1, 2 * j))
    p = Pocset.from_relations(n, pairs, max(getattr(preset, "dimension", 1), 1))
    return Truncation(preset, radius, p, hs, preset.ball(radius), {h.wall: i for i, h in enumerate(hs)})


# -- orbit enumeration -------------------------------------------------------

def orbit_layers(preset: GroupPreset, radius: int, generators: Sequence | None = None):
    """Yield the orbit layer by layer (each layer in shortlex order), lazily."""
    if generators is None:
        steps = [preset.letter_element(x) for x in preset.letters()]
    else:
        steps = list(generators) + [preset.inv(g) for g in generators]
    e = preset.identity
    seen = {e}
    frontier = [e]
    yield frontier
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for s in steps:
                h = preset.mul(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        if not nxt:
            return
        nxt.sort(key=preset.element_key)
        yield nxt
        frontier = nxt


def _orbit_iter(preset, radius, generators):
    for layer in orbit_layers(preset, radius, generators):
        yield from layer


def orbit(preset: GroupPreset, radius: int, generators: Sequence | None = None) -> tuple[list, bool]:
    """Elements of the acting subgroup reached within ``radius``; flag marks an exhausted (finite) orbit.

    With no generators the whole group acts and the orbit is B_radius.
    Otherwise words of length <= radius in the given elements are explored.
    """
    if generators is None:
        return sorted(preset.ball(radius), key=preset.element_key), False
    gens = list(generators)
    gens += [preset.inv(g) for g in gens]
    e = preset.identity
    seen = {e}
    out = [e]
    frontier = [e]
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for s in gens:
                h = preset.mul(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        if not nxt:
            return out, True
        out += nxt
        frontier = nxt
    return out, False


# -- essentiality -----------------------------------------------------------

class Essentiality(enum.Enum):
    TRIVIAL = "trivial"
    HALF_ESSENTIAL = "half_essential"
    ESSENTIAL = "essential"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class EssentialityReport:
    kind: Essentiality
    depth_in: int  # deepest orbit point found inside h
    depth_out: int  # deepest orbit point found inside h*
    radius: int
    orbit_size: int


def essentiality(
    preset: GroupPreset, h: HalfSpace, radius: int = DEFAULT_RADIUS, generators: Sequence | None = None
) -> EssentialityReport:
    """Witness-backed classification: a side counts as deep once an orbit
    point lies more than radius/2 inside it."""
    points, exhausted = orbit(preset, radius, generators)
    d_in = max((preset.depth(g, h) for g in points), default=0)
    d_out = max((preset.depth(g, h.complement) for g in points), default=0)
    if exhausted:
        kind = Essentiality.TRIVIAL
    else:
        deep_in, deep_out = d_in > radius / 2, d_out > radius / 2
        if deep_in and deep_out:
            kind = Essentiality.ESSENTIAL
        elif deep_in or deep_out:
            kind = Essentiality.HALF_ESSENTIAL
        else:
            kind = Essentiality.UNKNOWN
    return EssentialityReport(kind, d_in, d_out, radius, len(points))


# -- flips and skewers ------------------------------------------------------

def flip_search(
    preset: GroupPreset, h: HalfSpace, radius: int = DEFAULT_RADIUS, generators: Sequence | None = None
):
    """First gamma (shortlex over the orbit) with h* properly inside gamma*h, or None."""
    hstar = h.complement
    for g in _orbit_iter(preset, radius, generators):
        if preset.relation(hstar, preset.act(g, h)) is Relation.CONTAINED_IN:
            return g
    return None


def double_skewer_search(
    preset: GroupPreset,
    h: HalfSpace,
    k: HalfSpace,
    radius: int = DEFAULT_RADIUS,
    generators: Sequence | None = None,
):
    """First gamma with gamma*k properly inside h, given h properly inside k."""
    if preset.relation(h, k) is not Relation.CONTAINED_IN:
        raise NotNested("double skewering needs h properly inside k")
    for g in _orbit_iter(preset, radius, generators):
        if preset.relation(preset.act(g, k), h) is Relation.CONTAINED_IN:
            return g
    return None


# -- facing tuples ----------------------------------------------------------

def _candidates(preset: GroupPreset, radius: int) -> list[HalfSpace]:
    """Both sides of every wall dual to an edge of B_radius, basepoint side first."""
    out = []
    for far in preset.ball_halfspaces(radius):
        out.append(far.complement)
        out.append(far)
    return out


def facing_tuple_search(
    preset: GroupPreset,
    n: int,
    radius: int = DEFAULT_RADIUS,
    require_strong_separation: bool = False,
    max_nodes: int = 2_000_000,
) -> list[HalfSpace] | None:
    """n pairwise facing half-spaces among walls near the basepoint (grown radius by radius)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    for r in range(1, radius + 1):
        try:
            cands = _candidates(preset, r)
        except TooLarge:
            return None
        found = _facing_clique(preset, cands, n, require_strong_separation, max_nodes)
        if found is not None:
            return found
    return None


def _facing_clique(preset, cands, n, strong, max_nodes):
    m = len(cands)
    cache: dict[tuple[int, int], bool] = {}

    def ok(i: int, j: int) -> bool:
        key = (i, j) if i < j else (j, i)
        v = cache.get(key)
        if v is None:
            a, b = cands[key[0]], cands[key[1]]
            v = a.wall != b.wall and preset.facing(a, b)
            if v and strong:
                v = preset.strongly_separated(a, b).verdict is Verdict.YES
            cache[key] = v
        return v

    budget = [max_nodes]

    def grow(chosen: list[int], start: int) -> list[int] | None:
        if len(chosen) == n:
            return chosen
        for j in range(start, m):
            budget[0] -= 1
            if budget[0] < 0:
                return None
            if all(ok(i, j) for i in chosen):
                res = grow(chosen + [j], j + 1)
                if res is not None:
                    return res
        return None

    res = grow([], 0)
    return None if res is None else [cands[i] for i in res]


# -- ping-pong --------------------------------------------------------------

@dataclass
class PingPongTable:
    A: HalfSpace
    aA_star: HalfSpace
    B: HalfSpace
    bB_star: HalfSpace
    a: object
    b: object
    quadruple: list[HalfSpace] | None = None


@dataclass
class FreeReport:
    free: bool
    words_checked: int
    max_length: int
    table: dict
    counterexample: str | None = None


def _check_table(preset, A, aA_star, B, bB_star, a, b) -> list[str]:
    problems = []
    if a == b:
        problems.append("a and b coincide")
    if preset.is_identity(a) or preset.is_identity(b):
        problems.append("identity used as a table element")
    if preset.act(a, A.complement) != aA_star:
        problems.append("aA* is not the image of A* under a")
    if preset.act(b, B.complement) != bB_star:
        problems.append("bB* is not the image of B* under b")
    four = [A, aA_star, B, bB_star]
    if len({h.wall for h in four}) < 4:
        problems.append("table half-spaces are not on four distinct walls")
    else:
        for i in range(4):
            for j in range(i + 1, 4):
                if not preset.facing(four[i], four[j]):
                    problems.append(f"table entries {i} and {j} are not facing")
    return problems


def ping_pong_verify(
    preset: GroupPreset,
    A: HalfSpace,
    aA_star: HalfSpace,
    B: HalfSpace,
    bB_star: HalfSpace,
    a,
    b,
    max_length: int = 8,
) -> FreeReport:
    """Check the table premises, then every reduced word of length <= L in a, b."""
    problems = _check_table(preset, A, aA_star, B, bB_star, a, b)
    if problems:
        raise TableInvalid("; ".join(problems))
    gens = [a, preset.inv(a), b, preset.inv(b)]
    inverse_of = [1, 0, 3, 2]
    e = preset.identity
    checked = 0
    names = "aAbB"
    counter = None
    stack = [(e, -1, "")]
    while stack:
        g, last, text = stack.pop()
        if len(text) >= max_length:
            continue
        for i, s in enumerate(gens):
            if last >= 0 and i == inverse_of[last]:
                continue
            h = preset.mul(g, s)
            checked += 1
            word = text + names[i]
            # trivial element, or one fixing the basepoint (|h|_o = 0)
            if h == e or preset.length(h) == 0:
                counter = word
                stack = []
                break
            stack.append((h, i, word))
    table = {
        "A": A,
        "aA*": aA_star,
        "B": B,
        "bB*": bB_star,
        "a": preset.format(a),
        "b": preset.format(b),
    }
    return FreeReport(counter is None, checked, max_length, table, counter)


def build_table(
    preset: GroupPreset, radius: int = DEFAULT_RADIUS, generators: Sequence | None = None
) -> PingPongTable | None:
    """Facing quadruple h1..h4, then a with a*h1 inside h2* and b with b*h3 inside h4*."""
    quad = facing_tuple_search(preset, 4, radius)
    if quad is None:
        return None
    h1, h2, h3, h4 = quad
    a = double_skewer_search(preset, h2.complement, h1, radius, generators)
    b = double_skewer_search(preset, h4.complement, h3, radius, generators)
    if a is None or b is None:
        return None
    return PingPongTable(h1, preset.act(a, h1.complement), h3, preset.act(b, h3.complement), a, b, quad)
