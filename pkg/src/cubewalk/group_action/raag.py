"""Right-angled Artin groups acting on the universal covers of their Salvetti
complexes.  Free groups (edgeless graph) and free abelian groups (complete
graph) are specialisations with faster normal forms; the generic engine
answers the same questions and the tests compare the two.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from ..median import SeparationCertificate, Verdict
from ..pocset import Relation
from .base import GroupPreset, HalfSpace, UnknownGenerator, _letter_key

Word = tuple[int, ...]


@dataclass(frozen=True, order=True)
class RaagWall:
    """Hyperplane dual to the edge (rep, rep*s); ``rep`` is the shortest
    element of the coset rep<lk(s)>.  The + side contains rep*s."""

    gen: int
    rep: Word


class RAAG(GroupPreset):
    kind = "raag"

    def __init__(self, names: Sequence[str], edges: Iterable[tuple[str, str]] = (), label: str | None = None):
        self.names = list(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")
        index = {n: i for i, n in enumerate(self.names)}
        adj: list[set[int]] = [set() for _ in self.names]
        self.edges = []
        for a, b in edges:
            if a not in index or b not in index:
                raise UnknownGenerator(a if a not in index else b)
            if a == b:
                raise ValueError("graph loops are not allowed")
            i, j = index[a], index[b]
            if j not in adj[i]:
                adj[i].add(j)
                adj[j].add(i)
                self.edges.append(tuple(sorted((a, b), key=index.get)))
        self.adj = [frozenset(s) for s in adj]
        self.label = label or f"raag({','.join(self.names)})"

    # -- presets as specs ------------------------------------------------
    def to_spec(self) -> dict:
        return {"kind": "raag", "graph": {"vertices": self.names, "edges": [list(e) for e in self.edges]}}

    @property
    def factors(self) -> list["RAAG"]:
        return [self]

    @property
    def dimension(self) -> int:
        best = 1 if self.names else 0
        n = self.rank
        if n > 16:
            return max(1, max((len(a) + 1 for a in self.adj), default=1))
        for size in range(2, n + 1):
            found = any(
                all(b in self.adj[a] for a, b in combinations(c, 2)) for c in combinations(range(n), size)
            )
            if not found:
                break
            best = size
        return best

    @property
    def is_abelian(self) -> bool:
        return all(len(a) == self.rank - 1 for a in self.adj)

    # -- words -----------------------------------------------------------
    def _check(self, x: int) -> None:
        if not isinstance(x, int) or x == 0 or abs(x) > self.rank:
            raise UnknownGenerator(x)

    def _commutes(self, g: int, h: int) -> bool:
        return h in self.adj[g]

    def _append(self, out: list[int], x: int) -> None:
        """Append a letter to a reduced word, cancelling if possible."""
        g = abs(x) - 1
        adj = self.adj[g]
        j = len(out) - 1
        while j >= 0:
            y = out[j]
            h = abs(y) - 1
            if h == g:
                if y == -x:
                    del out[j]
                    return
                break
            if h not in adj:
                break
            j -= 1
        out.append(x)

    def _shortlex(self, word: Sequence[int]) -> Word:
        """Lexicographically least rearrangement of a reduced word by commutations."""
        n = len(word)
        if n < 2:
            return tuple(word)
        gens = [abs(x) - 1 for x in word]
        succ: list[list[int]] = [[] for _ in range(n)]
        indeg = [0] * n
        for j in range(n):
            gj = gens[j]
            adj = self.adj[gj]
            for i in range(j):
                if gens[i] == gj or gens[i] not in adj:
                    succ[i].append(j)
                    indeg[j] += 1
        heap = [(_letter_key(word[j]), j) for j in range(n) if indeg[j] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            _, i = heapq.heappop(heap)
            out.append(word[i])
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(heap, (_letter_key(word[j]), j))
        return tuple(out)

    def normal_form(self, letters: Iterable[int]) -> Word:
        out: list[int] = []
        for x in letters:
            self._check(x)
            self._append(out, x)
        return self._shortlex(out)

    def mul(self, g: Word, h: Word) -> Word:
        out = list(g)
        for x in h:
            self._append(out, x)
        return self._shortlex(out)

    def mul_letter(self, g: Word, letter: int) -> Word:
        """Right multiplication of a normal form by one letter.

        Without cancellation the new letter is inserted at the first slot
        after its last non-commuting letter where it beats the next letter
        in shortlex order, which keeps the word in normal form.
        """
        self._check(letter)
        gx = abs(letter) - 1
        adj = self.adj[gx]
        j = len(g) - 1
        while j >= 0:
            y = g[j]
            h = abs(y) - 1
            if h == gx:
                if y == -letter:
                    return self._shortlex(g[:j] + g[j + 1 :])
                break
            if h not in adj:
                break
            j -= 1
        key = _letter_key(letter)
        p = j + 1
        while p < len(g) and _letter_key(g[p]) < key:
            p += 1
        return g[:p] + (letter,) + g[p:]

    def inv(self, g: Word) -> Word:
        return self._shortlex([-x for x in reversed(g)])

    def length(self, g: Word) -> int:
        return len(g)

    def to_letters(self, g: Word) -> Word:
        return g

    def format(self, g: Word) -> str:
        return self.format_letters(g)

    # -- parabolic pieces --------------------------------------------------
    def _split_left(self, word: Sequence[int], allowed: frozenset[int]) -> tuple[list[int], list[int]]:
        """Split a reduced word as (maximal left divisor in <allowed>, rest)."""
        prefix: list[int] = []
        rest: list[int] = []
        blocked: set[int] = set()  # generators that fail to commute with something in rest
        for x in word:
            g = abs(x) - 1
            if g in allowed and g not in blocked:
                prefix.append(x)
            else:
                rest.append(x)
                blocked.add(g)
                blocked.update(h for h in range(self.rank) if h not in self.adj[g])
        return prefix, rest

    def _split_right(self, word: Sequence[int], allowed: frozenset[int]) -> tuple[list[int], list[int]]:
        """Split a reduced word as (rest, maximal right divisor in <allowed>)."""
        p, r = self._split_left(list(reversed(word)), allowed)
        return list(reversed(r)), list(reversed(p))

    def coset_rep(self, g: Word, gen: int) -> Word:
        """Shortest element of g<lk(gen)>."""
        if not self.adj[gen]:
            return g
        # dropping a right divisor keeps a normal form normal
        rest, _ = self._split_right(g, self.adj[gen])
        return tuple(rest)

    def in_double_coset(self, m: Word, left: frozenset[int], right: frozenset[int]) -> bool:
        """Is m in <left><right>?"""
        word = list(m)
        while word:
            _, word2 = self._split_left(word, left)
            word2, _ = self._split_right(word2, right)
            if len(word2) == len(word):
                return False
            word = word2
        return True

    # -- walls ---------------------------------------------------------------
    def edge_halfspace(self, g: Word, letter: int) -> HalfSpace:
        """The side of the wall dual to edge (g, g*letter) that contains g*letter."""
        s = abs(letter) - 1
        if letter > 0:
            return HalfSpace(RaagWall(s, self.coset_rep(g, s)), 1)
        return HalfSpace(RaagWall(s, self.coset_rep(self.mul_letter(g, letter), s)), -1)

    def side(self, x: Word, wall: RaagWall) -> int:
        y = self.mul(self.inv(wall.rep), x)
        s = wall.gen
        adj = self.adj[s]
        # + iff s is a left divisor of y
        for z in y:
            if z == s + 1:
                return 1
            h = abs(z) - 1
            if h == s or h not in adj:
                return -1
        return -1

    def act(self, gamma: Word, hs: HalfSpace) -> HalfSpace:
        w = hs.wall
        return HalfSpace(RaagWall(w.gen, self.coset_rep(self.mul(gamma, w.rep), w.gen)), hs.sign)

    def transverse(self, w1: RaagWall, w2: RaagWall) -> bool:
        if isinstance(w1, HalfSpace):
            w1 = w1.wall
        if isinstance(w2, HalfSpace):
            w2 = w2.wall
        s, t = w1.gen, w2.gen
        if s == t or t not in self.adj[s]:
            return False
        m = self.mul(self.inv(w1.rep), w2.rep)
        return self.in_double_coset(m, self.adj[s], self.adj[t])

    def relation(self, h: HalfSpace, k: HalfSpace) -> Relation:
        if h.wall == k.wall:
            return Relation.EQUAL if h.sign == k.sign else Relation.DISJOINT_FROM
        if self.transverse(h.wall, k.wall):
            return Relation.TRANSVERSE
        a = self.side(h.wall.rep, k.wall)  # side of h's wall, as seen from k's wall
        b = self.side(k.wall.rep, h.wall)
        sigma, tau = h.sign, k.sign
        if sigma == -b:
            return Relation.CONTAINED_IN if tau == a else Relation.DISJOINT_FROM
        return Relation.CONTAINS if tau == -a else Relation.UNION_ALL

    def _carrier_base(self, wall: RaagWall, sign: int) -> Word:
        """Base point of the carrier face on the given side: the coset base*<lk(s)>."""
        if sign > 0:
            return self.mul_letter(wall.rep, wall.gen + 1)
        return wall.rep

    def _project(self, y: Word, base: Word, allowed: frozenset[int]) -> Word:
        z = self.mul(self.inv(base), y)
        pre, _ = self._split_left(z, allowed)
        return self.mul(base, self._shortlex(pre))

    def depth(self, x: Word, hs: HalfSpace) -> int:
        """Number of half-spaces l with x in l and l inside hs (0 when x is outside)."""
        if self.side(x, hs.wall) != hs.sign:
            return 0
        base = self._carrier_base(hs.wall, hs.sign)
        z = self.mul(self.inv(base), x)
        _, rest = self._split_left(z, self.adj[hs.wall.gen])
        return len(rest) + 1

    def strongly_separated(self, h, k, radius: int | None = None) -> SeparationCertificate:
        """Exact test: compute a closest pair between the facing carrier faces
        and look for a wall at that vertex crossing both hyperplanes."""
        w1 = h.wall if isinstance(h, HalfSpace) else h
        w2 = k.wall if isinstance(k, HalfSpace) else k
        if w1 == w2:
            raise ValueError("strong separation needs two distinct walls")
        if self.transverse(w1, w2):
            return SeparationCertificate(Verdict.NO, None, radius, "the half-spaces are transverse")
        s, t = w1.gen, w2.gen
        common = self.adj[s] & self.adj[t]
        if not common:
            return SeparationCertificate(Verdict.YES, None, radius, "no generator commutes with both labels")
        b = self.side(w2.rep, w1)
        a = self.side(w1.rep, w2)
        base1 = self._carrier_base(w1, b)
        base2 = self._carrier_base(w2, a)
        y2 = self._project(base1, base2, self.adj[t])
        x1 = self._project(y2, base1, self.adj[s])
        for u in sorted(common):
            for letter in (u + 1, -(u + 1)):
                cand = self.edge_halfspace(x1, letter).wall
                if self.transverse(cand, w2) and self.transverse(cand, w1):
                    return SeparationCertificate(Verdict.NO, cand, radius, "wall transverse to both")
        return SeparationCertificate(Verdict.YES, None, radius, "gate scan")


class FreeGroup(RAAG):
    kind = "free"

    def __init__(self, rank: int, names: Sequence[str] | None = None):
        names = list(names) if names else _default_names(rank)
        super().__init__(names, (), label=f"f{rank}")

    def to_spec(self) -> dict:
        return {"kind": "free", "rank": self.rank, "names": self.names}

    def _shortlex(self, word):
        return tuple(word)

    def _append(self, out, x):
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)

    def coset_rep(self, g, gen):
        return g

    def transverse(self, w1, w2) -> bool:
        return False

    def side(self, x: Word, wall: RaagWall) -> int:
        r = wall.rep
        if r and r[-1] == -(wall.gen + 1):
            # edge points back toward the basepoint: - side is the subtree below r
            return -1 if x[: len(r)] == r else 1
        far = r + (wall.gen + 1,)
        return 1 if x[: len(far)] == far else -1

    def strongly_separated(self, h, k, radius=None) -> SeparationCertificate:
        w1 = h.wall if isinstance(h, HalfSpace) else h
        w2 = k.wall if isinstance(k, HalfSpace) else k
        if w1 == w2:
            raise ValueError("strong separation needs two distinct walls")
        return SeparationCertificate(Verdict.YES, None, radius, "tree walls never cross")


class FreeAbelian(RAAG):
    kind = "abelian"

    def __init__(self, rank: int, names: Sequence[str] | None = None):
        names = list(names) if names else _default_names(rank)
        super().__init__(names, list(combinations(names, 2)), label=f"z{rank}")

    def to_spec(self) -> dict:
        return {"kind": "abelian", "rank": self.rank, "names": self.names}

    def exponents(self, g: Word) -> list[int]:
        e = [0] * self.rank
        for x in g:
            e[abs(x) - 1] += 1 if x > 0 else -1
        return e

    def from_exponents(self, e: Sequence[int]) -> Word:
        out = []
        for i, c in enumerate(e):
            out += [i + 1 if c > 0 else -(i + 1)] * abs(c)
        return tuple(out)

    def normal_form(self, letters):
        letters = tuple(letters)
        for x in letters:
            self._check(x)
        return self.from_exponents(self.exponents(letters))

    def mul(self, g, h):
        return self.from_exponents([a + b for a, b in zip(self.exponents(g), self.exponents(h))])

    def mul_letter(self, g, letter):
        self._check(letter)
        return self.mul(g, (letter,))

    def inv(self, g):
        return self.from_exponents([-a for a in self.exponents(g)])

    def coset_rep(self, g, gen):
        e = self.exponents(g)
        return self.from_exponents([c if i == gen else 0 for i, c in enumerate(e)])

    def side(self, x, wall):
        c = self.exponents(wall.rep)[wall.gen]
        return 1 if self.exponents(x)[wall.gen] > c else -1

    def transverse(self, w1, w2) -> bool:
        if isinstance(w1, HalfSpace):
            w1 = w1.wall
        if isinstance(w2, HalfSpace):
            w2 = w2.wall
        return w1.gen != w2.gen

    def wall_position(self, wall: RaagWall) -> tuple[int, int]:
        """(axis, c): the wall separates coordinate c from c + 1 on that axis."""
        return wall.gen, self.exponents(wall.rep)[wall.gen]

    def wall_at(self, axis: int, c: int) -> RaagWall:
        return RaagWall(axis, self.from_exponents([c if i == axis else 0 for i in range(self.rank)]))


def _default_names(rank: int) -> list[str]:
    if rank <= 26:
        return [chr(ord("a") + i) for i in range(rank)]
    return [f"g{i}" for i in range(rank)]


def pentagon() -> RAAG:
    names = list("abcde")
    return RAAG(names, [(names[i], names[(i + 1) % 5]) for i in range(5)], label="pentagon")
