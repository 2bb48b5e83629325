"""Shared vocabulary for group presets acting on lazily realized cube complexes."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence


class UnknownGenerator(ValueError):
    pass


class TooLarge(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class HalfSpace:
    """One side of a canonical wall; ``sign`` is +1 or -1."""

    wall: Hashable
    sign: int

    @property
    def complement(self) -> "HalfSpace":
        return HalfSpace(self.wall, -self.sign)


BALL_BUDGET = 2_000_000

_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?")


class GroupPreset:
    """Common interface.  Elements are hashable normal forms; letters are
    nonzero ints, ``+(i+1)`` for generator ``i`` and ``-(i+1)`` for its inverse.
    """

    names: list[str]
    kind: str = "abstract"

    # subclasses provide: normal_form, mul, inv, length, edge_halfspace,
    # side, act, transverse, relation, strongly_separated, depth, factors

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def identity(self):
        return self.normal_form(())

    def letters(self) -> list[int]:
        out = []
        for i in range(self.rank):
            out += [i + 1, -(i + 1)]
        return out

    def letter_element(self, letter: int):
        return self.normal_form((letter,))

    def mul_letter(self, g, letter: int):
        return self.mul(g, self.letter_element(letter))

    def word(self, letters: Iterable[int]):
        return self.normal_form(tuple(letters))

    def is_identity(self, g) -> bool:
        return self.length(g) == 0

    # -- text -------------------------------------------------------
    def _short_names(self) -> bool:
        return all(len(n) == 1 and n.islower() for n in self.names)

    def parse_letters(self, text: str) -> list[int]:
        text = text.strip()
        if text in ("", "1", "e") and (text != "e" or "e" not in self.names):
            return []
        index = {n: i for i, n in enumerate(self.names)}
        out: list[int] = []
        if self._short_names() and re.fullmatch(r"[A-Za-z]+", text):
            for ch in text:
                i = index.get(ch.lower())
                if i is None:
                    raise UnknownGenerator(ch)
                out.append(i + 1 if ch.islower() else -(i + 1))
            return out
        pos = 0
        for part in re.split(r"[\s*.]+", text):
            if not part:
                continue
            m = _TOKEN.fullmatch(part)
            if not m:
                raise UnknownGenerator(part)
            name, power = m.group(1), int(m.group(2) or 1)
            if name not in index:
                if self._short_names() and name.lower() in index and name.isupper():
                    name, power = name.lower(), -power
                else:
                    raise UnknownGenerator(name)
            letter = index[name] + 1
            out += [letter if power > 0 else -letter] * abs(power)
            pos += 1
        return out

    def parse(self, text: str):
        return self.word(self.parse_letters(text))

    def format_letters(self, letters: Sequence[int]) -> str:
        if not letters:
            return "1"
        if self._short_names():
            return "".join(
                self.names[abs(x) - 1] if x > 0 else self.names[abs(x) - 1].upper() for x in letters
            )
        return " ".join(self.names[abs(x) - 1] + ("" if x > 0 else "^-1") for x in letters)

    # -- generic algorithms -------------------------------------------
    def ball(self, k: int, budget: int = BALL_BUDGET) -> list:
        """Elements of norm <= k in breadth-first order (deterministic)."""
        if k < 0:
            raise ValueError("radius must be nonnegative")
        e = self.identity
        out = [e]
        seen = {e}
        frontier = [e]
        letters = self.letters()
        for r in range(k):
            nxt = []
            for g in frontier:
                for x in letters:
                    h = self.mul_letter(g, x)
                    if h not in seen and self.length(h) == r + 1:
                        seen.add(h)
                        nxt.append(h)
                        if len(seen) > budget:
                            raise TooLarge(f"ball of radius {k} exceeds {budget} elements")
            out += nxt
            frontier = nxt
        return out

    def ball_halfspaces(self, k: int) -> list[HalfSpace]:
        """Far sides (away from the basepoint) of walls dual to edges inside B_k."""
        out = []
        seen = set()
        for g in self.ball(max(k - 1, 0)) if k > 0 else []:
            for x in self.letters():
                h = self.mul_letter(g, x)
                if self.length(h) != self.length(g) + 1:
                    continue
                hs = self.edge_halfspace(g, x)
                if hs.wall not in seen:
                    seen.add(hs.wall)
                    out.append(hs)
        return out

    def unit_halfspaces(self) -> list[HalfSpace]:
        """Far sides of the walls dual to the edges at the basepoint."""
        e = self.identity
        return [self.edge_halfspace(e, x) for x in self.letters()]

    def separating(self, x, y=None) -> list[HalfSpace]:
        """Half-spaces containing ``x`` but not ``y`` (default basepoint), in path order."""
        if y is None:
            y = self.identity
        w = self.mul(self.inv(y), x)
        out = []
        pos = y
        for letter in self.to_letters(w):
            out.append(self.edge_halfspace(pos, letter))
            pos = self.mul_letter(pos, letter)
        return out

    def contains(self, hs: HalfSpace, x) -> bool:
        return self.side(x, hs.wall) == hs.sign

    def facing(self, h: HalfSpace, k: HalfSpace) -> bool:
        """Complements disjoint."""
        from ..pocset import Relation

        return self.relation(h, k) is Relation.UNION_ALL

    def element_key(self, g):
        return (self.length(g), [_letter_key(x) for x in self.to_letters(g)])


def _letter_key(x: int) -> int:
    return 2 * (abs(x) - 1) + (0 if x > 0 else 1)
