"""Direct products of presets acting on the product of their complexes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

from ..median import SeparationCertificate, Verdict
from ..pocset import Relation
from .base import GroupPreset, HalfSpace, UnknownGenerator


@dataclass(frozen=True, order=True)
class ProductWall:
    factor: int
    wall: Hashable


class Product(GroupPreset):
    """Generators are the factors' generators, renamed into one global alphabet."""

    kind = "product"

    def __init__(self, factors: Sequence[GroupPreset], names: Sequence[str] | None = None):
        if not factors:
            raise ValueError("a product needs at least one factor")
        flat: list[GroupPreset] = []
        for f in factors:
            flat.extend(f.factors)
        self._factors = flat
        self.letter_map: list[tuple[int, int]] = []  # global generator -> (factor, local generator)
        for fi, f in enumerate(flat):
            for j in range(f.rank):
                self.letter_map.append((fi, j))
        self.offsets = []
        off = 0
        for f in flat:
            self.offsets.append(off)
            off += f.rank
        if names is None:
            names = _global_names(flat)
        if len(names) != len(self.letter_map):
            raise ValueError("wrong number of generator names")
        self.names = list(names)
        self.label = "x".join(getattr(f, "label", f.kind) for f in flat)

    def to_spec(self) -> dict:
        return {"kind": "product", "factors": [f.to_spec() for f in self._factors]}

    @property
    def factors(self) -> list[GroupPreset]:
        return list(self._factors)

    @property
    def dimension(self) -> int:
        return sum(f.dimension for f in self._factors)

    def local(self, letter: int) -> tuple[int, int]:
        if letter == 0 or abs(letter) > len(self.letter_map):
            raise UnknownGenerator(letter)
        fi, j = self.letter_map[abs(letter) - 1]
        return fi, (j + 1) if letter > 0 else -(j + 1)

    def globalize(self, factor: int, letter: int) -> int:
        g = self.offsets[factor] + abs(letter)
        return g if letter > 0 else -g

    def split(self, letters) -> list[list[int]]:
        parts: list[list[int]] = [[] for _ in self._factors]
        for x in letters:
            fi, y = self.local(x)
            parts[fi].append(y)
        return parts

    def normal_form(self, letters):
        parts = self.split(letters)
        return tuple(f.normal_form(p) for f, p in zip(self._factors, parts))

    def mul(self, g, h):
        return tuple(f.mul(a, b) for f, a, b in zip(self._factors, g, h))

    def mul_letter(self, g, letter):
        fi, y = self.local(letter)
        out = list(g)
        out[fi] = self._factors[fi].mul_letter(g[fi], y)
        return tuple(out)

    def inv(self, g):
        return tuple(f.inv(a) for f, a in zip(self._factors, g))

    def length(self, g) -> int:
        return sum(f.length(a) for f, a in zip(self._factors, g))

    def to_letters(self, g):
        out = []
        for fi, (f, a) in enumerate(zip(self._factors, g)):
            out += [self.globalize(fi, x) for x in f.to_letters(a)]
        return tuple(out)

    def format(self, g) -> str:
        return self.format_letters(self.to_letters(g))

    def _lift(self, fi: int, hs: HalfSpace) -> HalfSpace:
        return HalfSpace(ProductWall(fi, hs.wall), hs.sign)

    def _drop(self, hs: HalfSpace) -> tuple[int, HalfSpace]:
        return hs.wall.factor, HalfSpace(hs.wall.wall, hs.sign)

    def edge_halfspace(self, g, letter):
        fi, y = self.local(letter)
        return self._lift(fi, self._factors[fi].edge_halfspace(g[fi], y))

    def side(self, x, wall: ProductWall) -> int:
        return self._factors[wall.factor].side(x[wall.factor], wall.wall)

    def act(self, gamma, hs):
        fi, h = self._drop(hs)
        return self._lift(fi, self._factors[fi].act(gamma[fi], h))

    def transverse(self, w1, w2) -> bool:
        if isinstance(w1, HalfSpace):
            w1 = w1.wall
        if isinstance(w2, HalfSpace):
            w2 = w2.wall
        if w1.factor != w2.factor:
            return True
        return self._factors[w1.factor].transverse(w1.wall, w2.wall)

    def relation(self, h, k) -> Relation:
        fh, hh = self._drop(h)
        fk, kk = self._drop(k)
        if fh != fk:
            return Relation.TRANSVERSE
        return self._factors[fh].relation(hh, kk)

    def depth(self, x, hs) -> int:
        fi, h = self._drop(hs)
        return self._factors[fi].depth(x[fi], h)

    def strongly_separated(self, h, k, radius=None) -> SeparationCertificate:
        w1 = h.wall if isinstance(h, HalfSpace) else h
        w2 = k.wall if isinstance(k, HalfSpace) else k
        if w1 == w2:
            raise ValueError("strong separation needs two distinct walls")
        if w1.factor != w2.factor:
            return SeparationCertificate(Verdict.NO, None, radius, "walls in different factors cross")
        cert = self._factors[w1.factor].strongly_separated(w1.wall, w2.wall, radius)
        if cert.witness is not None:
            cert = SeparationCertificate(cert.verdict, ProductWall(w1.factor, cert.witness), radius, cert.reason)
        return cert

    def factor_element(self, g, fi: int):
        return g[fi]

    def embed(self, fi: int, a):
        out = [f.identity for f in self._factors]
        out[fi] = a
        return tuple(out)


def _global_names(factors: Sequence[GroupPreset]) -> list[str]:
    total = sum(f.rank for f in factors)
    if total <= 26:
        return [chr(ord("a") + i) for i in range(total)]
    out = []
    for fi, f in enumerate(factors):
        out += [f"{n}{fi}" for n in f.names]
    return out
