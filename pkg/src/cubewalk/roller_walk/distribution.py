"""Finitely supported step distributions on a preset group."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from ..group_action import GroupPreset


class InvalidDistribution(ValueError):
    pass


@dataclass(frozen=True)
class StepDistribution:
    preset: GroupPreset
    support: tuple  # normal-form elements
    probs: tuple[float, ...]

    @classmethod
    def from_pairs(cls, preset: GroupPreset, pairs: Sequence[tuple[object, float]], tol: float = 1e-9):
        merged: dict = {}
        order = []
        for g, p in pairs:
            if isinstance(g, str):
                g = preset.parse(g)
            p = float(p)
            if not math.isfinite(p) or p <= 0:
                raise InvalidDistribution(f"probability {p} is not positive")
            if g not in merged:
                order.append(g)
                merged[g] = 0.0
            merged[g] += p
        if not order:
            raise InvalidDistribution("empty support")
        total = sum(merged.values())
        if abs(total - 1.0) > tol:
            raise InvalidDistribution(f"probabilities sum to {total}, not 1")
        return cls(preset, tuple(order), tuple(merged[g] / total for g in order))

    @classmethod
    def uniform(cls, preset: GroupPreset) -> "StepDistribution":
        gens = [preset.letter_element(x) for x in preset.letters()]
        return cls.from_pairs(preset, [(g, 1.0 / len(gens)) for g in gens])

    @classmethod
    def from_config(cls, preset: GroupPreset, spec) -> "StepDistribution":
        """``"uniform"`` or a list of ``[word, probability]`` pairs."""
        if spec is None or spec == "uniform":
            return cls.uniform(preset)
        try:
            pairs = [(str(w), float(p)) for w, p in spec]
        except (TypeError, ValueError) as exc:
            raise InvalidDistribution(f"bad step table: {exc}") from exc
        try:
            return cls.from_pairs(preset, pairs)
        except InvalidDistribution:
            raise
        except ValueError as exc:
            raise InvalidDistribution(str(exc)) from exc

    def to_config(self) -> list:
        return [[self.preset.format(g), p] for g, p in zip(self.support, self.probs)]

    def reflected(self) -> "StepDistribution":
        """The measure gamma -> mu(gamma^-1)."""
        return StepDistribution(self.preset, tuple(self.preset.inv(g) for g in self.support), self.probs)

    def __len__(self) -> int:
        return len(self.support)

    def is_generating(self, radius: int = 6, budget: int = 200_000) -> bool | None:
        """Does the generated semigroup reach every generator and inverse inside B_radius?

        None when the exploration budget runs out before deciding.
        """
        preset = self.preset
        targets = {preset.letter_element(x) for x in preset.letters()}
        seen = set(self.support)
        frontier = list(self.support)
        while frontier:
            if targets <= seen:
                return True
            nxt = []
            for g in frontier:
                for s in self.support:
                    h = preset.mul(g, s)
                    if h not in seen and preset.length(h) <= radius:
                        seen.add(h)
                        nxt.append(h)
                        if len(seen) > budget:
                            return None
            frontier = nxt
        return targets <= seen

    def check_generating(self, radius: int = 6) -> bool | None:
        ok = self.is_generating(radius)
        if ok is not True:
            warnings.warn(
                f"support does not visibly generate the group within radius {radius}", RuntimeWarning
            )
        return ok
