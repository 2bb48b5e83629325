"""Walk engines.  Each engine takes the drawn support indices for a batch of
runs and produces one track per run for a single irreducible-or-not factor.

A track knows the final position, the norm after every step, and for each
monitored wall the last step at which the path crossed it (0 = never).
Monitored walls are those dual to edges of the ball B_R0 around the
basepoint plus every wall separating the basepoint from the final position.

Three engines: a vectorised tree engine for free groups, a vectorised
lattice engine for free abelian groups, and a per-path generic engine for
any preset (used for RAAGs and as an independent cross-check).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..group_action import FreeAbelian, FreeGroup, GroupPreset, HalfSpace


# -- ball index -------------------------------------------------------------

class BallIndex:
    """Far sides of the walls dual to edges of B_R0, with a wall -> index map."""

    def __init__(self, preset: GroupPreset, radius: int):
        self.radius = radius
        self.halfspaces: list[HalfSpace] = preset.ball_halfspaces(radius) if radius > 0 else []
        self.index = {h.wall: i for i, h in enumerate(self.halfspaces)}

    def __len__(self) -> int:
        return len(self.halfspaces)


# -- tracks -------------------------------------------------------------------

@dataclass
class Track:
    preset: GroupPreset
    final: object
    norms: np.ndarray  # norms[t] after t steps
    ball: BallIndex
    ball_last: np.ndarray  # last crossing per ball wall

    @property
    def n(self) -> int:
        return len(self.norms) - 1

    def final_sign(self, wall) -> int:
        return self.preset.side(self.final, wall)

    def last_crossing(self, wall) -> int | None:
        i = self.ball.index.get(wall)
        if i is not None:
            return int(self.ball_last[i])
        return self._geodesic_last(wall)

    # subclass hooks
    def _geodesic_last(self, wall) -> int | None:
        raise NotImplementedError

    def geodesic_last(self) -> np.ndarray:
        """Last crossing of each wall separating basepoint and final position, in path order."""
        raise NotImplementedError

    def geodesic(self, start: int = 0, stop: int | None = None) -> list[HalfSpace]:
        """Half-spaces containing the final position but not the basepoint, path order."""
        raise NotImplementedError

    def overlap_mask(self) -> np.ndarray:
        """Which geodesic walls are also ball walls."""
        raise NotImplementedError

    def divergence(self, other_final) -> int:
        """Index of the first geodesic half-space not containing ``other_final``."""
        hs = self.geodesic()
        for j, h in enumerate(hs):
            if self.preset.side(other_final, h.wall) != h.sign:
                return j
        return len(hs)


@dataclass
class TreeTrack(Track):
    word: np.ndarray = field(default=None)  # final reduced word
    births: np.ndarray = field(default=None)  # step at which each letter of the final word was pushed

    def _geodesic_last(self, wall) -> int | None:
        r = wall.rep
        s = wall.gen + 1
        # the far endpoint of the dual edge, seen from the basepoint
        far = r if (r and r[-1] == -s) else r + (s,)
        j = len(far)
        if j <= len(self.final) and self.final[:j] == far:
            return int(self.births[j - 1])
        return None

    def geodesic_last(self) -> np.ndarray:
        return self.births

    def geodesic(self, start=0, stop=None):
        stop = len(self.final) if stop is None else min(stop, len(self.final))
        f = self.final
        return [self.preset.edge_halfspace(f[:j], f[j]) for j in range(start, stop)]

    def overlap_mask(self) -> np.ndarray:
        return np.arange(len(self.final)) < self.ball.radius

    def divergence(self, other_final) -> int:
        m = min(len(self.final), len(other_final))
        a = np.asarray(self.final[:m])
        b = np.asarray(other_final[:m])
        diff = np.nonzero(a != b)[0]
        return int(diff[0]) if len(diff) else m


@dataclass
class LatticeTrack(Track):
    coords: tuple = ()
    lo: tuple = ()  # per axis: smallest wall position tracked
    last: tuple = ()  # per axis: last-crossing array indexed by c - lo

    def _axis_range(self, axis: int) -> tuple[int, int]:
        x = self.coords[axis]
        return min(0, x), max(0, x)

    def _geodesic_last(self, wall) -> int | None:
        axis, c = self.preset.wall_position(wall)
        a, b = self._axis_range(axis)
        if not a <= c < b:
            return None
        return int(self.last[axis][c - self.lo[axis]])

    def geodesic_last(self) -> np.ndarray:
        out = []
        for axis, x in enumerate(self.coords):
            a, b = self._axis_range(axis)
            idx = np.arange(a, b) - self.lo[axis]
            vals = self.last[axis][idx]
            out.append(vals if x >= 0 else vals[::-1])
        return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)

    def geodesic(self, start=0, stop=None):
        hs = []
        for axis, x in enumerate(self.coords):
            rng = range(0, x) if x >= 0 else range(-1, x - 1, -1)
            for c in rng:
                hs.append(HalfSpace(self.preset.wall_at(axis, c), 1 if x > 0 else -1))
        return hs[start:stop]

    def overlap_mask(self) -> np.ndarray:
        r = self.ball.radius
        parts = [np.arange(abs(x)) < r for x in self.coords]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=bool)


@dataclass
class GenericTrack(Track):
    crossings: dict = field(default_factory=dict)

    def _geodesic_last(self, wall) -> int | None:
        if self.preset.side(self.final, wall) == self.preset.side(self.preset.identity, wall):
            return None
        return self.crossings.get(wall, 0)

    def geodesic(self, start=0, stop=None):
        return self.preset.separating(self.final)[start:stop]

    def geodesic_last(self) -> np.ndarray:
        return np.array([self.crossings.get(h.wall, 0) for h in self.geodesic()], dtype=np.int64)

    def overlap_mask(self) -> np.ndarray:
        return np.array([h.wall in self.ball.index for h in self.geodesic()], dtype=bool)


# -- engines ------------------------------------------------------------------

def _letter_table(words: Sequence[Sequence[int]]) -> np.ndarray:
    width = max([len(w) for w in words] + [1])
    table = np.zeros((len(words), width), dtype=np.int16)
    for i, w in enumerate(words):
        table[i, : len(w)] = w
    return table


def run_tree(preset: FreeGroup, draws: np.ndarray, words, ball: BallIndex) -> list[TreeTrack]:
    """Vectorised free-group walk: the position is a stack of letters per run."""
    runs, n = draws.shape
    table = _letter_table(words)
    width = table.shape[1]
    cap = n * width + 1
    stack = np.zeros((runs, cap), dtype=np.int16)
    births = np.zeros((runs, cap), dtype=np.int32)
    depth = np.zeros(runs, dtype=np.int64)
    norms = np.zeros((runs, n + 1), dtype=np.int32)
    ar = np.arange(runs)

    k = preset.rank
    base = 2 * k + 1
    r0 = ball.radius
    nb = len(ball)
    ball_last = np.zeros((runs, max(nb, 1)), dtype=np.int32)
    if r0 > 0:
        lut = np.full(base ** r0, -1, dtype=np.int64)
        for i, h in enumerate(ball.halfspaces):
            lut[_tree_code(_far_vertex(h), base)] = i
        pcode = np.zeros((runs, r0 + 1), dtype=np.int64)

    for t in range(1, n + 1):
        step_letters = table[draws[:, t - 1]]
        for col in range(width):
            x = step_letters[:, col].astype(np.int64)
            active = x != 0
            if not active.any():
                continue
            top = stack[ar, np.maximum(depth - 1, 0)]
            cancel = active & (depth > 0) & (top == -x)
            push = active & ~cancel
            if r0 > 0:
                cr = cancel & (depth <= r0)
                if cr.any():
                    rows = ar[cr]
                    ball_last[rows, lut[pcode[rows, depth[cr]]]] = t
                pu = push & (depth < r0)
                if pu.any():
                    rows = ar[pu]
                    d = depth[pu]
                    xx = x[pu]
                    li = 2 * (np.abs(xx) - 1) + (xx < 0) + 1
                    code = pcode[rows, d] * base + li
                    pcode[rows, d + 1] = code
                    ball_last[rows, lut[code]] = t
            depth[cancel] -= 1
            rows = ar[push]
            d = depth[push]
            stack[rows, d] = x[push]
            births[rows, d] = t
            depth[push] += 1
        norms[:, t] = depth

    out = []
    for r in range(runs):
        d = int(depth[r])
        word = stack[r, :d].copy()
        out.append(
            TreeTrack(
                preset,
                tuple(int(v) for v in word),
                norms[r].copy(),
                ball,
                ball_last[r, :nb].copy(),
                word,
                births[r, :d].copy(),
            )
        )
    return out


def _far_vertex(h: HalfSpace) -> tuple:
    r = h.wall.rep
    s = h.wall.gen + 1
    return r + (s,) if h.sign > 0 else r


def _tree_code(word: Sequence[int], base: int) -> int:
    code = 0
    for x in word:
        code = code * base + 2 * (abs(x) - 1) + (1 if x < 0 else 0) + 1
    return code


def run_lattice(preset: FreeAbelian, draws: np.ndarray, words, ball: BallIndex) -> list[LatticeTrack]:
    """Vectorised Z^d walk via cumulative sums of step vectors."""
    runs, n = draws.shape
    d = preset.rank
    vecs = np.array([preset.exponents(preset.normal_form(w)) for w in words], dtype=np.int64).reshape(-1, d)
    r0 = ball.radius
    out = []
    ball_axis = [preset.wall_position(h.wall) for h in ball.halfspaces]
    for r in range(runs):
        steps = vecs[draws[r]]  # (n, d)
        pos = np.zeros((n + 1, d), dtype=np.int64)
        np.cumsum(steps, axis=0, out=pos[1:])
        norms = np.abs(pos).sum(axis=1).astype(np.int32)
        lo_all, last_all = [], []
        for axis in range(d):
            xs = pos[:, axis]
            lo = min(int(xs.min()), -r0)
            hi = max(int(xs.max()), r0)
            last = np.zeros(hi - lo + 1, dtype=np.int64)
            a = np.minimum(xs[:-1], xs[1:])
            cnt = np.abs(xs[1:] - xs[:-1])
            moved = np.nonzero(cnt)[0]
            if len(moved):
                reps = cnt[moved]
                t = np.repeat(moved + 1, reps)
                start = np.repeat(a[moved], reps)
                offs = np.arange(len(t)) - np.repeat(np.cumsum(reps) - reps, reps)
                c = start + offs
                np.maximum.at(last, c - lo, t)
            lo_all.append(lo)
            last_all.append(last)
        ball_last = np.array(
            [last_all[axis][c - lo_all[axis]] for axis, c in ball_axis], dtype=np.int64
        )
        coords = tuple(int(v) for v in pos[-1])
        out.append(
            LatticeTrack(
                preset,
                preset.from_exponents(coords),
                norms,
                ball,
                ball_last,
                coords,
                tuple(lo_all),
                tuple(last_all),
            )
        )
    return out


def run_generic(preset: GroupPreset, draws: np.ndarray, words, ball: BallIndex) -> list[GenericTrack]:
    """Per-path walk through the preset's own group operations."""
    runs, n = draws.shape
    out = []
    for r in range(runs):
        pos = preset.identity
        crossings: dict = {}
        norms = np.zeros(n + 1, dtype=np.int32)
        for t in range(1, n + 1):
            for x in words[draws[r, t - 1]]:
                hs = preset.edge_halfspace(pos, x)
                crossings[hs.wall] = t
                pos = preset.mul_letter(pos, x)
            norms[t] = preset.length(pos)
        ball_last = np.array([crossings.get(h.wall, 0) for h in ball.halfspaces], dtype=np.int64)
        out.append(GenericTrack(preset, pos, norms, ball, ball_last, crossings))
    return out


def pick_engine(preset: GroupPreset, engine: str = "auto"):
    if engine == "generic":
        return run_generic
    if engine not in ("auto", "fast"):
        raise ValueError(f"unknown engine {engine!r}")
    if isinstance(preset, FreeGroup):
        return run_tree
    if isinstance(preset, FreeAbelian):
        return run_lattice
    return run_generic
