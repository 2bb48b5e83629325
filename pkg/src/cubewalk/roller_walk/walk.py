"""Sampling walks, stabilisation of wall signs, hitting frequencies and drift."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from ..group_action import GroupPreset, HalfSpace, Product, ProductWall
from .distribution import InvalidDistribution, StepDistribution
from .engines import BallIndex, Track, pick_engine

DEFAULT_MONITOR_RADIUS = 4
FORWARD, REFLECTED = 0, 1


class WindowTooLarge(ValueError):
    pass


class NoStabilizedRuns(RuntimeError):
    pass


class NotMonitored(KeyError):
    pass


@dataclass
class WalkRun:
    seed: int
    index: int
    stream: int
    n: int
    tracks: list[Track]  # one per factor
    norms: np.ndarray  # |w'_t|_o for t = 0..n

    @property
    def final(self):
        if len(self.tracks) == 1:
            return self.tracks[0].final
        return tuple(t.final for t in self.tracks)

    @property
    def final_norm(self) -> int:
        return int(self.norms[-1])


def run_rng(seed: int, index: int, stream: int = FORWARD) -> np.random.Generator:
    """Counter-based Philox stream keyed by (seed, stream, run index)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, index])))


def draw_steps(mu: StepDistribution, n: int, count: int, seed: int, stream: int = FORWARD, start: int = 0):
    probs = np.asarray(mu.probs, dtype=float)
    probs = probs / probs.sum()
    out = np.zeros((count, n), dtype=np.int64)
    for i in range(count):
        if n:
            out[i] = run_rng(seed, start + i, stream).choice(len(probs), size=n, p=probs)
    return out


def _factor_words(preset: GroupPreset, mu: StepDistribution) -> list[list[list[int]]]:
    """words[f][i]: letters of support element i in factor f (local alphabet)."""
    if isinstance(preset, Product):
        per = [[[] for _ in mu.support] for _ in preset.factors]
        for i, g in enumerate(mu.support):
            for f, a in enumerate(g):
                per[f][i] = list(preset.factors[f].to_letters(a))
        return per
    return [[list(preset.to_letters(g)) for g in mu.support]]


def sample_paths(
    preset: GroupPreset,
    mu: StepDistribution,
    n: int,
    count: int,
    seed: int,
    monitor_radius: int = DEFAULT_MONITOR_RADIUS,
    stream: int = FORWARD,
    engine: str = "auto",
    batch: int = 500,
) -> list[WalkRun]:
    """``count`` independent runs of ``n`` steps; run i uses stream (seed, stream, i)."""
    if mu.preset is not preset and mu.preset.to_spec() != preset.to_spec():
        raise InvalidDistribution("step distribution belongs to another preset")
    if n < 0 or count < 0:
        raise ValueError("steps and paths must be nonnegative")
    factors = preset.factors if isinstance(preset, Product) else [preset]
    words = _factor_words(preset, mu)
    balls = [BallIndex(f, monitor_radius) for f in factors]
    engines = [pick_engine(f, engine) for f in factors]
    runs: list[WalkRun] = []
    for start in range(0, count, batch):
        m = min(batch, count - start)
        draws = draw_steps(mu, n, m, seed, stream, start)
        per_factor = [eng(f, draws, w, b) for eng, f, w, b in zip(engines, factors, words, balls)]
        for j in range(m):
            tracks = [pf[j] for pf in per_factor]
            norms = np.sum([t.norms for t in tracks], axis=0).astype(np.int64)
            runs.append(WalkRun(seed, start + j, stream, n, tracks, norms))
    return runs


# -- stabilisation ------------------------------------------------------------

def default_window(n: int) -> int:
    return min(n, max(1000, n // 10))


@dataclass
class FactorStabilization:
    ball_stable: np.ndarray  # per ball wall
    ball_last: np.ndarray
    geodesic_stable: np.ndarray  # per wall separating basepoint and final position
    in_ball: np.ndarray  # geodesic walls that are also ball walls

    @property
    def n_monitored(self) -> int:
        return len(self.ball_stable) + int((~self.in_ball).sum())

    @property
    def n_stable(self) -> int:
        return int(self.ball_stable.sum() + (self.geodesic_stable & ~self.in_ball).sum())


@dataclass
class StabilizationReport:
    window: int
    n: int
    factors: list[FactorStabilization]

    @property
    def n_monitored(self) -> int:
        return sum(f.n_monitored for f in self.factors)

    @property
    def n_stable(self) -> int:
        return sum(f.n_stable for f in self.factors)

    @property
    def ball_all_stable(self) -> bool:
        return all(bool(f.ball_stable.all()) for f in self.factors)


def stabilization(run: WalkRun, window: int | None = None) -> StabilizationReport:
    """A wall is stabilised when its sign is constant over the final ``window`` steps.

    Its stabilisation step is its last crossing; anything crossed later
    than n - window is reported unstable.
    """
    n = run.n
    if window is None:
        window = default_window(n)
    if window > n:
        raise WindowTooLarge(f"window {window} exceeds {n} steps")
    if window < 0:
        raise ValueError("window must be nonnegative")
    cut = n - window
    out = []
    for t in run.tracks:
        geo = t.geodesic_last()
        fs = FactorStabilization(t.ball_last <= cut, t.ball_last, geo <= cut, t.overlap_mask())
        out.append(fs)
    rep = StabilizationReport(window, n, out)
    if rep.n_monitored == 0:
        raise ValueError("no monitored walls (monitor radius 0 and the walk ended at the basepoint)")
    return rep


def _locate(run: WalkRun, wall) -> tuple[Track, object]:
    if isinstance(wall, ProductWall):
        return run.tracks[wall.factor], wall.wall
    return run.tracks[0], wall


def wall_status(run: WalkRun, wall, window: int) -> tuple[int, int] | None:
    """(final sign, last crossing) for a monitored wall, else None."""
    track, local = _locate(run, wall)
    last = track.last_crossing(local)
    if last is None:
        return None
    return track.final_sign(local), last


# -- hitting frequencies ------------------------------------------------------

@dataclass
class HittingEstimate:
    halfspace: HalfSpace
    frequency: float
    low: float
    high: float
    hits: int
    stabilized: int
    unstable: int
    unmonitored: int

    def to_dict(self, preset=None) -> dict:
        return {
            "halfspace": describe_halfspace(preset, self.halfspace) if preset else repr(self.halfspace),
            "frequency": self.frequency,
            "wilson_low": self.low,
            "wilson_high": self.high,
            "hits": self.hits,
            "stabilized_runs": self.stabilized,
            "unstable_runs": self.unstable,
            "unmonitored_runs": self.unmonitored,
        }


def wilson_interval(hits: int, total: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = stats.binomtest(hits, total).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def hitting_measure(
    runs: Sequence[WalkRun], h: HalfSpace, window: int | None = None, confidence: float = 0.95
) -> HittingEstimate:
    """Fraction of stabilised runs whose final sign selects h."""
    hits = stable = unstable = unmon = 0
    for run in runs:
        w = window if window is not None else default_window(run.n)
        if w > run.n:
            raise WindowTooLarge(f"window {w} exceeds {run.n} steps")
        st = wall_status(run, h.wall, w)
        if st is None:
            unmon += 1
            continue
        sign, last = st
        if last > run.n - w:
            unstable += 1
            continue
        stable += 1
        hits += sign == h.sign
    if stable == 0:
        raise NoStabilizedRuns(f"no run stabilised on {h}")
    lo, hi = wilson_interval(hits, stable, confidence)
    return HittingEstimate(h, hits / stable, lo, hi, hits, stable, unstable, unmon)


# -- drift ------------------------------------------------------------------

@dataclass
class DriftEstimate:
    estimate: float
    low: float
    high: float
    runs: int
    steps: int

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "ci_low": self.low, "ci_high": self.high, "runs": self.runs, "steps": self.steps}


def drift(runs: Sequence[WalkRun], confidence: float = 0.95) -> DriftEstimate | None:
    """Mean of |w'_n|/n over runs with a Student-t interval."""
    if not runs or runs[0].n == 0:
        return None
    n = runs[0].n
    x = np.array([r.final_norm for r in runs], dtype=float) / n
    m = float(np.mean(x))
    if len(x) < 2:
        return DriftEstimate(m, m, m, len(x), n)
    se = float(np.std(x, ddof=1)) / np.sqrt(len(x))
    q = float(stats.t.ppf(0.5 + confidence / 2, len(x) - 1))
    return DriftEstimate(m, float(m - q * se), float(m + q * se), len(x), n)


def describe_halfspace(preset: GroupPreset, h: HalfSpace) -> str:
    """Readable name: the dual edge (rep, rep*s) and the chosen side."""
    wall = h.wall
    fac = preset
    prefix = ""
    if isinstance(wall, ProductWall):
        fac = preset.factors[wall.factor]
        prefix = f"factor{wall.factor}:"
        wall = wall.wall
    rep = fac.format(wall.rep)
    gen = fac.names[wall.gen]
    return f"{prefix}[{rep}|{gen}]{'+' if h.sign > 0 else '-'}"


@dataclass
class RunSummaryRow:
    seed: int
    run: int
    n: int
    final_norm: int
    stabilized_walls: int
    monitored_walls: int
    chains: list[int] = field(default_factory=list)
