"""Regular-point certificates, separation of distinct limits, and strip growth."""
from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..group_action import FreeAbelian, FreeGroup, GroupPreset, HalfSpace, Product, TooLarge
from ..median import Verdict
from ..pocset import Relation
from .walk import WalkRun, default_window

DEFAULT_CHAIN_CAP = 64


class NoChain(RuntimeError):
    def __init__(self, estimate: "BoundaryEstimate"):
        self.estimate = estimate
        super().__init__(f"longest chain found has length {min(estimate.lengths, default=0)}")


class IndistinctEndpoints(ValueError):
    pass


# -- regular certificates ---------------------------------------------------

@dataclass
class FactorCertificate:
    factor: int
    chain: list[HalfSpace]  # nested, consecutive pairs strongly separated, all stabilised
    available: int  # stabilised walls separating the basepoint from the final position

    @property
    def length(self) -> int:
        return len(self.chain)


@dataclass
class BoundaryEstimate:
    run: WalkRun
    window: int
    factors: list[FactorCertificate]

    @property
    def lengths(self) -> list[int]:
        return [f.length for f in self.factors]


def _chain_for_track(track, cut: int, cap: int, scan: int) -> tuple[list[HalfSpace], int]:
    preset = track.preset
    last = track.geodesic_last()
    stable = np.nonzero(last <= cut)[0]
    chain: list[HalfSpace] = []
    examined = 0
    block = 64
    pos = 0
    while pos < len(stable) and len(chain) < cap and examined < scan:
        idx = stable[pos : pos + block]
        pos += block
        lo, hi = int(idx[0]), int(idx[-1]) + 1
        hs_block = track.geodesic(lo, hi)
        for j in idx:
            if len(chain) >= cap or examined >= scan:
                break
            examined += 1
            h = hs_block[int(j) - lo]
            if not chain:
                chain.append(h)
                continue
            prev = chain[-1]
            if preset.relation(h, prev) is not Relation.CONTAINED_IN:
                continue
            if preset.strongly_separated(prev, h).verdict is Verdict.YES:
                chain.append(h)
    return chain, int(len(stable))


def regular_certificate(
    run: WalkRun,
    factor: int | None = None,
    window: int | None = None,
    cap: int = DEFAULT_CHAIN_CAP,
    scan: int | None = None,
    require: int | None = None,
) -> BoundaryEstimate:
    """Greedy descending chain along the final geodesic, per factor.

    Candidates are the stabilised half-spaces containing the final position
    and not the basepoint, in path order.  A candidate joins when it is
    properly inside the previous link and strongly separated from it; for a
    nested chain this makes every pair strongly separated (a wall crossing
    two links crosses each link between them).
    """
    if window is None:
        window = default_window(run.n)
    if scan is None:
        scan = 4 * cap
    cut = run.n - window
    which = range(len(run.tracks)) if factor is None else [factor]
    certs = []
    for f in which:
        chain, available = _chain_for_track(run.tracks[f], cut, cap, scan)
        certs.append(FactorCertificate(f, chain, available))
    est = BoundaryEstimate(run, window, certs)
    if require is not None and any(c.length < require for c in certs):
        raise NoChain(est)
    return est


def verify_chain(preset: GroupPreset, chain: Sequence[HalfSpace]) -> bool:
    """Independent check: strictly nested and every pair strongly separated."""
    for i in range(len(chain)):
        for j in range(i + 1, len(chain)):
            if preset.relation(chain[j], chain[i]) is not Relation.CONTAINED_IN:
                return False
            if preset.strongly_separated(chain[i], chain[j]).verdict is not Verdict.YES:
                return False
    return True


# -- distinct limits ------------------------------------------------------------

@dataclass
class PairSeparation:
    first: int
    second: int
    factor: int
    separated: bool
    h1: HalfSpace | None = None
    h2: HalfSpace | None = None
    reason: str = ""


def distinct_limits(
    runs: Sequence[WalkRun],
    window: int | None = None,
    pairs: Sequence[tuple[int, int]] | None = None,
    scan: int = 16,
) -> list[PairSeparation]:
    """For each pair of runs and factor, look for h1 (stabilised for the first
    run) and h2 (for the second) that are disjoint and strongly separated."""
    if len(runs) < 2:
        raise ValueError("need at least two runs")
    if pairs is None:
        pairs = [(i, i + 1) for i in range(0, len(runs) - 1, 2)]
    out = []
    for i, j in pairs:
        r1, r2 = runs[i], runs[j]
        w = window if window is not None else default_window(min(r1.n, r2.n))
        for f, (t1, t2) in enumerate(zip(r1.tracks, r2.tracks)):
            out.append(_separate_pair(i, j, f, t1, t2, r1.n - w, r2.n - w, scan))
    return out


def _stable_candidates(track, start: int, cut: int, scan: int) -> list[HalfSpace]:
    last = track.geodesic_last()
    stop = min(len(last), start + scan)
    hs = track.geodesic(start, stop)
    return [h for h, t in zip(hs, last[start:stop]) if t <= cut]


def _separate_pair(i, j, f, t1, t2, cut1, cut2, scan) -> PairSeparation:
    preset = t1.preset
    if t1.final == t2.final:
        return PairSeparation(i, j, f, False, reason="identical final positions")
    c1 = _stable_candidates(t1, t1.divergence(t2.final), cut1, scan)
    c2 = _stable_candidates(t2, t2.divergence(t1.final), cut2, scan)
    for a in c1:
        for b in c2:
            if preset.relation(a, b) is not Relation.DISJOINT_FROM:
                continue
            if preset.strongly_separated(a, b).verdict is Verdict.YES:
                return PairSeparation(i, j, f, True, a, b, "disjoint strongly separated pair")
    return PairSeparation(i, j, f, False, reason="no disjoint strongly separated pair among candidates")


# -- strips -----------------------------------------------------------------

def bridge_point(preset: GroupPreset):
    """The basepoint.  In a free factor it is the bridge of the facing, strongly
    separated unit walls of a generator and its inverse."""
    return preset.identity


def _hist(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    if len(values) == 0:
        return np.zeros(1, dtype=np.int64)
    return np.bincount(values).astype(np.int64)


def _tree_hist(preset: FreeGroup, y1, y2, o) -> np.ndarray:
    m = min(len(y1), len(y2))
    c = 0
    while c < m and y1[c] == y2[c]:
        c += 1
    if not o:
        norms = list(range(c, len(y1) + 1)) + list(range(c + 1, len(y2) + 1))
    else:
        oi = preset.inv(o)
        verts = [y1[:j] for j in range(c, len(y1) + 1)] + [y2[:j] for j in range(c + 1, len(y2) + 1)]
        norms = [preset.length(preset.mul(v, oi)) for v in verts]
    return _hist(norms)


def _lattice_hist(preset: FreeAbelian, y1, y2, o) -> np.ndarray:
    e1, e2, eo = preset.exponents(y1), preset.exponents(y2), preset.exponents(o)
    total = np.ones(1, dtype=np.int64)
    for a, b, c in zip(e1, e2, eo):
        lo, hi = min(a, b), max(a, b)
        total = np.convolve(total, _hist([abs(v - c) for v in range(lo, hi + 1)]))
    return total


def _generic_hist(preset: GroupPreset, y1, y2, o, budget: int = 200_000) -> np.ndarray:
    """Breadth-first enumeration of the interval I(y1, y2)."""
    seen = {y1}
    q = deque([y1])
    while q:
        v = q.popleft()
        dv = preset.length(preset.mul(preset.inv(v), y2))
        for x in preset.letters():
            w = preset.mul_letter(v, x)
            if w in seen:
                continue
            if preset.length(preset.mul(preset.inv(w), y2)) == dv - 1:
                seen.add(w)
                q.append(w)
                if len(seen) > budget:
                    raise TooLarge("interval too large to enumerate")
    oi = preset.inv(o)
    return _hist([preset.length(preset.mul(v, oi)) for v in seen])


def strip_histogram(preset: GroupPreset, y_minus, y_plus, o_prime=None) -> np.ndarray:
    """hist[r] = number of interval vertices v with |v o'^-1| = r."""
    if o_prime is None:
        o_prime = bridge_point(preset)
    if isinstance(preset, Product):
        total = np.ones(1, dtype=np.int64)
        for f, fac in enumerate(preset.factors):
            total = np.convolve(total, strip_histogram(fac, y_minus[f], y_plus[f], o_prime[f]))
        return total
    if y_minus == y_plus:
        raise IndistinctEndpoints("endpoints coincide")
    if isinstance(preset, FreeGroup):
        return _tree_hist(preset, y_minus, y_plus, o_prime)
    if isinstance(preset, FreeAbelian):
        return _lattice_hist(preset, y_minus, y_plus, o_prime)
    return _generic_hist(preset, y_minus, y_plus, o_prime)


def _endpoint(x):
    return x.final if isinstance(x, WalkRun) else x


def strip_count(preset: GroupPreset, b_minus, b_plus, o_prime=None, k: int = 0) -> int:
    """#{gamma in B_k : gamma o' in I(b-, b+)}, endpoints given by final positions."""
    hist = strip_histogram(preset, _endpoint(b_minus), _endpoint(b_plus), o_prime)
    if k < 0:
        return 0
    return int(hist[: k + 1].sum())


@dataclass
class StripSeries:
    schedule: list[int]
    values: np.ndarray  # (pairs, len(schedule)); NaN where the count is zero
    median: list[float]
    mean: list[float]
    skipped: int = 0
    caveat: str | None = None

    def to_rows(self) -> list[dict]:
        return [
            {"n": n, "median": m, "mean": a}
            for n, m, a in zip(self.schedule, self.median, self.mean)
        ]


def default_schedule(n: int, points: int = 40) -> list[int]:
    if n <= 0:
        return []
    grid = np.unique(np.round(np.geomspace(1, n, points)).astype(int))
    return [int(v) for v in grid if v >= 1]


def strip_growth_check(
    preset: GroupPreset,
    forward: Sequence[WalkRun],
    backward: Sequence[WalkRun],
    schedule: Sequence[int] | None = None,
    o_prime=None,
) -> StripSeries:
    """(1/n) log strip_count at radius |w'_n| for each forward/backward pair.

    The backward runs should use the reflected measure.  Endpoints are the
    final positions of the full-length runs.
    """
    pairs = min(len(forward), len(backward))
    n = forward[0].n if forward else 0
    schedule = list(schedule) if schedule is not None else default_schedule(n)
    vals = np.full((pairs, len(schedule)), np.nan)
    skipped = 0
    for i in range(pairs):
        f, b = forward[i], backward[i]
        try:
            hist = strip_histogram(preset, b.final, f.final, o_prime)
        except IndistinctEndpoints:
            skipped += 1
            continue
        cum = np.cumsum(hist)
        for j, s in enumerate(schedule):
            k = int(f.norms[s])
            c = int(cum[min(k, len(cum) - 1)])
            if c > 0:
                vals[i, j] = math.log(c) / s
    with warnings.catch_warnings():
        # all-NaN columns (no defined count yet) are expected at small n
        warnings.simplefilter("ignore", RuntimeWarning)
        med = np.nanmedian(vals, axis=0) if pairs else np.full(len(schedule), np.nan)
        mean = np.nanmean(vals, axis=0) if pairs else np.full(len(schedule), np.nan)
    caveat = None
    factors = preset.factors if isinstance(preset, Product) else [preset]
    if any(getattr(fac, "is_abelian", False) for fac in factors):
        caveat = "Euclidean factor present: control run, no linear drift"
    return StripSeries(
        schedule,
        vals,
        [None if math.isnan(v) else float(v) for v in med],
        [None if math.isnan(v) else float(v) for v in mean],
        skipped,
        caveat,
    )
