"""Exact entropy and logarithmic moment of a finitely supported step law."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .distribution import StepDistribution


@dataclass
class MomentReport:
    entropy: float
    log_moment: float
    n_step_entropies: list[float]  # H(mu^{*n}) for n = 1..max_n
    entropy_rate: float | None  # H(mu^{*n}) - H(mu^{*(n-1)}) at the largest n computed

    def to_dict(self) -> dict:
        return {
            "entropy": self.entropy,
            "log_moment": self.log_moment,
            "n_step_entropies": self.n_step_entropies,
            "entropy_rate": self.entropy_rate,
        }


def _entropy(probs) -> float:
    return -math.fsum(p * math.log(p) for p in probs if p > 0)


def moment_report(mu: StepDistribution, max_n: int = 8, budget: int = 500_000) -> MomentReport:
    """H(mu), sum mu(g) log max(|g|, 1), and convolution entropies up to ``max_n``.

    The convolution stops early when the support of mu^{*n} exceeds ``budget``.
    """
    preset = mu.preset
    h1 = _entropy(mu.probs)
    lm = math.fsum(p * math.log(max(preset.length(g), 1)) for g, p in zip(mu.support, mu.probs))
    dist = {preset.identity: 1.0}
    series: list[float] = []
    for _ in range(max_n):
        nxt: dict = {}
        for g, p in dist.items():
            for s, q in zip(mu.support, mu.probs):
                h = preset.mul(g, s)
                nxt[h] = nxt.get(h, 0.0) + p * q
        dist = nxt
        # sort the atoms so the float sum does not depend on dict order
        series.append(_entropy(sorted(dist.values())))
        if len(dist) > budget:
            break
    rate = None
    if len(series) >= 2:
        rate = series[-1] - series[-2]
    elif series:
        rate = series[0]
    return MomentReport(h1, lm, series, rate)
