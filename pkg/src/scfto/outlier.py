"""Density-based trust-threshold detection and convergence tracking.

A node's Known trust values are split into core and edge values by neighbor
count, the densest high cluster is grown from the maximum core value, and
its minimum becomes the adaptive trust threshold.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .config import OutlierParams


def neighbor_counts(values: list, t_nbr: float) -> list:
    """For each value (sorted order), the count of *other* values at
    absolute distance strictly below t_nbr."""
    counts = []
    for v in values:
        lo = bisect_right(values, v - t_nbr)
        hi = bisect_left(values, v + t_nbr)
        counts.append(hi - lo - 1)  # exclude the value itself
    return counts


def detect_threshold(values, params: OutlierParams) -> float | None:
    """Adaptive trust threshold from a multiset of Known trust values.

    Returns None on empty input.  Core values (neighbor count strictly above
    core_fraction of the maximum) expand the cluster; edge values join but
    do not expand.  The cluster is seeded at the maximum core value, or at
    the maximum value outright when nothing qualifies as core.
    """
    vals = sorted(values)
    n = len(vals)
    if n == 0:
        return None
    if n == 1:
        return vals[0]
    counts = neighbor_counts(vals, params.t_nbr)
    max_count = max(counts)
    if max_count == 0:
        # every value is isolated; the seed has no neighbors to pull in
        return vals[-1]
    cutoff = params.core_fraction * max_count
    is_core = [c > cutoff for c in counts]
    seed = max(i for i in range(n) if is_core[i])

    # values form a sorted array, so the grown cluster is a contiguous run;
    # only the extreme core values can extend it outward
    left = right = seed
    max_core = min_core = vals[seed]
    while right + 1 < n and vals[right + 1] - max_core < params.t_nbr:
        right += 1
        if is_core[right]:
            max_core = vals[right]
    while left - 1 >= 0 and min_core - vals[left - 1] < params.t_nbr:
        left -= 1
        if is_core[left]:
            min_core = vals[left]
    return vals[left]


@dataclass
class ConvergenceTracker:
    """Latches once the detected threshold stays stable long enough."""

    th_d: float
    n_s: int
    last_t_th: float | None = None
    stable_rounds: int = 0
    converged: bool = False

    def update(self, new_t_th: float | None) -> None:
        """Fold in one round's threshold; None (no detection) skips the
        round without touching the streak."""
        if new_t_th is None:
            return
        if self.last_t_th is not None and abs(new_t_th - self.last_t_th) < self.th_d:
            self.stable_rounds += 1
        else:
            self.stable_rounds = 0
        if self.stable_rounds >= self.n_s:
            self.converged = True  # latched, never reset
        self.last_t_th = new_t_th


def update_convergence(tracker: ConvergenceTracker,
                       new_t_th: float | None) -> ConvergenceTracker:
    tracker.update(new_t_th)
    return tracker
