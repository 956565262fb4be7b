"""Interval type-2 fuzzy trust inference.

Maps an evidence pair (delay ratio, forwarding rate) to a scalar trust value
through interval membership, product-rule firing, alpha-cut consequents,
center-of-sets type reduction via the EIASC switch-point iteration, and
midpoint defuzzification.  A forwarding rate below the bypass threshold
short-circuits to trust 0.
"""
from __future__ import annotations

from dataclasses import dataclass

from .config import FLCConfig, TRUST_LABELS

_FULL_FIRING = 1.0 - 1e-12


class NoEvidenceError(ValueError):
    """Raised when type reduction is attempted with all-zero grades."""


@dataclass(frozen=True)
class PiecewiseLinearMF:
    """Membership function given as sorted (x, grade) breakpoints.

    Outside the breakpoint span the function continues the edge grade,
    which is 0 unless the set has a shoulder plateau at the domain edge.
    """

    points: tuple

    def __call__(self, x: float) -> float:
        pts = self.points
        if x <= pts[0][0]:
            return pts[0][1]
        if x >= pts[-1][0]:
            return pts[-1][1]
        for (x0, g0), (x1, g1) in zip(pts, pts[1:]):
            if x <= x1:
                return g0 + (g1 - g0) * (x - x0) / (x1 - x0)
        return pts[-1][1]


@dataclass(frozen=True)
class IT2Set:
    name: str
    umf: PiecewiseLinearMF
    lmf: PiecewiseLinearMF

    def membership(self, x: float) -> tuple:
        """Grade interval [lower, upper] at x."""
        lo, hi = self.lmf(x), self.umf(x)
        if lo > hi:
            raise ValueError(f"{self.name}: LMF exceeds UMF at x={x}")
        return lo, hi


@dataclass(frozen=True)
class T1TrustSet:
    """Triangular consequent set with support [a, b] and peak c."""

    name: str
    a: float
    c: float
    b: float

    @property
    def symmetric(self) -> bool:
        return abs((self.c - self.a) - (self.b - self.c)) < 1e-12

    def alpha_cut(self, g: float) -> tuple:
        return self.a + g * (self.c - self.a), self.b - g * (self.b - self.c)

    def membership(self, x: float) -> float:
        if x < self.a or x > self.b:
            return 0.0
        if x < self.c:
            return (x - self.a) / (self.c - self.a) if self.c > self.a else 1.0
        if x > self.c:
            return (self.b - x) / (self.b - self.c) if self.b > self.c else 1.0
        return 1.0


@dataclass(frozen=True)
class TrustRule:
    dfd_label: str
    dfr_label: str
    trust_label: str


# antecedent pairs for the nine inference rules (the bypass rule is separate)
RULE_TABLE = (
    TrustRule("low", "high", "complete_trust"),
    TrustRule("medium", "high", "trust"),
    TrustRule("high", "high", "medium_trust"),
    TrustRule("low", "medium", "medium_trust"),
    TrustRule("medium", "medium", "medium_distrust"),
    TrustRule("high", "medium", "distrust"),
    TrustRule("low", "low", "distrust"),
    TrustRule("medium", "low", "intense_distrust"),
    TrustRule("high", "low", "complete_distrust"),
)


@dataclass
class WeightedEndpointList:
    """Sorted, weighted alpha-cut endpoints ready for type reduction.

    `left` and `right` are lists of (endpoint, lower grade, upper grade),
    each sorted ascending by endpoint; grades in each list are normalized so
    the lower grades sum to 1 and the upper grades sum to 1.
    """

    left: list
    right: list


def fire_rule(dfd_interval: tuple, dfr_interval: tuple) -> tuple:
    """Product t-norm firing interval from the two antecedent intervals."""
    return dfd_interval[0] * dfr_interval[0], dfd_interval[1] * dfr_interval[1]


def consequent_entries(trust_set: T1TrustSet, g_lo: float, g_hi: float) -> list:
    """Alpha-cut output interval(s) for one fired rule.

    Shoulder consequents give one interval cut at the lower firing grade.
    Symmetric consequents split into two intervals cut at the lower and
    upper grades, each carrying half the firing weight, unless the lower
    grade is already 1 (degenerate peak cut).  Entries are (t_left, t_right,
    weight_lo, weight_hi) and are emitted even for zero firing so the
    endpoint count stays input-independent.
    """
    if not trust_set.symmetric:
        tl, tr = trust_set.alpha_cut(g_lo)
        return [(tl, tr, g_lo, g_hi)]
    if g_lo >= _FULL_FIRING:
        return [(trust_set.c, trust_set.c, g_lo, g_hi)]
    cut_lo = trust_set.alpha_cut(g_lo)
    cut_hi = trust_set.alpha_cut(g_hi)
    half = (g_lo / 2.0, g_hi / 2.0)
    return [(cut_lo[0], cut_lo[1], *half), (cut_hi[0], cut_hi[1], *half)]


def build_endpoint_list(entries: list) -> WeightedEndpointList:
    """Sort the cut endpoints and normalize the grades per list."""
    lo_sum = sum(e[2] for e in entries)
    hi_sum = sum(e[3] for e in entries)
    if hi_sum <= 0.0:
        raise NoEvidenceError("all firing grades are zero")
    if lo_sum <= 0.0:
        # input fell in footprint-of-uncertainty-only territory; fall back
        # to the upper grades so the interval degenerates gracefully
        entries = [(tl, tr, ghi, ghi) for tl, tr, _, ghi in entries]
        lo_sum = hi_sum
    left = sorted((tl, glo / lo_sum, ghi / hi_sum) for tl, _, glo, ghi in entries)
    right = sorted((tr, glo / lo_sum, ghi / hi_sum) for _, tr, glo, ghi in entries)
    return WeightedEndpointList(left=left, right=right)


def eiasc_left(points: list) -> float:
    """Minimizing endpoint of the center-of-sets reduction (upper grades
    before the switch point, lower grades after).

    The classic early-termination stop assumes every entry's upper grade
    is at least its lower grade.  Independent normalization of the two
    grade lists can invert individual intervals, so the sweep visits every
    switch point incrementally and keeps the minimum (ties break toward
    the smaller switch point).
    """
    n = len(points)
    if n == 1:
        x, lo, hi = points[0]
        if lo + hi <= 0.0:
            raise NoEvidenceError("all grades are zero")
        return x
    a = sum(x * lo for x, lo, _ in points)
    b = sum(lo for _, lo, _ in points)
    best = None
    for m in range(1, n):
        x, lo, hi = points[m - 1]
        a += x * (hi - lo)
        b += hi - lo
        if b > 0.0:
            y = a / b
            if best is None or y < best:
                best = y
    if best is None:
        raise NoEvidenceError("all grades are zero")
    return best


def eiasc_right(points: list) -> float:
    """Maximizing endpoint of the center-of-sets reduction (lower grades
    before the switch point, upper grades after).  Full incremental sweep
    for the same reason as eiasc_left; ties break toward the smaller
    switch point."""
    n = len(points)
    if n == 1:
        x, lo, hi = points[0]
        if lo + hi <= 0.0:
            raise NoEvidenceError("all grades are zero")
        return x
    a = sum(x * hi for x, _, hi in points)
    b = sum(hi for _, _, hi in points)
    best = None
    for m in range(1, n):
        x, lo, hi = points[m - 1]
        a += x * (lo - hi)
        b += lo - hi
        if b > 0.0:
            y = a / b
            if best is None or y > best:
                best = y
    if best is None:
        raise NoEvidenceError("all grades are zero")
    return best


def type_reduce(endpoints: WeightedEndpointList) -> tuple:
    """Reduce the weighted endpoint lists to the trust interval [T_L, T_R]."""
    t_l = eiasc_left(endpoints.left)
    t_r = eiasc_right(endpoints.right)
    return t_l, t_r


def reference_type_reduce(endpoints: WeightedEndpointList) -> tuple:
    """Exhaustive switch-point search; the independent oracle for EIASC."""
    def quotients(points, prefix_idx, suffix_idx):
        n = len(points)
        values = []
        for m in range(1, n):
            num = sum(points[u][0] * points[u][prefix_idx] for u in range(m))
            num += sum(points[u][0] * points[u][suffix_idx] for u in range(m, n))
            den = sum(points[u][prefix_idx] for u in range(m))
            den += sum(points[u][suffix_idx] for u in range(m, n))
            if den > 0.0:
                values.append(num / den)
        if not values:
            raise NoEvidenceError("all grades are zero")
        return values

    # left end: upper grades before the switch; right end: lower grades first
    return (min(quotients(endpoints.left, 2, 1)),
            max(quotients(endpoints.right, 1, 2)))


class FuzzyTrustEngine:
    """Stateless trust inference pipeline built from one FLC configuration."""

    def __init__(self, flc: FLCConfig | None = None):
        flc = flc if flc is not None else FLCConfig()
        flc.validate()
        self.flc = flc
        self.dfd_sets = {label: _build_it2(label, spec)
                         for label, spec in flc.dfd_sets.items()}
        self.dfr_sets = {label: _build_it2(label, spec)
                         for label, spec in flc.dfr_sets.items()}
        self.trust_sets = {label: T1TrustSet(label, *flc.trust_sets[label])
                           for label in TRUST_LABELS}
        self._check_fou()
        self._cache: dict = {}

    def _check_fou(self) -> None:
        # LMF must stay below UMF everywhere (1e-3 grid)
        for sets in (self.dfd_sets, self.dfr_sets):
            for s in sets.values():
                for i in range(1001):
                    s.membership(i / 1000.0)

    def endpoint_list(self, dfd: float, dfr: float) -> WeightedEndpointList:
        entries = []
        for rule in RULE_TABLE:
            interval_d = self.dfd_sets[rule.dfd_label].membership(dfd)
            interval_r = self.dfr_sets[rule.dfr_label].membership(dfr)
            g_lo, g_hi = fire_rule(interval_d, interval_r)
            entries.extend(consequent_entries(self.trust_sets[rule.trust_label],
                                              g_lo, g_hi))
        return build_endpoint_list(entries)

    def evaluate(self, dfd: float, dfr: float) -> float:
        """Scalar trust in [0,1] for one evidence pair."""
        if not 0.0 <= dfd <= 1.0 or not 0.0 <= dfr <= 1.0:
            raise ValueError("dfd and dfr must lie in [0,1]")
        if dfr < self.flc.dfr_bypass:
            return 0.0
        key = (dfd, dfr)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        t_l, t_r = type_reduce(self.endpoint_list(dfd, dfr))
        trust = 0.5 * (t_l + t_r)
        trust = min(1.0, max(0.0, trust))
        if len(self._cache) < 1 << 16:
            self._cache[key] = trust
        return trust

    def classify_trust(self, value: float) -> str:
        """Label of the consequent set with maximum membership at `value`;
        ties favor the lower-trust set."""
        best_label = TRUST_LABELS[0]
        best_grade = -1.0
        for label in TRUST_LABELS:  # ascending trust order, strict > keeps ties low
            grade = self.trust_sets[label].membership(value)
            if grade > best_grade:
                best_grade = grade
                best_label = label
        return best_label


def _build_it2(label: str, spec: dict) -> IT2Set:
    return IT2Set(name=label,
                  umf=PiecewiseLinearMF(tuple(spec["umf"])),
                  lmf=PiecewiseLinearMF(tuple(spec["lmf"])))
