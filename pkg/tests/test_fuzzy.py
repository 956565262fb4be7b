"""Interval type-2 trust inference: membership, firing, type reduction."""
import random

import pytest

from scfto.fuzzy import (
    FuzzyTrustEngine,
    NoEvidenceError,
    RULE_TABLE,
    T1TrustSet,
    WeightedEndpointList,
    build_endpoint_list,
    consequent_entries,
    fire_rule,
    reference_type_reduce,
    type_reduce,
)


@pytest.fixture(scope="module")
def engine():
    return FuzzyTrustEngine()


# --- membership -----------------------------------------------------------

def test_antecedent_membership_is_an_interval(engine):
    lo, hi = engine.dfr_sets["medium"].membership(0.3)
    assert lo == pytest.approx(0.0)
    assert hi == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_membership_interval_ordering_on_grid(engine):
    for sets in (engine.dfd_sets, engine.dfr_sets):
        for s in sets.values():
            for i in range(101):
                lo, hi = s.membership(i / 100)
                assert 0.0 <= lo <= hi <= 1.0


def test_trust_set_symmetry_classification(engine):
    assert not engine.trust_sets["complete_trust"].symmetric
    assert not engine.trust_sets["complete_distrust"].symmetric
    for label in ("trust", "medium_trust", "medium_distrust",
                  "distrust", "intense_distrust"):
        assert engine.trust_sets[label].symmetric


# --- firing and consequent cuts -------------------------------------------

def test_fire_rule_is_product():
    assert fire_rule((0.5, 0.8), (0.25, 0.5)) == (0.125, 0.4)


def test_symmetric_consequent_half_level_cut():
    ts = T1TrustSet(name="medium_trust", a=0.5, c=2.0 / 3.0, b=5.0 / 6.0)
    entries = consequent_entries(ts, 0.5, 0.5)
    assert len(entries) == 2
    for tl, tr, wlo, whi in entries:
        assert tl == pytest.approx(0.5833, abs=5e-5)
        assert tr == pytest.approx(0.75, abs=1e-12)
        assert (wlo, whi) == (0.25, 0.25)


def test_symmetric_consequent_full_firing_degenerates_to_peak():
    ts = T1TrustSet(name="medium_trust", a=0.5, c=2.0 / 3.0, b=5.0 / 6.0)
    entries = consequent_entries(ts, 1.0, 1.0)
    assert entries == [(ts.c, ts.c, 1.0, 1.0)]


def test_shoulder_consequent_single_entry():
    ts = T1TrustSet(name="complete_trust", a=5.0 / 6.0, c=1.0, b=1.0)
    entries = consequent_entries(ts, 1.0, 1.0)
    assert entries == [(1.0, 1.0, 1.0, 1.0)]


def test_endpoint_count_stays_in_paper_range(engine):
    for i in range(21):
        for j in range(21):
            dfr = j / 20
            if dfr < 0.2:
                continue
            ep = engine.endpoint_list(i / 20, dfr)
            assert 9 <= len(ep.left) <= 16
            assert len(ep.left) == len(ep.right)


def test_normalized_grades_sum_to_one(engine):
    ep = engine.endpoint_list(0.3, 0.6)
    for points in (ep.left, ep.right):
        assert sum(p[1] for p in points) == pytest.approx(1.0, abs=1e-12)
        assert sum(p[2] for p in points) == pytest.approx(1.0, abs=1e-12)


def test_all_zero_grades_rejected():
    with pytest.raises(NoEvidenceError):
        build_endpoint_list([(0.2, 0.4, 0.0, 0.0), (0.6, 0.8, 0.0, 0.0)])


# --- type reduction --------------------------------------------------------

def test_two_point_reduction_by_hand():
    # raw grades; only one switch point exists for l = 2
    points_l = [(0.2, 0.2, 0.9), (0.8, 0.4, 0.6)]
    points_r = [(0.2, 0.2, 0.9), (0.8, 0.4, 0.6)]
    ep = WeightedEndpointList(left=points_l, right=points_r)
    t_l, t_r = type_reduce(ep)
    assert t_l == pytest.approx((0.9 * 0.2 + 0.4 * 0.8) / (0.9 + 0.4), abs=1e-12)
    assert t_r == pytest.approx((0.2 * 0.2 + 0.6 * 0.8) / (0.2 + 0.6), abs=1e-12)


def test_equal_endpoints_reduce_to_that_value():
    pts = [(0.4, 0.1, 0.3)] * 5
    ep = WeightedEndpointList(left=list(pts), right=list(pts))
    t_l, t_r = type_reduce(ep)
    assert t_l == pytest.approx(0.4)
    assert t_r == pytest.approx(0.4)


def test_single_weighted_entry_dominates():
    pts = sorted([(0.7, 0.5, 0.5), (0.1, 0.0, 0.0), (0.9, 0.0, 0.0)])
    ep = WeightedEndpointList(left=pts, right=pts)
    t_l, t_r = type_reduce(ep)
    assert t_l == pytest.approx(0.7)
    assert t_r == pytest.approx(0.7)


def test_reduction_matches_exhaustive_search_on_random_lists():
    rng = random.Random(123)
    for _ in range(300):
        l = rng.randint(9, 16)
        left = sorted((rng.random(), rng.random(), rng.random()) for _ in range(l))
        right = sorted((rng.random(), rng.random(), rng.random()) for _ in range(l))
        ep = WeightedEndpointList(left=left, right=right)
        fast = type_reduce(ep)
        slow = reference_type_reduce(ep)
        assert fast[0] == pytest.approx(slow[0], abs=1e-9)
        assert fast[1] == pytest.approx(slow[1], abs=1e-9)


def test_reduction_interval_is_ordered(engine):
    for i in range(11):
        for j in range(4, 11):
            ep = engine.endpoint_list(i / 10, j / 10)
            t_l, t_r = type_reduce(ep)
            assert t_l <= t_r + 1e-12
            assert -1e-12 <= t_l and t_r <= 1.0 + 1e-12


# --- end-to-end evaluation --------------------------------------------------

def test_low_forwarding_rate_forces_zero_trust(engine):
    for dfd in (0.0, 0.3, 1.0):
        for dfr_milli in range(0, 200, 7):
            assert engine.evaluate(dfd, dfr_milli / 1000) == 0.0


def test_perfect_node_gets_full_trust(engine):
    assert engine.evaluate(0.0, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_worst_admissible_node_lands_in_bottom_band(engine):
    # always delayed, barely above the hard-zero rate: dominated by the
    # lowest consequent (golden value frozen from this implementation)
    v = engine.evaluate(1.0, 0.21)
    assert v <= 1.0 / 6.0
    assert v == pytest.approx(0.037589605734767, abs=1e-12)


def test_evaluation_bounds_on_grid(engine):
    for i in range(21):
        for j in range(21):
            v = engine.evaluate(i / 20, j / 20)
            assert 0.0 <= v <= 1.0


def test_rule_table_covers_all_antecedent_pairs():
    pairs = {(r.dfd_label, r.dfr_label) for r in RULE_TABLE}
    assert pairs == {(d, r) for d in ("low", "medium", "high")
                     for r in ("low", "medium", "high")}


def test_classification_of_bracket_peaks_and_midpoints(engine):
    assert engine.classify_trust(0.0) == "complete_distrust"
    assert engine.classify_trust(0.25) == "distrust"
    assert engine.classify_trust(0.5) == "medium_distrust"
    assert engine.classify_trust(0.75) == "medium_trust"
    assert engine.classify_trust(1.0) == "complete_trust"


def test_classification_exact_tie_breaks_toward_lower_trust(engine):
    # peaks at multiples of 1/6; a crafted exact midpoint between two
    # adjacent peaks has equal membership in both sets
    peak_lo = engine.trust_sets["intense_distrust"].c
    peak_hi = engine.trust_sets["distrust"].c
    mid = (peak_lo + peak_hi) / 2.0
    m_lo = engine.trust_sets["intense_distrust"].membership(mid)
    m_hi = engine.trust_sets["distrust"].membership(mid)
    if m_lo == m_hi:  # guards against floating-point near-ties
        assert engine.classify_trust(mid) == "intense_distrust"


def test_evaluation_is_cached_and_pure(engine):
    a = engine.evaluate(0.37, 0.81)
    b = engine.evaluate(0.37, 0.81)
    assert a == b
