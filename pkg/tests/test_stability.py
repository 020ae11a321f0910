import json
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import E1, make_cohort, random_cohort
from oracle import brute_force
from teamstability.ingest import IndividualScoreRecord, build_cohort
from teamstability.network import (
    ActivityAdjacency,
    CooperationCounts,
    UnknownStudentError,
    activity_adjacency,
    cooperation_counts,
    relation_strength,
)
from teamstability.stability import (
    DampingConfig,
    StabilityRow,
    damped_centrality,
    damped_pair_weight,
    final_results,
    format_final_results,
    read_final_results,
    report_dict,
    stability_factor,
    stability_factors,
    write_final_results,
)

DEFAULT = DampingConfig()
seeds = st.integers(0, 2**32 - 1)


def _pair_only_at(qs, m):
    """X and Y team up at the listed activities; U and V fill the rest."""
    return make_cohort([["XY"] if q in qs else ["UV"] for q in range(1, m + 1)])


@pytest.mark.parametrize(
    "qs, expected",
    [
        ({4}, 1.0),
        ({1}, math.exp(-3)),
        ({1, 2, 3, 4}, math.exp(-3) + math.exp(-2) + math.exp(-1) + 1.0),
    ],
)
def test_damped_pair_weight(qs, expected):
    adj = activity_adjacency(_pair_only_at(qs, 4))
    assert damped_pair_weight(adj, DEFAULT, "X", "Y") == pytest.approx(expected, rel=1e-12)


def test_all_four_weight_hand_sum():
    # e^-3 + e^-2 + e^-1 + 1 summed digit by digit
    adj = activity_adjacency(_pair_only_at({1, 2, 3, 4}, 4))
    assert damped_pair_weight(adj, DEFAULT, "X", "Y") == pytest.approx(1.5530017928, abs=1e-10)


def test_f6_damped_centrality(f6):
    adj = activity_adjacency(f6)
    assert damped_pair_weight(adj, DEFAULT, "A", "B") == pytest.approx(1 + E1, rel=1e-12)
    assert damped_pair_weight(adj, DEFAULT, "A", "C") == pytest.approx(E1, rel=1e-12)
    assert damped_pair_weight(adj, DEFAULT, "A", "D") == pytest.approx(1.0, rel=1e-12)
    assert damped_pair_weight(adj, DEFAULT, "A", "E") == 0.0
    assert damped_centrality(adj, DEFAULT, "A") == pytest.approx(2 + 2 * E1, rel=1e-12)


def test_f6_stability_factor(f6):
    s = stability_factor(cooperation_counts(f6), activity_adjacency(f6), DEFAULT, "A")
    assert s == pytest.approx(1.5 + 1.5 * E1, rel=1e-12)
    assert s == pytest.approx(2.051819162, abs=1e-9)


def test_two_students_single_activity():
    c = make_cohort([["PQ"]])
    assert stability_factors(c) == {"P": 1.0, "Q": 1.0}


def test_isolated_student():
    students = ("a", "b", "z")
    counts = CooperationCounts(students, 2, {"a": 1, "b": 1, "z": 0}, {"a": {"b": 1}, "b": {"a": 1}, "z": {}})
    adj = ActivityAdjacency(students, 2, {1: {"a": frozenset("b"), "b": frozenset("a")}, 2: {}})
    assert damped_centrality(adj, DEFAULT, "z") == 0.0
    assert stability_factor(counts, adj, DEFAULT, "z") == 0.0
    assert stability_factor(counts, adj, DEFAULT, "a") == pytest.approx(E1)


def test_errors(f6):
    adj = activity_adjacency(f6)
    with pytest.raises(ValueError):
        damped_pair_weight(adj, DEFAULT, "A", "A")
    with pytest.raises(UnknownStudentError):
        damped_centrality(adj, DEFAULT, "Q")
    with pytest.raises(UnknownStudentError):
        damped_pair_weight(adj, DEFAULT, "A", "Q")
    with pytest.raises(UnknownStudentError):
        stability_factor(cooperation_counts(f6), adj, DEFAULT, "Q")


@pytest.mark.parametrize("delta", [0.0, -0.1, 1.5, float("nan")])
def test_damping_config_bounds(delta):
    with pytest.raises(ValueError):
        DampingConfig(delta)


def test_default_delta():
    assert DampingConfig().delta == pytest.approx(0.36787944117144233, rel=1e-15)


def test_delta_one_collapses_to_counts(f6):
    one = DampingConfig(1.0)
    adj, cc = activity_adjacency(f6), cooperation_counts(f6)
    assert damped_centrality(adj, one, "A") == sum(cc.partners["A"].values())


def _scored_f6():
    base = make_cohort([["ABC", "DEF"], ["ABD", "CEF"]])
    scores = [
        IndividualScoreRecord(t.team_id, s, 80.0 if t.activity_ordinal == 1 else 90.0)
        for t in base.teams
        for s in t.members
    ]
    return build_cohort(list(base.teams), scores, list(base.activities))


def test_final_results_f6():
    rows = final_results(_scored_f6())
    assert [r.student for r in rows] == list("ABCDEF")
    assert all(r.mean_score == 85.0 for r in rows)
    assert rows[0].S == pytest.approx(2.051819162, abs=1e-9)


def test_final_results_mean_and_missing():
    base = make_cohort([["PQ"], ["PQ"]])
    scores = [IndividualScoreRecord("1.1", "P", 86), IndividualScoreRecord("2.1", "P", 89)]
    rows = final_results(build_cohort(list(base.teams), scores, list(base.activities)))
    assert rows[0] == StabilityRow("P", pytest.approx(1 + E1), 87.5)
    assert rows[1].mean_score is None


def test_final_results_format_two_decimal_layout(tmp_path):
    rows = [StabilityRow("1063710323", 2.74, 87.5), StabilityRow("1043710120", 0.54, 76.0), StabilityRow("1043710129", 1.48, 89.333333)]
    text = format_final_results(rows)
    assert text.splitlines() == [
        "StudentNo,S,MeanScore",
        "1063710323,2.74,87.50",
        "1043710120,0.54,76.00",
        "1043710129,1.48,89.33",
    ]
    write_final_results(rows, tmp_path / "fr.csv", precision=None)
    back = read_final_results(tmp_path / "fr.csv")
    assert back == rows


def test_json_report_breakdown():
    rep = report_dict(_scored_f6())
    json.dumps(rep)
    a = rep["results"][0]
    assert a["StudentNo"] == "A"
    pairs = {p["j"]: p for p in a["pairs"]}
    assert set(pairs) == {"B", "C", "D"}
    assert pairs["B"]["c_ij"] == 2 and pairs["B"]["R_ij"] == 1.0
    assert pairs["C"]["W_ij"] == pytest.approx(E1)
    assert sum(p["W_ij"] * p["R_ij"] for p in a["pairs"]) == pytest.approx(a["S"])


# ---------------------------------------------------------------------------
# properties


@given(seeds)
def test_matches_brute_force(seed):
    cohort = random_cohort(random.Random(seed))
    ref = brute_force(cohort)
    cc, adj = cooperation_counts(cohort), activity_adjacency(cohort)
    for i in cohort.students:
        assert math.isclose(damped_centrality(adj, DEFAULT, i), ref["C_damped"][i], rel_tol=1e-12)
        assert math.isclose(stability_factor(cc, adj, DEFAULT, i), ref["S"][i], rel_tol=1e-12)


@given(seeds, st.floats(0.05, 0.999))
def test_bounds_and_zero(seed, delta):
    cohort = random_cohort(random.Random(seed))
    cfg = DampingConfig(delta)
    cc, adj = cooperation_counts(cohort), activity_adjacency(cohort)
    w_max = (1 - delta**cohort.m) / (1 - delta)
    for i in cohort.students:
        s = stability_factor(cc, adj, cfg, i)
        assert s >= 0
        assert (s == 0) == (not cc.partners[i])
        assert s <= (cohort.n - 1) * w_max * (1 + 1e-12)
        for j in cc.partners[i]:
            assert damped_pair_weight(adj, cfg, i, j) <= w_max * (1 + 1e-12)


@given(seeds)
def test_delta_one_reduction(seed):
    cohort = random_cohort(random.Random(seed))
    cc, adj = cooperation_counts(cohort), activity_adjacency(cohort)
    one = DampingConfig(1.0)
    for i in cohort.students:
        expected = sum(cc.c(i, j) * relation_strength(cc, i, j) for j in cc.partners[i])
        assert math.isclose(stability_factor(cc, adj, one, i), expected, rel_tol=1e-12)


@given(seeds, st.data())
def test_recency_dominance(seed, data):
    cohort = random_cohort(random.Random(seed), max_m=5)
    m = cohort.m
    if m < 2:
        return
    a = data.draw(st.integers(1, m - 1))
    b = data.draw(st.integers(a + 1, m))

    def with_late_pair(q):
        teams = [[sorted(t.members) for t in cohort.teams if t.activity_ordinal == k] for k in range(1, m + 1)]
        teams[q - 1].append(["zz1", "zz2"])
        return stability_factors(make_cohort(teams))["zz1"]

    assert with_late_pair(b) > with_late_pair(a)


def _appended(cohort, extra):
    teams = [[sorted(t.members) for t in cohort.teams if t.activity_ordinal == q] for q in range(1, cohort.m + 1)]
    return make_cohort(teams + [extra])


@given(seeds)
def test_absent_activity_scales_weights_by_delta(seed):
    cohort = random_cohort(random.Random(seed))
    i = cohort.students[0]
    others = [s for s in cohort.students if s != i]
    extra = [others] if len(others) >= 2 else [["zz1", "zz2"]]
    later = _appended(cohort, extra)
    adj0, adj1 = activity_adjacency(cohort), activity_adjacency(later)
    for j in others:
        w0 = damped_pair_weight(adj0, DEFAULT, i, j)
        assert math.isclose(damped_pair_weight(adj1, DEFAULT, i, j), DEFAULT.delta * w0, rel_tol=1e-12)


@given(seeds)
def test_absent_activity_scales_stability_by_delta(seed):
    # i and all of i's partners sit the new activity out, so every R_ij is unchanged
    cohort = random_cohort(random.Random(seed))
    i = cohort.students[0]
    partners = set(cooperation_counts(cohort).partners[i])
    bystanders = [s for s in cohort.students if s != i and s not in partners]
    extra = [bystanders] if len(bystanders) >= 2 else [["zz1", "zz2"]]
    before = stability_factors(cohort)
    after = stability_factors(_appended(cohort, extra))
    assert math.isclose(after[i], DEFAULT.delta * before[i], rel_tol=1e-12)
