import contextlib
import math
import os
import random

import hypothesis
import pytest

from teamstability.ingest import Activity, TeamRecord, build_cohort

hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.register_profile("dev", max_examples=50, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))

E1 = math.exp(-1)


def make_cohort(activity_teams, scores=()):
    """activity_teams: list (per activity) of lists of member strings/iterables."""
    teams = []
    for q, groups in enumerate(activity_teams, start=1):
        for t, members in enumerate(groups, start=1):
            teams.append(TeamRecord(f"{q}.{t}", q, frozenset(members)))
    acts = [Activity(q, f"A{q}") for q in range(1, len(activity_teams) + 1)]
    return build_cohort(teams, list(scores), acts)


def random_cohort(rng: random.Random, max_n=12, max_m=4, ids=None):
    """Random valid cohort: each activity seats a random subset in teams of 2..5."""
    n = rng.randint(2, max_n)
    m = rng.randint(1, max_m)
    names = ids or [f"s{k:02d}" for k in range(n)]
    names = names[:n]
    activity_teams = []
    for q in range(m):
        present = [s for s in names if rng.random() < 0.8]
        if q == 0 and len(present) < 2:
            present = list(names)
        rng.shuffle(present)
        groups = []
        while len(present) >= 2:
            size = min(rng.randint(2, 5), len(present))
            if len(present) - size == 1:
                size += 1
            groups.append(present[:size])
            present = present[size:]
        activity_teams.append(groups)
    return make_cohort(activity_teams)


@pytest.fixture
def f6():
    """6 students, 2 activities: {A,B,C},{D,E,F} then {A,B,D},{C,E,F}."""
    return make_cohort([["ABC", "DEF"], ["ABD", "CEF"]])


# ---------------------------------------------------------------------------
# acceptance reporting: one pass/fail line per criterion in the terminal summary

_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    @contextlib.contextmanager
    def record(name):
        notes = []
        try:
            yield notes
        except BaseException as exc:
            _CRITERIA.append((name, False, f"{type(exc).__name__}: {exc}".splitlines()[0]))
            raise
        _CRITERIA.append((name, True, "; ".join(notes)))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
