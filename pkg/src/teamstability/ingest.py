"""Roster and score ingestion.

Two delimiter-separated tables feed the analysis:

* the team list, header ``ID,Grade,Class,Course,Score,LeaderNo,Topic``,
  one row per team per course project;
* the score table, header ``TeamID,StudentNo,Score``, one row per
  student per team.

The team list carries no member roster. Membership is reconstructed from
the (TeamID, StudentNo) pairs of the score table, plus the team leader.
Everything is consolidated into an immutable :class:`Cohort`, which can be
written to and read back from a canonical JSON file.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Any

TEAM_LIST_HEADER = ("ID", "Grade", "Class", "Course", "Score", "LeaderNo", "Topic")
SCORES_HEADER = ("TeamID", "StudentNo", "Score")

# Course projects in the order they are taken (four semesters).
DEFAULT_COURSES = ("Data Structure", "Database", "Software Engineering", "Integrated")

TEAM_SIZE_NORM = (3, 5)
SCORE_RANGE = (0.0, 100.0)


class IngestError(ValueError):
    """Base class for every ingestion failure."""


class ParseError(IngestError):
    """A malformed row. ``row`` is the 1-based line number (header is row 1)."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        prefix = f"row {row}: " if row is not None else ""
        super().__init__(prefix + message)


class MappingError(IngestError):
    """A course name that is not in the configured course order."""

    def __init__(self, course: str, row: int | None = None):
        self.course = course
        self.row = row
        where = f" (row {row})" if row is not None else ""
        super().__init__(f"unknown course {course!r}{where}")


class ConsistencyError(IngestError):
    """Records that parse individually but contradict each other."""


class DanglingReferenceError(ConsistencyError):
    """A score record that points at a team that does not exist."""


@dataclass(frozen=True)
class Diagnostic:
    level: str
    message: str
    row: int | None = None

    def __str__(self) -> str:
        where = f"row {self.row}: " if self.row is not None else ""
        return f"{self.level}: {where}{self.message}"


@dataclass(frozen=True, order=True)
class Activity:
    ordinal: int
    label: str = ""

    def __post_init__(self):
        if self.ordinal < 1:
            raise ValueError(f"activity ordinal must be >= 1, got {self.ordinal}")


@dataclass(frozen=True)
class TeamRecord:
    """One team in one activity.

    ``members`` may be empty straight out of :func:`parse_team_list`; the
    roster is filled in by :func:`build_cohort`.
    """

    team_id: str
    activity_ordinal: int
    members: frozenset[str] = frozenset()
    team_score: float | None = None
    topic: str | None = None
    leader: str | None = None
    grade: str | None = None
    class_name: str | None = None

    @property
    def size_warning(self) -> bool:
        lo, hi = TEAM_SIZE_NORM
        return not lo <= len(self.members) <= hi


@dataclass(frozen=True)
class IndividualScoreRecord:
    team_id: str
    student: str
    score: float


@dataclass(frozen=True)
class Cohort:
    students: tuple[str, ...]
    activities: tuple[Activity, ...]
    teams: tuple[TeamRecord, ...]
    scores: tuple[IndividualScoreRecord, ...]

    @property
    def n(self) -> int:
        return len(self.students)

    @property
    def m(self) -> int:
        return len(self.activities)

    @cached_property
    def teams_by_id(self) -> dict[str, TeamRecord]:
        return {t.team_id: t for t in self.teams}

    @cached_property
    def memberships(self) -> dict[int, dict[str, str]]:
        """activity ordinal -> {student: team_id}"""
        out: dict[int, dict[str, str]] = {a.ordinal: {} for a in self.activities}
        for team in self.teams:
            for s in team.members:
                out[team.activity_ordinal][s] = team.team_id
        return out

    def scores_of(self, student: str) -> list[float]:
        return [r.score for r in self.scores if r.student == student]


# ---------------------------------------------------------------------------
# parsing


def _check_header(header: Sequence[str], expected: tuple[str, ...]) -> None:
    got = tuple(h.strip().lstrip("\ufeff") for h in header)
    if got != expected:
        raise ParseError(
            f"bad header {','.join(got)!r}, expected {','.join(expected)!r}", row=1
        )


def _parse_score(text: str, row: int, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{what} {text!r} is not numeric", row=row) from None
    lo, hi = SCORE_RANGE
    if not math.isfinite(value) or not lo <= value <= hi:
        raise ParseError(f"{what} {text!r} outside [{lo:g}, {hi:g}]", row=row)
    return value


def _split_rows(rows: Iterable[Sequence[str]]) -> tuple[Sequence[str] | None, list]:
    it = iter(rows)
    header = next(it, None)
    return header, list(it)


def parse_team_list(
    rows: Iterable[Sequence[str]], course_order: Sequence[str] = DEFAULT_COURSES
) -> tuple[list[TeamRecord], list[Diagnostic]]:
    """Parse team-list rows (header first) into team records.

    Course names are mapped to activity ordinals by their position in
    ``course_order`` (first course is ordinal 1). Soft problems are returned
    as diagnostics; malformed rows raise :class:`ParseError` and unknown
    courses raise :class:`MappingError`.
    """
    header, body = _split_rows(rows)
    if header is None:
        return [], []
    _check_header(header, TEAM_LIST_HEADER)
    ordinals = {name: q for q, name in enumerate(course_order, start=1)}

    teams: list[TeamRecord] = []
    diagnostics: list[Diagnostic] = []
    seen: set[str] = set()
    for rowno, raw in enumerate(body, start=2):
        if not raw or all(not c.strip() for c in raw):
            continue
        if len(raw) != len(TEAM_LIST_HEADER):
            raise ParseError(
                f"expected {len(TEAM_LIST_HEADER)} columns, got {len(raw)}", row=rowno
            )
        team_id, grade, class_name, course, score, leader, topic = (c.strip() for c in raw)
        if not team_id:
            raise ParseError("empty team ID", row=rowno)
        if team_id in seen:
            raise ParseError(f"duplicate team ID {team_id!r}", row=rowno)
        seen.add(team_id)
        if course not in ordinals:
            raise MappingError(course, row=rowno)
        team_score = _parse_score(score, rowno, "team score") if score else None
        if not leader:
            diagnostics.append(Diagnostic("warning", f"team {team_id} has no leader", rowno))
        teams.append(
            TeamRecord(
                team_id=team_id,
                activity_ordinal=ordinals[course],
                team_score=team_score,
                topic=topic or None,
                leader=leader or None,
                grade=grade or None,
                class_name=class_name or None,
            )
        )
    return teams, diagnostics


def parse_scores(rows: Iterable[Sequence[str]]) -> list[IndividualScoreRecord]:
    """Parse score-table rows (header first) into individual score records."""
    header, body = _split_rows(rows)
    if header is None:
        return []
    _check_header(header, SCORES_HEADER)
    records = []
    seen: set[tuple[str, str]] = set()
    for rowno, raw in enumerate(body, start=2):
        if not raw or all(not c.strip() for c in raw):
            continue
        if len(raw) != len(SCORES_HEADER):
            raise ParseError(f"expected 3 columns, got {len(raw)}", row=rowno)
        team_id, student, score = (c.strip() for c in raw)
        if not team_id or not student:
            raise ParseError("empty TeamID or StudentNo", row=rowno)
        if (team_id, student) in seen:
            raise ParseError(f"duplicate score for {student} in team {team_id}", row=rowno)
        seen.add((team_id, student))
        records.append(IndividualScoreRecord(team_id, student, _parse_score(score, rowno, "score")))
    return records


# ---------------------------------------------------------------------------
# consolidation


def build_cohort(
    teams: Sequence[TeamRecord],
    scores: Sequence[IndividualScoreRecord],
    activities: Sequence[Activity],
    diagnostics: list[Diagnostic] | None = None,
) -> Cohort:
    """Consolidate parsed records into a validated :class:`Cohort`.

    A team with an explicit roster keeps it, and every score and leader
    must then belong to it. A team without a roster gets one inferred from
    its score rows and its leader. Teams that end up with no roster at all
    (only a leader, no score rows) are dropped with a warning; this is what
    truncated extracts of a larger database look like.

    Soft findings (team size outside 3..5, dropped teams) are appended to
    ``diagnostics`` when a list is passed.
    """
    if diagnostics is None:
        diagnostics = []

    acts = tuple(sorted(activities))
    if not acts:
        raise ConsistencyError("a cohort needs at least one activity")
    if [a.ordinal for a in acts] != list(range(1, len(acts) + 1)):
        raise ConsistencyError(
            f"activity ordinals must be exactly 1..{len(acts)}, got {[a.ordinal for a in acts]}"
        )

    by_id: dict[str, TeamRecord] = {}
    for team in teams:
        if team.team_id in by_id:
            raise ConsistencyError(f"duplicate team ID {team.team_id!r}")
        if not 1 <= team.activity_ordinal <= len(acts):
            raise ConsistencyError(
                f"team {team.team_id} refers to activity {team.activity_ordinal}, "
                f"cohort has {len(acts)}"
            )
        by_id[team.team_id] = team

    scored: dict[str, set[str]] = {tid: set() for tid in by_id}
    seen_scores: set[tuple[str, str]] = set()
    for rec in scores:
        if rec.team_id not in by_id:
            raise DanglingReferenceError(
                f"score for student {rec.student} refers to unknown team {rec.team_id!r}"
            )
        if (rec.team_id, rec.student) in seen_scores:
            raise ConsistencyError(f"duplicate score for {rec.student} in team {rec.team_id}")
        seen_scores.add((rec.team_id, rec.student))
        scored[rec.team_id].add(rec.student)

    resolved: list[TeamRecord] = []
    for tid, team in by_id.items():
        if team.members:
            members = set(team.members)
            strays = scored[tid] - members
            if strays:
                raise ConsistencyError(
                    f"team {tid}: scored students {sorted(strays)} are not members"
                )
            if team.leader is not None and team.leader not in members:
                raise ConsistencyError(f"team {tid}: leader {team.leader} is not a member")
        else:
            members = set(scored[tid])
            if not members:
                diagnostics.append(
                    Diagnostic("warning", f"team {tid} has no score rows; excluded")
                )
                continue
            if team.leader is not None:
                members.add(team.leader)
        if len(members) < 2:
            raise ConsistencyError(f"team {tid} has fewer than 2 members: {sorted(members)}")
        resolved.append(replace(team, members=frozenset(members)))

    seen: dict[tuple[int, str], str] = {}
    for team in resolved:
        for s in team.members:
            key = (team.activity_ordinal, s)
            if key in seen:
                raise ConsistencyError(
                    f"student {s} is in teams {seen[key]} and {team.team_id} "
                    f"of activity {team.activity_ordinal}"
                )
            seen[key] = team.team_id

    lo, hi = TEAM_SIZE_NORM
    for team in resolved:
        if team.size_warning:
            diagnostics.append(
                Diagnostic(
                    "warning",
                    f"team {team.team_id} has {len(team.members)} members, outside {lo}..{hi}",
                )
            )

    students = tuple(sorted({s for t in resolved for s in t.members}))
    if len(students) < 2:
        raise ConsistencyError(f"a cohort needs at least 2 students, got {len(students)}")

    resolved.sort(key=lambda t: (t.activity_ordinal, t.team_id))
    kept = {t.team_id for t in resolved}
    order = {t.team_id: k for k, t in enumerate(resolved)}
    score_recs = sorted(
        (r for r in scores if r.team_id in kept), key=lambda r: (order[r.team_id], r.student)
    )
    return Cohort(students, acts, tuple(resolved), tuple(score_recs))


# ---------------------------------------------------------------------------
# files


def _read_rows(path: str | Path, delimiter: str) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh, delimiter=delimiter))


def read_team_list(
    path: str | Path, course_order: Sequence[str] = DEFAULT_COURSES, delimiter: str = ","
) -> tuple[list[TeamRecord], list[Diagnostic]]:
    return parse_team_list(_read_rows(path, delimiter), course_order)


def read_scores(path: str | Path, delimiter: str = ",") -> list[IndividualScoreRecord]:
    return parse_scores(_read_rows(path, delimiter))


def ingest_files(
    team_list_path: str | Path,
    scores_path: str | Path,
    course_order: Sequence[str] = DEFAULT_COURSES,
    delimiter: str = ",",
) -> tuple[Cohort, list[Diagnostic]]:
    """Read both tables and build a cohort with one activity per listed course."""
    teams, diagnostics = read_team_list(team_list_path, course_order, delimiter)
    scores = read_scores(scores_path, delimiter)
    activities = [Activity(q, name) for q, name in enumerate(course_order, start=1)]
    cohort = build_cohort(teams, scores, activities, diagnostics)
    return cohort, diagnostics


def _fmt_number(x: float | None) -> str:
    if x is None:
        return ""
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def write_team_list(cohort: Cohort, path: str | Path, delimiter: str = ",") -> None:
    labels = {a.ordinal: a.label for a in cohort.activities}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(TEAM_LIST_HEADER)
        for t in cohort.teams:
            w.writerow(
                [
                    t.team_id,
                    t.grade or "",
                    t.class_name or "",
                    labels[t.activity_ordinal],
                    _fmt_number(t.team_score),
                    t.leader or "",
                    t.topic or "",
                ]
            )


def write_scores(cohort: Cohort, path: str | Path, delimiter: str = ",") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(SCORES_HEADER)
        for r in cohort.scores:
            w.writerow([r.team_id, r.student, _fmt_number(r.score)])


def cohort_to_dict(cohort: Cohort) -> dict[str, Any]:
    return {
        "students": list(cohort.students),
        "activities": [{"ordinal": a.ordinal, "label": a.label} for a in cohort.activities],
        "teams": [
            {
                "team_id": t.team_id,
                "activity_ordinal": t.activity_ordinal,
                "members": sorted(t.members),
                "team_score": t.team_score,
                "topic": t.topic,
                "leader": t.leader,
                "grade": t.grade,
                "class_name": t.class_name,
            }
            for t in cohort.teams
        ],
        "scores": [
            {"team_id": r.team_id, "student": r.student, "score": r.score}
            for r in cohort.scores
        ],
    }


def cohort_from_dict(data: dict[str, Any]) -> Cohort:
    """Rebuild (and re-validate) a cohort from its canonical dict form."""
    try:
        activities = [Activity(int(a["ordinal"]), a.get("label", "")) for a in data["activities"]]
        teams = [
            TeamRecord(
                team_id=str(t["team_id"]),
                activity_ordinal=int(t["activity_ordinal"]),
                members=frozenset(str(s) for s in t["members"]),
                team_score=t.get("team_score"),
                topic=t.get("topic"),
                leader=t.get("leader"),
                grade=t.get("grade"),
                class_name=t.get("class_name"),
            )
            for t in data["teams"]
        ]
        scores = [
            IndividualScoreRecord(str(r["team_id"]), str(r["student"]), float(r["score"]))
            for r in data["scores"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed cohort document: {exc}") from exc
    for t in teams:
        if not t.members:
            raise ConsistencyError(f"team {t.team_id} has an empty member list")
    cohort = build_cohort(teams, scores, activities)
    declared = data.get("students")
    if declared is not None and sorted(map(str, declared)) != list(cohort.students):
        raise ConsistencyError("declared students do not match the team rosters")
    return cohort


def write_cohort(cohort: Cohort, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cohort_to_dict(cohort), indent=2) + "\n", encoding="utf-8")


def read_cohort(path: str | Path) -> Cohort:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    return cohort_from_dict(data)
