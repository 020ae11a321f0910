"""Co-membership network: cooperation counts, relation strength, degree.

Students are nodes; two students are linked in activity ``q`` when they sit
in the same team. Over all activities this gives

* ``c_ij``: number of activities in which i and j share a team,
* ``c_i``: number of activities in which i is in any team,

and the Salton cosine relation strength ``R_ij = c_ij / sqrt(c_i * c_j)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from teamstability.ingest import Cohort


class UnknownStudentError(KeyError):
    pass


def _pair(i: str, j: str) -> tuple[str, str]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class CooperationCounts:
    students: tuple[str, ...]
    m: int
    participation: dict[str, int]
    # symmetric, nonzero entries only: partners[i][j] == partners[j][i] == c_ij
    partners: dict[str, dict[str, int]]

    def c(self, i: str, j: str) -> int:
        self._check(i)
        self._check(j)
        return self.partners[i].get(j, 0)

    @property
    def pair_count(self) -> dict[tuple[str, str], int]:
        """Nonzero c_ij keyed on the sorted pair."""
        return {
            _pair(i, j): c for i, row in self.partners.items() for j, c in row.items() if i < j
        }

    def _check(self, i: str) -> None:
        if i not in self.participation:
            raise UnknownStudentError(i)


@dataclass(frozen=True)
class ActivityAdjacency:
    """Per-activity co-membership: ``r_ij^(q) = 1`` iff i and j share a team in q."""

    students: tuple[str, ...]
    m: int
    # activity ordinal -> student -> teammates in that activity (student excluded)
    teammates: dict[int, dict[str, frozenset[str]]]

    def r(self, i: str, j: str, q: int) -> int:
        if i == j:
            raise ValueError("r_ii is undefined")
        self._check(i)
        self._check(j)
        return int(j in self.teammates[q].get(i, ()))

    def cooperations(self, i: str) -> dict[str, list[int]]:
        """partner -> sorted activity ordinals in which they shared a team with i"""
        self._check(i)
        out: dict[str, list[int]] = {}
        for q in range(1, self.m + 1):
            for j in self.teammates[q].get(i, ()):
                out.setdefault(j, []).append(q)
        return out

    def _check(self, i: str) -> None:
        if i not in self._index:
            raise UnknownStudentError(i)

    @cached_property
    def _index(self) -> frozenset[str]:
        return frozenset(self.students)


def cooperation_counts(cohort: Cohort) -> CooperationCounts:
    participation = {s: 0 for s in cohort.students}
    partners: dict[str, dict[str, int]] = {s: {} for s in cohort.students}
    for team in cohort.teams:
        members = sorted(team.members)
        for a in members:
            participation[a] += 1
            row = partners[a]
            for b in members:
                if b != a:
                    row[b] = row.get(b, 0) + 1
    return CooperationCounts(cohort.students, cohort.m, participation, partners)


def activity_adjacency(cohort: Cohort) -> ActivityAdjacency:
    teammates: dict[int, dict[str, frozenset[str]]] = {a.ordinal: {} for a in cohort.activities}
    for team in cohort.teams:
        for s in team.members:
            teammates[team.activity_ordinal][s] = team.members - {s}
    return ActivityAdjacency(cohort.students, cohort.m, teammates)


def relation_strength(counts: CooperationCounts, i: str, j: str) -> float:
    """Salton cosine ``c_ij / sqrt(c_i c_j)``; 0 when either student never took part."""
    if i == j:
        raise ValueError(f"relation strength needs two distinct students, got {i!r} twice")
    cij = counts.c(i, j)
    ci, cj = counts.participation[i], counts.participation[j]
    if ci == 0 or cj == 0:
        return 0.0
    return cij / math.sqrt(ci * cj)


def relation_strengths(counts: CooperationCounts, i: str) -> dict[str, float]:
    """R_ij for every j that ever cooperated with i (all other R_ij are 0)."""
    counts._check(i)
    return {j: relation_strength(counts, i, j) for j in sorted(counts.partners[i])}


def total_relation_strength(counts: CooperationCounts, i: str) -> float:
    # only cooperators contribute; R_ij = 0 for everyone else
    return math.fsum(relation_strengths(counts, i).values())


def degree_centrality(adjacency: ActivityAdjacency, i: str) -> int:
    """Number of distinct students i has ever shared a team with."""
    return len(adjacency.cooperations(i))


def edge_list(counts: CooperationCounts) -> list[tuple[str, str, int, float]]:
    return [
        (i, j, c, relation_strength(counts, i, j))
        for (i, j), c in sorted(counts.pair_count.items())
    ]


def write_edge_list(counts: CooperationCounts, path: str | Path, delimiter: str = ",") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(["i", "j", "c_ij", "R_ij"])
        for i, j, c, r in edge_list(counts):
            w.writerow([i, j, c, repr(r)])
