"""Seeded synthetic cohorts under named teaming policies.

Team formation works on a fixed *size profile*: a list of team sizes drawn
once per cohort by a greedy procedure (repeatedly pick a size uniformly
among those that still leave a coverable remainder). A partition is then a
shuffle of the students chunked by that profile.

* ``fully_stable``: one shuffle, reused for every activity.
* ``random_each_activity``: a fresh shuffle for every activity.
* ``churn``: at each transition every student independently leaves their
  seat with probability ``churn_rate``; the leavers are shuffled over the
  vacated seats. Rate 0 reproduces ``fully_stable`` exactly, rate 1 gives
  the same partition law as ``random_each_activity``.

Scores follow ``base + stability_coeff * S(i) + N(0, noise_sd)``, clamped
to [0, 100].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from teamstability.ingest import (
    Activity,
    Cohort,
    IndividualScoreRecord,
    TeamRecord,
    build_cohort,
)
from teamstability.stability import DampingConfig, final_results, stability_factors
from teamstability.stats import RegressionResult, simple_fit

log = logging.getLogger(__name__)

POLICIES = ("fully_stable", "random_each_activity", "churn")

# separate streams so a shared seed does not correlate teams and noise
_TEAM_STREAM, _SCORE_STREAM = 0, 1


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class TeamingPolicy:
    kind: str = "random_each_activity"
    n_students: int = 30
    m_activities: int = 4
    team_size: tuple[int, int] = (3, 5)
    churn_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.team_size
        if self.kind not in POLICIES:
            raise ConfigurationError(f"unknown policy {self.kind!r}; choose from {POLICIES}")
        if not 0.0 <= self.churn_rate <= 1.0:
            raise ConfigurationError(f"churn rate must lie in [0, 1], got {self.churn_rate}")
        if lo < 2 or hi < lo:
            raise ConfigurationError(f"team size range must satisfy 2 <= lo <= hi, got {self.team_size}")
        if self.m_activities < 1:
            raise ConfigurationError("need at least one activity")
        if not _coverable(self.n_students, lo, hi):
            raise ConfigurationError(
                f"{self.n_students} students cannot be split into teams of {lo}..{hi}"
            )


@dataclass(frozen=True)
class ScoreModel:
    base: float = 82.114
    stability_coeff: float = 0.502
    noise_sd: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.noise_sd >= 0:
            raise ConfigurationError(f"noise_sd must be >= 0, got {self.noise_sd}")


class GeneratedScores(NamedTuple):
    records: list[IndividualScoreRecord]
    n_clamped: int


def _coverable(n: int, lo: int, hi: int) -> bool:
    # n is a sum of sizes in [lo, hi] iff k*lo <= n <= k*hi for some k
    if n == 0:
        return True
    return any(k * lo <= n <= k * hi for k in range(1, n // lo + 1))


def size_profile(n: int, lo: int, hi: int, rng: np.random.Generator) -> list[int]:
    sizes = []
    remaining = n
    while remaining:
        options = [s for s in range(lo, hi + 1) if s <= remaining and _coverable(remaining - s, lo, hi)]
        if not options:
            raise ConfigurationError(f"{n} students cannot be split into teams of {lo}..{hi}")
        s = int(options[rng.integers(len(options))])
        sizes.append(s)
        remaining -= s
    return sizes


def _chunk(seats: list[int], sizes: list[int]) -> list[list[int]]:
    out, start = [], 0
    for s in sizes:
        out.append(seats[start : start + s])
        start += s
    return out


def student_ids(n: int) -> list[str]:
    width = len(str(n))
    return [f"S{k:0{width}d}" for k in range(1, n + 1)]


def generate_cohort(policy: TeamingPolicy) -> Cohort:
    """Deterministic cohort (no scores yet) for the given policy and seed."""
    rng = np.random.default_rng([policy.seed, _TEAM_STREAM])
    n, m = policy.n_students, policy.m_activities
    lo, hi = policy.team_size
    sizes = size_profile(n, lo, hi, rng)
    ids = student_ids(n)

    seating = [int(x) for x in rng.permutation(n)]  # seat position -> student index
    seatings = [seating]
    for _ in range(1, m):
        if policy.kind == "fully_stable":
            seating = list(seating)
        elif policy.kind == "random_each_activity":
            seating = [int(x) for x in rng.permutation(n)]
        else:
            leaving = rng.random(n) < policy.churn_rate
            vacated = [pos for pos in range(n) if leaving[pos]]
            movers = [seating[pos] for pos in vacated]
            shuffled = [movers[k] for k in rng.permutation(len(movers))]
            seating = list(seating)
            for pos, student in zip(vacated, shuffled):
                seating[pos] = student
        seatings.append(seating)

    teams = []
    for q, seats in enumerate(seatings, start=1):
        for t, chunk in enumerate(_chunk(seats, sizes), start=1):
            teams.append(
                TeamRecord(
                    team_id=f"T{q}-{t:02d}",
                    activity_ordinal=q,
                    members=frozenset(ids[k] for k in chunk),
                )
            )
    activities = [Activity(q, f"Activity {q}") for q in range(1, m + 1)]
    return build_cohort(teams, [], activities)


def generate_scores(
    cohort: Cohort, model: ScoreModel, stability: dict[str, float]
) -> GeneratedScores:
    """One score per (team, member): ``clamp(base + coeff * S(i) + noise)``."""
    rng = np.random.default_rng([model.seed, _SCORE_STREAM])
    records = []
    n_clamped = 0
    for team in cohort.teams:
        members = sorted(team.members)
        noise = rng.normal(0.0, model.noise_sd, size=len(members)) if model.noise_sd > 0 else [0.0] * len(members)
        for s, eps in zip(members, noise):
            raw = model.base + model.stability_coeff * stability[s] + float(eps)
            score = min(max(raw, 0.0), 100.0)
            n_clamped += score != raw
            records.append(IndividualScoreRecord(team.team_id, s, score))
    if n_clamped:
        log.info("clamped %d of %d generated scores to [0, 100]", n_clamped, len(records))
    return GeneratedScores(records, n_clamped)


def with_scores(cohort: Cohort, records: list[IndividualScoreRecord]) -> Cohort:
    return build_cohort(list(cohort.teams), records, list(cohort.activities))


def noise_sd_for_r_squared(
    s_values: list[float] | np.ndarray,
    stability_coeff: float,
    target_r2: float,
    scores_per_student: int,
) -> float:
    """Per-score noise s.d. that makes the population R^2 of mean score on S equal ``target_r2``.

    A student's mean over ``k`` scores carries noise variance ``sd^2 / k``,
    and R^2 = signal / (signal + noise) with signal ``coeff^2 var(S)``.
    """
    if not 0.0 < target_r2 < 1.0:
        raise ValueError(f"target R^2 must lie in (0, 1), got {target_r2}")
    signal = stability_coeff**2 * float(np.var(np.asarray(s_values, dtype=float)))
    return float(np.sqrt(scores_per_student * signal * (1.0 - target_r2) / target_r2))


@dataclass(frozen=True)
class SimulationRun:
    cohort: Cohort
    stability: dict[str, float]
    n_clamped: int

    def fit(self, config: DampingConfig = DampingConfig()) -> RegressionResult:
        rows = [r for r in final_results(self.cohort, config) if r.mean_score is not None]
        return simple_fit([r.S for r in rows], [r.mean_score for r in rows])


def simulate(
    policy: TeamingPolicy, model: ScoreModel, config: DampingConfig = DampingConfig()
) -> SimulationRun:
    """Generate a cohort, its stability factors and its scores in one go."""
    bare = generate_cohort(policy)
    s_values = stability_factors(bare, config)
    scores = generate_scores(bare, model, s_values)
    return SimulationRun(with_scores(bare, scores.records), s_values, scores.n_clamped)
