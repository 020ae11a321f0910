"""Seeded experiment drivers shared by the scripts and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean, median

from teamstability.stability import DampingConfig, stability_factors
from teamstability.stats import RegressionResult
from teamstability.synth import (
    ScoreModel,
    SimulationRun,
    TeamingPolicy,
    generate_cohort,
    generate_scores,
    noise_sd_for_r_squared,
    with_scores,
)

# cohort size for the weak-effect regime; F and R^2 of that regime put n near 600
REGIME_STUDENTS = 600
# Target population R^2 near the top of the [0.003, 0.02] window; the fitted
# R^2 runs ~1/(n-1) higher on average, so this keeps it inside the window.
REGIME_TARGET_R2 = 0.0185


@dataclass(frozen=True)
class RegimeOutcome:
    noise_sds: list[float]
    fits: list[RegressionResult]
    clamped: int

    @property
    def n_significant_positive(self) -> int:
        return sum(f.coefficients["S"] > 0 and f.p_values["S"] < 0.05 for f in self.fits)

    @property
    def median_r_squared(self) -> float:
        return median(f.r_squared for f in self.fits)


def regime_policy(seed: int, n_students: int = REGIME_STUDENTS) -> TeamingPolicy:
    return TeamingPolicy("churn", n_students, 4, (3, 5), churn_rate=0.5, seed=seed)


def weak_regime(
    seeds: range = range(100),
    n_students: int = REGIME_STUDENTS,
    target_r2: float = REGIME_TARGET_R2,
    config: DampingConfig = DampingConfig(),
) -> RegimeOutcome:
    """Regress mean score on S for one synthetic cohort per seed.

    Each cohort gets the noise level that puts its population R^2 at
    ``target_r2`` given its own spread of S, so every dataset sits in the
    same weak-effect regime.
    """
    template = ScoreModel()
    sds, fits, clamped = [], [], 0
    for seed in seeds:
        bare = generate_cohort(regime_policy(seed, n_students))
        s_values = stability_factors(bare, config)
        sd = noise_sd_for_r_squared(list(s_values.values()), template.stability_coeff, target_r2, bare.m)
        model = ScoreModel(template.base, template.stability_coeff, sd, seed=seed)
        scores = generate_scores(bare, model, s_values)
        run = SimulationRun(with_scores(bare, scores.records), s_values, scores.n_clamped)
        sds.append(sd)
        fits.append(run.fit(config))
        clamped += scores.n_clamped
    return RegimeOutcome(sds, fits, clamped)


def mean_stability(policy: TeamingPolicy, config: DampingConfig = DampingConfig()) -> float:
    return fmean(stability_factors(generate_cohort(policy), config).values())


def policy_contrast(
    seeds: range = range(100),
    n_students: int = 30,
    m_activities: int = 4,
    team_size: tuple[int, int] = (3, 5),
    config: DampingConfig = DampingConfig(),
) -> list[tuple[int, float, float]]:
    """(seed, mean S fully stable, mean S random each activity) per seed."""
    out = []
    for seed in seeds:
        kw = dict(n_students=n_students, m_activities=m_activities, team_size=team_size, seed=seed)
        stable = mean_stability(TeamingPolicy("fully_stable", **kw), config)
        shuffled = mean_stability(TeamingPolicy("random_each_activity", **kw), config)
        out.append((seed, stable, shuffled))
    return out
