"""Time-damped centrality and the per-student team stability factor.

A shared team in activity ``q`` of ``m`` is worth ``delta ** (m - q)``, so
the most recent activity counts fully and older ones fade geometrically
(``delta = 1/e`` by default). For a pair (i, j) the damped weight is

    W_ij = sum over q of r_ij^(q) * delta ** (m - q)

The damped centrality of i sums W_ij over partners; the stability factor
weighs each W_ij by the cumulative relation strength R_ij:

    S(i) = sum over j != i of W_ij * R_ij
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean
from typing import Any

from teamstability.ingest import Cohort, ParseError
from teamstability.network import (
    ActivityAdjacency,
    CooperationCounts,
    activity_adjacency,
    cooperation_counts,
    relation_strength,
)

FINAL_RESULTS_HEADER = ("StudentNo", "S", "MeanScore")


@dataclass(frozen=True)
class DampingConfig:
    delta: float = math.exp(-1.0)

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0) or math.isnan(self.delta):
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")

    def factor(self, m: int, q: int) -> float:
        return self.delta ** (m - q)


@dataclass(frozen=True)
class StabilityRow:
    student: str
    S: float
    mean_score: float | None


def damped_pair_weights(
    adjacency: ActivityAdjacency, config: DampingConfig, i: str
) -> dict[str, float]:
    """W_ij for every partner j of i (non-partners have W_ij = 0)."""
    m = adjacency.m
    return {
        j: math.fsum(config.factor(m, q) for q in qs)
        for j, qs in sorted(adjacency.cooperations(i).items())
    }


def damped_pair_weight(
    adjacency: ActivityAdjacency, config: DampingConfig, i: str, j: str
) -> float:
    if i == j:
        raise ValueError(f"damped pair weight needs two distinct students, got {i!r} twice")
    adjacency._check(j)
    return damped_pair_weights(adjacency, config, i).get(j, 0.0)


def damped_centrality(adjacency: ActivityAdjacency, config: DampingConfig, i: str) -> float:
    return math.fsum(damped_pair_weights(adjacency, config, i).values())


def stability_factor(
    counts: CooperationCounts,
    adjacency: ActivityAdjacency,
    config: DampingConfig,
    i: str,
) -> float:
    # R_ij is the static value over all m activities, outside the q-sum
    weights = damped_pair_weights(adjacency, config, i)
    return math.fsum(w * relation_strength(counts, i, j) for j, w in weights.items())


def stability_factors(cohort: Cohort, config: DampingConfig = DampingConfig()) -> dict[str, float]:
    counts = cooperation_counts(cohort)
    adjacency = activity_adjacency(cohort)
    return {s: stability_factor(counts, adjacency, config, s) for s in cohort.students}


def mean_scores(cohort: Cohort) -> dict[str, float | None]:
    by_student: dict[str, list[float]] = {s: [] for s in cohort.students}
    for rec in cohort.scores:
        by_student[rec.student].append(rec.score)
    return {s: (fmean(v) if v else None) for s, v in by_student.items()}


def final_results(cohort: Cohort, config: DampingConfig = DampingConfig()) -> list[StabilityRow]:
    """One (student, S, mean score) row per student, sorted by student ID.

    The mean is taken over the activities that have a score record; a
    student with none gets ``mean_score=None``.
    """
    s_values = stability_factors(cohort, config)
    means = mean_scores(cohort)
    return [StabilityRow(s, s_values[s], means[s]) for s in cohort.students]


def pair_breakdown(cohort: Cohort, config: DampingConfig = DampingConfig()) -> dict[str, list[dict]]:
    """Per-student audit trail: (j, c_ij, R_ij, W_ij) for every partner."""
    counts = cooperation_counts(cohort)
    adjacency = activity_adjacency(cohort)
    out = {}
    for i in cohort.students:
        out[i] = [
            {"j": j, "c_ij": counts.c(i, j), "R_ij": relation_strength(counts, i, j), "W_ij": w}
            for j, w in damped_pair_weights(adjacency, config, i).items()
        ]
    return out


# ---------------------------------------------------------------------------
# FinalResults files


def _render(x: float | None, precision: int | None) -> str:
    if x is None:
        return ""
    if precision is None:
        return repr(float(x))
    return f"{x:.{precision}f}"


def format_final_results(
    rows: list[StabilityRow], precision: int | None = 2, delimiter: str = ","
) -> str:
    """Render the StudentNo,S,MeanScore table. ``precision=None`` keeps full precision."""
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(FINAL_RESULTS_HEADER)
    for r in rows:
        w.writerow([r.student, _render(r.S, precision), _render(r.mean_score, precision)])
    return buf.getvalue()


def write_final_results(
    rows: list[StabilityRow],
    path: str | Path,
    precision: int | None = 2,
    delimiter: str = ",",
) -> None:
    Path(path).write_text(format_final_results(rows, precision, delimiter), encoding="utf-8")


def read_final_results(path: str | Path, delimiter: str = ",") -> list[StabilityRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    if not rows or tuple(c.strip() for c in rows[0]) != FINAL_RESULTS_HEADER:
        raise ParseError(f"{path}: expected header {','.join(FINAL_RESULTS_HEADER)}", row=1)
    out = []
    for rowno, raw in enumerate(rows[1:], start=2):
        if not raw:
            continue
        if len(raw) != 3:
            raise ParseError(f"expected 3 columns, got {len(raw)}", row=rowno)
        try:
            s = float(raw[1])
            mean = float(raw[2]) if raw[2].strip() else None
        except ValueError:
            raise ParseError(f"non-numeric value in {raw!r}", row=rowno) from None
        out.append(StabilityRow(raw[0].strip(), s, mean))
    return out


def report_dict(cohort: Cohort, config: DampingConfig = DampingConfig()) -> dict[str, Any]:
    rows = final_results(cohort, config)
    breakdown = pair_breakdown(cohort, config)
    return {
        "delta": config.delta,
        "m": cohort.m,
        "n": cohort.n,
        "results": [
            {"StudentNo": r.student, "S": r.S, "MeanScore": r.mean_score, "pairs": breakdown[r.student]}
            for r in rows
        ],
    }


def write_report_json(cohort: Cohort, path: str | Path, config: DampingConfig = DampingConfig()) -> None:
    Path(path).write_text(json.dumps(report_dict(cohort, config), indent=2) + "\n", encoding="utf-8")
