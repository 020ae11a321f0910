"""Team stability metrics for consecutive cooperative learning.

Build a co-membership network from team rosters, score each student's
team stability, and regress learning scores on it.
"""

from teamstability.ingest import (
    Activity,
    Cohort,
    ConsistencyError,
    Diagnostic,
    IndividualScoreRecord,
    IngestError,
    MappingError,
    ParseError,
    TeamRecord,
    build_cohort,
    parse_scores,
    parse_team_list,
)
from teamstability.network import (
    ActivityAdjacency,
    CooperationCounts,
    activity_adjacency,
    cooperation_counts,
    degree_centrality,
    relation_strength,
    total_relation_strength,
)
from teamstability.stability import (
    DampingConfig,
    StabilityRow,
    damped_centrality,
    damped_pair_weight,
    final_results,
    stability_factor,
)
from teamstability.stats import (
    RegressionInput,
    RegressionResult,
    SingularDesignError,
    multivariate_fit,
    ols_fit,
)

__all__ = [
    "Activity",
    "ActivityAdjacency",
    "Cohort",
    "ConsistencyError",
    "CooperationCounts",
    "DampingConfig",
    "Diagnostic",
    "IndividualScoreRecord",
    "IngestError",
    "MappingError",
    "ParseError",
    "RegressionInput",
    "RegressionResult",
    "SingularDesignError",
    "StabilityRow",
    "TeamRecord",
    "activity_adjacency",
    "build_cohort",
    "cooperation_counts",
    "damped_centrality",
    "damped_pair_weight",
    "degree_centrality",
    "final_results",
    "multivariate_fit",
    "ols_fit",
    "parse_scores",
    "parse_team_list",
    "relation_strength",
    "stability_factor",
    "total_relation_strength",
]
