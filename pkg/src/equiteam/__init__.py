"""Equity-scored team formation: survey scoring, balanced partitioning, cohort analytics."""

from equiteam.errors import EquiteamError
from equiteam.survey import (
    DEFAULT_RUBRIC,
    EquityScore,
    Participation,
    Readiness,
    ScoringRubric,
    Social,
    Economic,
    StudentResponse,
    parse_responses,
    score_cohort,
    score_response,
)
from equiteam.partition import (
    BalanceMetrics,
    TeamAssignment,
    balance_metrics,
    exact_min_variance,
    fold_assign,
    local_search,
    local_search_rebalance,
    random_assign,
)

__all__ = [
    "DEFAULT_RUBRIC",
    "BalanceMetrics",
    "Economic",
    "EquiteamError",
    "EquityScore",
    "Participation",
    "Readiness",
    "ScoringRubric",
    "Social",
    "StudentResponse",
    "TeamAssignment",
    "balance_metrics",
    "exact_min_variance",
    "fold_assign",
    "local_search",
    "local_search_rebalance",
    "parse_responses",
    "random_assign",
    "score_cohort",
    "score_response",
]

__version__ = "0.1.0"
