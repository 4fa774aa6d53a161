"""Cohort descriptive statistics.

Counts are exact integers and percentages are kept as fractions; rounding to
whole percent happens only when a value is rendered for display.
"""

from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from equiteam.errors import DegenerateAxis, EmptyInput, InvalidThresholds
from equiteam.survey import (
    DEFAULT_RUBRIC,
    Economic,
    EquityScore,
    Readiness,
    ScoringRubric,
    Social,
    StudentResponse,
    _lowest,
)

DEFAULT_THRESHOLDS = (55, 70)
BINS = ("Low", "Average", "High")


def effective_answer(answer, rubric: ScoringRubric = DEFAULT_RUBRIC):
    """Category an answer is scored as: not-comfortable collapses to the lowest-scoring one."""
    if answer.label == "NotComfortable":
        return _lowest(type(answer), rubric)
    return answer


@dataclass(frozen=True)
class CohortSummary:
    size: int
    opt_outs: int
    social: Mapping[str, int]
    economic: Mapping[str, int]
    readiness: Mapping[str, int]
    not_comfortable: Mapping[str, int]

    @property
    def participating(self) -> int:
        return self.size - self.opt_outs

    @property
    def not_comfortable_total(self) -> int:
        return sum(self.not_comfortable.values())


def _zero_counts(enum_cls) -> dict[str, int]:
    return {m.label: 0 for m in enum_cls if m.label != "NotComfortable"}


def category_counts(
    resps: Iterable[StudentResponse], rubric: ScoringRubric = DEFAULT_RUBRIC
) -> CohortSummary:
    """Per-question answer counts over participating students.

    A not-comfortable answer is tallied under the category it is scored as
    (the lowest-scoring one) so each map sums to the participating count;
    ``not_comfortable`` records how many such answers each question received.
    """
    resps = list(resps)
    social = _zero_counts(Social)
    economic = _zero_counts(Economic)
    readiness = _zero_counts(Readiness)
    nc = {"social": 0, "economic": 0}
    opt_outs = 0
    for r in resps:
        if r.opted_out:
            opt_outs += 1
            continue
        for name, answer, table in (("social", r.social, social), ("economic", r.economic, economic)):
            if answer.label == "NotComfortable":
                nc[name] += 1
            table[effective_answer(answer, rubric).label] += 1
        readiness[r.readiness.label] += 1
    return CohortSummary(len(resps), opt_outs, social, economic, readiness, nc)


def bin_scores(
    scores: Iterable[EquityScore], thresholds: tuple[int, int] = DEFAULT_THRESHOLDS
) -> dict[str, int]:
    """Low is ``total <= low_max``, High is ``total >= high_min``, Average in between."""
    low_max, high_min = thresholds
    if not (40 <= low_max < high_min <= 90):
        raise InvalidThresholds(
            f"need 40 <= low_max < high_min <= 90, got low_max={low_max}, high_min={high_min}"
        )
    counts = dict.fromkeys(BINS, 0)
    for s in scores:
        if s.total <= low_max:
            counts["Low"] += 1
        elif s.total >= high_min:
            counts["High"] += 1
        else:
            counts["Average"] += 1
    return counts


def display_percent(share: Optional[Fraction]) -> Optional[int]:
    # round() on a Fraction is half-to-even: 12.5% -> 12
    return None if share is None else round(share * 100)


@dataclass(frozen=True)
class CrossTabRow:
    total: int
    economic: Mapping[str, int]
    social: Mapping[str, int]

    def share(self, dimension: str, label: str) -> Optional[Fraction]:
        """Exact fraction of the row in a category, ``None`` for an empty row."""
        if self.total == 0:
            return None
        return Fraction(getattr(self, dimension)[label], self.total)

    def percentages(self, dimension: str) -> dict[str, Optional[int]]:
        return {label: display_percent(self.share(dimension, label)) for label in getattr(self, dimension)}


def readiness_cross_tab(
    resps: Iterable[StudentResponse], rubric: ScoringRubric = DEFAULT_RUBRIC
) -> dict[str, CrossTabRow]:
    """Readiness rows against economic and social categories (participants only)."""
    resps = [r for r in resps if not r.opted_out]
    out = {}
    for level in Readiness:
        members = [r for r in resps if r.readiness is level]
        economic = _zero_counts(Economic)
        social = _zero_counts(Social)
        for r in members:
            economic[effective_answer(r.economic, rubric).label] += 1
            social[effective_answer(r.social, rubric).label] += 1
        out[level.label] = CrossTabRow(len(members), economic, social)
    return out


@dataclass(frozen=True)
class FiveNumberSummary:
    min: Fraction
    q1: Fraction
    median: Fraction
    q3: Fraction
    max: Fraction

    @property
    def range_width(self) -> Fraction:
        return self.max - self.min

    def as_tuple(self):
        return (self.min, self.q1, self.median, self.q3, self.max)


def _median_sorted(xs):
    n = len(xs)
    mid = n // 2
    return xs[mid] if n % 2 else (xs[mid - 1] + xs[mid]) / 2


def five_number(values: Iterable) -> FiveNumberSummary:
    """Min, hinges, median and max, computed exactly.

    Quartiles are medians of the lower and upper halves; for an odd count the
    middle value belongs to neither half, so ``[1, 2, 3, 4, 5]`` gives hinges
    1.5 and 4.5.
    """
    xs = sorted(Fraction(v) for v in values)
    if not xs:
        raise EmptyInput("five-number summary of an empty sequence")
    n = len(xs)
    if n == 1:
        return FiveNumberSummary(*([xs[0]] * 5))
    lower, upper = xs[: n // 2], xs[(n + 1) // 2 :]
    return FiveNumberSummary(xs[0], _median_sorted(lower), _median_sorted(xs), _median_sorted(upper), xs[-1])


class BalanceVerdict(enum.Enum):
    MORE_BALANCED = "MoreBalanced"
    LESS_BALANCED = "LessBalanced"
    COMPARABLE = "Comparable"


@dataclass(frozen=True)
class CohortStats:
    """Per-team equity means and marks of one team-formation regime."""

    name: str
    equity_means: Sequence
    marks: Sequence


@dataclass(frozen=True)
class ComparisonReport:
    name_a: str
    name_b: str
    equity_a: FiveNumberSummary
    equity_b: FiveNumberSummary
    marks_a: FiveNumberSummary
    marks_b: FiveNumberSummary
    verdict: BalanceVerdict  # from the point of view of cohort a

    @property
    def width_a(self) -> Fraction:
        return self.equity_a.range_width

    @property
    def width_b(self) -> Fraction:
        return self.equity_b.range_width

    @property
    def width_delta(self) -> Fraction:
        return self.width_b - self.width_a

    @property
    def marks_deltas(self) -> dict[str, Fraction]:
        """``b - a`` for the marks median, minimum and maximum."""
        return {
            "median": self.marks_b.median - self.marks_a.median,
            "min": self.marks_b.min - self.marks_a.min,
            "max": self.marks_b.max - self.marks_a.max,
        }


def compare_cohorts(a: CohortStats, b: CohortStats) -> ComparisonReport:
    ea, eb = five_number(a.equity_means), five_number(b.equity_means)
    ma, mb = five_number(a.marks), five_number(b.marks)
    if ea.range_width < eb.range_width:
        verdict = BalanceVerdict.MORE_BALANCED
    elif ea.range_width > eb.range_width:
        verdict = BalanceVerdict.LESS_BALANCED
    else:
        verdict = BalanceVerdict.COMPARABLE
    return ComparisonReport(a.name, b.name, ea, eb, ma, mb, verdict)


@dataclass(frozen=True)
class AssociationReport:
    correlation: float
    equity_median: Fraction
    marks_median: Fraction
    high_score_low_marks: tuple
    low_score_high_marks: tuple


def score_marks_association(points: Sequence[tuple], teams: Optional[Sequence] = None) -> AssociationReport:
    """Pearson correlation of (equity mean, marks) per team plus quadrant flags.

    A team is flagged high-score/low-marks when its equity mean is above the
    median equity mean and its marks below the median marks (and mirrored for
    low-score/high-marks). ``teams`` labels the points, defaulting to 1..n.
    """
    if len(points) < 2:
        raise EmptyInput("association needs at least two teams")
    teams = list(teams) if teams is not None else list(range(1, len(points) + 1))
    eq = [Fraction(e) for e, _ in points]
    mk = [Fraction(m) for _, m in points]
    if len(set(eq)) == 1:
        raise DegenerateAxis("equity means are constant; correlation undefined")
    if len(set(mk)) == 1:
        raise DegenerateAxis("marks are constant; correlation undefined")
    r = statistics.correlation([float(x) for x in eq], [float(y) for y in mk])
    r = max(-1.0, min(1.0, r))
    eq_med = _median_sorted(sorted(eq))
    mk_med = _median_sorted(sorted(mk))
    hs_lm = tuple(t for t, e, m in zip(teams, eq, mk) if e > eq_med and m < mk_med)
    ls_hm = tuple(t for t, e, m in zip(teams, eq, mk) if e < eq_med and m > mk_med)
    return AssociationReport(r, eq_med, mk_med, hs_lm, ls_hm)
