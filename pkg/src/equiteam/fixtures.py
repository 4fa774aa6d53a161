"""Synthetic cohorts that reproduce the published class-level aggregates.

Individual answers were never published, so these cohorts only match the
reported marginals: 74 students, 9 opt-outs, economic 1/28/24/12,
social 12/24/18/11 (three not-comfortable answers scored as major city),
readiness 24/36/5, plus the readiness cross-tab (4 of 5 needing support are
economically disadvantaged and 3 rural; 1 and 3 of 24 self-sufficient).
"""

from __future__ import annotations

import random

from equiteam.analytics import CohortStats
from equiteam.survey import Participation, StudentResponse, parse_responses

COHORT_SIZE = 74
OPT_OUTS = 9

# (count, social, economic, readiness)
PAPER_GROUPS = [
    # self-sufficient (24)
    (3, "2e", "3b", "4a"),
    (1, "2a", "3a", "4a"),
    (5, "2a", "3b", "4a"),
    (6, "2b", "3b", "4a"),
    (2, "2b", "3c", "4a"),
    (4, "2c", "3c", "4a"),
    (1, "2d", "3d", "4a"),
    (2, "2d", "3c", "4a"),
    # helped (36)
    (7, "2b", "3d", "4b"),
    (12, "2c", "3c", "4b"),
    (3, "2d", "3c", "4b"),
    (2, "2d", "3b", "4b"),
    (3, "2a", "3b", "4b"),
    (9, "2b", "3b", "4b"),
    # needs support (5)
    (3, "2d", "3d", "4c"),
    (1, "2c", "3d", "4c"),
    (1, "2c", "3c", "4c"),
]

SOCIAL_MARGINALS = {"2a": 9, "2e": 3, "2b": 24, "2c": 18, "2d": 11}
ECONOMIC_MARGINALS = {"3a": 1, "3b": 28, "3c": 24, "3d": 12}
READINESS_MARGINALS = {"4a": 24, "4b": 36, "4c": 5}

HEADER = ("roll", "participation", "social", "economic", "readiness")


def _rolls(n):
    return [f"R{i:03d}" for i in range(1, n + 1)]


def paper_cohort_rows(seed: int = 2023) -> list[dict]:
    """Rows of the shipped 74-student fixture in file order."""
    answers = [("1a", "", "", "")] * OPT_OUTS
    for count, social, economic, readiness in PAPER_GROUPS:
        answers += [("1b", social, economic, readiness)] * count
    random.Random(seed).shuffle(answers)
    return [dict(zip(HEADER, (roll, *a))) for roll, a in zip(_rolls(COHORT_SIZE), answers)]


def paper_cohort() -> list[StudentResponse]:
    return parse_responses(paper_cohort_rows())


def synthetic_cohort(seed: int) -> list[StudentResponse]:
    """A random 74-student cohort with the published marginals.

    The three answer columns are shuffled independently, so per-question
    counts are exact while the joint distribution varies with ``seed``.
    """
    rng = random.Random(seed)

    def column(marginals):
        col = [code for code, c in marginals.items() for _ in range(c)]
        rng.shuffle(col)
        return col

    social = column(SOCIAL_MARGINALS)
    economic = column(ECONOMIC_MARGINALS)
    readiness = column(READINESS_MARGINALS)
    slots = [False] * OPT_OUTS + [True] * (COHORT_SIZE - OPT_OUTS)
    rng.shuffle(slots)
    out, j = [], 0
    for roll, participates in zip(_rolls(COHORT_SIZE), slots):
        if not participates:
            out.append(StudentResponse(roll, Participation.OPT_OUT))
            continue
        row = dict(zip(HEADER, (roll, "1b", social[j], economic[j], readiness[j])))
        out.extend(parse_responses([row]))
        j += 1
    return out


# Team-level values for the two semesters (19 teams each). Sorted, they give
# equity 58.5 / 60 / 62.25 and marks 49 / 55 / 62 (min / median / max) for the
# structured semester, equity 51 / 59.75 / 72.5 and marks 43 / 50 / 59 for the
# self-formed one.
SEMESTER_1 = [
    (60.25, 55), (58.75, 57), (61.0, 52), (59.5, 60), (62.25, 54),
    (60.0, 49), (59.75, 58), (58.5, 56), (61.5, 53), (60.0, 61),
    (59.25, 50), (60.75, 55), (59.0, 57), (62.0, 62), (60.5, 52),
    (59.5, 54), (61.25, 59), (59.75, 51), (60.0, 60),
]
SEMESTER_2 = [
    (51.0, 57), (72.5, 44), (59.75, 50), (55.25, 59), (66.0, 46),
    (58.0, 52), (63.5, 48), (54.0, 55), (68.25, 43), (59.5, 53),
    (56.0, 49), (70.0, 47), (52.5, 58), (61.25, 51), (58.75, 54),
    (64.75, 45), (57.5, 56), (62.0, 50), (60.5, 48),
]


def semester_stats(which: int) -> CohortStats:
    points = {1: SEMESTER_1, 2: SEMESTER_2}[which]
    return CohortStats(f"semester{which}", [e for e, _ in points], [m for _, m in points])


def synthetic_semester(seed: int, n_teams: int = 19) -> list[tuple[float, int]]:
    """Self-formed-like teams: widely spread equity means, marks drifting down as means rise."""
    rng = random.Random(seed)
    out = []
    for _ in range(n_teams):
        mean = rng.randrange(204, 291) / 4  # 51 .. 72.5 in quarter points
        marks = round(50 - 0.5 * (mean - 60) + rng.gauss(0, 3))
        out.append((mean, min(70, max(0, marks))))
    return out
