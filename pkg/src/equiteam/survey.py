"""Questionnaire schema, response validation and equity scoring."""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from equiteam.errors import (
    ContractError,
    DuplicateRoll,
    InvalidCode,
    InvalidRubric,
    MissingAnswer,
    OptOutWithAnswers,
)


class _Coded(enum.Enum):
    """Enum whose values are questionnaire answer codes ("2a", "3d", ...)."""

    @property
    def code(self) -> str:
        return self.value[0]

    @property
    def label(self) -> str:
        return self.value[1]

    @classmethod
    def from_code(cls, code):
        for member in cls:
            if member.code == code:
                return member
        raise KeyError(code)


class Participation(_Coded):
    OPT_OUT = ("1a", "OptOut")
    PARTICIPATE = ("1b", "Participate")


class Social(_Coded):
    MAJOR_CITY_INDIA = ("2a", "MajorCityIndia")
    STATE_CITY = ("2b", "StateCity")
    SMALL_TOWN = ("2c", "SmallTown")
    RURAL = ("2d", "Rural")
    NOT_COMFORTABLE = ("2e", "NotComfortable")


class Economic(_Coded):
    UPPER = ("3a", "Upper")
    UPPER_MIDDLE = ("3b", "UpperMiddle")
    MIDDLE = ("3c", "Middle")
    DISADVANTAGED = ("3d", "Disadvantaged")
    NOT_COMFORTABLE = ("3e", "NotComfortable")


class Readiness(_Coded):
    SELF_SUFFICIENT = ("4a", "SelfSufficient")
    HELPED = ("4b", "Helped")
    NEEDS_SUPPORT = ("4c", "NeedsSupport")


# column name -> (question number, answer enum)
QUESTIONS = {
    "social": ("2", Social),
    "economic": ("3", Economic),
    "readiness": ("4", Readiness),
}


class AssumedAnswerWarning(UserWarning):
    """Emitted when a skipped answer is filled with the lowest-scoring option."""


@dataclass(frozen=True)
class StudentResponse:
    roll: str
    participation: Participation
    social: Optional[Social] = None
    economic: Optional[Economic] = None
    readiness: Optional[Readiness] = None

    @property
    def opted_out(self) -> bool:
        return self.participation is Participation.OPT_OUT

    def is_valid(self) -> bool:
        answers = (self.social, self.economic, self.readiness)
        if not isinstance(self.roll, str) or not self.roll:
            return False
        if self.opted_out:
            return all(a is None for a in answers)
        return all(a is not None for a in answers)


@dataclass(frozen=True)
class ScoringRubric:
    """Points per answer. Not-comfortable answers take the lowest points of their category."""

    social: Mapping[Social, int]
    economic: Mapping[Economic, int]
    readiness: Mapping[Readiness, int]
    opt_out_total: int = 45

    def __post_init__(self):
        for name, enum_cls in (("social", Social), ("economic", Economic), ("readiness", Readiness)):
            table = getattr(self, name)
            expected = {m for m in enum_cls if m.label != "NotComfortable"}
            if set(table) != expected:
                raise InvalidRubric(f"{name} table must score exactly {sorted(m.code for m in expected)}")
            for member, pts in table.items():
                if not isinstance(pts, int) or isinstance(pts, bool) or pts < 0:
                    raise InvalidRubric(f"{name} points for {member.code} must be a non-negative integer")
        if not self.min_total <= self.opt_out_total <= self.max_total:
            raise InvalidRubric(
                f"opt-out total {self.opt_out_total} outside [{self.min_total}, {self.max_total}]"
            )

    def points(self, answer) -> int:
        table = {Social: self.social, Economic: self.economic, Readiness: self.readiness}[type(answer)]
        if answer.label == "NotComfortable":
            return min(table.values())
        return table[answer]

    @property
    def min_total(self) -> int:
        return min(self.social.values()) + min(self.economic.values()) + min(self.readiness.values())

    @property
    def max_total(self) -> int:
        return max(self.social.values()) + max(self.economic.values()) + max(self.readiness.values())

    def to_dict(self) -> dict:
        return {
            "social": {m.code: p for m, p in self.social.items()},
            "economic": {m.code: p for m, p in self.economic.items()},
            "readiness": {m.code: p for m, p in self.readiness.items()},
            "opt_out_total": self.opt_out_total,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ScoringRubric":
        """Build a rubric from ``{"social": {"2a": 5, ...}, ..., "opt_out_total": 45}``.

        Missing tables fall back to the default rubric.
        """
        tables = {}
        for name, (_, enum_cls) in QUESTIONS.items():
            raw = data.get(name)
            if raw is None:
                tables[name] = dict(getattr(DEFAULT_RUBRIC, name))
                continue
            try:
                tables[name] = {enum_cls.from_code(code): pts for code, pts in raw.items()}
            except KeyError as exc:
                raise InvalidRubric(f"unknown answer code {exc.args[0]!r} in {name} table") from None
        return cls(opt_out_total=data.get("opt_out_total", DEFAULT_RUBRIC.opt_out_total), **tables)

    @classmethod
    def from_json(cls, path) -> "ScoringRubric":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidRubric(f"{path}: {exc}") from None
        return cls.from_dict(data)


DEFAULT_RUBRIC = ScoringRubric(
    social={Social.MAJOR_CITY_INDIA: 5, Social.STATE_CITY: 10, Social.SMALL_TOWN: 15, Social.RURAL: 20},
    economic={Economic.UPPER: 5, Economic.UPPER_MIDDLE: 10, Economic.MIDDLE: 15, Economic.DISADVANTAGED: 20},
    readiness={Readiness.SELF_SUFFICIENT: 30, Readiness.HELPED: 40, Readiness.NEEDS_SUPPORT: 50},
    opt_out_total=45,
)


@dataclass(frozen=True)
class EquityScore:
    """Score of one student. Components are ``None`` for students who opted out."""

    roll: str
    total: int
    opted_out: bool = False
    social: Optional[int] = field(default=None)
    economic: Optional[int] = field(default=None)
    readiness: Optional[int] = field(default=None)


def _lowest(enum_cls, rubric: ScoringRubric):
    table = getattr(rubric, {Social: "social", Economic: "economic", Readiness: "readiness"}[enum_cls])
    # lowest points, earliest code on ties
    return min(table, key=lambda m: (table[m], m.code))


def parse_responses(
    rows: Iterable[Mapping[str, str]],
    *,
    assume_lowest: bool = False,
    rubric: ScoringRubric = DEFAULT_RUBRIC,
    line_numbers: Optional[Sequence[int]] = None,
) -> list[StudentResponse]:
    """Validate raw rows (``roll, participation, social, economic, readiness``).

    Codes are the questionnaire answer codes; empty cells mean "no answer".
    With ``assume_lowest`` a participating student's skipped answer becomes the
    lowest-scoring option of that question and an :class:`AssumedAnswerWarning`
    is issued. ``line_numbers`` (parallel to ``rows``) is only used to annotate
    errors.
    """
    seen = set()
    out = []
    for i, row in enumerate(rows):
        line = line_numbers[i] if line_numbers is not None else None
        roll = (row.get("roll") or "").strip()
        if not roll:
            raise InvalidCode(roll, "roll", row.get("roll"), line)
        if roll in seen:
            raise DuplicateRoll(roll, line)
        seen.add(roll)

        raw_part = (row.get("participation") or "").strip()
        try:
            participation = Participation.from_code(raw_part)
        except KeyError:
            if not raw_part:
                raise MissingAnswer(roll, "1", line) from None
            raise InvalidCode(roll, "1", raw_part, line) from None

        answers = {}
        for column, (question, enum_cls) in QUESTIONS.items():
            raw = (row.get(column) or "").strip()
            if not raw:
                answers[column] = None
                continue
            try:
                answers[column] = enum_cls.from_code(raw)
            except KeyError:
                raise InvalidCode(roll, question, raw, line) from None

        if participation is Participation.OPT_OUT:
            if any(a is not None for a in answers.values()):
                raise OptOutWithAnswers(roll, line)
        else:
            for column, (question, enum_cls) in QUESTIONS.items():
                if answers[column] is not None:
                    continue
                if not assume_lowest:
                    raise MissingAnswer(roll, question, line)
                answers[column] = _lowest(enum_cls, rubric)
                where = f"line {line}: " if line is not None else ""
                warnings.warn(
                    f"{where}roll {roll!r}: question {question} unanswered, "
                    f"assuming {answers[column].code}",
                    AssumedAnswerWarning,
                    stacklevel=2,
                )
        out.append(StudentResponse(roll, participation, **answers))
    return out


def score_response(resp: StudentResponse, rubric: ScoringRubric = DEFAULT_RUBRIC) -> EquityScore:
    if not resp.is_valid():
        raise ContractError(f"invalid response for roll {resp.roll!r}: {resp}")
    if resp.opted_out:
        return EquityScore(resp.roll, rubric.opt_out_total, opted_out=True)
    social = rubric.points(resp.social)
    economic = rubric.points(resp.economic)
    readiness = rubric.points(resp.readiness)
    return EquityScore(
        resp.roll,
        social + economic + readiness,
        opted_out=False,
        social=social,
        economic=economic,
        readiness=readiness,
    )


def score_cohort(
    resps: Iterable[StudentResponse], rubric: ScoringRubric = DEFAULT_RUBRIC
) -> list[EquityScore]:
    return [score_response(r, rubric) for r in resps]
