"""File formats.

All delimited files are UTF-8 CSV with a fixed header. JSON outputs use a fixed
key order and the shortest round-tripping decimal for every number, so equal
inputs always give equal bytes.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

from equiteam.errors import FormatError
from equiteam.partition import TeamAssignment
from equiteam.survey import EquityScore, StudentResponse, parse_responses

RESPONSES_HEADER = ["roll", "participation", "social", "economic", "readiness"]
SCORES_HEADER = ["roll", "total", "opted_out"]
ROSTER_HEADER = ["team", "roll", "total_score"]
MARKS_HEADER = ["team", "marks"]
TEAM_STATS_HEADER = ["team", "equity_mean", "marks"]

REPORT_SCHEMA_VERSION = 1
MAX_MARKS = 70

FIXTURE = "cohort74.csv"


def fixture_path() -> Path:
    """Path of the packaged 74-student fixture."""
    return Path(str(resources.files("equiteam") / "data" / FIXTURE))


# -- generic helpers ---------------------------------------------------------

def _read_csv(path, header) -> list[tuple[int, dict]]:
    """Rows of a CSV file with the exact ``header``, paired with their line numbers."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise FormatError(f"{path}: empty file, expected header {','.join(header)}")
            if [f.strip() for f in reader.fieldnames] != header:
                raise FormatError(
                    f"{path}: line 1: expected header {','.join(header)}, got {','.join(reader.fieldnames)}"
                )
            rows = []
            for row in reader:
                if None in row or any(v is None for v in row.values()):
                    raise FormatError(f"{path}: line {reader.line_num}: expected {len(header)} fields")
                rows.append((reader.line_num, row))
            return rows
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not UTF-8 ({exc})") from None


def _write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def format_number(x) -> str:
    """Shortest decimal that round-trips: integers without a point, others via ``repr(float)``."""
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    if isinstance(x, int):
        return str(x)
    f = float(x)
    if f.is_integer():
        return str(int(f))
    return repr(f)


def _parse_number(text, what, path, line) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"{path}: line {line}: {what} {text!r} is not a number") from None


def _parse_int(text, what, path, line) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise FormatError(f"{path}: line {line}: {what} {text!r} is not an integer") from None


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, enum.Enum):
        return getattr(obj, "label", obj.value)
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, (int, float, Fraction)):
        # json writes floats via repr: shortest decimal that round-trips
        if isinstance(obj, int) or float(obj).is_integer():
            return int(obj)
        return float(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def write_json(obj: Any, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# -- responses and scores ----------------------------------------------------

def load_responses(path, *, assume_lowest: bool = False, rubric=None) -> list[StudentResponse]:
    rows = _read_csv(path, RESPONSES_HEADER)
    kwargs = {} if rubric is None else {"rubric": rubric}
    return parse_responses(
        [r for _, r in rows], assume_lowest=assume_lowest, line_numbers=[n for n, _ in rows], **kwargs
    )


def write_responses(resps: Iterable[StudentResponse], path) -> None:
    rows = []
    for r in resps:
        answers = [a.code if a is not None else "" for a in (r.social, r.economic, r.readiness)]
        rows.append([r.roll, r.participation.code, *answers])
    _write_csv(path, RESPONSES_HEADER, rows)


def sniff_kind(path) -> str:
    """``"responses"`` or ``"scores"`` depending on the header line."""
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    header = [h.strip() for h in header or []]
    if header == RESPONSES_HEADER:
        return "responses"
    if header == SCORES_HEADER:
        return "scores"
    raise FormatError(f"{path}: line 1: unrecognised header {','.join(header)}")


def write_scores(scores: Iterable[EquityScore], path) -> None:
    rows = [[s.roll, s.total, "true" if s.opted_out else "false"] for s in sorted(scores, key=lambda s: s.roll)]
    _write_csv(path, SCORES_HEADER, rows)


def read_scores(path) -> dict[str, int]:
    """Totals by roll from a scores file."""
    totals = {}
    for line, row in _read_csv(path, SCORES_HEADER):
        roll = row["roll"].strip()
        if not roll:
            raise FormatError(f"{path}: line {line}: empty roll")
        if roll in totals:
            raise FormatError(f"{path}: line {line}: duplicate roll {roll!r}")
        if row["opted_out"].strip() not in ("true", "false"):
            raise FormatError(f"{path}: line {line}: opted_out must be true or false")
        totals[roll] = _parse_int(row["total"], "total", path, line)
    return totals


# -- rosters -----------------------------------------------------------------

def roster_rows(assign: TeamAssignment) -> list[list]:
    return [[i, roll, assign.totals[roll]] for i, team in enumerate(assign.teams, 1) for roll in team]


def write_roster(assign: TeamAssignment, path) -> None:
    """Rows sorted by (team, roll); teams numbered from 1."""
    _write_csv(path, ROSTER_HEADER, roster_rows(assign))


def read_roster(path, team_size: Optional[int] = None) -> TeamAssignment:
    teams: dict[int, list[str]] = {}
    totals = {}
    for line, row in _read_csv(path, ROSTER_HEADER):
        team = _parse_int(row["team"], "team", path, line)
        roll = row["roll"].strip()
        if roll in totals:
            raise FormatError(f"{path}: line {line}: roll {roll!r} listed twice")
        totals[roll] = _parse_int(row["total_score"], "total_score", path, line)
        teams.setdefault(team, []).append(roll)
    if sorted(teams) != list(range(1, len(teams) + 1)):
        raise FormatError(f"{path}: teams must be numbered 1..{len(teams)}")
    return TeamAssignment(tuple(tuple(teams[t]) for t in sorted(teams)), totals, team_size or 0)


# -- marks and per-team stats ------------------------------------------------

def read_marks(path) -> dict[int, Fraction]:
    marks = {}
    for line, row in _read_csv(path, MARKS_HEADER):
        team = _parse_int(row["team"], "team", path, line)
        value = _parse_number(row["marks"], "marks", path, line)
        if not 0 <= value <= MAX_MARKS:
            raise FormatError(f"{path}: line {line}: marks {row['marks']} outside 0..{MAX_MARKS}")
        if team in marks:
            raise FormatError(f"{path}: line {line}: team {team} listed twice")
        marks[team] = value
    return marks


def write_marks(marks: Mapping[int, Any], path) -> None:
    _write_csv(path, MARKS_HEADER, [[t, format_number(m)] for t, m in sorted(marks.items())])


def write_team_stats(points: Iterable[tuple], path) -> None:
    """Plot data: one ``team,equity_mean,marks`` row per team."""
    _write_csv(path, TEAM_STATS_HEADER, [[t, format_number(e), format_number(m)] for t, e, m in points])


def read_team_stats(path) -> list[tuple[int, Fraction, Fraction]]:
    out = []
    for line, row in _read_csv(path, TEAM_STATS_HEADER):
        out.append((
            _parse_int(row["team"], "team", path, line),
            _parse_number(row["equity_mean"], "equity_mean", path, line),
            _parse_number(row["marks"], "marks", path, line),
        ))
    return out


# -- reports -----------------------------------------------------------------

def emit_report(sections: Mapping[str, Any], path) -> None:
    """Write a versioned JSON report; ``sections`` keep their insertion order."""
    write_json({"schema_version": REPORT_SCHEMA_VERSION, **sections}, path)


@dataclass
class RunRecord:
    """Everything needed to re-run a command and check its outputs."""

    command: str
    inputs: dict[str, str]
    parameters: dict[str, Any]
    rubric: Optional[dict] = None
    trace: dict[str, Any] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"))

    @classmethod
    def for_files(cls, command, inputs: Mapping[str, Any], **kwargs) -> "RunRecord":
        digests = {name: sha256_file(p) for name, p in inputs.items() if p is not None}
        return cls(command, digests, **kwargs)

    def add_output(self, name, path) -> None:
        self.outputs[name] = sha256_file(path)

    def write(self, path) -> None:
        write_json(asdict(self), path)
