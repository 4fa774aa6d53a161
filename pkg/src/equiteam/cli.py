"""Command-line entry point.

    equiteam score   --input responses.csv --output scores.csv
    equiteam form    --input responses.csv --output roster.csv --team-size 4
    equiteam analyze --input responses.csv --output report.json [--roster R] [--marks M]
    equiteam compare --input sem1.csv --input sem2.csv --output comparison.json

Each command also writes ``<output>.run.json`` describing the run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from equiteam import analytics
from equiteam import roster_io as rio
from equiteam.errors import DegenerateAxis, EquiteamError, FormatError
from equiteam.partition import balance_metrics, form_teams, random_assign
from equiteam.survey import DEFAULT_RUBRIC, ScoringRubric, score_cohort


def _team_size(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"team size must be an integer, got {text!r}") from None
    if value < 2:
        raise argparse.ArgumentTypeError(f"team size must be >= 2, got {value}")
    return value


def _sidecar(output, suffix) -> Path:
    out = Path(output)
    return out.with_name(out.name + suffix)


def _rubric(args) -> ScoringRubric:
    return ScoringRubric.from_json(args.rubric) if args.rubric else DEFAULT_RUBRIC


def _parameters(args) -> dict:
    skip = {"func", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _load_totals(args):
    """Totals by roll from either a responses file or a scores file."""
    if rio.sniff_kind(args.input) == "scores":
        return rio.read_scores(args.input), None
    resps = rio.load_responses(args.input, assume_lowest=args.assume_lowest, rubric=_rubric(args))
    scores = score_cohort(resps, _rubric(args))
    return {s.roll: s.total for s in scores}, resps


def _metrics_doc(result, team_size, baseline=None) -> dict:
    assign = result.assignment
    m = balance_metrics(assign)
    doc = {
        "schema_version": rio.REPORT_SCHEMA_VERSION,
        "team_size": team_size,
        "teams": [
            {"team": i, "size": len(t), "sum": s, "mean": mean}
            for i, (t, s, mean) in enumerate(zip(assign.teams, assign.sums, m.means), 1)
        ],
        "team_means": list(m.means),
        "variance": m.variance,
        "range_width": m.range_width,
        "initial_variance": result.variances[0],
        "swaps": len(result.swaps),
    }
    if baseline is not None:
        seed, base = baseline
        bm = balance_metrics(base)
        doc["random_baseline"] = {"seed": seed, "variance": bm.variance, "range_width": bm.range_width}
    return doc


def cmd_score(args) -> int:
    rubric = _rubric(args)
    resps = rio.load_responses(args.input, assume_lowest=args.assume_lowest, rubric=rubric)
    scores = score_cohort(resps, rubric)
    rio.write_scores(scores, args.output)
    record = rio.RunRecord.for_files(
        "score", {"input": args.input}, parameters=_parameters(args), rubric=rubric.to_dict()
    )
    record.add_output("scores", args.output)
    record.write(_sidecar(args.output, ".run.json"))
    opted = sum(s.opted_out for s in scores)
    print(f"scored {len(scores)} students ({opted} opted out) -> {args.output}")
    return 0


def cmd_form(args) -> int:
    totals, _ = _load_totals(args)
    result = form_teams(totals, args.team_size)
    baseline = None
    if args.seed is not None:
        baseline = (args.seed, random_assign(totals, args.team_size, args.seed))
    metrics_path = args.metrics or _sidecar(args.output, ".metrics.json")

    rio.write_roster(result.assignment, args.output)
    rio.write_json(_metrics_doc(result, args.team_size, baseline), metrics_path)

    record = rio.RunRecord.for_files(
        "form", {"input": args.input}, parameters=_parameters(args), rubric=_rubric(args).to_dict(),
        trace={"swaps": len(result.swaps), "variances": [float(v) for v in result.variances]},
    )
    record.add_output("roster", args.output)
    record.add_output("metrics", metrics_path)
    record.write(_sidecar(args.output, ".run.json"))

    m = balance_metrics(result.assignment)
    lo, hi = min(m.means), max(m.means)
    print(
        f"formed {len(result.assignment.teams)} teams; team means {rio.format_number(lo)}"
        f" to {rio.format_number(hi)} (range width {rio.format_number(m.range_width)},"
        f" {len(result.swaps)} swaps) -> {args.output}"
    )
    return 0


def _association_section(points):
    try:
        assoc = analytics.score_marks_association([(e, m) for _, e, m in points], [t for t, _, _ in points])
    except DegenerateAxis as exc:
        return {"degenerate": True, "reason": str(exc)}
    return {
        "degenerate": False,
        "correlation": assoc.correlation,
        "equity_median": assoc.equity_median,
        "marks_median": assoc.marks_median,
        "high_score_low_marks": list(assoc.high_score_low_marks),
        "low_score_high_marks": list(assoc.low_score_high_marks),
    }


def _five(summary):
    return {"min": summary.min, "q1": summary.q1, "median": summary.median, "q3": summary.q3, "max": summary.max}


def build_analysis(resps, scores, assign, marks=None, thresholds=analytics.DEFAULT_THRESHOLDS, rubric=DEFAULT_RUBRIC):
    """Report sections for a cohort, its teams and (optionally) per-team marks."""
    summary = analytics.category_counts(resps, rubric)
    bins = analytics.bin_scores(scores, thresholds)
    cross = analytics.readiness_cross_tab(resps, rubric)
    means = balance_metrics(assign).means

    sections = {
        "distributions": {
            "cohort_size": summary.size,
            "opt_outs": summary.opt_outs,
            "participating": summary.participating,
            "social": summary.social,
            "economic": summary.economic,
            "readiness": summary.readiness,
            "not_comfortable": {"total": summary.not_comfortable_total, **summary.not_comfortable},
            "score_bins": {"low_max": thresholds[0], "high_min": thresholds[1], "counts": bins},
        },
        "cross_tab": {
            level: {
                "total": row.total,
                "economic": {"counts": row.economic, "percent": row.percentages("economic")},
                "social": {"counts": row.social, "percent": row.percentages("social")},
            }
            for level, row in cross.items()
        },
        "box_summaries": {
            "teams": len(assign.teams),
            "equity_means": _five(analytics.five_number(means)),
            "equity_range_width": max(means) - min(means),
        },
    }
    points = None
    if marks is not None:
        points = [(t, means[t - 1], marks[t]) for t in range(1, len(assign.teams) + 1)]
        sections["box_summaries"]["marks"] = _five(analytics.five_number(marks.values()))
        sections["association"] = _association_section(points)
    return sections, points


def cmd_analyze(args) -> int:
    rubric = _rubric(args)
    thresholds = (args.low_max, args.high_min)
    resps = rio.load_responses(args.input, assume_lowest=args.assume_lowest, rubric=rubric)
    scores = score_cohort(resps, rubric)
    if args.roster:
        assign = rio.read_roster(args.roster, args.team_size)
        if set(assign.totals) != {s.roll for s in scores}:
            raise FormatError(f"{args.roster}: roster rolls do not match the responses in {args.input}")
    else:
        assign = form_teams(scores, args.team_size).assignment

    marks = None
    if args.marks:
        if not Path(args.marks).exists():
            raise FormatError(f"marks file {args.marks} not found; association needs per-team marks")
        marks = rio.read_marks(args.marks)
        expected = set(range(1, len(assign.teams) + 1))
        if set(marks) != expected:
            raise FormatError(f"{args.marks}: marks must list exactly teams 1..{len(assign.teams)}")

    sections, points = build_analysis(resps, scores, assign, marks, thresholds, rubric)
    rio.emit_report(sections, args.output)
    record = rio.RunRecord.for_files(
        "analyze", {"input": args.input, "roster": args.roster, "marks": args.marks},
        parameters=_parameters(args), rubric=rubric.to_dict(),
    )
    record.add_output("report", args.output)
    if args.plot_data:
        if points is None:
            raise FormatError("--plot-data needs --marks")
        rio.write_team_stats(points, args.plot_data)
        record.add_output("plot_data", args.plot_data)
    record.write(_sidecar(args.output, ".run.json"))
    print(f"analysed {len(resps)} students in {len(assign.teams)} teams -> {args.output}")
    return 0


def comparison_doc(report: analytics.ComparisonReport) -> dict:
    def cohort(name, equity, marks):
        return {"name": name, "equity": _five(equity), "equity_range_width": equity.range_width, "marks": _five(marks)}

    d = report.marks_deltas
    return {
        "cohorts": [
            cohort(report.name_a, report.equity_a, report.marks_a),
            cohort(report.name_b, report.equity_b, report.marks_b),
        ],
        "verdict": {"cohort": report.name_a, "balance": report.verdict},
        "deltas": {
            "equity_range_width": report.width_delta,
            "marks_median": d["median"],
            "marks_min": d["min"],
            "marks_max": d["max"],
        },
    }


def cmd_compare(args) -> int:
    if len(args.input) != 2:
        raise EquiteamError("compare needs exactly two --input team files")
    cohorts = []
    for path in args.input:
        points = rio.read_team_stats(path)
        if not points:
            raise analytics.EmptyInput(f"{path}: no teams")
        cohorts.append(analytics.CohortStats(Path(path).stem, [e for _, e, _ in points], [m for _, _, m in points]))
    report = analytics.compare_cohorts(*cohorts)
    rio.emit_report(comparison_doc(report), args.output)
    record = rio.RunRecord.for_files(
        "compare", {"a": args.input[0], "b": args.input[1]}, parameters=_parameters(args)
    )
    record.add_output("report", args.output)
    record.write(_sidecar(args.output, ".run.json"))
    print(
        f"{report.name_a} vs {report.name_b}: {report.name_a} {report.verdict.value} "
        f"(equity range width {rio.format_number(report.width_a)} vs {rio.format_number(report.width_b)})"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="equiteam", description="Equity-scored balanced team formation and cohort analytics.", formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, team_size=True, survey=True):
        p.add_argument("--output", required=True, type=Path, help="output file")
        if team_size:
            p.add_argument("--team-size", type=_team_size, default=4, help="target students per team")
        if survey:
            p.add_argument("--assume-lowest", action="store_true",
                           help="treat skipped answers as the lowest-scoring option")
            p.add_argument("--rubric", type=Path, default=None, help="JSON rubric overriding the default points")

    p = sub.add_parser("score", help="score survey responses", formatter_class=fmt)
    p.add_argument("--input", required=True, type=Path, help="responses CSV")
    common(p, team_size=False)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("form", help="form balanced teams", formatter_class=fmt)
    p.add_argument("--input", required=True, type=Path, help="responses CSV or scores CSV")
    common(p)
    p.add_argument("--seed", type=int, default=None, help="also report a seeded random baseline")
    p.add_argument("--metrics", type=Path, default=None, help="metrics JSON; None writes <output>.metrics.json")
    p.set_defaults(func=cmd_form)

    p = sub.add_parser("analyze", help="cohort analytics report", formatter_class=fmt)
    p.add_argument("--input", required=True, type=Path, help="responses CSV")
    common(p)
    p.add_argument("--roster", type=Path, default=None, help="roster CSV (default: form teams inline)")
    p.add_argument("--marks", type=Path, default=None, help="per-team marks CSV (team,marks)")
    p.add_argument("--low-max", type=int, default=analytics.DEFAULT_THRESHOLDS[0], help="highest Low score")
    p.add_argument("--high-min", type=int, default=analytics.DEFAULT_THRESHOLDS[1], help="lowest High score")
    p.add_argument("--plot-data", type=Path, default=None, help="write team,equity_mean,marks CSV")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="compare two team-formation regimes", formatter_class=fmt)
    p.add_argument("--input", required=True, type=Path, action="append",
                   help="team CSV (team,equity_mean,marks); give exactly twice")
    common(p, team_size=False, survey=False)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "low_max", None) is not None and args.low_max >= args.high_min:
        parser.error(f"--low-max ({args.low_max}) must be below --high-min ({args.high_min})")
    try:
        return args.func(args)
    except (EquiteamError, OSError) as exc:
        print(f"equiteam {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
