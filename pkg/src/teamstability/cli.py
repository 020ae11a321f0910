"""Command-line entry point.

Subcommands::

    teamstab ingest    --team-list TeamList.csv --scores Score.csv -o cohort.json
    teamstab compute   cohort.json -o FinalResults.csv
    teamstab regress   FinalResults.csv [--features extra.csv ...]
    teamstab simulate  --policy churn --churn-rate 0.3 --seed 7 --out-dir run/
    teamstab report    cohort.json

Exit codes: 0 success, 1 parse/I-O/configuration error, 2 consistency
error in the records, 3 rank-deficient regression design.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from statistics import fmean

from teamstability import ingest, network, stability, stats, synth

EXIT_OK, EXIT_PARSE, EXIT_CONSISTENCY, EXIT_SINGULAR = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"teamstab: {msg}", file=sys.stderr)


def _courses(args) -> list[str]:
    if args.courses_file:
        lines = Path(args.courses_file).read_text(encoding="utf-8").splitlines()
        return [ln.strip() for ln in lines if ln.strip()]
    if args.courses:
        return [c.strip() for c in args.courses.split(",") if c.strip()]
    return list(ingest.DEFAULT_COURSES)


def _damping(args) -> stability.DampingConfig:
    return stability.DampingConfig(args.delta)


def cmd_ingest(args) -> int:
    cohort, diagnostics = ingest.ingest_files(
        args.team_list, args.scores, _courses(args), delimiter=args.delimiter
    )
    for d in diagnostics:
        print(d, file=sys.stderr)
    if args.output:
        ingest.write_cohort(cohort, args.output)
    else:
        sys.stdout.write(json.dumps(ingest.cohort_to_dict(cohort), indent=2) + "\n")
    return EXIT_OK


def cmd_compute(args) -> int:
    config = _damping(args)
    cohort = ingest.read_cohort(args.cohort)
    if args.edges:
        network.write_edge_list(network.cooperation_counts(cohort), args.edges, args.delimiter)
    if args.format == "json":
        text = json.dumps(stability.report_dict(cohort, config), indent=2) + "\n"
        _emit(text, args.output)
        return EXIT_OK
    precision = None if args.full_precision else args.precision
    rows = stability.final_results(cohort, config)
    _emit(stability.format_final_results(rows, precision, args.delimiter), args.output)
    return EXIT_OK


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_features(path: str, delimiter: str) -> dict[str, dict[str, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        if not reader.fieldnames or reader.fieldnames[0] != "StudentNo":
            raise ingest.ParseError(f"{path}: first column must be StudentNo", row=1)
        out = {}
        for rowno, row in enumerate(reader, start=2):
            try:
                out[row["StudentNo"].strip()] = {
                    k: float(v) for k, v in row.items() if k != "StudentNo"
                }
            except (TypeError, ValueError):
                raise ingest.ParseError(f"{path}: non-numeric feature", row=rowno) from None
    return out


def regression_input(
    rows: list[stability.StabilityRow], features: list[dict[str, dict[str, float]]]
) -> stats.RegressionInput:
    """Mean score on S plus any extra feature columns, joined on StudentNo."""
    usable = [r for r in rows if r.mean_score is not None]
    usable = [r for r in usable if all(r.student in f for f in features)]
    columns: list[tuple[str, list[float]]] = [("S", [r.S for r in usable])]
    for f in features:
        names = list(next(iter(f.values()), {}))
        for name in names:
            columns.append((name, [f[r.student][name] for r in usable]))
    return stats.RegressionInput([r.mean_score for r in usable], columns)


def cmd_regress(args) -> int:
    rows = stability.read_final_results(args.results, args.delimiter)
    features = [_read_features(p, args.delimiter) for p in args.features]
    data = regression_input(rows, features)
    result = stats.multivariate_fit(data) if features else stats.ols_fit(data)
    if args.format == "json":
        sys.stdout.write(result.to_json() + "\n")
    else:
        print(result.format_table())
    if args.output:
        Path(args.output).write_text(result.to_json() + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _damping(args)
    lo, hi = args.team_size
    means, lows, highs, slopes, pvals = [], [], [], [], []
    for k in range(args.replicates):
        policy = synth.TeamingPolicy(
            kind=args.policy,
            n_students=args.n,
            m_activities=args.m,
            team_size=(lo, hi),
            churn_rate=args.churn_rate,
            seed=args.seed + k,
        )
        model = synth.ScoreModel(args.base, args.coeff, args.noise_sd, seed=args.seed + k)
        run = synth.simulate(policy, model, config)
        s = list(run.stability.values())
        means.append(fmean(s))
        lows.append(min(s))
        highs.append(max(s))
        if args.fit:
            fit = run.fit(config)
            slopes.append(fit.coefficients["S"])
            pvals.append(fit.p_values["S"])
        if k == 0 and args.out_dir:
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            ingest.write_cohort(run.cohort, out / "cohort.json")
            ingest.write_team_list(run.cohort, out / "TeamList.csv")
            ingest.write_scores(run.cohort, out / "Score.csv")
            (out / "courses.txt").write_text(
                "\n".join(a.label for a in run.cohort.activities) + "\n", encoding="utf-8"
            )
        if run.n_clamped:
            _err(f"seed {args.seed + k}: {run.n_clamped} scores clamped to [0, 100]")

    label = args.policy if args.policy != "churn" else f"churn({args.churn_rate:g})"
    print(f"policy       {label}")
    print(f"replicates   {args.replicates}")
    print(f"mean S       {fmean(means):.6f}")
    print(f"min S        {min(lows):.6f}")
    print(f"max S        {max(highs):.6f}")
    if args.fit:
        print(f"mean slope   {fmean(slopes):.6f}")
        print(f"share p<.05  {sum(p < 0.05 for p in pvals) / len(pvals):.3f}")
    return EXIT_OK


def cmd_report(args) -> int:
    config = _damping(args)
    cohort = ingest.read_cohort(args.cohort)
    rows = stability.final_results(cohort, config)
    sys.stdout.write(stability.format_final_results(rows, args.precision))
    print()
    result = stats.ols_fit(regression_input(rows, []))
    print(result.format_table())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teamstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--delimiter", default=",")
    common.add_argument("-o", "--output")

    damping = argparse.ArgumentParser(add_help=False)
    damping.add_argument("--delta", type=float, default=math.exp(-1.0),
                         help="per-activity damping factor in (0, 1], default 1/e")

    p = sub.add_parser("ingest", parents=[common], help="TeamList + Score tables -> cohort.json")
    p.add_argument("--team-list", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--courses", help="comma-separated course order, first course taken first")
    p.add_argument("--courses-file", help="file with one course name per line, in order")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("compute", parents=[common, damping], help="cohort.json -> FinalResults")
    p.add_argument("cohort")
    p.add_argument("--precision", type=int, default=2)
    p.add_argument("--full-precision", action="store_true")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--edges", help="also write the pairwise edge list (i, j, c_ij, R_ij)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("regress", parents=[common], help="regress MeanScore on S (+ features)")
    p.add_argument("results")
    p.add_argument("--features", nargs="*", default=[],
                   help="CSV files keyed by StudentNo with extra numeric columns")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("simulate", parents=[damping], help="synthetic cohorts under a teaming policy")
    p.add_argument("--policy", choices=synth.POLICIES, default="random_each_activity")
    p.add_argument("--churn-rate", type=float, default=0.0)
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--team-size", type=int, nargs=2, default=(3, 5), metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--base", type=float, default=82.114)
    p.add_argument("--coeff", type=float, default=0.502)
    p.add_argument("--noise-sd", type=float, default=0.0)
    p.add_argument("--fit", action="store_true", help="also regress mean score on S")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", parents=[damping], help="FinalResults and regression table")
    p.add_argument("cohort")
    p.add_argument("--precision", type=int, default=2)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ingest.ConsistencyError as exc:
        _err(str(exc))
        return EXIT_CONSISTENCY
    except stats.SingularDesignError as exc:
        _err(str(exc))
        return EXIT_SINGULAR
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
