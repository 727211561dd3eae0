"""Command-line interface: one subcommand per pipeline stage.

Exit status 0 on success, 1 for usage errors, 2 for data errors. All
randomness is fixed by ``--seed``; identical arguments and inputs produce
byte-identical output files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .aggregate import build_panel, save_panel_csv, svd_aggregate
from .corpus import DatasetError, dataset_stats, load_dataset, save_dataset, validate
from .evaluate import AGGREGATE, CVConfig, cohesion_report, cross_validate
from .expand import expand_candidates
from .recommend import Ranking, rank
from .synth import PRESETS, generate, preset
from .views import CRITERIA, DEFAULT_CRITERIA, build_profile, build_view, tfidf


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _criteria_list(text: str) -> list[str]:
    if text == "all":
        return list(CRITERIA)
    tags = [t.strip() for t in text.split(",") if t.strip()]
    if not tags:
        raise argparse.ArgumentTypeError("empty criteria list")
    for tag in tags:
        if tag not in CRITERIA and tag != AGGREGATE:
            raise argparse.ArgumentTypeError(
                f"unknown criterion {tag!r}; expected {', '.join(CRITERIA)} or {AGGREGATE}"
            )
    return tags


def _k_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k list {text!r}") from None


def _signal_pair(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected tag=value, got {text!r}")
    tag, value = text.split("=", 1)
    try:
        return tag.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad signal value in {text!r}") from None


def _outfile(path: str | Path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    return out


def write_ranking_csv(ranking: Ranking, path: str | Path | None, top: int | None = None) -> None:
    records = ranking.to_records()
    if top is not None:
        records = records[:top]
    rows = [["rank", "user_id", "score"]] + [[r, u, repr(s)] for r, u, s in records]
    if path is None:
        writer = csv.writer(sys.stdout)
        writer.writerows(rows)
    else:
        with _outfile(path).open("w", encoding="utf-8", newline="") as fh:
            csv.writer(fh).writerows(rows)


def cmd_validate(args) -> int:
    dataset = load_dataset(args.data, check=False)
    problems = validate(dataset)
    if problems:
        for problem in problems:
            print(problem)
        return 2
    stats = dataset_stats(dataset)
    print(json.dumps(stats, indent=2, sort_keys=True))
    return 0


def cmd_expand(args) -> int:
    dataset = load_dataset(args.data)
    candidates = expand_candidates(
        dataset.edges("follow"),
        dataset.seed_ids,
        max_candidates=args.max_candidates,
        min_in_degree=args.min_in_degree,
    )
    text = "".join(f"{u}\n" for u in candidates)
    if args.out:
        _outfile(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_profiles(args) -> int:
    dataset = load_dataset(args.data)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for tag in args.criteria:
        if tag == AGGREGATE:
            continue
        profile = build_profile(dataset, tag) if args.raw else build_view(dataset, tag)
        profile.to_triplets(out_dir / f"{tag}.tsv")
        print(f"{tag}: {len(profile.users)} users x {len(profile.space)} features")
    return 0


def cmd_recommend(args) -> int:
    dataset = load_dataset(args.data)
    view = build_view(dataset, args.criterion)
    ranking = rank(view, dataset.seed_ids, dataset.non_seed_ids)
    write_ranking_csv(ranking, args.out, top=args.top)
    return 0


def cmd_aggregate(args) -> int:
    dataset = load_dataset(args.data)
    base = [t for t in args.criteria if t != AGGREGATE]
    rankings = [
        rank(build_view(dataset, tag), dataset.seed_ids, dataset.non_seed_ids, criterion=tag)
        for tag in base
    ]
    panel = build_panel(rankings)
    aggregate = svd_aggregate(panel)
    if aggregate.degenerate:
        print("warning: degenerate panel, fell back to mean-score ranking", file=sys.stderr)
    if args.panel_out:
        save_panel_csv(panel, _outfile(args.panel_out))
    write_ranking_csv(aggregate, args.out, top=args.top)
    return 0


def cmd_evaluate(args) -> int:
    dataset = load_dataset(args.data)
    criteria = list(args.criteria)
    if args.aggregate and AGGREGATE not in criteria:
        criteria.append(AGGREGATE)
    cfg = CVConfig(runs=args.runs, k_values=args.k, rng_seed=args.seed)
    report = cross_validate(
        dataset, criteria, cfg, n_jobs=args.jobs, label=Path(args.data).name
    )
    out = _outfile(args.out)
    report.write_json(out.with_suffix(".json"))
    report.write_csv(out.with_suffix(".csv"))
    report.write_long_csv(out.with_suffix(".long.csv"))
    best = max(report.criteria, key=lambda c: report.mean_precision[c][report.k_values[0]])
    print(
        f"{report.dataset}: {report.runs} runs x {report.folds} folds; "
        f"best precision@{report.k_values[0]}: {best} "
        f"({report.mean_precision[best][report.k_values[0]]:.3f})"
    )
    return 0


def cmd_cohesion(args) -> int:
    dataset = load_dataset(args.data)
    criteria = [t for t in args.criteria if t != AGGREGATE]
    report = cohesion_report(
        dataset,
        criteria,
        randomizations=args.randomizations,
        rng_seed=args.seed,
        label=Path(args.data).name,
    )
    if args.out:
        out = _outfile(args.out)
        report.write_json(out.with_suffix(".json"))
        report.write_csv(out.with_suffix(".csv"))
    for entry in report.entries:
        print(
            f"{entry.criterion}: raw={entry.raw:.4f} expected={entry.expected:.4f} "
            f"corrected={entry.corrected:.4f}"
        )
    return 0


def cmd_synth(args) -> int:
    overrides = {}
    for name in ("n_seed", "n_noise", "tweets_per_user", "vocab_size", "marker_terms", "list_count"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    cfg = preset(
        args.preset,
        rng_seed=args.seed,
        signal_strength=dict(args.signal or []),
        **overrides,
    )
    dataset = generate(cfg)
    save_dataset(dataset, args.out)
    print(f"wrote {len(dataset.users)} users ({len(dataset.seed_ids)} seeds) to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_engine

    engine = load_engine(args.data_root, store_dir=args.store)
    app = create_app(engine, token=args.token)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="listcurator", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[], help="validate a dataset bundle")
    p.add_argument("--data", required=True, help="dataset bundle directory")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("expand", help="expand the candidate pool from the follower graph")
    p.add_argument("--data", required=True)
    p.add_argument("--max-candidates", type=int, default=1000)
    p.add_argument("--min-in-degree", type=int, default=2)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_expand)

    p = sub.add_parser("profiles", help="export profile matrices as sparse triplets")
    p.add_argument("--data", required=True)
    p.add_argument("--criteria", type=_criteria_list, default=list(CRITERIA))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--raw", action="store_true", help="skip tf-idf weighting")
    p.set_defaults(handler=cmd_profiles)

    p = sub.add_parser("recommend", help="rank non-seed users under one criterion")
    p.add_argument("--data", required=True)
    p.add_argument("--criterion", choices=CRITERIA, required=True)
    p.add_argument("--top", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_recommend)

    p = sub.add_parser("aggregate", help="rank non-seed users by SVD aggregation")
    p.add_argument("--data", required=True)
    p.add_argument("--criteria", type=_criteria_list, default=list(DEFAULT_CRITERIA))
    p.add_argument("--top", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--panel-out", default=None)
    p.set_defaults(handler=cmd_aggregate)

    p = sub.add_parser("evaluate", help="repeated k-fold cross-validation")
    p.add_argument("--data", required=True)
    p.add_argument("--criteria", type=_criteria_list, default=list(DEFAULT_CRITERIA))
    p.add_argument("--aggregate", action="store_true", help="also evaluate the SVD aggregate")
    p.add_argument("--runs", type=int, default=250)
    p.add_argument("--k", type=_k_list, default=(10, 20, 30, 40, 50))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("cohesion", help="chance-corrected seed cohesion per criterion")
    p.add_argument("--data", required=True)
    p.add_argument("--criteria", type=_criteria_list, default=list(CRITERIA))
    p.add_argument("--randomizations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_cohesion)

    p = sub.add_parser("synth", help="generate a synthetic dataset bundle")
    p.add_argument("--preset", choices=sorted(PRESETS), default="table1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output bundle directory")
    p.add_argument("--signal", type=_signal_pair, action="append",
                   help="criterion=strength, repeatable")
    for name in ("n-seed", "n-noise", "tweets-per-user", "vocab-size", "marker-terms", "list-count"):
        p.add_argument(f"--{name}", type=int, default=None, dest=name.replace("-", "_"))
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("serve", help="run the HTTP curation service")
    p.add_argument("--data-root", required=True, help="directory of dataset bundles")
    p.add_argument("--store", default=None, help="session log directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--token", default=None, help="static auth token")
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
