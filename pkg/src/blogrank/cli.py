"""Command-line pipeline: synth, rank, compare, stats, validate.

Every run that ranks writes a manifest recording inputs, the full config,
per-slot entity counts and convergence, and wall clock per stage, so a
run can be audited and reproduced. Exit codes: 0 success, 1 input error,
2 config error, 3 non-convergence under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import numpy as np

from .errors import BlogrankError, ConfigError, ConvergenceError, DatasetError
from .influence import IFinderRanker, PostInfluenceRanker
from .io import BLOGGERS_FILE, COMMENTS_FILE, POSTS_FILE, load_dataset, write_dataset
from .links import resolve_links
from .metrics import compare_rankings, frequency_ranking
from .model import Ranking
from .reports import (
    SERIES_MEASURES,
    cross_slot_comment_count,
    link_funnel,
    rows_to_tsv,
    self_comment_leaderboard,
    self_link_leaderboard,
    slot_series,
)
from .slots import analyzed_slots, slice_into_slots, slot_view
from .synth import SynthConfig, make_dataset

__all__ = [
    "main",
    "run_synth",
    "run_rank",
    "run_compare",
    "run_stats",
    "run_validate",
]


def _fmt_score(value: float) -> str:
    """Full-precision fixed decimal (never scientific notation)."""
    return np.format_float_positional(float(value), unique=True, trim="0")


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _now_utc() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# ---------------------------------------------------------------- synth


def run_synth(cfg: SynthConfig, output_dir: str) -> dict:
    t0 = time.perf_counter()
    dataset = make_dataset(cfg)
    t1 = time.perf_counter()
    write_dataset(dataset, output_dir)
    t2 = time.perf_counter()
    summary = {
        "bloggers": len(dataset.bloggers),
        "posts": len(dataset.posts),
        "comments": len(dataset.comments),
        "output": output_dir,
        "wall_ms": {
            "generate": round((t1 - t0) * 1000, 3),
            "write": round((t2 - t1) * 1000, 3),
        },
    }
    return summary


# ----------------------------------------------------------------- rank

RANKINGS_FILE = "rankings_{method}.tsv"
MANIFEST_FILE = "manifest_{method}.json"


def _rank_slot(dataset, slot, method, resolution, params, attribution):
    started = time.perf_counter()
    view = slot_view(dataset, slot, comment_attribution=attribution)
    record = {
        "slot_index": slot.index,
        "start": slot.start.isoformat(),
        "end": slot.end.isoformat(),
        "partial": slot.partial,
        "n_posts": len(view.posts),
        "n_comments": len(view.comments),
        "n_bloggers": len(view.bloggers),
    }
    if not view.posts:
        ranking = Ranking(())
        record.update(
            {"matrix_dim": 0, "iterations": 0, "converged": True, "similarity": 1.0}
        )
    elif method == "ifinder":
        est = IFinderRanker(
            w_in=params["w_in"],
            w_out=params["w_out"],
            w_c=params["w_c"],
            tau=params["tau"],
            max_iter=params["max_iter"],
            init_value=params["init_value"],
            aggregate=params["aggregate"],
        ).fit(view, resolution)
        ranking = est.ranking_
        record.update(
            {
                "matrix_dim": est.matrix_dim_,
                "iterations": est.n_iter_,
                "converged": est.converged_,
                "similarity": est.post_influence_.final_similarity,
            }
        )
    else:
        est = PostInfluenceRanker(
            w=params["w"],
            tau=params["tau"],
            max_iter=params["max_iter"],
            init_value=params["init_value"],
        ).fit(view)
        ranking = est.ranking_
        record.update(
            {
                "matrix_dim": est.matrix_dim_,
                "iterations": est.n_iter_,
                "converged": est.converged_,
                "similarity": est.influence_.final_similarity,
            }
        )
    record["wall_ms"] = round((time.perf_counter() - started) * 1000, 3)
    return record, ranking


def run_rank(
    input_dir: str,
    output_dir: str,
    method: str,
    k: int = 15,
    w_in: float = 1.0,
    w_out: float = 1.0,
    w_c: float = 1.0,
    w: float = 0.85,
    tau: float = 1e-8,
    max_iter: int = 100,
    init_value: float = 0.5,
    aggregate: str = "avg",
    exclude_partial: bool = True,
    workers: int = 1,
    source_host: str | None = None,
    comment_attribution: str = "slot_local",
    strict: bool = False,
) -> dict:
    """Rank every analyzed slot of a dataset with one method and write the
    rankings file plus a run manifest. Returns the manifest."""
    if method not in ("ifinder", "pinf"):
        raise ConfigError(f"unknown method {method!r}")
    if k < 1:
        raise ConfigError("k must be >= 1")
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    stage_ms = {}

    t0 = time.perf_counter()
    dataset = load_dataset(input_dir, source_host=source_host)
    stage_ms["load"] = round((time.perf_counter() - t0) * 1000, 3)

    t0 = time.perf_counter()
    resolution = resolve_links(dataset) if method == "ifinder" else None
    stage_ms["resolve_links"] = round((time.perf_counter() - t0) * 1000, 3)

    slots = slice_into_slots(dataset)
    analyzed = analyzed_slots(slots, exclude_partial)
    params = {
        "w_in": w_in,
        "w_out": w_out,
        "w_c": w_c,
        "w": w,
        "tau": tau,
        "max_iter": max_iter,
        "init_value": init_value,
        "aggregate": aggregate,
    }

    t0 = time.perf_counter()
    if workers == 1:
        results = [
            _rank_slot(dataset, slot, method, resolution, params, comment_attribution)
            for slot in analyzed
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda s: _rank_slot(
                        dataset, s, method, resolution, params, comment_attribution
                    ),
                    analyzed,
                )
            )
    stage_ms["rank"] = round((time.perf_counter() - t0) * 1000, 3)

    t0 = time.perf_counter()
    os.makedirs(output_dir, exist_ok=True)
    rankings_path = os.path.join(output_dir, RANKINGS_FILE.format(method=method))
    rows = []
    for (record, ranking), slot in zip(results, analyzed):
        top = ranking.top(k)
        for position, blogger_id in enumerate(top.ids, start=1):
            score = top.scores[position - 1] if top.scores else float("nan")
            rows.append((slot.index, position, blogger_id, _fmt_score(score)))
    _write(rankings_path, rows_to_tsv(("slot_index", "rank", "blogger_id", "score"), rows))
    stage_ms["write"] = round((time.perf_counter() - t0) * 1000, 3)

    manifest = {
        "command": "rank",
        "created_utc": _now_utc(),
        "method": method,
        "inputs": {
            "directory": os.path.abspath(input_dir),
            "files": [BLOGGERS_FILE, POSTS_FILE, COMMENTS_FILE],
            "source_host": dataset.source_host,
        },
        "config": {
            "k": k,
            "exclude_partial": exclude_partial,
            "workers": workers,
            "comment_attribution": comment_attribution,
            "strict": strict,
            **(
                {
                    "w_in": w_in,
                    "w_out": w_out,
                    "w_c": w_c,
                    "aggregate": aggregate,
                }
                if method == "ifinder"
                else {"w": w}
            ),
            "tau": tau,
            "max_iter": max_iter,
            "init_value": init_value,
        },
        "slot_count": len(slots),
        "analyzed_slot_count": len(analyzed),
        "dataset": {
            "bloggers": len(dataset.bloggers),
            "posts": len(dataset.posts),
            "comments": len(dataset.comments),
            "validation_warnings": len(dataset.warnings),
        },
        "per_slot": [record for record, _ in results],
        "outputs": {"rankings": os.path.abspath(rankings_path)},
        "wall_ms": stage_ms,
    }
    manifest_path = os.path.join(output_dir, MANIFEST_FILE.format(method=method))
    _write(manifest_path, json.dumps(manifest, indent=2) + "\n")

    not_converged = [
        r["slot_index"] for r, _ in results if r["n_posts"] > 0 and not r["converged"]
    ]
    if strict and not_converged:
        raise ConvergenceError(
            f"iteration did not converge in slots {not_converged} "
            f"(max_iter={max_iter}, tau={tau})"
        )
    return manifest


# --------------------------------------------------------------- compare


def _read_rankings(path: str) -> dict[int, Ranking]:
    """Read a rankings TSV back into per-slot rankings."""
    per_slot: dict[int, list[tuple[int, str, float]]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        expected = ["slot_index", "rank", "blogger_id", "score"]
        if header != expected:
            raise DatasetError(f"{path}: expected header {expected}, got {header}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise DatasetError(f"{path}:{lineno}: expected 4 columns")
            slot_index, rank, blogger_id, score = parts
            per_slot.setdefault(int(slot_index), []).append(
                (int(rank), blogger_id, float(score))
            )
    rankings = {}
    for slot_index, entries in per_slot.items():
        entries.sort()
        rankings[slot_index] = Ranking(
            tuple(e[1] for e in entries), tuple(e[2] for e in entries)
        )
    return rankings


def run_compare(
    rankings_a_path: str,
    rankings_b_path: str,
    output_dir: str,
    k: int = 15,
    p: float = 0.85,
) -> dict:
    """Compare two per-slot ranking files: a per-slot metric series, both
    top-k frequency rankings, and a summary comparing those frequency
    rankings. Returns the summary as a dict."""
    if not (0.0 < p < 1.0):
        raise ConfigError("p must lie strictly between 0 and 1")
    if k < 1:
        raise ConfigError("k must be >= 1")
    rankings_a = _read_rankings(rankings_a_path)
    rankings_b = _read_rankings(rankings_b_path)
    if set(rankings_a) != set(rankings_b):
        only_a = sorted(set(rankings_a) - set(rankings_b))
        only_b = sorted(set(rankings_b) - set(rankings_a))
        raise DatasetError(
            f"ranking files cover different slots (only in a: {only_a}, "
            f"only in b: {only_b})"
        )
    slot_indexes = sorted(rankings_a)

    os.makedirs(output_dir, exist_ok=True)
    series_rows = []
    for slot_index in slot_indexes:
        comparison = compare_rankings(
            rankings_a[slot_index], rankings_b[slot_index], k=k, p=p
        )
        series_rows.append(
            (
                slot_index,
                comparison.depth,
                comparison.overlap,
                _fmt_score(comparison.overlap_fraction),
                _fmt_score(comparison.average_overlap),
                _fmt_score(comparison.rbo),
            )
        )
    _write(
        os.path.join(output_dir, "comparison_series.tsv"),
        rows_to_tsv(
            ("slot_index", "depth", "overlap", "overlap_fraction", "average_overlap", "rbo"),
            series_rows,
        ),
    )

    freq_a = frequency_ranking([rankings_a[i] for i in slot_indexes], k=k)
    freq_b = frequency_ranking([rankings_b[i] for i in slot_indexes], k=k)
    for name, freq in (("frequency_a.tsv", freq_a), ("frequency_b.tsv", freq_b)):
        _write(
            os.path.join(output_dir, name),
            rows_to_tsv(("blogger_id", "slots_in_top_k"), freq.entries),
        )

    summary_cmp = compare_rankings(freq_a.ids(), freq_b.ids(), k=k, p=p)
    summary_rows = [
        ("depth", summary_cmp.depth),
        ("overlap", summary_cmp.overlap),
        ("overlap_fraction", _fmt_score(summary_cmp.overlap_fraction)),
        ("average_overlap", _fmt_score(summary_cmp.average_overlap)),
        ("rank_biased_overlap", _fmt_score(summary_cmp.rbo)),
        ("p", _fmt_score(p)),
        ("slots_compared", len(slot_indexes)),
    ]
    _write(
        os.path.join(output_dir, "comparison_summary.tsv"),
        rows_to_tsv(("metric", "value"), summary_rows),
    )
    return {
        "slots_compared": len(slot_indexes),
        "summary": {
            "depth": summary_cmp.depth,
            "overlap": summary_cmp.overlap,
            "overlap_fraction": summary_cmp.overlap_fraction,
            "average_overlap": summary_cmp.average_overlap,
            "rank_biased_overlap": summary_cmp.rbo,
            "p": p,
        },
        "outputs": {
            "series": os.path.join(output_dir, "comparison_series.tsv"),
            "summary": os.path.join(output_dir, "comparison_summary.tsv"),
            "frequency_a": os.path.join(output_dir, "frequency_a.tsv"),
            "frequency_b": os.path.join(output_dir, "frequency_b.tsv"),
        },
    }


# ----------------------------------------------------------------- stats


def run_stats(
    input_dir: str,
    output_dir: str,
    k: int = 10,
    exclude_partial: bool = True,
    source_host: str | None = None,
) -> dict:
    """Emit the full descriptive-statistics bundle for a dataset."""
    dataset = load_dataset(input_dir, source_host=source_host)
    resolution = resolve_links(dataset)
    slots = slice_into_slots(dataset)
    os.makedirs(output_dir, exist_ok=True)

    funnel = link_funnel(dataset, resolution)
    _write(
        os.path.join(output_dir, "link_funnel.tsv"),
        rows_to_tsv(("stage", "count"), funnel.as_rows()),
    )

    self_links = self_link_leaderboard(dataset, resolution, k=k)
    self_comments = self_comment_leaderboard(dataset, k=k)
    for name, rows in (
        ("self_links.tsv", self_links),
        ("self_comments.tsv", self_comments),
    ):
        _write(
            os.path.join(output_dir, name),
            rows_to_tsv(
                ("blogger_id", "total", "self", "self_fraction"),
                [
                    (r.blogger_id, r.total, r.self_count, _fmt_score(r.self_fraction))
                    for r in rows
                ],
            ),
        )

    series_data = {}
    for measure in SERIES_MEASURES:
        points = slot_series(
            dataset, slots, measure, resolution=resolution, exclude_partial=exclude_partial
        )
        series_data[measure] = points
        _write(
            os.path.join(output_dir, f"series_{measure}.tsv"),
            rows_to_tsv(
                ("slot_index", "value", "degenerate"),
                [
                    (pt.slot_index, _fmt_score(pt.value), str(pt.degenerate).lower())
                    for pt in points
                ],
            ),
        )

    summary = {
        "dataset": {
            "bloggers": len(dataset.bloggers),
            "posts": len(dataset.posts),
            "comments": len(dataset.comments),
            "validation_warnings": list(dataset.warnings),
        },
        "slots": {
            "total": len(slots),
            "analyzed": len(analyzed_slots(slots, exclude_partial)),
        },
        "link_funnel": dict(funnel.as_rows()),
        "link_funnel_percentages": funnel.percentages(),
        "cross_slot_comments": cross_slot_comment_count(dataset, slots),
        "self_links": [
            {
                "blogger_id": r.blogger_id,
                "total": r.total,
                "self": r.self_count,
                "self_fraction": r.self_fraction,
            }
            for r in self_links
        ],
        "self_comments": [
            {
                "blogger_id": r.blogger_id,
                "total": r.total,
                "self": r.self_count,
                "self_fraction": r.self_fraction,
            }
            for r in self_comments
        ],
        "series": {
            measure: [
                {"slot_index": pt.slot_index, "value": pt.value, "degenerate": pt.degenerate}
                for pt in points
            ]
            for measure, points in series_data.items()
        },
    }
    _write(os.path.join(output_dir, "stats.json"), json.dumps(summary, indent=2) + "\n")
    return summary


# -------------------------------------------------------------- validate


def run_validate(input_dir: str, source_host: str | None = None) -> dict:
    """Load and validate a dataset, returning counts and warnings."""
    dataset = load_dataset(input_dir, source_host=source_host)
    slots = slice_into_slots(dataset)
    return {
        "valid": True,
        "bloggers": len(dataset.bloggers),
        "posts": len(dataset.posts),
        "comments": len(dataset.comments),
        "slots": len(slots),
        "partial_slots": sum(1 for s in slots if s.partial),
        "warnings": list(dataset.warnings),
    }


# ------------------------------------------------------------------ CLI


def _parse_planted(text: str) -> tuple[tuple[int, float], ...]:
    planted = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            index, _, mult = chunk.partition(":")
            planted.append((int(index), float(mult or "1")))
        except ValueError:
            raise ConfigError(
                f"planted influencer {chunk!r} is not INDEX:MULTIPLIER"
            ) from None
    return tuple(planted)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blogrank",
        description=(
            "Rank influential bloggers per monthly time slot with a "
            "post-link method (ifinder) and a comment-based method (pinf), "
            "and compare the resulting rankings."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="generate a seeded synthetic dataset")
    synth.add_argument("--output", required=True, help="dataset directory to write")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--months", type=int, default=12)
    synth.add_argument("--bloggers", type=int, default=50)
    synth.add_argument("--commenters-per-blogger", type=float, default=2.0)
    synth.add_argument("--posts-mean", type=float, default=5.0,
                       help="mean posts per blogger per month")
    synth.add_argument("--activity-exponent", type=float, default=2.0,
                       help="power-law tail exponent of posting activity")
    synth.add_argument("--comment-rate", type=float, default=5.0)
    synth.add_argument("--self-comment-fraction", type=float, default=0.15)
    synth.add_argument("--links-per-post", type=float, default=1.0)
    synth.add_argument("--internal-link-fraction", type=float, default=0.2)
    synth.add_argument("--self-link-fraction", type=float, default=0.3)
    synth.add_argument("--planted", type=str, default="",
                       help="planted influencers as INDEX:MULT[,INDEX:MULT...]")
    synth.add_argument("--source-host", type=str, default="blog.example")
    synth.add_argument("--start-year", type=int, default=2008)
    synth.add_argument("--start-month", type=int, default=1)

    rank = sub.add_parser("rank", help="rank bloggers per slot with one method")
    rank.add_argument("--input", required=True, help="dataset directory")
    rank.add_argument("--output", required=True, help="output directory")
    rank.add_argument("--method", required=True, choices=("ifinder", "pinf"))
    rank.add_argument("--k", type=int, default=15, help="ranking depth to keep")
    rank.add_argument("--w-in", type=float, default=1.0)
    rank.add_argument("--w-out", type=float, default=1.0)
    rank.add_argument("--w-c", type=float, default=1.0)
    rank.add_argument("--w", type=float, default=0.85)
    rank.add_argument("--tau", type=float, default=1e-8)
    rank.add_argument("--max-iter", type=int, default=100)
    rank.add_argument("--init", type=float, default=0.5)
    rank.add_argument("--aggregate", choices=("avg", "max"), default="avg")
    rank.add_argument("--comment-attribution", choices=("slot_local", "post_slot"),
                      default="slot_local")
    rank.add_argument("--strict", action="store_true",
                      help="exit 3 if any slot fails to converge")
    _common_flags(rank)

    compare = sub.add_parser("compare", help="compare two ranking runs")
    compare.add_argument("--a", required=True, help="rankings file of method A")
    compare.add_argument("--b", required=True, help="rankings file of method B")
    compare.add_argument("--output", required=True)
    compare.add_argument("--k", type=int, default=15)
    compare.add_argument("--p", type=float, default=0.85)

    stats = sub.add_parser("stats", help="descriptive statistics reports")
    stats.add_argument("--input", required=True)
    stats.add_argument("--output", required=True)
    stats.add_argument("--k", type=int, default=10, help="leaderboard depth")
    _common_flags(stats)

    validate = sub.add_parser("validate", help="validate a dataset directory")
    validate.add_argument("--input", required=True)
    validate.add_argument("--source-host", type=str, default=None)

    return parser


def _common_flags(sub_parser) -> None:
    sub_parser.add_argument(
        "--slots-exclude-partial",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="drop the trailing partial slot from analysis (default: on)",
    )
    sub_parser.add_argument("--workers", type=int, default=1)
    sub_parser.add_argument("--source-host", type=str, default=None,
                            help="override the portal host from meta.rec")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            cfg = SynthConfig(
                seed=args.seed,
                months=args.months,
                bloggers=args.bloggers,
                commenters_per_blogger=args.commenters_per_blogger,
                posts_per_blogger_per_month=args.posts_mean,
                activity_exponent=args.activity_exponent,
                comment_rate=args.comment_rate,
                self_comment_fraction=args.self_comment_fraction,
                links_per_post=args.links_per_post,
                internal_link_fraction=args.internal_link_fraction,
                self_link_fraction=args.self_link_fraction,
                planted_influencers=_parse_planted(args.planted),
                source_host=args.source_host,
                start_year=args.start_year,
                start_month=args.start_month,
            )
            summary = run_synth(cfg, args.output)
            print(
                f"wrote {summary['bloggers']} bloggers, {summary['posts']} posts, "
                f"{summary['comments']} comments to {summary['output']}"
            )
        elif args.command == "rank":
            manifest = run_rank(
                args.input,
                args.output,
                args.method,
                k=args.k,
                w_in=args.w_in,
                w_out=args.w_out,
                w_c=args.w_c,
                w=args.w,
                tau=args.tau,
                max_iter=args.max_iter,
                init_value=args.init,
                aggregate=args.aggregate,
                exclude_partial=args.slots_exclude_partial,
                workers=args.workers,
                source_host=args.source_host,
                comment_attribution=args.comment_attribution,
                strict=args.strict,
            )
            converged = sum(1 for r in manifest["per_slot"] if r["converged"])
            print(
                f"ranked {manifest['analyzed_slot_count']} slots with "
                f"{args.method} ({converged} converged); rankings in "
                f"{manifest['outputs']['rankings']}"
            )
        elif args.command == "compare":
            result = run_compare(args.a, args.b, args.output, k=args.k, p=args.p)
            summary = result["summary"]
            print(
                f"compared {result['slots_compared']} slots at depth "
                f"{summary['depth']}: overlap={summary['overlap']} "
                f"AO={summary['average_overlap']:.4f} "
                f"RBO={summary['rank_biased_overlap']:.4f}"
            )
        elif args.command == "stats":
            summary = run_stats(
                args.input,
                args.output,
                k=args.k,
                exclude_partial=args.slots_exclude_partial,
                source_host=args.source_host,
            )
            funnel = summary["link_funnel"]
            print(
                f"stats written: funnel {funnel['all_outlinks']} outlinks -> "
                f"{funnel['post_matched']} post-matched; "
                f"{summary['slots']['analyzed']} analyzed slots"
            )
        elif args.command == "validate":
            report = run_validate(args.input, source_host=args.source_host)
            print(
                f"dataset ok: {report['bloggers']} bloggers, {report['posts']} posts, "
                f"{report['comments']} comments, {report['slots']} slots "
                f"({report['partial_slots']} partial)"
            )
            for warning in report["warnings"]:
                print(f"warning: {warning}")
        return 0
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, BlogrankError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
