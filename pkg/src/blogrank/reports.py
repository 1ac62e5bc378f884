"""Descriptive statistics over a dataset: the link-matching funnel,
self-reference leaderboards, and per-slot time series.

These reports describe the raw dataset. Slot attribution uses each
event's own timestamp, so a comment written in a later slot than its post
appears here (in the Comments series) even though per-slot influence
views exclude it; such cross-slot comments are also counted separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigError
from .links import AUTHOR_MATCHED, INTERNAL_UNMATCHED, POST_MATCHED, LinkResolution
from .model import Dataset, TimeSlot

__all__ = [
    "LinkFunnelReport",
    "link_funnel",
    "SelfReferenceRow",
    "self_link_leaderboard",
    "self_comment_leaderboard",
    "SlotSeriesPoint",
    "slot_series",
    "cross_slot_comment_count",
    "SERIES_MEASURES",
    "rows_to_tsv",
]


@dataclass(frozen=True)
class LinkFunnelReport:
    """Counts at each stage of link matching, outermost first.

    Stages nest: internal links are a subset of all outlinks, author-
    matched links (any link tied to a blogger, via base URL or via a
    matched post) a subset of internal ones, post-matched a subset of
    author-matched, and same-author post links a subset of post-matched.
    """

    all_outlinks: int
    internal_outlinks: int
    author_matched: int
    post_matched: int
    post_matched_same_author: int

    def percentages(self) -> dict[str, float]:
        """Each stage as a fraction of its enclosing stage (0.0 when the
        enclosing stage is empty)."""

        def frac(part, whole):
            return part / whole if whole else 0.0

        return {
            "internal_of_all": frac(self.internal_outlinks, self.all_outlinks),
            "author_of_internal": frac(self.author_matched, self.internal_outlinks),
            "post_of_author": frac(self.post_matched, self.author_matched),
            "same_author_of_post": frac(
                self.post_matched_same_author, self.post_matched
            ),
        }

    def as_rows(self) -> list[tuple[str, int]]:
        return [
            ("all_outlinks", self.all_outlinks),
            ("internal_outlinks", self.internal_outlinks),
            ("author_matched", self.author_matched),
            ("post_matched", self.post_matched),
            ("post_matched_same_author", self.post_matched_same_author),
        ]


def link_funnel(dataset: Dataset, resolution: LinkResolution) -> LinkFunnelReport:
    """Aggregate a link resolution into the nested funnel counts."""
    post_matched = resolution.by_category(POST_MATCHED)
    author_only = resolution.count(AUTHOR_MATCHED)
    unmatched = resolution.count(INTERNAL_UNMATCHED)
    same_author = 0
    for link in post_matched:
        source = dataset.posts_by_id[link.source_post_id]
        if source.author_id == link.target_blogger_id:
            same_author += 1
    n_post = len(post_matched)
    return LinkFunnelReport(
        all_outlinks=resolution.total,
        internal_outlinks=unmatched + author_only + n_post,
        author_matched=author_only + n_post,
        post_matched=n_post,
        post_matched_same_author=same_author,
    )


@dataclass(frozen=True)
class SelfReferenceRow:
    """One blogger's inbound links or comments, split into self and other."""

    blogger_id: str
    total: int
    self_count: int

    @property
    def self_fraction(self) -> float:
        return self.self_count / self.total if self.total else 0.0


def _leaderboard(counts: dict[str, list[int]], k: int) -> list[SelfReferenceRow]:
    rows = [
        SelfReferenceRow(blogger_id=b, total=t, self_count=s)
        for b, (t, s) in counts.items()
        if t > 0
    ]
    rows.sort(key=lambda r: (-r.total, r.blogger_id))
    return rows[:k]


def self_link_leaderboard(
    dataset: Dataset, resolution: LinkResolution, k: int = 10
) -> list[SelfReferenceRow]:
    """Top-k bloggers by inbound post-matched links, with the share coming
    from their own posts."""
    counts: dict[str, list[int]] = {}
    for link in resolution.by_category(POST_MATCHED):
        target_author = link.target_blogger_id
        source_author = dataset.posts_by_id[link.source_post_id].author_id
        entry = counts.setdefault(target_author, [0, 0])
        entry[0] += 1
        if source_author == target_author:
            entry[1] += 1
    return _leaderboard(counts, k)


def self_comment_leaderboard(dataset: Dataset, k: int = 10) -> list[SelfReferenceRow]:
    """Top-k bloggers by comments received on their posts, with the share
    they wrote themselves. Bloggers without any comment received are not
    listed."""
    counts: dict[str, list[int]] = {}
    for comment in dataset.comments:
        author = dataset.posts_by_id[comment.post_id].author_id
        entry = counts.setdefault(author, [0, 0])
        entry[0] += 1
        if comment.author_id == author:
            entry[1] += 1
    return _leaderboard(counts, k)


@dataclass(frozen=True)
class SlotSeriesPoint:
    """One value of a per-slot series; ``degenerate`` flags a division by
    zero that was reported as 0 to keep series aligned across measures."""

    slot_index: int
    value: float
    degenerate: bool = False


SERIES_MEASURES = (
    "matched_post_inlinks",
    "comments",
    "comments_per_post",
    "posts_per_blogger",
    "unmatched_internal",
)


def slot_series(
    dataset: Dataset,
    slots: Sequence[TimeSlot],
    measure: str,
    resolution: LinkResolution | None = None,
    exclude_partial: bool = True,
) -> list[SlotSeriesPoint]:
    """Compute one per-slot series over the analyzed slots.

    Measures: ``matched_post_inlinks`` (post-matched links by source post
    slot), ``comments`` (by comment timestamp), ``comments_per_post`` and
    ``posts_per_blogger`` (slot-local ratios; 0 with a degenerate flag
    when the denominator is empty), and ``unmatched_internal`` (internal
    links that matched nothing, a stale-URL diagnostic). Link measures
    need a ``resolution``.
    """
    if measure not in SERIES_MEASURES:
        raise ConfigError(
            f"unknown measure {measure!r}; expected one of {SERIES_MEASURES}"
        )
    if measure in ("matched_post_inlinks", "unmatched_internal") and resolution is None:
        raise ConfigError(f"measure {measure!r} requires a link resolution")
    analyzed = [s for s in slots if not (exclude_partial and s.partial)]

    def slot_of(ts):
        for slot in analyzed:
            if slot.contains(ts):
                return slot.index
        return None

    points = []
    if measure in ("matched_post_inlinks", "unmatched_internal"):
        category = (
            POST_MATCHED
            if measure == "matched_post_inlinks"
            else INTERNAL_UNMATCHED
        )
        per_slot = {s.index: 0 for s in analyzed}
        for link in resolution.by_category(category):
            ts = dataset.posts_by_id[link.source_post_id].published_at
            idx = slot_of(ts)
            if idx is not None:
                per_slot[idx] += 1
        points = [SlotSeriesPoint(s.index, float(per_slot[s.index])) for s in analyzed]
    elif measure == "comments":
        per_slot = {s.index: 0 for s in analyzed}
        for comment in dataset.comments:
            idx = slot_of(comment.created_at)
            if idx is not None:
                per_slot[idx] += 1
        points = [SlotSeriesPoint(s.index, float(per_slot[s.index])) for s in analyzed]
    else:
        for slot in analyzed:
            posts = [p for p in dataset.posts if slot.contains(p.published_at)]
            if measure == "comments_per_post":
                n_comments = sum(
                    1 for c in dataset.comments if slot.contains(c.created_at)
                )
                if posts:
                    points.append(SlotSeriesPoint(slot.index, n_comments / len(posts)))
                else:
                    points.append(SlotSeriesPoint(slot.index, 0.0, degenerate=True))
            else:  # posts_per_blogger
                bloggers = {p.author_id for p in posts}
                if bloggers:
                    points.append(
                        SlotSeriesPoint(slot.index, len(posts) / len(bloggers))
                    )
                else:
                    points.append(SlotSeriesPoint(slot.index, 0.0, degenerate=True))
    return points


def cross_slot_comment_count(dataset: Dataset, slots: Sequence[TimeSlot]) -> int:
    """Comments whose own timestamp falls in a different slot than their
    post's publication (these never appear in per-slot influence views)."""

    def slot_of(ts):
        for slot in slots:
            if slot.contains(ts):
                return slot.index
        return None

    count = 0
    for comment in dataset.comments:
        post = dataset.posts_by_id[comment.post_id]
        if slot_of(comment.created_at) != slot_of(post.published_at):
            count += 1
    return count


def rows_to_tsv(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    """Render rows as a tab-separated table with a header line."""
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(str(cell) for cell in row))
    return "\n".join(lines) + "\n"
