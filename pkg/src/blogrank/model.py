"""Domain model: bloggers, posts, comments, datasets, time slots and rankings.

Everything here is immutable after construction and safe to share across
threads. ``Dataset`` validates referential integrity on construction;
``SlotView`` is the restriction of a dataset to a single time slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DanglingReferenceError, DatasetError, DuplicateIdError

__all__ = [
    "Blogger",
    "Post",
    "Comment",
    "Dataset",
    "TimeSlot",
    "SlotView",
    "InfluenceVector",
    "Ranking",
]


def _require_utc(ts: datetime, what: str) -> datetime:
    if ts.tzinfo is None:
        raise DatasetError(f"{what} must be timezone-aware (UTC)")
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True)
class Blogger:
    """An author of posts. ``blog_base_url`` is used for author link matching."""

    id: str
    display_name: str
    blog_base_url: Optional[str] = None


@dataclass(frozen=True)
class Post:
    """A blog post with its outgoing hyperlinks as they appear in the body."""

    id: str
    author_id: str
    published_at: datetime
    url: Optional[str] = None
    outlink_urls: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "published_at", _require_utc(self.published_at, "Post.published_at")
        )
        object.__setattr__(self, "outlink_urls", tuple(self.outlink_urls))


@dataclass(frozen=True)
class Comment:
    """A comment on a post. The author may or may not be a blogger."""

    id: str
    post_id: str
    author_id: str
    created_at: datetime
    parent_comment_id: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(
            self, "created_at", _require_utc(self.created_at, "Comment.created_at")
        )


class Dataset:
    """Immutable collection of bloggers, posts and comments.

    Construction validates referential integrity:

    * blogger ids, post ids and comment ids are unique,
    * ``blog_base_url`` and post ``url`` values are unique when present,
    * every post's author exists, every comment's post exists,
    * ``parent_comment_id`` references a comment on the same post.

    Comments that predate their post (beyond ``clock_skew_tolerance``
    seconds) are recorded in :attr:`warnings` but are not fatal; real
    crawls contain such records.
    """

    def __init__(
        self,
        bloggers: Iterable[Blogger],
        posts: Iterable[Post],
        comments: Iterable[Comment],
        source_host: str,
        clock_skew_tolerance: float = 0.0,
    ):
        self.bloggers = tuple(bloggers)
        self.posts = tuple(posts)
        self.comments = tuple(comments)
        self.source_host = source_host.lower().strip()
        self.warnings: tuple[str, ...] = ()

        self.bloggers_by_id = {}
        for b in self.bloggers:
            if b.id in self.bloggers_by_id:
                raise DuplicateIdError(f"duplicate blogger id {b.id!r}")
            self.bloggers_by_id[b.id] = b
        base_urls = {}
        for b in self.bloggers:
            if b.blog_base_url is None:
                continue
            if b.blog_base_url in base_urls:
                raise DuplicateIdError(
                    f"duplicate blog_base_url {b.blog_base_url!r} "
                    f"(bloggers {base_urls[b.blog_base_url]!r} and {b.id!r})"
                )
            base_urls[b.blog_base_url] = b.id

        self.posts_by_id = {}
        post_urls = {}
        for p in self.posts:
            if p.id in self.posts_by_id:
                raise DuplicateIdError(f"duplicate post id {p.id!r}")
            if p.author_id not in self.bloggers_by_id:
                raise DanglingReferenceError(
                    f"post {p.id!r} references unknown blogger {p.author_id!r}"
                )
            if p.url is not None:
                if p.url in post_urls:
                    raise DuplicateIdError(
                        f"duplicate post url {p.url!r} "
                        f"(posts {post_urls[p.url]!r} and {p.id!r})"
                    )
                post_urls[p.url] = p.id
            self.posts_by_id[p.id] = p

        self.comments_by_id = {}
        comments_by_post: dict[str, list[Comment]] = {}
        warnings = []
        for c in self.comments:
            if c.id in self.comments_by_id:
                raise DuplicateIdError(f"duplicate comment id {c.id!r}")
            post = self.posts_by_id.get(c.post_id)
            if post is None:
                raise DanglingReferenceError(
                    f"comment {c.id!r} references unknown post {c.post_id!r}"
                )
            self.comments_by_id[c.id] = c
            comments_by_post.setdefault(c.post_id, []).append(c)
            skew = (post.published_at - c.created_at).total_seconds()
            if skew > clock_skew_tolerance:
                warnings.append(
                    f"comment {c.id!r} predates post {post.id!r} by {skew:.0f}s"
                )
        for c in self.comments:
            if c.parent_comment_id is None:
                continue
            parent = self.comments_by_id.get(c.parent_comment_id)
            if parent is None:
                raise DanglingReferenceError(
                    f"comment {c.id!r} references unknown parent "
                    f"{c.parent_comment_id!r}"
                )
            if parent.post_id != c.post_id:
                raise DanglingReferenceError(
                    f"comment {c.id!r} has parent {parent.id!r} on a different post"
                )

        self.comments_by_post = {k: tuple(v) for k, v in comments_by_post.items()}
        self.warnings = tuple(warnings)

    def is_blogger(self, author_id: str) -> bool:
        """Commenter ids share the blogger namespace: a commenter is a
        blogger iff its id matches a blogger id."""
        return author_id in self.bloggers_by_id

    def event_timestamps(self) -> list[datetime]:
        """Timestamps of all posts and comments (unsorted)."""
        out = [p.published_at for p in self.posts]
        out.extend(c.created_at for c in self.comments)
        return out

    def __repr__(self):
        return (
            f"Dataset(bloggers={len(self.bloggers)}, posts={len(self.posts)}, "
            f"comments={len(self.comments)}, source_host={self.source_host!r})"
        )


@dataclass(frozen=True)
class TimeSlot:
    """One calendar-aligned slot: ``[start, end)`` in UTC.

    Only the final slot of a partition can be ``partial``: its range is not
    fully covered by the dataset's observed time span.
    """

    index: int
    start: datetime
    end: datetime
    partial: bool = False

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts < self.end


class SlotView:
    """A dataset restricted to one time slot.

    Contains the posts published in the slot, the comments written in the
    slot on those posts, and the bloggers who authored at least one post in
    the slot. Posts are ordered by (published_at, id) and bloggers by id so
    matrix indexes are deterministic.
    """

    def __init__(self, dataset: Dataset, slot: TimeSlot, posts: Sequence[Post],
                 comments: Sequence[Comment]):
        self.dataset = dataset
        self.slot = slot
        self.posts = tuple(sorted(posts, key=lambda p: (p.published_at, p.id)))
        self.comments = tuple(comments)
        author_ids = {p.author_id for p in self.posts}
        self.bloggers = tuple(
            dataset.bloggers_by_id[a] for a in sorted(author_ids)
        )
        self._post_ids = {p.id for p in self.posts}
        self._comments_by_post: dict[str, list[Comment]] = {}
        for c in self.comments:
            if c.post_id not in self._post_ids:
                raise DatasetError(
                    f"comment {c.id!r} references post {c.post_id!r} outside the view"
                )
            self._comments_by_post.setdefault(c.post_id, []).append(c)
        self._posts_by_author: dict[str, list[Post]] = {}
        for p in self.posts:
            self._posts_by_author.setdefault(p.author_id, []).append(p)

    @property
    def blogger_ids(self) -> tuple[str, ...]:
        return tuple(b.id for b in self.bloggers)

    def comments_for(self, post_id: str) -> tuple[Comment, ...]:
        return tuple(self._comments_by_post.get(post_id, ()))

    def posts_by(self, blogger_id: str) -> tuple[Post, ...]:
        return tuple(self._posts_by_author.get(blogger_id, ()))

    def __repr__(self):
        return (
            f"SlotView(slot={self.slot.index}, posts={len(self.posts)}, "
            f"comments={len(self.comments)}, bloggers={len(self.bloggers)})"
        )


@dataclass(frozen=True)
class InfluenceVector:
    """Influence scores for an indexed set of entities (posts or bloggers),
    with the convergence metadata of the iteration that produced them."""

    entity_ids: tuple[str, ...]
    scores: np.ndarray
    iterations_used: int
    converged: bool
    final_similarity: float

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float)
        if scores.shape != (len(self.entity_ids),):
            raise ValueError(
                f"scores shape {scores.shape} does not match "
                f"{len(self.entity_ids)} entities"
            )
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    def as_dict(self) -> dict[str, float]:
        return {e: float(s) for e, s in zip(self.entity_ids, self.scores)}


@dataclass(frozen=True)
class Ranking:
    """An ordered list of distinct blogger ids, best first, with optional
    parallel (non-increasing) scores."""

    ids: tuple[str, ...]
    scores: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("ranking contains duplicate ids")
        if self.scores is not None:
            scores = tuple(float(s) for s in self.scores)
            if len(scores) != len(self.ids):
                raise ValueError("scores length does not match ids length")
            if any(a < b for a, b in zip(scores, scores[1:])):
                raise ValueError("ranking scores must be non-increasing")
            object.__setattr__(self, "scores", scores)

    @classmethod
    def from_scores(cls, scores_by_id: dict[str, float]) -> "Ranking":
        """Build a ranking sorted by descending score, ties broken by id."""
        ordered = sorted(scores_by_id.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls(tuple(k for k, _ in ordered), tuple(v for _, v in ordered))

    def top(self, k: int) -> "Ranking":
        """Truncate to depth ``k`` (returns the full ranking if shorter)."""
        if k >= len(self.ids):
            return self
        scores = self.scores[:k] if self.scores is not None else None
        return Ranking(self.ids[:k], scores)

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)
