"""Seeded synthetic blog-portal generator.

Produces a dataset with the moving parts the influence pipeline cares
about: a heavy-tailed posting activity distribution (only a small share
of members is very active), per-post comment streams with a controlled
self-comment share, outlinks split between external targets and on-portal
posts/blogs (with controlled self-link share and a pinch of stale URLs),
and optional planted influencers who attract proportionally more comments
and inlinks from others.

The same seed and config always produce the same dataset, byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

from .errors import ConfigError
from .model import Blogger, Comment, Dataset, Post
from .validation import (
    check_fraction,
    check_nonnegative,
    check_positive,
    check_positive_int,
)

__all__ = ["SynthConfig", "make_dataset"]


@dataclass(frozen=True)
class SynthConfig:
    """Knobs of the synthetic portal.

    ``posts_per_blogger_per_month`` is the target mean of a Poisson post
    count whose per-blogger rate is modulated by a Pareto-distributed
    activity weight with tail exponent ``activity_exponent``. Planted
    influencers are (blogger index, multiplier) pairs: the multiplier
    scales the comments and inlinks the blogger attracts from others, and
    its square root scales their posting rate.
    """

    seed: int = 0
    months: int = 12
    bloggers: int = 50
    commenters_per_blogger: float = 2.0
    posts_per_blogger_per_month: float = 5.0
    activity_exponent: float = 2.0
    comment_rate: float = 5.0
    self_comment_fraction: float = 0.15
    links_per_post: float = 1.0
    internal_link_fraction: float = 0.2
    self_link_fraction: float = 0.3
    author_home_link_fraction: float = 0.15
    stale_link_fraction: float = 0.05
    reply_fraction: float = 0.25
    blogger_commenter_fraction: float = 0.7
    planted_influencers: tuple[tuple[int, float], ...] = ()
    source_host: str = "blog.example"
    start_year: int = 2008
    start_month: int = 1

    def validate(self) -> "SynthConfig":
        check_positive_int("months", self.months)
        check_positive_int("bloggers", self.bloggers)
        check_nonnegative("commenters_per_blogger", self.commenters_per_blogger)
        check_positive("posts_per_blogger_per_month", self.posts_per_blogger_per_month)
        if self.activity_exponent <= 1.0:
            raise ConfigError(
                f"activity_exponent must exceed 1, got {self.activity_exponent!r}"
            )
        check_nonnegative("comment_rate", self.comment_rate)
        check_nonnegative("links_per_post", self.links_per_post)
        for name in (
            "self_comment_fraction",
            "internal_link_fraction",
            "self_link_fraction",
            "author_home_link_fraction",
            "stale_link_fraction",
            "reply_fraction",
            "blogger_commenter_fraction",
        ):
            check_fraction(name, getattr(self, name))
        if self.author_home_link_fraction + self.stale_link_fraction > 1.0:
            raise ConfigError(
                "author_home_link_fraction + stale_link_fraction must not exceed 1"
            )
        for idx, mult in self.planted_influencers:
            if not (0 <= idx < self.bloggers):
                raise ConfigError(
                    f"planted influencer index {idx} out of range "
                    f"0..{self.bloggers - 1}"
                )
            check_positive("planted influencer multiplier", mult)
        if not (1 <= self.start_month <= 12):
            raise ConfigError(f"start_month must be 1..12, got {self.start_month!r}")
        return self


def _month_bounds(year: int, month: int, offset: int) -> tuple[datetime, datetime]:
    month0 = year * 12 + (month - 1) + offset
    start = datetime(month0 // 12, month0 % 12 + 1, 1, tzinfo=timezone.utc)
    month0 += 1
    end = datetime(month0 // 12, month0 % 12 + 1, 1, tzinfo=timezone.utc)
    return start, end


def _uniform_second(rng, start: datetime, end: datetime) -> datetime:
    """A whole-second timestamp in [start, end); degenerate ranges clamp
    to start."""
    span = int((end - start).total_seconds())
    if span <= 0:
        return start
    return start + timedelta(seconds=int(rng.integers(0, span)))


class _Generator:
    def __init__(self, cfg: SynthConfig):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.bloggers = [
            Blogger(
                id=f"b{i:04d}",
                display_name=f"Blogger {i:04d}",
                blog_base_url=f"http://b{i:04d}.{cfg.source_host}",
            )
            for i in range(cfg.bloggers)
        ]
        self.blogger_ids = [b.id for b in self.bloggers]
        pool_size = int(round(cfg.bloggers * cfg.commenters_per_blogger))
        self.commenter_pool = [f"u{j:04d}" for j in range(pool_size)]

        weights = 1.0 + self.rng.pareto(cfg.activity_exponent, size=cfg.bloggers)
        mean_weight = float(weights.mean())
        self.post_rate = cfg.posts_per_blogger_per_month * weights / mean_weight
        self.attract = weights / mean_weight
        for idx, mult in cfg.planted_influencers:
            self.attract[idx] *= mult
            self.post_rate[idx] *= mult**0.5
        self.attract_p = self.attract / self.attract.sum()

        self.posts: list[Post] = []
        self.comments: list[Comment] = []
        self.posts_by_author: dict[str, list[Post]] = {
            b: [] for b in self.blogger_ids
        }
        self._post_counter = 0
        self._comment_counter = 0

    def run(self) -> Dataset:
        cfg = self.cfg
        for month in range(cfg.months):
            start, end = _month_bounds(cfg.start_year, cfg.start_month, month)
            drafts = self._draft_posts(start, end)
            # Outlinks target already-existing posts, so wire them only
            # once the whole month has been drafted.
            for draft in drafts:
                self.posts_by_author[draft.author_id].append(draft)
            for draft in drafts:
                post = self._wire_outlinks(draft)
                self.posts.append(post)
                self._generate_comments(post, end)
        return Dataset(
            self.bloggers, self.posts, self.comments, source_host=cfg.source_host
        )

    def _draft_posts(self, start: datetime, end: datetime) -> list[Post]:
        drafts = []
        for bi, blogger_id in enumerate(self.blogger_ids):
            for _ in range(int(self.rng.poisson(self.post_rate[bi]))):
                pid = f"p{self._post_counter:06d}"
                self._post_counter += 1
                drafts.append(
                    Post(
                        id=pid,
                        author_id=blogger_id,
                        published_at=_uniform_second(
                            self.rng, start, end - timedelta(seconds=1)
                        ),
                        url=f"http://{blogger_id}.{self.cfg.source_host}/posts/{pid}",
                    )
                )
        return drafts

    def _wire_outlinks(self, draft: Post) -> Post:
        n_links = int(self.rng.poisson(self.cfg.links_per_post))
        if n_links == 0:
            return draft
        outlinks = tuple(self._make_outlink(draft) for _ in range(n_links))
        return Post(
            id=draft.id,
            author_id=draft.author_id,
            published_at=draft.published_at,
            url=draft.url,
            outlink_urls=outlinks,
        )

    def _make_outlink(self, post: Post) -> str:
        cfg, rng = self.cfg, self.rng
        if rng.random() >= cfg.internal_link_fraction:
            return (
                f"http://ext{int(rng.integers(0, 1000)):03d}.example/"
                f"page/{int(rng.integers(0, 10**6))}"
            )
        if rng.random() < cfg.self_link_fraction:
            own = [p for p in self.posts_by_author[post.author_id] if p.id != post.id]
            if own:
                return own[int(rng.integers(0, len(own)))].url
            return f"http://{post.author_id}.{cfg.source_host}"
        target = self._pick_other(post.author_id)
        roll = rng.random()
        if roll < cfg.stale_link_fraction:
            return f"http://{target}.{cfg.source_host}/stale/{int(rng.integers(0, 10**6))}"
        if roll < cfg.stale_link_fraction + cfg.author_home_link_fraction:
            return f"http://{target}.{cfg.source_host}"
        candidates = self.posts_by_author[target]
        if not candidates:
            return f"http://{target}.{cfg.source_host}"
        return candidates[int(rng.integers(0, len(candidates)))].url

    def _pick_other(self, author_id: str) -> str:
        """A blogger other than the author, biased by attractiveness."""
        if len(self.blogger_ids) == 1:
            return author_id
        for _ in range(8):
            pick = self.blogger_ids[
                int(self.rng.choice(len(self.blogger_ids), p=self.attract_p))
            ]
            if pick != author_id:
                return pick
        index = self.blogger_ids.index(author_id)
        return self.blogger_ids[(index + 1) % len(self.blogger_ids)]

    def _generate_comments(self, post: Post, month_end: datetime) -> None:
        cfg, rng = self.cfg, self.rng
        author_index = self.blogger_ids.index(post.author_id)
        n_comments = int(rng.poisson(cfg.comment_rate * self.attract[author_index]))
        thread: list[str] = []
        for _ in range(n_comments):
            commenter = self._pick_commenter(post.author_id, author_index)
            if commenter is None:
                continue
            cid = f"c{self._comment_counter:07d}"
            self._comment_counter += 1
            parent = None
            if thread and rng.random() < cfg.reply_fraction:
                parent = thread[int(rng.integers(0, len(thread)))]
            self.comments.append(
                Comment(
                    id=cid,
                    post_id=post.id,
                    author_id=commenter,
                    created_at=_uniform_second(
                        rng, post.published_at, month_end - timedelta(seconds=1)
                    ),
                    parent_comment_id=parent,
                )
            )
            thread.append(cid)

    def _pick_commenter(self, author_id: str, author_index: int):
        cfg, rng = self.cfg, self.rng
        if rng.random() < cfg.self_comment_fraction:
            return author_id
        pick_blogger = rng.random() < cfg.blogger_commenter_fraction
        if pick_blogger and len(self.blogger_ids) > 1:
            j = int(rng.integers(0, len(self.blogger_ids) - 1))
            if j >= author_index:
                j += 1
            return self.blogger_ids[j]
        if self.commenter_pool:
            return self.commenter_pool[int(rng.integers(0, len(self.commenter_pool)))]
        return None  # nobody but the author exists, and this is not a self comment


def make_dataset(cfg: SynthConfig) -> Dataset:
    """Generate a dataset from a validated config, deterministically."""
    cfg.validate()
    return _Generator(cfg).run()
