"""Outlink resolution: classify every post outlink against the portal.

Each outlink URL of every post falls into exactly one category:

* ``external``        — host is not the portal (or the URL is unparseable),
* ``internal_unmatched`` — on-portal but matches no post URL or blog base,
* ``author_matched``  — prefix-matches a blogger's ``blog_base_url``,
* ``post_matched``    — equals a post's URL after normalization.

Post matching is attempted first, so ``author_matched`` holds only links
that could be tied to a blogger but not to a concrete post; funnel-style
reports re-nest the categories.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional
from urllib.parse import urlsplit, urlunsplit

from .model import Dataset

__all__ = ["normalize_url", "ResolvedLink", "LinkResolution", "resolve_links"]

EXTERNAL = "external"
INTERNAL_UNMATCHED = "internal_unmatched"
AUTHOR_MATCHED = "author_matched"
POST_MATCHED = "post_matched"


def normalize_url(url: str) -> Optional[str]:
    """Normalize a URL for matching: lowercase the scheme and host, strip
    any fragment and trailing slashes from the path. Query strings are kept.
    Returns None for URLs that cannot be parsed or have no host."""
    try:
        parts = urlsplit(url.strip())
    except ValueError:
        return None
    if not parts.scheme or not parts.netloc:
        return None
    path = parts.path.rstrip("/")
    return urlunsplit((parts.scheme.lower(), parts.netloc.lower(), path, parts.query, ""))


def _host(url: str) -> str:
    return urlsplit(url).hostname or ""


def _is_internal(host: str, source_host: str) -> bool:
    return host == source_host or host.endswith("." + source_host)


@dataclass(frozen=True)
class ResolvedLink:
    """Classification of one outlink occurrence (post may repeat a URL)."""

    source_post_id: str
    url: str
    category: str
    target_blogger_id: Optional[str] = None
    target_post_id: Optional[str] = None
    unparseable: bool = False


class LinkResolution:
    """All resolved outlinks of a dataset, with per-category access."""

    def __init__(self, links: list[ResolvedLink]):
        self.links = tuple(links)
        self._by_category: dict[str, list[ResolvedLink]] = {
            EXTERNAL: [],
            INTERNAL_UNMATCHED: [],
            AUTHOR_MATCHED: [],
            POST_MATCHED: [],
        }
        for link in self.links:
            self._by_category[link.category].append(link)

    def by_category(self, category: str) -> tuple[ResolvedLink, ...]:
        return tuple(self._by_category[category])

    def count(self, category: str) -> int:
        return len(self._by_category[category])

    @property
    def total(self) -> int:
        return len(self.links)

    def post_matched_pairs(self) -> list[tuple[str, str]]:
        """(source post id, target post id) for every post-matched link."""
        return [
            (link.source_post_id, link.target_post_id)
            for link in self._by_category[POST_MATCHED]
        ]

    def __repr__(self):
        counts = {k: len(v) for k, v in self._by_category.items()}
        return f"LinkResolution(total={self.total}, {counts})"


def resolve_links(dataset: Dataset) -> LinkResolution:
    """Classify every outlink URL of every post.

    Matching uses normalized URLs. A post match requires exact equality
    with a post's URL. An author match requires the outlink to extend a
    blogger's ``blog_base_url`` at a path boundary (or equal it); when
    several base URLs match, the longest wins. Unparseable URLs are
    classified external with a diagnostic flag.
    """
    posts_by_url = {}
    for p in dataset.posts:
        if p.url is not None:
            norm = normalize_url(p.url)
            if norm is not None:
                posts_by_url[norm] = p
    bases = []
    for b in dataset.bloggers:
        if b.blog_base_url is None:
            continue
        norm = normalize_url(b.blog_base_url)
        if norm is not None:
            bases.append((norm, b.id))
    bases.sort(key=lambda t: -len(t[0]))  # longest prefix wins

    links = []
    for post in dataset.posts:
        for url in post.outlink_urls:
            norm = normalize_url(url)
            if norm is None:
                links.append(
                    ResolvedLink(post.id, url, EXTERNAL, unparseable=True)
                )
                continue
            if not _is_internal(_host(norm), dataset.source_host):
                links.append(ResolvedLink(post.id, url, EXTERNAL))
                continue
            target = posts_by_url.get(norm)
            if target is not None:
                links.append(
                    ResolvedLink(
                        post.id,
                        url,
                        POST_MATCHED,
                        target_blogger_id=target.author_id,
                        target_post_id=target.id,
                    )
                )
                continue
            author = _match_author(norm, bases)
            if author is not None:
                links.append(
                    ResolvedLink(post.id, url, AUTHOR_MATCHED, target_blogger_id=author)
                )
            else:
                links.append(ResolvedLink(post.id, url, INTERNAL_UNMATCHED))
    return LinkResolution(links)


def _match_author(norm_url: str, bases: list[tuple[str, str]]) -> Optional[str]:
    for base, blogger_id in bases:
        if norm_url == base:
            return blogger_id
        if norm_url.startswith(base) and norm_url[len(base)] in "/?":
            return blogger_id
    return None
