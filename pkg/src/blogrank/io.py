"""Flat-file dataset format: read and write line-oriented record files.

A dataset lives in a directory of three UTF-8 files, one record per line:

* ``bloggers.rec``  — fields ``id``, ``display_name``, ``blog_base_url``
* ``posts.rec``     — fields ``id``, ``author_id``, ``published_at``,
  ``url``, ``outlink_urls``
* ``comments.rec``  — fields ``id``, ``post_id``, ``author_id``,
  ``created_at``, ``parent_comment_id``

Each record is a sequence of TAB-separated ``key=value`` pairs in exactly
the field order above; optional fields (``blog_base_url``, ``url``,
``outlink_urls``, ``parent_comment_id``) are omitted rather than left
empty. Values are raw UTF-8 and may not contain TAB, CR or LF; there is no
further escaping. ``outlink_urls`` is a space-delimited list (URLs carry
percent-encoded spaces, so a raw space never occurs inside one).
Timestamps are ISO-8601 with an explicit UTC offset (``Z`` accepted);
offset-less timestamps are rejected. Blank lines and lines starting with
``#`` are skipped.

An optional ``meta.rec`` with a single ``source_host=...`` record names
the portal host used for internal-link classification.
"""

from __future__ import annotations

import os
from datetime import datetime, timezone
from typing import Optional, Union

from .errors import DatasetError, MalformedRecordError
from .model import Blogger, Comment, Dataset, Post

__all__ = ["parse_dataset", "load_dataset", "write_dataset"]

BLOGGERS_FILE = "bloggers.rec"
POSTS_FILE = "posts.rec"
COMMENTS_FILE = "comments.rec"
META_FILE = "meta.rec"

_BLOGGER_FIELDS = (("id", True), ("display_name", True), ("blog_base_url", False))
_POST_FIELDS = (
    ("id", True),
    ("author_id", True),
    ("published_at", True),
    ("url", False),
    ("outlink_urls", False),
)
_COMMENT_FIELDS = (
    ("id", True),
    ("post_id", True),
    ("author_id", True),
    ("created_at", True),
    ("parent_comment_id", False),
)


def _parse_timestamp(value: str, path, line) -> datetime:
    text = value.strip()
    if text.endswith("Z") or text.endswith("z"):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise MalformedRecordError(f"invalid timestamp {value!r}", path, line)
    if ts.tzinfo is None:
        raise MalformedRecordError(
            f"timestamp {value!r} lacks an explicit UTC offset", path, line
        )
    return ts.astimezone(timezone.utc)


def _parse_record(raw: str, fields, path, line) -> dict[str, str]:
    record = {}
    pairs = raw.split("\t")
    order = [k for k, _ in fields]
    cursor = 0
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise MalformedRecordError(f"field {pair!r} is not key=value", path, line)
        if key not in order:
            raise MalformedRecordError(f"unknown field {key!r}", path, line)
        if value == "":
            raise MalformedRecordError(
                f"field {key!r} is empty (omit optional fields instead)", path, line
            )
        position = order.index(key)
        if position < cursor:
            raise MalformedRecordError(
                f"field {key!r} out of order (expected order: {', '.join(order)})",
                path,
                line,
            )
        cursor = position + 1
        record[key] = value
    for key, required in fields:
        if required and key not in record:
            raise MalformedRecordError(f"missing required field {key!r}", path, line)
    return record


def _iter_records(path, fields):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.rstrip("\r\n")
            if not raw or raw.startswith("#"):
                continue
            yield lineno, _parse_record(raw, fields, path, lineno)


def parse_dataset(
    bloggers_path: Union[str, os.PathLike],
    posts_path: Union[str, os.PathLike],
    comments_path: Union[str, os.PathLike],
    source_host: str,
    clock_skew_tolerance: float = 0.0,
) -> Dataset:
    """Parse the three record files into a validated :class:`Dataset`.

    Malformed lines raise :class:`MalformedRecordError` with the file and
    line number; duplicate ids and dangling references raise their own
    error types during dataset validation.
    """
    bloggers = []
    for _, rec in _iter_records(bloggers_path, _BLOGGER_FIELDS):
        bloggers.append(
            Blogger(
                id=rec["id"],
                display_name=rec["display_name"],
                blog_base_url=rec.get("blog_base_url"),
            )
        )
    posts = []
    for lineno, rec in _iter_records(posts_path, _POST_FIELDS):
        outlinks = tuple(rec.get("outlink_urls", "").split()) or ()
        posts.append(
            Post(
                id=rec["id"],
                author_id=rec["author_id"],
                published_at=_parse_timestamp(rec["published_at"], posts_path, lineno),
                url=rec.get("url"),
                outlink_urls=outlinks,
            )
        )
    comments = []
    for lineno, rec in _iter_records(comments_path, _COMMENT_FIELDS):
        comments.append(
            Comment(
                id=rec["id"],
                post_id=rec["post_id"],
                author_id=rec["author_id"],
                created_at=_parse_timestamp(rec["created_at"], comments_path, lineno),
                parent_comment_id=rec.get("parent_comment_id"),
            )
        )
    return Dataset(
        bloggers,
        posts,
        comments,
        source_host=source_host,
        clock_skew_tolerance=clock_skew_tolerance,
    )


def load_dataset(
    directory: Union[str, os.PathLike],
    source_host: Optional[str] = None,
    clock_skew_tolerance: float = 0.0,
) -> Dataset:
    """Load a dataset directory; ``source_host`` falls back to ``meta.rec``."""
    directory = os.fspath(directory)
    if source_host is None:
        meta_path = os.path.join(directory, META_FILE)
        if os.path.exists(meta_path):
            for _, rec in _iter_records(meta_path, (("source_host", True),)):
                source_host = rec["source_host"]
        if source_host is None:
            raise DatasetError(
                f"no source_host given and {META_FILE} not found in {directory}"
            )
    return parse_dataset(
        os.path.join(directory, BLOGGERS_FILE),
        os.path.join(directory, POSTS_FILE),
        os.path.join(directory, COMMENTS_FILE),
        source_host=source_host,
        clock_skew_tolerance=clock_skew_tolerance,
    )


def _check_value(value: str, key: str) -> str:
    if any(ch in value for ch in "\t\r\n"):
        raise DatasetError(f"field {key!r} contains a forbidden character: {value!r}")
    return value


def _format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


def write_dataset(dataset: Dataset, directory: Union[str, os.PathLike]) -> None:
    """Write a dataset to ``directory`` in the record format (plus meta.rec)."""
    directory = os.fspath(directory)
    os.makedirs(directory, exist_ok=True)

    def pair(key, value):
        return f"{key}={_check_value(value, key)}"

    with open(os.path.join(directory, BLOGGERS_FILE), "w", encoding="utf-8") as fh:
        for b in dataset.bloggers:
            fields = [pair("id", b.id), pair("display_name", b.display_name)]
            if b.blog_base_url is not None:
                fields.append(pair("blog_base_url", b.blog_base_url))
            fh.write("\t".join(fields) + "\n")

    with open(os.path.join(directory, POSTS_FILE), "w", encoding="utf-8") as fh:
        for p in dataset.posts:
            fields = [
                pair("id", p.id),
                pair("author_id", p.author_id),
                pair("published_at", _format_timestamp(p.published_at)),
            ]
            if p.url is not None:
                fields.append(pair("url", p.url))
            if p.outlink_urls:
                for url in p.outlink_urls:
                    if " " in url:
                        raise DatasetError(f"outlink url contains a space: {url!r}")
                fields.append(pair("outlink_urls", " ".join(p.outlink_urls)))
            fh.write("\t".join(fields) + "\n")

    with open(os.path.join(directory, COMMENTS_FILE), "w", encoding="utf-8") as fh:
        for c in dataset.comments:
            fields = [
                pair("id", c.id),
                pair("post_id", c.post_id),
                pair("author_id", c.author_id),
                pair("created_at", _format_timestamp(c.created_at)),
            ]
            if c.parent_comment_id is not None:
                fields.append(pair("parent_comment_id", c.parent_comment_id))
            fh.write("\t".join(fields) + "\n")

    with open(os.path.join(directory, META_FILE), "w", encoding="utf-8") as fh:
        fh.write(pair("source_host", dataset.source_host) + "\n")
