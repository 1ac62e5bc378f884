"""Shared fixture builders for the test suite."""

from datetime import datetime, timezone

from blogrank import Blogger, Comment, Dataset, Post


def utc(text: str) -> datetime:
    """Parse shorthand like '2008-01-02' or '2008-01-02T03:04:05' as UTC."""
    if "T" not in text:
        text += "T00:00:00"
    return datetime.fromisoformat(text).replace(tzinfo=timezone.utc)


def blogger(i: int, host: str = "portal.example") -> Blogger:
    return Blogger(
        id=f"b{i}", display_name=f"Blogger {i}", blog_base_url=f"http://b{i}.{host}"
    )


def post(pid, author, when, url="auto", outlinks=(), host="portal.example"):
    if url == "auto":
        url = f"http://{author}.{host}/posts/{pid}"
    return Post(
        id=pid,
        author_id=author,
        published_at=utc(when),
        url=url,
        outlink_urls=tuple(outlinks),
    )


def comment(cid, pid, author, when, parent=None):
    return Comment(
        id=cid, post_id=pid, author_id=author, created_at=utc(when),
        parent_comment_id=parent,
    )


def dataset(bloggers, posts, comments, host="portal.example", **kwargs) -> Dataset:
    return Dataset(bloggers, posts, comments, source_host=host, **kwargs)
