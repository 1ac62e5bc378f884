"""Calendar-month partitioning of a dataset and per-slot views."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from typing import Literal

from .errors import ConfigError
from .model import Dataset, SlotView, TimeSlot

__all__ = ["slice_into_slots", "slot_view", "analyzed_slots"]

CommentAttribution = Literal["slot_local", "post_slot"]


def _month_start(ts: datetime) -> datetime:
    return datetime(ts.year, ts.month, 1, tzinfo=timezone.utc)


def _add_months(ts: datetime, months: int) -> datetime:
    month0 = (ts.year * 12 + ts.month - 1) + months
    return datetime(month0 // 12, month0 % 12 + 1, 1, tzinfo=timezone.utc)


def slice_into_slots(dataset: Dataset, slot_length: int = 1) -> list[TimeSlot]:
    """Partition the dataset's time span into calendar-aligned slots.

    Slots are disjoint, contiguous, ``slot_length`` calendar months long
    (UTC), starting at the first day of the month containing the earliest
    event, and cover every event. The final slot is flagged ``partial``
    when the observed span stops short of it: the last event precedes the
    slot's final representable second. Partial slots are returned (callers
    exclude them from analysis by default).

    An empty dataset yields an empty list.
    """
    if slot_length < 1:
        raise ConfigError("slot_length must be >= 1 month")
    events = dataset.event_timestamps()
    if not events:
        return []
    first = min(events)
    last = max(events)
    slots = []
    start = _month_start(first)
    index = 0
    while start <= last:
        end = _add_months(start, slot_length)
        partial = last < end - timedelta(seconds=1)
        slots.append(TimeSlot(index=index, start=start, end=end, partial=partial))
        start = end
        index += 1
    return slots


def slot_view(
    dataset: Dataset,
    slot: TimeSlot,
    comment_attribution: CommentAttribution = "slot_local",
) -> SlotView:
    """Restrict a dataset to one slot.

    The view holds the posts published in the slot and, with the default
    ``slot_local`` attribution, the comments both written in the slot and
    attached to a post published in the slot; comments on posts from other
    slots are excluded so each slot is self-contained. The alternative
    ``post_slot`` attribution keeps every comment whose post lies in the
    slot regardless of the comment's own timestamp (for sensitivity runs).
    """
    if comment_attribution not in ("slot_local", "post_slot"):
        raise ConfigError(
            f"unknown comment_attribution {comment_attribution!r}"
        )
    posts = [p for p in dataset.posts if slot.contains(p.published_at)]
    post_ids = {p.id for p in posts}
    if comment_attribution == "slot_local":
        comments = [
            c
            for c in dataset.comments
            if slot.contains(c.created_at) and c.post_id in post_ids
        ]
    else:
        comments = [c for c in dataset.comments if c.post_id in post_ids]
    return SlotView(dataset, slot, posts, comments)


def analyzed_slots(slots: list[TimeSlot], exclude_partial: bool = True) -> list[TimeSlot]:
    """The slots retained for analysis (partial ones dropped by default)."""
    if exclude_partial:
        return [s for s in slots if not s.partial]
    return list(slots)
