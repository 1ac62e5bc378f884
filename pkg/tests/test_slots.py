import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blogrank import (
    ConfigError,
    DatasetError,
    analyzed_slots,
    make_dataset,
    slice_into_slots,
    slot_view,
    SynthConfig,
)
from util import blogger, comment, dataset, post, utc


def span_dataset(first: str, last: str):
    return dataset(
        [blogger(1)],
        [post("pa", "b1", first, url="http://b1.portal.example/a"),
         post("pb", "b1", last, url="http://b1.portal.example/b")],
        [],
    )


def test_multi_year_span_yields_67_slots_last_partial():
    ds = span_dataset("2008-01-01", "2013-07-06")
    slots = slice_into_slots(ds)
    assert len(slots) == 67
    assert [s.partial for s in slots] == [False] * 66 + [True]
    assert len(analyzed_slots(slots)) == 66
    assert slots[0].start == utc("2008-01-01")
    assert slots[-1].start == utc("2013-07-01")
    assert slots[-1].end == utc("2013-08-01")


def test_empty_dataset_has_no_slots():
    ds = dataset([blogger(1)], [], [])
    assert slice_into_slots(ds) == []


def test_exact_quarter_has_three_full_slots():
    ds = span_dataset("2008-01-01", "2008-03-31T23:59:59")
    slots = slice_into_slots(ds)
    assert len(slots) == 3
    assert all(not s.partial for s in slots)
    assert [s.index for s in slots] == [0, 1, 2]
    assert slots[1].start == utc("2008-02-01") and slots[1].end == utc("2008-03-01")


def test_slots_are_contiguous_and_calendar_aligned():
    ds = span_dataset("2008-11-15T08:00:00", "2009-02-10")
    slots = slice_into_slots(ds)
    assert slots[0].start == utc("2008-11-01")  # month containing first event
    for a, b in zip(slots, slots[1:]):
        assert a.end == b.start
        assert a.start.day == 1 and a.start.hour == 0


def test_multi_month_slot_length():
    ds = span_dataset("2008-01-01", "2008-05-15")
    slots = slice_into_slots(ds, slot_length=2)
    assert [(s.start.month, s.end.month) for s in slots] == [(1, 3), (3, 5), (5, 7)]
    assert slots[-1].partial
    with pytest.raises(ConfigError):
        slice_into_slots(ds, slot_length=0)


def test_comment_timestamps_extend_the_span():
    ds = dataset(
        [blogger(1)],
        [post("p1", "b1", "2008-01-10")],
        [comment("c1", "p1", "u1", "2008-03-05")],
    )
    slots = slice_into_slots(ds)
    assert len(slots) == 3  # Jan, Feb, Mar


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), months=st.integers(1, 8))
def test_partition_property_every_event_in_exactly_one_slot(seed, months):
    ds = make_dataset(SynthConfig(seed=seed, months=months, bloggers=4,
                                  comment_rate=2.0, posts_per_blogger_per_month=2.0))
    slots = slice_into_slots(ds)
    for ts in ds.event_timestamps():
        assert sum(1 for s in slots if s.contains(ts)) == 1


class TestSlotView:
    def fixture(self):
        return dataset(
            [blogger(1), blogger(2)],
            [
                post("p_jan", "b1", "2008-01-10"),
                post("p_feb", "b2", "2008-02-10"),
                post("p_feb_quiet", "b1", "2008-02-20"),
            ],
            [
                comment("c_jan", "p_jan", "b2", "2008-01-11"),
                # written in Feb on a January post: excluded from both slot views
                comment("c_cross", "p_jan", "b2", "2008-02-02"),
                comment("c_feb", "p_feb", "u7", "2008-02-12"),
            ],
        )

    def test_slot_local_attribution(self):
        ds = self.fixture()
        jan, feb = slice_into_slots(ds)[:2]
        view_jan = slot_view(ds, jan)
        view_feb = slot_view(ds, feb)
        assert [p.id for p in view_jan.posts] == ["p_jan"]
        assert [c.id for c in view_jan.comments] == ["c_jan"]
        assert [c.id for c in view_feb.comments] == ["c_feb"]
        assert view_jan.blogger_ids == ("b1",)
        assert view_feb.blogger_ids == ("b1", "b2")  # zero-comment post counts

    def test_post_slot_attribution_keeps_late_comments(self):
        ds = self.fixture()
        jan = slice_into_slots(ds)[0]
        view = slot_view(ds, jan, comment_attribution="post_slot")
        assert sorted(c.id for c in view.comments) == ["c_cross", "c_jan"]
        with pytest.raises(ConfigError):
            slot_view(ds, jan, comment_attribution="whenever")

    def test_views_partition_posts(self):
        ds = make_dataset(SynthConfig(seed=5, months=4, bloggers=6))
        slots = slice_into_slots(ds)
        seen = []
        total_comments = 0
        for slot in slots:
            view = slot_view(ds, slot)
            seen.extend(p.id for p in view.posts)
            total_comments += len(view.comments)
            for p in view.posts:
                assert p.author_id in view.blogger_ids
        assert sorted(seen) == sorted(p.id for p in ds.posts)
        assert total_comments <= len(ds.comments)

    def test_comments_must_reference_view_posts(self):
        from blogrank.model import SlotView

        ds = self.fixture()
        jan = slice_into_slots(ds)[0]
        with pytest.raises(DatasetError, match="outside the view"):
            SlotView(ds, jan, posts=[ds.posts_by_id["p_jan"]],
                     comments=[ds.comments_by_id["c_feb"]])
