"""blogrank: per-timeslot influence rankings for bloggers.

Two methods rank the bloggers of each calendar-month slot: a post-link
scheme iterating influence over the post adjacency graph (``ifinder``)
and a comment-based scheme scoring post responses plus a recursive
endorsement term (``pinf``). Overlap-family metrics quantify how much the
two rankings agree.
"""

from .errors import (
    BlogrankError,
    ConfigError,
    ConvergenceError,
    DanglingReferenceError,
    DatasetError,
    DuplicateIdError,
    MalformedRecordError,
)
from .influence import (
    IFinderRanker,
    PostInfluenceRanker,
    ResponseScoreParams,
    aggregate_to_bloggers,
    build_comment_graph,
    build_post_link_graph,
    comment_counts,
    compute_beta,
    max_response,
    post_response,
    rank_bloggers,
    rank_posts,
    response_score,
    solve_response_params,
)
from .io import load_dataset, parse_dataset, write_dataset
from .links import LinkResolution, normalize_url, resolve_links
from .metrics import (
    FrequencyRanking,
    RankComparison,
    average_overlap,
    compare_methods_over_time,
    compare_rankings,
    frequency_ranking,
    overlap,
    proportion_at_depth,
    rank_biased_overlap,
)
from .model import (
    Blogger,
    Comment,
    Dataset,
    InfluenceVector,
    Post,
    Ranking,
    SlotView,
    TimeSlot,
)
from .reports import (
    LinkFunnelReport,
    SelfReferenceRow,
    SlotSeriesPoint,
    cross_slot_comment_count,
    link_funnel,
    self_comment_leaderboard,
    self_link_leaderboard,
    slot_series,
)
from .slots import analyzed_slots, slice_into_slots, slot_view
from .synth import SynthConfig, make_dataset

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BlogrankError",
    "ConfigError",
    "ConvergenceError",
    "DanglingReferenceError",
    "DatasetError",
    "DuplicateIdError",
    "MalformedRecordError",
    "IFinderRanker",
    "PostInfluenceRanker",
    "ResponseScoreParams",
    "aggregate_to_bloggers",
    "build_comment_graph",
    "build_post_link_graph",
    "comment_counts",
    "compute_beta",
    "max_response",
    "post_response",
    "rank_bloggers",
    "rank_posts",
    "response_score",
    "solve_response_params",
    "load_dataset",
    "parse_dataset",
    "write_dataset",
    "LinkResolution",
    "normalize_url",
    "resolve_links",
    "FrequencyRanking",
    "RankComparison",
    "average_overlap",
    "compare_methods_over_time",
    "compare_rankings",
    "frequency_ranking",
    "overlap",
    "proportion_at_depth",
    "rank_biased_overlap",
    "Blogger",
    "Comment",
    "Dataset",
    "InfluenceVector",
    "Post",
    "Ranking",
    "SlotView",
    "TimeSlot",
    "LinkFunnelReport",
    "SelfReferenceRow",
    "SlotSeriesPoint",
    "cross_slot_comment_count",
    "link_funnel",
    "self_comment_leaderboard",
    "self_link_leaderboard",
    "slot_series",
    "analyzed_slots",
    "slice_into_slots",
    "slot_view",
    "SynthConfig",
    "make_dataset",
]
