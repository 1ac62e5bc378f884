from ._iteration import cosine_similarity, iterate_fixed_point
from .ifinder import (
    IFinderRanker,
    PostLinkGraph,
    aggregate_to_bloggers,
    build_post_link_graph,
    comment_counts,
    rank_posts,
)
from .postinfluence import (
    CommentGraph,
    PostInfluenceRanker,
    ResponseScoreParams,
    build_comment_graph,
    compute_beta,
    max_response,
    post_response,
    rank_bloggers,
    response_score,
    solve_response_params,
)

__all__ = [
    "cosine_similarity",
    "iterate_fixed_point",
    "IFinderRanker",
    "PostLinkGraph",
    "aggregate_to_bloggers",
    "build_post_link_graph",
    "comment_counts",
    "rank_posts",
    "CommentGraph",
    "PostInfluenceRanker",
    "ResponseScoreParams",
    "build_comment_graph",
    "compute_beta",
    "max_response",
    "post_response",
    "rank_bloggers",
    "response_score",
    "solve_response_params",
]
