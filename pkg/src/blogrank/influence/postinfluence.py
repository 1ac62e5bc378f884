"""Comment-based blogger influence (the PostInfluence method).

A blogger's score has two parts: a response-quality term summing a
nonlinear score of each of their posts' comment responses, and a
recursive endorsement term that redistributes influence along the
comment-proportion graph between bloggers:

    i' = beta + w * A^T @ i

``A[v, a]`` is the share of blogger v's comments that went to blogger a's
posts, so each row sums to one (bloggers who commented nobody get a
uniform row). The blogger's own activity in their own threads counts for
nothing: self-comments are excluded both from post responses and from the
comment graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ..errors import ConfigError
from ..model import InfluenceVector, Post, Ranking, SlotView
from ._iteration import iterate_fixed_point

__all__ = [
    "ResponseScoreParams",
    "solve_response_params",
    "post_response",
    "max_response",
    "response_score",
    "compute_beta",
    "CommentGraph",
    "build_comment_graph",
    "rank_bloggers",
    "PostInfluenceRanker",
]


@dataclass(frozen=True)
class ResponseScoreParams:
    """Parameters of the piecewise-exponential response scoring function.

    The function is ``penalty`` for raw responses of at most one comment,
    ``exp(-lambda_h * (m_h - x))`` above ``branch_threshold`` (x is the
    response normalized by the slot maximum) and
    ``exp(-lambda_l * (m_l - x))`` below it.
    """

    lambda_h: float
    m_h: float
    lambda_l: float
    m_l: float
    penalty: float = -0.1
    branch_threshold: float = 0.25


def solve_response_params(
    max_anchor: float = 1.0,
    branch_threshold: float = 0.25,
    threshold_value: float = 0.2,
    zero_value: float = 0.001,
    penalty: float = -0.1,
) -> ResponseScoreParams:
    """Solve the anchor equations of the response function in closed form.

    Both branches pass through ``threshold_value`` at ``branch_threshold``
    (continuity); the low branch hits ``zero_value`` at x=0 and the high
    branch hits ``max_anchor`` at x=1. With the defaults:

    * low:  lambda_l * m_l = ln(1000) and lambda_l * (m_l - 0.25) = ln(5),
      giving lambda_l = 4*ln(200) and m_l = ln(1000)/lambda_l,
    * high: f(1) = 1 forces m_h = 1, then lambda_h = ln(5)/0.75.
    """
    if not (0.0 < branch_threshold < 1.0):
        raise ConfigError("branch_threshold must be in (0, 1)")
    if min(max_anchor, threshold_value, zero_value) <= 0:
        raise ConfigError("anchor values must be positive")
    if not (zero_value < threshold_value < max_anchor):
        raise ConfigError("anchors must increase: zero < threshold < max")
    lambda_l = math.log(threshold_value / zero_value) / branch_threshold
    m_l = -math.log(zero_value) / lambda_l
    lambda_h = math.log(max_anchor / threshold_value) / (1.0 - branch_threshold)
    m_h = 1.0 - math.log(max_anchor) / lambda_h
    return ResponseScoreParams(
        lambda_h=lambda_h,
        m_h=m_h,
        lambda_l=lambda_l,
        m_l=m_l,
        penalty=penalty,
        branch_threshold=branch_threshold,
    )


def post_response(view: SlotView, post: Post) -> int:
    """Comments a post drew in the slot, excluding the author's own.

    Counts every commenter, blogger or not; only the post author's
    activity in their own thread is ignored.
    """
    return sum(
        1 for c in view.comments_for(post.id) if c.author_id != post.author_id
    )


def max_response(view: SlotView) -> int:
    """The slot's maximum post response; at least 1 so normalization is
    always defined (an all-silent slot scores every post with the penalty
    branch anyway)."""
    if not view.posts:
        raise ValueError("max_response is undefined for a view without posts")
    return max(1, max(post_response(view, p) for p in view.posts))


def response_score(raw: int, max_resp: int, params: ResponseScoreParams) -> float:
    """Score one post's raw comment response.

    A raw response of 0 or 1 comment earns the flat penalty. Otherwise the
    response is normalized by the slot maximum (clamped to 1.0, in case the
    maximum came from a sub-population) and pushed through the branch whose
    range it falls in.
    """
    if max_resp < 1:
        raise ValueError("max_resp must be >= 1")
    if raw <= 1:
        return params.penalty
    x = min(raw / max_resp, 1.0)
    if x > params.branch_threshold:
        return math.exp(-params.lambda_h * (params.m_h - x))
    return math.exp(-params.lambda_l * (params.m_l - x))


def compute_beta(
    view: SlotView,
    params: ResponseScoreParams,
    max_resp: Optional[int] = None,
) -> np.ndarray:
    """Response-quality term per blogger, aligned with ``view.blogger_ids``:
    the sum of response scores over the blogger's posts in the slot.
    Entries can be negative when penalty posts dominate."""
    if max_resp is None:
        max_resp = max_response(view) if view.posts else 1
    return np.array(
        [
            sum(
                response_score(post_response(view, p), max_resp, params)
                for p in view.posts_by(blogger_id)
            )
            for blogger_id in view.blogger_ids
        ],
        dtype=float,
    )


@dataclass(frozen=True)
class CommentGraph:
    """Row-stochastic blogger-to-blogger comment proportions for one slot.

    ``matrix[v, a]`` is the fraction of blogger v's (non-self) comments
    that landed on blogger a's posts. Rows of bloggers who commented
    nobody are filled uniformly with ``1/n``.
    """

    blogger_ids: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        n = len(self.blogger_ids)
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (n, n):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match {n} bloggers"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        return len(self.blogger_ids)


def build_comment_graph(view: SlotView) -> CommentGraph:
    """Count comments between the slot's bloggers and normalize each row.

    Only comments whose author is also a blogger of the view count (the
    recursion runs over bloggers, and commenting-only users have no row);
    comments by a blogger on their own posts are excluded.
    """
    ids = view.blogger_ids
    index = {b: i for i, b in enumerate(ids)}
    n = len(ids)
    counts = np.zeros((n, n))
    for post in view.posts:
        ai = index[post.author_id]
        for comment in view.comments_for(post.id):
            vi = index.get(comment.author_id)
            if vi is None or vi == ai:
                continue
            counts[vi, ai] += 1.0
    if n > 0:
        totals = counts.sum(axis=1)
        dangling = totals == 0
        with np.errstate(invalid="ignore"):
            counts = np.divide(counts, totals[:, None], where=totals[:, None] > 0)
        counts[dangling] = 1.0 / n
    return CommentGraph(ids, counts)


def rank_bloggers(
    graph: CommentGraph,
    beta: np.ndarray,
    w: float = 0.85,
    tau: float = 1e-8,
    max_iter: int = 100,
    init_value: float = 0.5,
) -> InfluenceVector:
    """Iterate blogger influence to its fixed point.

    ``w < 1`` with a row-stochastic graph makes the map a contraction, so
    the fixed point is unique and independent of ``init_value``.
    """
    if not (0.0 <= w < 1.0):
        raise ConfigError("w must lie in [0, 1)")
    if tau <= 0:
        raise ConfigError("tau must be positive")
    if max_iter < 1:
        raise ConfigError("max_iter must be >= 1")
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (graph.n,):
        raise ValueError(f"beta shape {beta.shape} does not match {graph.n} bloggers")
    at = graph.matrix.T

    def step(i):
        return beta + w * (at @ i)

    result = iterate_fixed_point(step, np.full(graph.n, init_value), tau, max_iter)
    return InfluenceVector(
        entity_ids=graph.blogger_ids,
        scores=result.vector,
        iterations_used=result.iterations,
        converged=result.converged,
        final_similarity=result.similarity,
    )


class PostInfluenceRanker(BaseEstimator):
    """Slot-level estimator for comment-based blogger influence.

    Parameters
    ----------
    w : float in [0, 1)
        Weight of the recursive endorsement term (0 disables recursion;
        the default 0.85 follows random-walk custom).
    tau : float
        Convergence tolerance on ``1 - cos_sim`` of successive iterates.
    max_iter : int
        Iteration budget.
    init_value : float
        Initial score for every blogger.
    response_params : ResponseScoreParams or None
        Scoring-function parameters; None solves the standard anchors.

    Attributes (after ``fit``)
    --------------------------
    influence_ : InfluenceVector   per-blogger scores and convergence info
    ranking_ : Ranking             descending, ties by id
    beta_ : ndarray                response-quality term per blogger
    max_response_ : int
    n_iter_ : int
    converged_ : bool
    matrix_dim_ : int              dimension of the iterated matrix (#bloggers)
    """

    def __init__(
        self,
        w: float = 0.85,
        tau: float = 1e-8,
        max_iter: int = 100,
        init_value: float = 0.5,
        response_params: Optional[ResponseScoreParams] = None,
    ):
        self.w = w
        self.tau = tau
        self.max_iter = max_iter
        self.init_value = init_value
        self.response_params = response_params

    def fit(self, view: SlotView) -> "PostInfluenceRanker":
        params = self.response_params or solve_response_params()
        graph = build_comment_graph(view)
        self.max_response_ = max_response(view) if view.posts else 1
        self.beta_ = compute_beta(view, params, self.max_response_)
        self.influence_ = rank_bloggers(
            graph,
            self.beta_,
            w=self.w,
            tau=self.tau,
            max_iter=self.max_iter,
            init_value=self.init_value,
        )
        self.ranking_ = Ranking.from_scores(self.influence_.as_dict())
        self.n_iter_ = self.influence_.iterations_used
        self.converged_ = self.influence_.converged
        self.matrix_dim_ = graph.n
        return self

    def fit_predict(self, view: SlotView) -> Ranking:
        return self.fit(view).ranking_

    def top_k(self, k: int) -> Ranking:
        if not hasattr(self, "ranking_"):
            raise NotFittedError("PostInfluenceRanker must be fitted before ranking")
        return self.ranking_.top(k)
