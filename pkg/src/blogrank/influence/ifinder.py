"""Post-link influence ranking (the iFinder scheme).

Posts gain influence from the posts that link to them and cede influence
through their own outlinks; the comment count of a post feeds in as a
direct popularity signal. Scores come from iterating

    i' = eloquence * (w_c * gamma + (w_in * A^T - w_out * A) @ i)

over the slot's post-link adjacency matrix ``A`` until the direction of
the score vector stabilizes. Blogger-level rankings aggregate the post
scores per author (mean by default, max as the alternative).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ..errors import ConfigError
from ..links import LinkResolution
from ..model import InfluenceVector, Post, Ranking, SlotView
from ._iteration import iterate_fixed_point

__all__ = [
    "PostLinkGraph",
    "build_post_link_graph",
    "comment_counts",
    "rank_posts",
    "aggregate_to_bloggers",
    "IFinderRanker",
]

AggregateStrategy = Literal["avg", "max"]


@dataclass(frozen=True)
class PostLinkGraph:
    """Binary post-to-post adjacency for one slot.

    ``matrix[p, q] == 1`` when post p links to post q (both in the slot).
    Self-links are dropped, repeated links collapse to a single edge, and
    rows of posts without any in-slot outlink are filled uniformly with
    ``1/n`` to keep the iteration well defined.
    """

    post_ids: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        n = len(self.post_ids)
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (n, n):
            raise ValueError(f"matrix shape {matrix.shape} does not match {n} posts")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        return len(self.post_ids)


def build_post_link_graph(view: SlotView, resolution: LinkResolution) -> PostLinkGraph:
    """Build the slot's post-link adjacency from a dataset-wide resolution.

    Only links whose source and target posts both lie in the slot become
    edges; everything else (external links, author-only matches, targets
    in other slots) leaves the source row empty, subject to the uniform
    dangling fill.
    """
    ids = tuple(p.id for p in view.posts)
    index = {pid: i for i, pid in enumerate(ids)}
    n = len(ids)
    matrix = np.zeros((n, n))
    for source, target in resolution.post_matched_pairs():
        si = index.get(source)
        ti = index.get(target)
        if si is None or ti is None or si == ti:
            continue
        matrix[si, ti] = 1.0
    if n > 0:
        dangling = matrix.sum(axis=1) == 0
        matrix[dangling] = 1.0 / n
    return PostLinkGraph(ids, matrix)


def comment_counts(view: SlotView) -> np.ndarray:
    """Comments per post within the view, the post author's own included."""
    return np.array(
        [len(view.comments_for(p.id)) for p in view.posts], dtype=float
    )


def rank_posts(
    graph: PostLinkGraph,
    gamma: np.ndarray,
    w_in: float = 1.0,
    w_out: float = 1.0,
    w_c: float = 1.0,
    eloquence: Optional[np.ndarray] = None,
    tau: float = 1e-8,
    max_iter: int = 100,
    init_value: float = 0.5,
) -> InfluenceVector:
    """Iterate post influence scores to a fixed point.

    There is no divergence guard beyond ``max_iter``: a non-contractive
    weight choice reports ``converged=False`` with the last iterate.
    """
    _check_iteration_params(w_in, w_out, w_c, tau, max_iter)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (graph.n,):
        raise ValueError(
            f"gamma shape {gamma.shape} does not match {graph.n} posts"
        )
    if eloquence is None:
        eloquence = np.ones(graph.n)
    else:
        eloquence = np.asarray(eloquence, dtype=float)
        if eloquence.shape != (graph.n,):
            raise ValueError(
                f"eloquence shape {eloquence.shape} does not match {graph.n} posts"
            )
    a = graph.matrix
    base = w_c * gamma

    def step(i):
        return eloquence * (base + w_in * (a.T @ i) - w_out * (a @ i))

    result = iterate_fixed_point(step, np.full(graph.n, init_value), tau, max_iter)
    return InfluenceVector(
        entity_ids=graph.post_ids,
        scores=result.vector,
        iterations_used=result.iterations,
        converged=result.converged,
        final_similarity=result.similarity,
    )


def aggregate_to_bloggers(
    view: SlotView,
    post_scores: InfluenceVector,
    strategy: AggregateStrategy = "avg",
) -> Ranking:
    """Collapse post scores to one score per blogger (mean or max of the
    blogger's posts in the slot) and rank descending, ties by id."""
    if strategy not in ("avg", "max"):
        raise ConfigError(f"unknown aggregation strategy {strategy!r}")
    score_of = post_scores.as_dict()
    per_blogger = {}
    for blogger in view.bloggers:
        values = [score_of[p.id] for p in view.posts_by(blogger.id)]
        per_blogger[blogger.id] = (
            max(values) if strategy == "max" else sum(values) / len(values)
        )
    return Ranking.from_scores(per_blogger)


def _check_iteration_params(w_in, w_out, w_c, tau, max_iter):
    if w_in < 0 or w_out < 0 or w_c < 0:
        raise ConfigError("weights w_in, w_out, w_c must be nonnegative")
    if tau <= 0:
        raise ConfigError("tau must be positive")
    if max_iter < 1:
        raise ConfigError("max_iter must be >= 1")


class IFinderRanker(BaseEstimator):
    """Slot-level estimator for post-link influence.

    Parameters
    ----------
    w_in, w_out : float
        Weights of incoming and outgoing link influence.
    w_c : float
        Weight of the per-post comment count.
    eloquence : callable or None
        Optional hook mapping a :class:`Post` to a nonnegative weight.
        Ships as None (constant 1): the content-length notion of post
        eloquence is deliberately not modelled.
    tau : float
        Convergence tolerance on ``1 - cos_sim`` of successive iterates.
    max_iter : int
        Iteration budget.
    init_value : float
        Initial score for every post (0.5 by default).
    aggregate : {"avg", "max"}
        How post scores collapse to a blogger score.

    Attributes (after ``fit``)
    --------------------------
    post_influence_ : InfluenceVector
    ranking_ : Ranking            blogger-level, descending
    n_iter_ : int
    converged_ : bool
    matrix_dim_ : int             dimension of the iterated matrix (#posts)
    """

    def __init__(
        self,
        w_in: float = 1.0,
        w_out: float = 1.0,
        w_c: float = 1.0,
        eloquence: Optional[Callable[[Post], float]] = None,
        tau: float = 1e-8,
        max_iter: int = 100,
        init_value: float = 0.5,
        aggregate: AggregateStrategy = "avg",
    ):
        self.w_in = w_in
        self.w_out = w_out
        self.w_c = w_c
        self.eloquence = eloquence
        self.tau = tau
        self.max_iter = max_iter
        self.init_value = init_value
        self.aggregate = aggregate

    def fit(self, view: SlotView, resolution: LinkResolution) -> "IFinderRanker":
        graph = build_post_link_graph(view, resolution)
        gamma = comment_counts(view)
        eloquence = None
        if self.eloquence is not None:
            eloquence = np.array([self.eloquence(p) for p in view.posts], dtype=float)
        self.post_influence_ = rank_posts(
            graph,
            gamma,
            w_in=self.w_in,
            w_out=self.w_out,
            w_c=self.w_c,
            eloquence=eloquence,
            tau=self.tau,
            max_iter=self.max_iter,
            init_value=self.init_value,
        )
        self.ranking_ = aggregate_to_bloggers(view, self.post_influence_, self.aggregate)
        self.n_iter_ = self.post_influence_.iterations_used
        self.converged_ = self.post_influence_.converged
        self.matrix_dim_ = graph.n
        return self

    def fit_predict(self, view: SlotView, resolution: LinkResolution) -> Ranking:
        return self.fit(view, resolution).ranking_

    def top_k(self, k: int) -> Ranking:
        if not hasattr(self, "ranking_"):
            raise NotFittedError("IFinderRanker must be fitted before ranking")
        return self.ranking_.top(k)
