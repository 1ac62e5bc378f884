"""Ranking-similarity metrics: overlap, average overlap, rank-biased overlap.

All three operate on two equal-length rankings (lists of distinct ids,
best first). ``average_overlap`` is the mean prefix-intersection
proportion over all depths; ``rank_biased_overlap`` weights the same
proportions geometrically so agreement near the head counts most. The
rank-biased overlap here is the finite-depth sum (no extrapolation to
indefinite lists): identical lists of length N score ``1 - p**N``, not 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .model import Ranking

__all__ = [
    "overlap",
    "proportion_at_depth",
    "average_overlap",
    "rank_biased_overlap",
    "RankComparison",
    "compare_rankings",
    "compare_methods_over_time",
    "FrequencyRanking",
    "frequency_ranking",
]

RankingLike = Union[Ranking, Sequence[str]]


def _ids(ranking: RankingLike) -> list[str]:
    ids = list(ranking.ids) if isinstance(ranking, Ranking) else list(ranking)
    if len(set(ids)) != len(ids):
        raise ValueError("ranking contains duplicate ids")
    return ids


def _paired(s: RankingLike, t: RankingLike) -> tuple[list[str], list[str]]:
    s_ids, t_ids = _ids(s), _ids(t)
    if len(s_ids) != len(t_ids):
        raise ValueError(
            f"rankings must have equal length (got {len(s_ids)} and {len(t_ids)})"
        )
    return s_ids, t_ids


def _prefix_overlaps(s_ids: list[str], t_ids: list[str]) -> list[int]:
    """Intersection size of the two depth-d prefixes for every d, computed
    in one pass with running membership sets."""
    seen_s: set[str] = set()
    seen_t: set[str] = set()
    count = 0
    out = []
    for a, b in zip(s_ids, t_ids):
        if a == b:
            count += 1
        else:
            if a in seen_t:
                count += 1
            if b in seen_s:
                count += 1
        seen_s.add(a)
        seen_t.add(b)
        out.append(count)
    return out


def overlap(s: RankingLike, t: RankingLike) -> int:
    """Number of ids the two rankings share."""
    s_ids, t_ids = _paired(s, t)
    return len(set(s_ids) & set(t_ids))


def proportion_at_depth(s: RankingLike, t: RankingLike, d: int) -> float:
    """Intersection size of the depth-d prefixes divided by d."""
    s_ids, t_ids = _paired(s, t)
    if not (1 <= d <= len(s_ids)):
        raise ValueError(f"depth {d} out of range 1..{len(s_ids)}")
    return len(set(s_ids[:d]) & set(t_ids[:d])) / d


def average_overlap(s: RankingLike, t: RankingLike) -> float:
    """Mean prefix-intersection proportion over depths 1..N."""
    s_ids, t_ids = _paired(s, t)
    if not s_ids:
        raise ValueError("average_overlap requires nonempty rankings")
    overlaps = _prefix_overlaps(s_ids, t_ids)
    return sum(o / d for d, o in enumerate(overlaps, start=1)) / len(s_ids)


def rank_biased_overlap(s: RankingLike, t: RankingLike, p: float = 0.85) -> float:
    """Finite-depth rank-biased overlap with persistence ``p``:
    ``(1-p) * sum_d p**(d-1) * proportion(d)`` over depths 1..N."""
    if not (0.0 < p < 1.0):
        raise ValueError("p must lie strictly between 0 and 1")
    s_ids, t_ids = _paired(s, t)
    overlaps = _prefix_overlaps(s_ids, t_ids)
    total = 0.0
    weight = 1.0  # p**(d-1)
    for d, o in enumerate(overlaps, start=1):
        total += weight * o / d
        weight *= p
    return (1.0 - p) * total


@dataclass(frozen=True)
class RankComparison:
    """Overlap-family metrics for one ranking pair at a common depth."""

    depth: int
    overlap: int
    average_overlap: float
    rbo: float
    p: float

    @property
    def overlap_fraction(self) -> float:
        """Overlap normalized by depth so it plots on the same [0, 1] axis."""
        return self.overlap / self.depth if self.depth else 0.0


def compare_rankings(
    s: RankingLike, t: RankingLike, k: int | None = None, p: float = 0.85
) -> RankComparison:
    """Truncate both rankings to the common depth and compute all metrics.

    The effective depth is ``min(k, len(s), len(t))`` (just the common
    length when k is None); an empty common depth yields all-zero metrics.
    """
    s_ids, t_ids = _ids(s), _ids(t)
    depth = min(len(s_ids), len(t_ids))
    if k is not None:
        if k < 1:
            raise ValueError("k must be >= 1")
        depth = min(depth, k)
    s_ids, t_ids = s_ids[:depth], t_ids[:depth]
    if depth == 0:
        return RankComparison(0, 0, 0.0, 0.0, p)
    return RankComparison(
        depth=depth,
        overlap=overlap(s_ids, t_ids),
        average_overlap=average_overlap(s_ids, t_ids),
        rbo=rank_biased_overlap(s_ids, t_ids, p),
        p=p,
    )


def compare_methods_over_time(
    rankings_a: Sequence[RankingLike],
    rankings_b: Sequence[RankingLike],
    k: int = 15,
    p: float = 0.85,
) -> list[RankComparison]:
    """Per-slot comparison of two methods' rankings.

    Both sequences must cover the same slots in the same order; each pair
    is truncated to depth ``min(k, len(a), len(b))`` and compared.
    """
    if len(rankings_a) != len(rankings_b):
        raise ValueError(
            f"ranking series cover different slot counts "
            f"({len(rankings_a)} vs {len(rankings_b)})"
        )
    return [compare_rankings(a, b, k=k, p=p) for a, b in zip(rankings_a, rankings_b)]


@dataclass(frozen=True)
class FrequencyRanking:
    """How often each blogger made the top k across slot rankings.

    ``entries`` is (blogger id, slot count), descending by count with ties
    broken by id; bloggers who never entered a top k are absent.
    """

    entries: tuple[tuple[str, int], ...]
    k: int
    n_slots: int

    def ids(self) -> list[str]:
        return [e[0] for e in self.entries]

    def top(self, n: int) -> "Ranking":
        return Ranking(tuple(self.ids()[:n]))


def frequency_ranking(
    per_slot_rankings: Sequence[RankingLike], k: int = 15
) -> FrequencyRanking:
    """Count top-k appearances per blogger over a series of slot rankings.
    Rankings shorter than k are used in full."""
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: dict[str, int] = {}
    for ranking in per_slot_rankings:
        for blogger in _ids(ranking)[:k]:
            counts[blogger] = counts.get(blogger, 0) + 1
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return FrequencyRanking(tuple(ordered), k=k, n_slots=len(per_slot_rankings))
