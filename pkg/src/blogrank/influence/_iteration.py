"""Fixed-point iteration with a cosine-similarity stopping rule.

Both influence methods iterate a linear/affine map from a constant initial
vector and stop once successive iterates point in (numerically) the same
direction: ``1 - cos_sim(i, i') < tau``. Iteration budgets cap runaway
maps; callers read the ``converged`` flag.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = ["cosine_similarity", "iterate_fixed_point", "IterationResult"]


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    Zero vectors need a convention: two zero vectors compare as identical
    (similarity 1), a zero vector against a nonzero one as maximally
    dissimilar (similarity 0).
    """
    return 1.0 - _direction_deficit(u, v)


def _direction_deficit(u: np.ndarray, v: np.ndarray) -> float:
    """``1 - cos(angle(u, v))`` computed as half the squared chord between
    the unit vectors (an exact identity). Unlike ``1 - dot/(|u||v|)`` this
    stays accurate for tiny angles instead of flooring at float epsilon,
    so tight tolerances keep driving the iteration toward the numeric
    fixed point."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 and nv == 0.0:
        return 0.0
    if nu == 0.0 or nv == 0.0:
        return 1.0
    chord2 = float(np.sum((u / nu - v / nv) ** 2))
    return min(chord2 / 2.0, 2.0)


class IterationResult:
    __slots__ = ("vector", "iterations", "converged", "similarity")

    def __init__(self, vector, iterations, converged, similarity):
        self.vector = vector
        self.iterations = iterations
        self.converged = converged
        self.similarity = similarity


def iterate_fixed_point(
    step: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    tau: float,
    max_iter: int,
) -> IterationResult:
    """Apply ``step`` repeatedly from ``x0``.

    Stops after the first application whose result is directionally within
    ``tau`` of its predecessor (``1 - cos_sim < tau``), or after
    ``max_iter`` applications, whichever comes first. An empty vector is
    trivially converged in zero iterations.
    """
    x = np.asarray(x0, dtype=float)
    if x.size == 0:
        return IterationResult(x.copy(), 0, True, 1.0)
    deficit = 0.0
    for iteration in range(1, max_iter + 1):
        x_next = np.asarray(step(x), dtype=float)
        deficit = _direction_deficit(x, x_next)
        x = x_next
        if deficit < tau:
            return IterationResult(x, iteration, True, 1.0 - deficit)
    return IterationResult(x, max_iter, False, 1.0 - deficit)
