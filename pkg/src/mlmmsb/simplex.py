"""Vertex hunting on eigenvector rows and membership reconstruction.

The rows of the top-K eigenvector matrix of a rank-K aggregate form a
K-simplex whose vertices are the rows of the K pure nodes; successive
projection locates those vertices and the memberships follow by inverting
the corner matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .aggregate import Embedding
from .errors import (
    DimensionError,
    IllConditionedCornerError,
    RankDeficiencyError,
    ZeroRowFallbackWarning,
)
from .model import MembershipMatrix

RESIDUAL_FLOOR = 1e-12
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class VertexSet:
    """Indices of the rows selected as simplex vertices, in selection order."""

    indices: tuple[int, ...]
    selection_norms: tuple[float, ...]

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise DimensionError("vertex indices must be distinct")


def successive_projection(rows: np.ndarray, K: int) -> VertexSet:
    """Greedy vertex hunting by repeated projection.

    Repeats K times: pick the row of maximum l2 norm (ties broken by the
    smallest index), record its index, then project all rows onto the
    orthogonal complement of the picked row. If the input factors as
    W @ H with W row-stochastic containing every standard basis row and H
    full rank, the returned indices are exactly the K pure rows.
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2:
        raise DimensionError("input must be a 2-d array")
    n = rows.shape[0]
    if K > n:
        raise DimensionError(f"K={K} exceeds number of rows {n}")
    if not np.all(np.isfinite(rows)):
        raise DimensionError("input rows must be finite")
    residual = rows.copy()
    picked: list[int] = []
    norms: list[float] = []
    for _ in range(K):
        rn = np.linalg.norm(residual, axis=1)
        best = float(rn.max())
        if best < RESIDUAL_FLOOR:
            raise RankDeficiencyError(
                f"residual collapsed after {len(picked)} of {K} picks"
            )
        i = int(np.argmax(rn))  # first max: smallest-index tie rule
        picked.append(i)
        norms.append(best)
        u = residual[i] / best
        residual = residual - np.outer(residual @ u, u)
    return VertexSet(indices=tuple(picked), selection_norms=tuple(norms))


def estimate_memberships(emb: Embedding, vertices: VertexSet) -> MembershipMatrix:
    """Reconstruct memberships from an embedding and its simplex vertices.

    Computes Z = V @ inv(V[vertices, :]), clamps negatives to zero, and
    normalizes each row by its l1 norm. Rows whose coefficients are all
    clamped away fall back to the uniform 1/K row with a
    ``ZeroRowFallbackWarning``.
    """
    idx = np.asarray(vertices.indices, dtype=int)
    if idx.min(initial=0) < 0 or idx.max(initial=-1) >= emb.n:
        raise DimensionError("vertex index out of range")
    corner = emb.vectors[idx, :]
    if np.linalg.cond(corner) > CONDITION_LIMIT:
        raise IllConditionedCornerError(
            "corner matrix condition number exceeds 1e12"
        )
    # Z @ corner = V, solved without forming the explicit inverse
    z = np.linalg.solve(corner.T, emb.vectors.T).T
    z = np.maximum(z, 0.0)
    sums = z.sum(axis=1)
    dead = sums <= 0.0
    if np.any(dead):
        warnings.warn(
            f"{int(dead.sum())} rows had no positive coefficients; "
            "reset to uniform membership",
            ZeroRowFallbackWarning,
        )
        z[dead] = 1.0 / emb.K
        sums[dead] = 1.0
    z = z / sums[:, None]
    # renormalize exactly against round-off so row sums hit the 1e-12 invariant
    z = z / z.sum(axis=1, keepdims=True)
    return MembershipMatrix(rows=z)
