"""Evaluation metrics: permutation-matched errors, fuzzy modularities,
node-purity indices, and modularity-based community-count selection."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    EmptyLayerWarning,
    EmptyNetworkError,
    ModelSelectionError,
    UnsupportedKError,
)
from .estimators import estimator
from .model import MembershipMatrix, MultiLayerNetwork

MAX_BRUTE_FORCE_K = 8

HIGHLY_MIXED = "HIGHLY_MIXED"
NEUTRAL = "NEUTRAL"
HIGHLY_PURE = "HIGHLY_PURE"

MIXED_THRESHOLD = 0.6
PURE_THRESHOLD = 0.9


@dataclass(frozen=True)
class ErrorReport:
    """Permutation-minimized distances between two membership matrices.

    ``hamming`` is the entrywise l1 distance divided by n; ``relative`` is the
    Frobenius-norm ratio. Each is minimized over column permutations
    independently; ``best_permutation`` is the minimizer of the Hamming term.
    """

    hamming: float
    relative: float
    best_permutation: tuple[int, ...]


def _check_pair(pi_hat: MembershipMatrix, pi_true: MembershipMatrix) -> None:
    if pi_hat.n != pi_true.n or pi_hat.K != pi_true.K:
        raise DimensionError("membership matrices must share n and K")
    if pi_hat.K > MAX_BRUTE_FORCE_K:
        raise UnsupportedKError(
            f"brute-force permutation search supports K <= {MAX_BRUTE_FORCE_K}"
        )


def membership_errors(pi_hat: MembershipMatrix, pi_true: MembershipMatrix) -> ErrorReport:
    """Hamming and relative error, each minimized over all column permutations."""
    _check_pair(pi_hat, pi_true)
    n, K = pi_true.n, pi_true.K
    h = pi_hat.rows
    t = pi_true.rows
    best_ham = np.inf
    best_rel = np.inf
    best_perm: tuple[int, ...] = tuple(range(K))
    for perm in itertools.permutations(range(K)):
        diff = h - t[:, perm]
        ham = float(np.abs(diff).sum()) / n
        rel = float(np.linalg.norm(diff)) / float(np.linalg.norm(t))
        if ham < best_ham:
            best_ham = ham
            best_perm = perm
        best_rel = min(best_rel, rel)
    return ErrorReport(hamming=best_ham, relative=best_rel, best_permutation=best_perm)


def hamming_error(pi_hat: MembershipMatrix, pi_true: MembershipMatrix) -> ErrorReport:
    return membership_errors(pi_hat, pi_true)


def relative_error(pi_hat: MembershipMatrix, pi_true: MembershipMatrix) -> ErrorReport:
    return membership_errors(pi_hat, pi_true)


def _fuzzy_modularity(adj: np.ndarray, pi_rows: np.ndarray) -> float:
    degrees = adj.sum(axis=1)
    m = float(degrees.sum())
    gram = pi_rows @ pi_rows.T
    return (float(np.sum(adj * gram)) - float(degrees @ gram @ degrees) / m) / m


def q_fsum(net: MultiLayerNetwork, pi_hat: MembershipMatrix) -> float:
    """Fuzzy modularity of the summed adjacency matrix under soft memberships."""
    if pi_hat.n != net.n:
        raise DimensionError("membership and network disagree on n")
    asum = net.layers.sum(axis=0)
    if asum.sum() == 0:
        raise EmptyNetworkError("network has no edges")
    return _fuzzy_modularity(asum, pi_hat.rows)


def q_fmean(net: MultiLayerNetwork, pi_hat: MembershipMatrix) -> float:
    """Average per-layer fuzzy modularity, skipping layers without edges."""
    if pi_hat.n != net.n:
        raise DimensionError("membership and network disagree on n")
    values = []
    skipped = 0
    for layer in net.layers:
        if layer.sum() == 0:
            skipped += 1
            continue
        values.append(_fuzzy_modularity(layer, pi_hat.rows))
    if not values:
        raise EmptyNetworkError("all layers are empty")
    if skipped:
        warnings.warn(
            f"skipped {skipped} empty layers when averaging modularity",
            EmptyLayerWarning,
        )
    return float(np.mean(values))


@dataclass(frozen=True)
class NodeClassification:
    """Per-node purity labels and the aggregate mixing/balance indices."""

    home_community: np.ndarray  # argmax community per node
    label: tuple[str, ...]
    sigma_mixed: float
    sigma_pure: float
    upsilon: float


def classify_nodes(pi_hat: MembershipMatrix) -> NodeClassification:
    """Label nodes highly mixed (max weight <= 0.6), highly pure (>= 0.9),
    or neutral, and compute the mixing fractions and balance ratio."""
    rows = pi_hat.rows
    peak = rows.max(axis=1)
    home = rows.argmax(axis=1)  # lowest community index on ties
    labels = tuple(
        HIGHLY_MIXED if p <= MIXED_THRESHOLD else HIGHLY_PURE if p >= PURE_THRESHOLD else NEUTRAL
        for p in peak
    )
    col_mass = rows.sum(axis=0)
    return NodeClassification(
        home_community=home,
        label=labels,
        sigma_mixed=float(np.mean(peak <= MIXED_THRESHOLD)),
        sigma_pure=float(np.mean(peak >= PURE_THRESHOLD)),
        upsilon=float(col_mass.min() / col_mass.max()),
    )


FSUM = "FSUM"
FMEAN = "FMEAN"


@dataclass(frozen=True)
class SelectionResult:
    best_k: int
    best_score: float
    scores: dict[int, float] = field(default_factory=dict)
    failures: dict[int, str] = field(default_factory=dict)


def estimate_k(
    net: MultiLayerNetwork,
    method: str,
    k_range,
    criterion: str = FSUM,
) -> SelectionResult:
    """Pick the community count maximizing a fuzzy modularity criterion.

    Runs the chosen estimator at each candidate K and scores the resulting
    memberships; ties go to the smaller K. Candidates where the estimator
    fails are skipped and recorded.
    """
    k_values = sorted(set(int(k) for k in k_range))
    if not k_values:
        raise ModelSelectionError("empty candidate range")
    if k_values[0] < 1 or k_values[-1] > min(net.n, MAX_BRUTE_FORCE_K):
        raise ModelSelectionError(
            f"candidates must lie in [1, {min(net.n, MAX_BRUTE_FORCE_K)}]"
        )
    crit = criterion.upper()
    if crit not in (FSUM, FMEAN):
        raise ModelSelectionError(f"unknown criterion {criterion!r}")
    score_fn = q_fsum if crit == FSUM else q_fmean
    run = estimator(method)
    scores: dict[int, float] = {}
    failures: dict[int, str] = {}
    for k in k_values:
        try:
            result = run(net, k)
            scores[k] = score_fn(net, result.pi_hat)
        except Exception as exc:  # noqa: BLE001 - record and move on
            failures[k] = f"{type(exc).__name__}: {exc}"
    if not scores:
        raise ModelSelectionError(f"all candidate K failed: {failures}")
    best_k = min(scores, key=lambda k: (-scores[k], k))
    return SelectionResult(
        best_k=best_k, best_score=scores[best_k], scores=scores, failures=failures
    )
