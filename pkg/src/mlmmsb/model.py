"""Model objects and samplers for multi-layer networks with mixed memberships.

Each layer l of a generated network is drawn independently with
E[A_l] = rho * Pi @ B_l @ Pi.T, where Pi is the shared n x K row-stochastic
membership matrix and B_l a symmetric K x K connectivity matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegeneracyWarning, DimensionError

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class MembershipMatrix:
    """Row-stochastic n x K matrix of community weights.

    ``pure_index_hint``, when given, lists one known pure node per community
    (row k of the hint must be the k-th standard basis vector).
    """

    rows: np.ndarray
    pure_index_hint: tuple[int, ...] | None = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        object.__setattr__(self, "rows", rows)
        if rows.ndim != 2:
            raise DimensionError("membership matrix must be 2-dimensional")
        if np.any(rows < -1e-15) or np.any(rows > 1 + 1e-15):
            raise ConfigError("membership entries must lie in [0, 1]")
        if np.max(np.abs(rows.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
            raise ConfigError("membership rows must sum to 1 within 1e-12")
        if self.pure_index_hint is not None:
            hint = tuple(int(i) for i in self.pure_index_hint)
            object.__setattr__(self, "pure_index_hint", hint)
            if len(hint) != self.K:
                raise ConfigError("pure_index_hint must list one node per community")
            for k, i in enumerate(hint):
                if not (0 <= i < self.n):
                    raise ConfigError(f"pure node index {i} out of range")
                if abs(rows[i, k] - 1.0) > ROW_SUM_TOL:
                    raise ConfigError(f"hinted node {i} is not pure in community {k}")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def K(self) -> int:
        return self.rows.shape[1]

    def check_full_rank(self, tol: float = 1e-10) -> None:
        """Ground-truth matrices must have rank K (smallest singular value > tol)."""
        s = np.linalg.svd(self.rows, compute_uv=False)
        if s[-1] <= tol:
            raise ConfigError("membership matrix is rank deficient")


@dataclass(frozen=True)
class ConnectivityStack:
    """L symmetric K x K connectivity matrices plus the sparsity scale rho."""

    matrices: np.ndarray  # shape (L, K, K)
    rho: float

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=float)
        object.__setattr__(self, "matrices", mats)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise DimensionError("connectivity stack must have shape (L, K, K)")
        if np.any(mats < 0) or np.any(mats > 1):
            raise ConfigError("connectivity entries must lie in [0, 1]")
        if np.max(np.abs(mats - mats.transpose(0, 2, 1))) > 0:
            raise ConfigError("every connectivity matrix must be symmetric")
        # rho = 0 is admitted so degenerate zero-probability cases stay expressible
        if not (0 <= self.rho <= 1):
            raise ConfigError("rho must lie in [0, 1]")

    @property
    def K(self) -> int:
        return self.matrices.shape[1]

    @property
    def L(self) -> int:
        return self.matrices.shape[0]


@dataclass(frozen=True)
class MultiLayerNetwork:
    """L symmetric n x n adjacency matrices sharing one node set."""

    layers: np.ndarray  # shape (L, n, n)
    allow_self_loops: bool = True
    binary: bool = field(init=False, default=True)

    def __post_init__(self):
        layers = np.asarray(self.layers, dtype=float)
        object.__setattr__(self, "layers", layers)
        if layers.ndim != 3 or layers.shape[1] != layers.shape[2]:
            raise DimensionError("network must have shape (L, n, n)")
        if np.max(np.abs(layers - layers.transpose(0, 2, 1)), initial=0.0) > 0:
            raise ConfigError("every layer must be symmetric")
        if np.any(layers < 0):
            raise ConfigError("adjacency entries must be nonnegative")
        is_binary = bool(np.all((layers == 0) | (layers == 1)))
        object.__setattr__(self, "binary", is_binary)

    @property
    def n(self) -> int:
        return self.layers.shape[1]

    @property
    def L(self) -> int:
        return self.layers.shape[0]


@dataclass(frozen=True)
class ExpectationStack:
    """Edge-probability matrices rho * Pi @ B_l @ Pi.T, one per layer."""

    layers: np.ndarray  # shape (L, n, n)
    rho: float

    @property
    def n(self) -> int:
        return self.layers.shape[1]

    @property
    def L(self) -> int:
        return self.layers.shape[0]


def expected_adjacency(pi: MembershipMatrix, conn: ConnectivityStack) -> ExpectationStack:
    """Edge-probability stack with layer l equal to rho * Pi @ B_l @ Pi.T."""
    if pi.K != conn.K:
        raise DimensionError(
            f"membership has K={pi.K} but connectivity has K={conn.K}"
        )
    omega = conn.rho * np.einsum("ik,lkm,jm->lij", pi.rows, conn.matrices, pi.rows)
    # enforce exact symmetry against einsum round-off
    omega = 0.5 * (omega + omega.transpose(0, 2, 1))
    return ExpectationStack(layers=omega, rho=conn.rho)


def _layer_seed(seed: int, layer: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(layer,))
    return np.random.default_rng(ss)


def sample_mlmmsb(
    pi: MembershipMatrix,
    conn: ConnectivityStack,
    seed: int,
    allow_self_loops: bool = True,
) -> MultiLayerNetwork:
    """Draw a multi-layer network with independent Bernoulli edges per layer.

    Upper-triangular entries (including the diagonal unless self-loops are
    disabled) are drawn independently and mirrored. Deterministic given
    ``seed``; layer l uses its own derived stream so layers are independent.
    """
    if pi.n < pi.K:
        raise ConfigError("need at least K nodes")
    omega = expected_adjacency(pi, conn)
    n, L = omega.n, omega.L
    lam_k = np.linalg.eigvalsh(conn.matrices.sum(axis=0))
    lam_k = lam_k[np.argsort(np.abs(lam_k))[::-1]]
    if abs(lam_k[min(pi.K, len(lam_k)) - 1]) < 1e-8 * conn.L:
        warnings.warn(
            "sum of connectivity matrices is numerically rank deficient; "
            "spectral recovery may be unreliable",
            DegeneracyWarning,
        )
    iu = np.triu_indices(n, k=0 if allow_self_loops else 1)
    layers = np.zeros((L, n, n))
    for l in range(L):
        rng = _layer_seed(seed, l)
        draws = (rng.random(iu[0].size) < omega.layers[l][iu]).astype(float)
        layers[l][iu] = draws
        layers[l] = np.maximum(layers[l], layers[l].T)
    return MultiLayerNetwork(layers=layers, allow_self_loops=allow_self_loops)


def generate_membership(n: int, K: int, n0: int, seed: int) -> MembershipMatrix:
    """Membership matrix with n0 pure nodes per community followed by mixed rows.

    For K=3 the mixed rows follow the recipe (r1/2, r2/2, 1 - r1/2 - r2/2)
    with r1, r2 ~ Uniform[0,1]; for other K they are symmetric Dirichlet(1).
    """
    if K * n0 > n:
        raise ConfigError(f"K*n0 = {K * n0} exceeds n = {n}")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed) & (2**64 - 1)))
    rows = np.zeros((n, K))
    for k in range(K):
        rows[k * n0 : (k + 1) * n0, k] = 1.0
    n_mixed = n - K * n0
    if n_mixed > 0:
        if K == 3:
            r1 = rng.random(n_mixed)
            r2 = rng.random(n_mixed)
            rows[K * n0 :, 0] = r1 / 2
            rows[K * n0 :, 1] = r2 / 2
            rows[K * n0 :, 2] = 1.0 - r1 / 2 - r2 / 2
        else:
            rows[K * n0 :] = rng.dirichlet(np.ones(K), size=n_mixed)
    hint = tuple(k * n0 for k in range(K)) if n0 >= 1 else None
    pi = MembershipMatrix(rows=rows, pure_index_hint=hint)
    if n0 >= 1:
        pi.check_full_rank()
    return pi


def generate_connectivity(K: int, L: int, seed: int, rho: float = 1.0) -> ConnectivityStack:
    """L symmetric K x K matrices with i.i.d. Uniform[0,1] upper triangles."""
    if K < 1 or L < 1:
        raise ConfigError("K and L must be at least 1")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed) & (2**64 - 1)))
    mats = np.zeros((L, K, K))
    iu = np.triu_indices(K)
    for l in range(L):
        mats[l][iu] = rng.random(iu[0].size)
        mats[l] = np.maximum(mats[l], mats[l].T)
    return ConnectivityStack(matrices=mats, rho=rho)
