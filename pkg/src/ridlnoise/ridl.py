"""Randomly induced discretized Laplacian (RIDL) update matrices.

Every node is independently active with probability p at each step; the
update matrix is P = I - eps * L(active subgraph). This module samples
such matrices, validates the almost-sure consensus conditions, and
computes the expected operators that drive the noise-index formulas:

* ``expected_p``          P_bar  = E[P]      = I - eps p^2 L_bar
* ``expected_p_squared``  P_bbar = E[P^2]    (closed form in Bernoulli moments)
* ``k_operator_moments``  the N^2 x N^2 second-moment operator E[P Omega (x) P]
* ``k_operator_enumeration``  the same operator by summing all 2^N patterns

The moment and enumeration forms are independent code paths; their
agreement is the package's primary correctness oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import UndirectedGraph, is_connected, laplacian
from .linalg import kron
from .tolerances import TOL

__all__ = [
    "RidlConfig",
    "StochasticMatrixSample",
    "ExpectedOperators",
    "ConsensusReport",
    "K_VARIANTS",
    "omega_projector",
    "sample_activation",
    "induced_laplacian",
    "sample_ridl",
    "check_consensus_conditions",
    "expected_p",
    "expected_p_squared",
    "expected_l_kron_l",
    "k_operator_moments",
    "k_operator_enumeration",
    "expected_operators",
]

# The three algebraically equivalent placements of the disagreement
# projector inside the second-moment operator; all yield the same noise
# index.
K_VARIANTS = ("pop", "popo", "ppo")


@dataclass(frozen=True)
class RidlConfig:
    """Sampling and dynamics parameters tied to a graph's maximum degree.

    ``epsilon`` must satisfy 0 < eps < 1/d_max (strict), so the
    normalized step size k = eps * d_max stays in (0, 1). ``sigma2`` is
    the per-node noise variance (0 allowed as the noiseless degenerate
    case). ``p`` is the per-node activation probability; p = 1 is the
    deterministic mode, p = 0 is rejected because the dynamics freeze.
    """

    p: float
    epsilon: float
    sigma2: float
    d_max: int

    def __post_init__(self) -> None:
        if not (0.0 < self.p <= 1.0):
            raise ValueError(f"activation probability must be in (0, 1], got {self.p}")
        if self.d_max < 1:
            raise ValueError(f"d_max must be >= 1, got {self.d_max}")
        if not (0.0 < self.epsilon < 1.0 / self.d_max):
            raise ValueError(
                f"step size must satisfy 0 < eps < 1/d_max = {1.0 / self.d_max:.6g}, "
                f"got {self.epsilon}"
            )
        if self.sigma2 < 0.0:
            raise ValueError(f"noise variance must be >= 0, got {self.sigma2}")

    @property
    def k(self) -> float:
        """Normalized step size eps * d_max, in (0, 1)."""
        return self.epsilon * self.d_max

    @classmethod
    def for_graph(
        cls,
        g: UndirectedGraph,
        p: float,
        sigma2: float,
        epsilon: float | None = None,
        k: float | None = None,
    ) -> "RidlConfig":
        """Build a config for ``g``, giving exactly one of eps or k
        (eps = k / d_max)."""
        if (epsilon is None) == (k is None):
            raise ValueError("provide exactly one of epsilon or k")
        if epsilon is None:
            epsilon = k / g.d_max
        return cls(p=p, epsilon=float(epsilon), sigma2=float(sigma2), d_max=g.d_max)


@dataclass(frozen=True)
class StochasticMatrixSample:
    """One sampled update matrix together with the activation pattern
    (0/1 vector) that generated it."""

    matrix: np.ndarray
    pattern: np.ndarray


@dataclass(frozen=True)
class ConsensusReport:
    """Outcome of the almost-sure consensus validation.

    ``positive_diagonal`` holds iff eps * d_max < 1 (every diagonal entry
    of every sample stays >= 1 - k > 0); ``expected_graph_connected``
    holds iff the underlying graph is connected and p > 0 (the graph of
    E[P] is then the underlying graph plus self-loops).
    """

    positive_diagonal: bool
    expected_graph_connected: bool
    passed: bool
    messages: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class ExpectedOperators:
    """The expected matrices consumed by the noise-index formulas."""

    p_bar: np.ndarray
    p_bbar: np.ndarray
    k_op: np.ndarray
    omega: np.ndarray


def omega_projector(n: int) -> np.ndarray:
    """Projector onto the disagreement subspace: I - (1/n) * ones."""
    return np.eye(n) - np.full((n, n), 1.0 / n)


def sample_activation(n: int, p: float, rng: np.random.Generator | int) -> np.ndarray:
    """n independent Bernoulli(p) activations as a 0/1 float vector."""
    if not (0.0 < p <= 1.0):
        raise ValueError(f"activation probability must be in (0, 1], got {p}")
    rng = np.random.default_rng(rng)
    return (rng.random(n) < p).astype(np.float64)


def induced_laplacian(g: UndirectedGraph, pattern: np.ndarray) -> np.ndarray:
    """Laplacian of the subgraph induced by the active nodes.

    Entry (i, j), i != j, is -gamma_i gamma_j A_ij; the diagonal carries
    the active degrees, so rows sum to zero and the result is PSD.
    """
    pattern = np.asarray(pattern, dtype=np.float64)
    if pattern.shape != (g.n,):
        raise ValueError(f"pattern length {pattern.shape} does not match n={g.n}")
    a_act = g.adjacency * np.outer(pattern, pattern)
    return np.diag(a_act.sum(axis=1)) - a_act


def sample_ridl(
    g: UndirectedGraph, cfg: RidlConfig, rng: np.random.Generator | int
) -> StochasticMatrixSample:
    """Draw one update matrix P = I - eps * L(active pattern)."""
    if cfg.d_max != g.d_max:
        raise ValueError(
            f"config was built for d_max={cfg.d_max} but graph has d_max={g.d_max}"
        )
    pattern = sample_activation(g.n, cfg.p, rng)
    matrix = np.eye(g.n) - cfg.epsilon * induced_laplacian(g, pattern)
    return StochasticMatrixSample(matrix=matrix, pattern=pattern)


def check_consensus_conditions(g: UndirectedGraph, cfg: RidlConfig) -> ConsensusReport:
    """Validate the two almost-sure consensus conditions for this pair."""
    messages = []
    positive_diagonal = cfg.epsilon * g.d_max < 1.0
    if not positive_diagonal:
        messages.append(
            f"eps * d_max = {cfg.epsilon * g.d_max:.6g} >= 1: sampled diagonals "
            "may hit zero"
        )
    connected = is_connected(g) and cfg.p > 0.0
    if not connected:
        messages.append("expected update graph is disconnected (graph or p = 0)")
    return ConsensusReport(
        positive_diagonal=positive_diagonal,
        expected_graph_connected=connected,
        passed=positive_diagonal and connected,
        messages=tuple(messages),
    )


def expected_p(g: UndirectedGraph, cfg: RidlConfig) -> np.ndarray:
    """E[P] = I - eps p^2 L_bar (each edge is live iff both ends are)."""
    return np.eye(g.n) - cfg.epsilon * cfg.p**2 * laplacian(g)


def expected_p_squared(g: UndirectedGraph, cfg: RidlConfig) -> np.ndarray:
    """E[P^2] = I + 2 eps p^2 (eps - eps p - 1) L_bar + eps^2 p^3 L_bar^2.

    Follows from E[L^2] = 2(p^2 - p^3) L_bar + p^3 L_bar^2, which is what
    replacing each activation monomial by p^(distinct indices) gives.
    """
    lbar = laplacian(g)
    e, p = cfg.epsilon, cfg.p
    return np.eye(g.n) + 2.0 * e * p**2 * (e - e * p - 1.0) * lbar + e**2 * p**3 * (lbar @ lbar)


def expected_l_kron_l(g: UndirectedGraph, p: float) -> np.ndarray:
    """E[L (x) L] computed exactly from Bernoulli activation moments.

    Writing L = sum_e gamma_a gamma_b M_e over edges e = {a, b} with
    elementary Laplacians M_e, each pair (e, f) contributes
    p^(distinct nodes in e and f) * M_e (x) M_f. Grouping pairs by how
    many nodes they share (2, 3, or 4 distinct) gives

        E[L (x) L] = p^4 L_bar (x) L_bar
                   + p^2 (1-p)^2 * sum_e M_e (x) M_e
                   + p^3 (1-p)   * sum_v B_v (x) B_v

    where B_v is the Laplacian of the star of edges around node v. The
    elementary terms are assembled sparsely (16 and (3d+1)^2 nonzeros).
    """
    n = g.n
    if not (0.0 < p <= 1.0):
        raise ValueError(f"activation probability must be in (0, 1], got {p}")
    lbar = laplacian(g)
    out = (p**4) * np.kron(lbar, lbar)
    flat = out.reshape(-1)
    n_sq = n * n

    def _add_self_kron(rows, cols, vals, weight):
        # accumulate weight * (M (x) M) for the sparse matrix given in
        # triplet form; kron index of ((r1, c1), (r2, c2)) is
        # (r1 n + r2, c1 n + c2)
        kr = (rows[:, None] * n + rows[None, :]).ravel()
        kc = (cols[:, None] * n + cols[None, :]).ravel()
        kv = (vals[:, None] * vals[None, :]).ravel()
        np.add.at(flat, kr * n_sq + kc, weight * kv)

    w_edge = p**2 * (1.0 - p) ** 2
    w_node = p**3 * (1.0 - p)
    if w_edge != 0.0:
        for a, b in g.edges:
            rows = np.array([a, a, b, b])
            cols = np.array([a, b, a, b])
            vals = np.array([1.0, -1.0, -1.0, 1.0])
            _add_self_kron(rows, cols, vals, w_edge)
    if w_node != 0.0:
        nbrs = g.neighbor_lists()
        for v in range(n):
            deg = len(nbrs[v])
            if deg == 0:
                continue
            us = np.array(nbrs[v])
            rows = np.concatenate(([v], us, np.full(deg, v), us))
            cols = np.concatenate(([v], us, us, np.full(deg, v)))
            vals = np.concatenate(([float(deg)], np.ones(deg), -np.ones(2 * deg)))
            _add_self_kron(rows, cols, vals, w_node)
    return out


def _expected_p_kron_p(g: UndirectedGraph, cfg: RidlConfig) -> np.ndarray:
    """E[P (x) P] = I - eps p^2 (I (x) L + L (x) I) + eps^2 E[L (x) L]."""
    n = g.n
    lbar = laplacian(g)
    e, p = cfg.epsilon, cfg.p
    out = cfg.epsilon**2 * expected_l_kron_l(g, p)
    out -= e * p**2 * (np.kron(np.eye(n), lbar) + np.kron(lbar, np.eye(n)))
    out[np.diag_indices_from(out)] += 1.0
    return out


def _apply_variant(
    e_pp: np.ndarray, p_bar: np.ndarray, n: int, variant: str
) -> np.ndarray:
    """Insert the disagreement projector into E[P (x) P].

    Uses P H = H for doubly stochastic P, so right-multiplying by
    (Omega (x) I), (Omega (x) Omega), or (I (x) Omega) reduces to cheap
    Kronecker subtractions.
    """
    h = np.full((n, n), 1.0 / n)
    if variant == "pop":  # E[P Omega (x) P]
        return e_pp - np.kron(h, p_bar)
    if variant == "ppo":  # E[P (x) P Omega]
        return e_pp - np.kron(p_bar, h)
    if variant == "popo":  # E[P Omega (x) P Omega]
        return e_pp - np.kron(h, p_bar) - np.kron(p_bar, h) + np.kron(h, h)
    raise ValueError(f"unknown operator variant {variant!r}; use one of {K_VARIANTS}")


def k_operator_moments(
    g: UndirectedGraph,
    cfg: RidlConfig,
    variant: str = "pop",
    n_cap: int = TOL.exact_n_cap,
) -> np.ndarray:
    """Second-moment operator from exact Bernoulli moments.

    Scales to the configured cap (default 64, a 4096-dimensional
    operator); cross-checked against :func:`k_operator_enumeration`.
    """
    if g.n > n_cap:
        raise ValueError(
            f"n={g.n} exceeds the exact-operator cap {n_cap}; "
            "use the spectral bounds instead"
        )
    e_pp = _expected_p_kron_p(g, cfg)
    return _apply_variant(e_pp, expected_p(g, cfg), g.n, variant)


def k_operator_enumeration(
    g: UndirectedGraph, cfg: RidlConfig, variant: str = "pop"
) -> np.ndarray:
    """Second-moment operator by enumerating all 2^N activation patterns.

    Exact up to floating point; the weights p^a (1-p)^(N-a) sum to one.
    Limited to N <= 14. Independent of the moment-form code path by
    construction, which makes the pair a mutual oracle.
    """
    n = g.n
    if n > TOL.enum_n_cap:
        raise ValueError(f"enumeration needs n <= {TOL.enum_n_cap}, got {n}")
    if variant not in K_VARIANTS:
        raise ValueError(f"unknown operator variant {variant!r}; use one of {K_VARIANTS}")
    omega = omega_projector(n)
    eye = np.eye(n)
    acc = np.zeros((n * n, n * n))
    for bits in range(1 << n):
        pattern = np.array([(bits >> i) & 1 for i in range(n)], dtype=np.float64)
        active = int(pattern.sum())
        weight = cfg.p**active * (1.0 - cfg.p) ** (n - active)
        if weight == 0.0:
            continue
        p_mat = eye - cfg.epsilon * induced_laplacian(g, pattern)
        pw = p_mat @ omega
        if variant == "pop":
            acc += weight * kron(pw, p_mat)
        elif variant == "popo":
            acc += weight * kron(pw, pw)
        else:
            acc += weight * kron(p_mat, pw)
    return acc


def expected_operators(
    g: UndirectedGraph,
    cfg: RidlConfig,
    method: str = "moments",
    variant: str = "pop",
    n_cap: int = TOL.exact_n_cap,
) -> ExpectedOperators:
    """Bundle P_bar, P_bbar, and the second-moment operator."""
    if method == "moments":
        k_op = k_operator_moments(g, cfg, variant=variant, n_cap=n_cap)
    elif method == "enumeration":
        k_op = k_operator_enumeration(g, cfg, variant=variant)
    else:
        raise ValueError(f"unknown method {method!r}; use 'moments' or 'enumeration'")
    return ExpectedOperators(
        p_bar=expected_p(g, cfg),
        p_bbar=expected_p_squared(g, cfg),
        k_op=k_op,
        omega=omega_projector(g.n),
    )
