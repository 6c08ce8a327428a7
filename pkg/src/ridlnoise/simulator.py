"""Monte Carlo estimation of the noise index.

Runs an ensemble of independent trajectories of the noisy averaging
dynamics x(t+1) = P(t) x(t) + n(t) from x(0) = 0 and reads the index off
the final-state disagreement. Starting at zero makes the expected
disagreement increase monotonically toward its limit, so a drift test on
a pilot trajectory's running mean doubles as the steady-state check.

Each replication owns an independently spawned RNG stream derived from
the master seed (activations drawn first, then noise), and replications
are reduced in fixed order, so estimates are reproducible bit for bit;
the internal chunked vectorization does not affect the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import UndirectedGraph, laplacian_spectrum
from .ridl import RidlConfig, StochasticMatrixSample, check_consensus_conditions

__all__ = [
    "SimConfig",
    "SimEstimate",
    "NOISE_DISTRIBUTIONS",
    "step",
    "disagreement",
    "default_horizon",
    "estimate_noise_index",
]

# All scaled to mean 0 and variance sigma^2 by construction; the
# alternatives to gaussian exist to demonstrate that the index depends
# on the noise only through its variance.
NOISE_DISTRIBUTIONS = ("gaussian", "rademacher", "uniform")

# pilot ensemble size for the steady-state drift test
_PILOT_SIZE = 64


@dataclass(frozen=True)
class SimConfig:
    """Ensemble simulation parameters."""

    horizon: int
    ensemble: int
    noise_dist: str = "gaussian"
    burn_in_check: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.ensemble < 1:
            raise ValueError(f"ensemble must be >= 1, got {self.ensemble}")
        if self.noise_dist not in NOISE_DISTRIBUTIONS:
            raise ValueError(
                f"unknown noise distribution {self.noise_dist!r}; "
                f"use one of {NOISE_DISTRIBUTIONS}"
            )
        if self.burn_in_check <= 0.0:
            raise ValueError("burn_in_check must be positive")


@dataclass(frozen=True)
class SimEstimate:
    """Monte Carlo estimate with its across-replication standard error."""

    j_hat: float
    std_error: float
    samples_used: int
    converged: bool
    seed: int
    mean_trace: np.ndarray | None = None


def step(x: np.ndarray, p_sample: StochasticMatrixSample, noise: np.ndarray) -> np.ndarray:
    """One update: P x + n."""
    x = np.asarray(x, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    n = p_sample.matrix.shape[0]
    if x.shape != (n,) or noise.shape != (n,):
        raise ValueError(
            f"dimension mismatch: matrix {p_sample.matrix.shape}, "
            f"state {x.shape}, noise {noise.shape}"
        )
    return p_sample.matrix @ x + noise


def disagreement(x: np.ndarray) -> float:
    """Squared norm of the deviation from the state's own mean."""
    x = np.asarray(x, dtype=np.float64)
    d = x - x.mean()
    return float(d @ d)


def default_horizon(
    g: UndirectedGraph, cfg: RidlConfig, target: float = 1e-4, cap: int = 100_000
) -> int:
    """Smallest T with (1 - eps p^2 lambda_2)^(2T) below ``target``,
    capped; ties the burn-in length to the spectral gap."""
    lam2 = float(laplacian_spectrum(g).eigenvalues[1])
    rho = abs(1.0 - cfg.epsilon * cfg.p**2 * lam2)
    if rho <= 0.0:
        return 1
    if rho >= 1.0:
        return cap
    t = math.ceil(math.log(target) / (2.0 * math.log(rho)))
    return max(1, min(t, cap))


def _unit_noise(rng: np.random.Generator, dist: str, shape: tuple[int, ...]) -> np.ndarray:
    if dist == "gaussian":
        return rng.standard_normal(shape)
    if dist == "rademacher":
        return np.where(rng.random(shape) < 0.5, -1.0, 1.0)
    # uniform on [-sqrt(3), sqrt(3)] has unit variance
    return math.sqrt(3.0) * (2.0 * rng.random(shape) - 1.0)


def _replication_draws(
    seed: np.random.SeedSequence, t: int, n: int, p: float, dist: str, sigma: float
) -> tuple[np.ndarray, np.ndarray]:
    """Activations then noise for one replication, from its own stream."""
    rng = np.random.default_rng(seed)
    acts = rng.random((t, n)) < p
    noise = sigma * _unit_noise(rng, dist, (t, n))
    return acts, noise


def _chunk_size(t: int, n: int, budget_bytes: int = 1 << 25) -> int:
    per_replication = t * n * 16 + t * n  # float64 noise + bool activations
    return max(1, min(1024, budget_bytes // max(1, per_replication)))


def estimate_noise_index(
    g: UndirectedGraph, cfg: RidlConfig, sim: SimConfig, track_mean: bool = False
) -> SimEstimate:
    """Ensemble estimate of the noise index.

    Runs ``sim.ensemble`` independent trajectories from x(0) = 0 for
    ``sim.horizon`` steps, each with fresh update matrices and noise;
    returns the mean final-state disagreement over N together with its
    standard error. ``converged`` reports the pilot-trajectory drift
    test; a False value is a flag, not an error (raise the horizon).

    With ``track_mean`` the per-step ensemble mean of disagreement / N
    is recorded in ``mean_trace``.
    """
    report = check_consensus_conditions(g, cfg)
    if not report.passed:
        raise ValueError(
            "consensus conditions fail: " + "; ".join(report.messages)
        )
    n, t_steps, m = g.n, sim.horizon, sim.ensemble
    adj = g.adjacency
    eps = cfg.epsilon
    sigma = math.sqrt(cfg.sigma2)

    n_pilot = min(_PILOT_SIZE, m)
    seeds = np.random.SeedSequence(sim.seed).spawn(m + n_pilot)
    d_final = np.empty(m)
    trace_sum = np.zeros(t_steps) if track_mean else None

    chunk = _chunk_size(t_steps, n)
    for start in range(0, m, chunk):
        stop = min(start + chunk, m)
        draws = [
            _replication_draws(seeds[r], t_steps, n, cfg.p, sim.noise_dist, sigma)
            for r in range(start, stop)
        ]
        acts = np.stack([a for a, _ in draws])
        noise = np.stack([w for _, w in draws])
        x = np.zeros((stop - start, n))
        for t in range(t_steps):
            gam = acts[:, t, :].astype(np.float64)
            s1 = gam @ adj  # active-neighbor counts
            s2 = (gam * x) @ adj  # active-neighbor state sums
            x = x - eps * gam * (x * s1 - s2) + noise[:, t, :]
            if track_mean:
                dev = x - x.mean(axis=1, keepdims=True)
                trace_sum[t] += (dev * dev).sum()
        dev = x - x.mean(axis=1, keepdims=True)
        d_final[start:stop] = (dev * dev).sum(axis=1)

    per_rep = d_final / n
    j_hat = float(per_rep.mean())
    std_error = float(per_rep.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0

    converged = _pilot_converged(
        seeds[m:], g, cfg, sim, adj, eps, sigma, t_steps, n
    )
    return SimEstimate(
        j_hat=j_hat,
        std_error=std_error,
        samples_used=m,
        converged=converged,
        seed=sim.seed,
        mean_trace=trace_sum / (n * m) if track_mean else None,
    )


def _pilot_converged(
    pilot_seeds: list[np.random.SeedSequence],
    g: UndirectedGraph,
    cfg: RidlConfig,
    sim: SimConfig,
    adj: np.ndarray,
    eps: float,
    sigma: float,
    t_steps: int,
    n: int,
) -> bool:
    """Drift test on the running mean of the pilot disagreement series
    over its final 10% of steps.

    The pilot is a small ensemble so the series tracks the expectation
    rather than one trajectory's fluctuations; with x(0) = 0 the
    expectation rises monotonically, so residual drift means the horizon
    ended inside the transient.
    """
    draws = [
        _replication_draws(s, t_steps, n, cfg.p, sim.noise_dist, sigma)
        for s in pilot_seeds
    ]
    acts = np.stack([a for a, _ in draws])
    noise = np.stack([w for _, w in draws])
    x = np.zeros((len(pilot_seeds), n))
    series = np.empty(t_steps)
    for t in range(t_steps):
        gam = acts[:, t, :].astype(np.float64)
        s1 = gam @ adj
        s2 = (gam * x) @ adj
        x = x - eps * gam * (x * s1 - s2) + noise[:, t, :]
        dev = x - x.mean(axis=1, keepdims=True)
        series[t] = (dev * dev).sum() / (n * len(pilot_seeds))
    running = np.cumsum(series) / np.arange(1, t_steps + 1)
    scale = abs(running[-1])
    if scale == 0.0:
        return True
    if t_steps < 2:
        return False
    window = running[-max(2, t_steps // 10):]
    drift = (window.max() - window.min()) / scale
    return bool(drift < sim.burn_in_check)
