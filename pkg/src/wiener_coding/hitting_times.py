"""Hitting times of drifted Brownian motion and band-exit probabilities.

For mu*t + B(t) rooted at zero and a level c > 0, the hitting time tau_c has
Laplace transform

    Psi(lambda) = exp(-c*(sqrt(mu^2 + 2*lambda) - mu))

and moments

    E[tau_c]   = c/mu
    E[tau_c^2] = c^2/mu^2 + c/mu^3
    E[tau_c^3] = c^3/mu^3 + 3c^2/mu^4 + 3c/mu^5
    E[tau_c^4] = c^4/mu^4 + 6c^3/mu^5 + 15c^2/mu^6 + 15c/mu^7

A grid Monte Carlo sampler is included as the test oracle for these moments.
It detects the first grid index at or beyond the level, which carries the
usual O(sqrt(step)) threshold bias; oracle tests budget for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HorizonError, ParameterError

__all__ = [
    "DriftHitSpec",
    "laplace_transform",
    "hit_moments",
    "band_exit_upper_prob",
    "band_exit_lower_prob",
    "sample_hit_time",
    "sample_hit_times",
]

# Sampler memory/throughput knobs: paths per batch x steps per chunk.
_PATH_BATCH = 20_000
_STEP_CHUNK = 512


@dataclass(frozen=True)
class DriftHitSpec:
    """Threshold level c > 0 and drift mu > 0 for the hitting problem."""

    c: float
    mu: float

    def __post_init__(self) -> None:
        if not (isinstance(self.c, (int, float)) and math.isfinite(self.c) and self.c > 0):
            raise ParameterError(f"level c must be finite and > 0, got {self.c!r}")
        if not (isinstance(self.mu, (int, float)) and math.isfinite(self.mu) and self.mu > 0):
            raise ParameterError(f"drift mu must be finite and > 0, got {self.mu!r}")
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "mu", float(self.mu))


def laplace_transform(spec: DriftHitSpec, lam: float) -> float:
    """Psi(lambda) = E[exp(-lambda*tau_c)], for lambda >= 0."""
    if lam < 0:
        raise ParameterError(f"lambda must be >= 0, got {lam}")
    mu = spec.mu
    return math.exp(-spec.c * (math.sqrt(mu * mu + 2.0 * lam) - mu))


def hit_moments(spec: DriftHitSpec) -> tuple[float, float, float, float]:
    """First four moments of tau_c."""
    c, mu = spec.c, spec.mu
    m1 = c / mu
    m2 = c**2 / mu**2 + c / mu**3
    m3 = c**3 / mu**3 + 3 * c**2 / mu**4 + 3 * c / mu**5
    m4 = c**4 / mu**4 + 6 * c**3 / mu**5 + 15 * c**2 / mu**6 + 15 * c / mu**7
    return (m1, m2, m3, m4)


def band_exit_upper_prob(x: float, a_level: float, b_level: float) -> float:
    """P(driftless BM from x exits [-b_level, a_level] at the top) = (x+b)/(a+b)."""
    if a_level + b_level <= 0:
        raise ParameterError("band must have positive width")
    if not (-b_level <= x <= a_level):
        raise ParameterError(f"start point {x} outside band [{-b_level}, {a_level}]")
    return (x + b_level) / (a_level + b_level)


def band_exit_lower_prob(x: float, a_level: float, b_level: float) -> float:
    """Complement of band_exit_upper_prob; the two sum to 1 exactly."""
    return 1.0 - band_exit_upper_prob(x, a_level, b_level)


def sample_hit_times(
    spec: DriftHitSpec,
    step: float,
    n_paths: int,
    rng_seed: int,
    horizon: float | None = None,
) -> np.ndarray:
    """Simulate n_paths of mu*t + B(t) on a grid; return first grid times >= c.

    Deterministic given rng_seed.  Paths still alive at the horizon
    (default 1e6/mu) raise HorizonError: truncation is loud, never silent.
    """
    if step <= 0:
        raise ParameterError(f"step must be > 0, got {step}")
    if n_paths <= 0:
        raise ParameterError(f"n_paths must be >= 1, got {n_paths}")
    if horizon is None:
        horizon = 1e6 / spec.mu
    max_steps = int(math.ceil(horizon / step))
    rng = np.random.default_rng(rng_seed)
    sqrt_step = math.sqrt(step)
    drift = spec.mu * step

    times = np.empty(n_paths, dtype=float)
    done = 0
    while done < n_paths:
        batch = min(_PATH_BATCH, n_paths - done)
        pos = np.zeros(batch)
        alive = np.arange(batch)
        out = np.full(batch, np.nan)
        elapsed = 0  # grid steps taken so far (uniform across the batch)
        while alive.size:
            steps = min(_STEP_CHUNK, max_steps - elapsed)
            if steps <= 0:
                raise HorizonError(
                    f"{alive.size} path(s) exceeded the horizon cap {horizon} "
                    f"(c={spec.c}, mu={spec.mu}, step={step})"
                )
            incr = rng.standard_normal((alive.size, steps)) * sqrt_step + drift
            np.cumsum(incr, axis=1, out=incr)
            incr += pos[alive, None]
            crossed = incr >= spec.c
            any_cross = crossed.any(axis=1)
            first = crossed.argmax(axis=1)
            out[alive[any_cross]] = (elapsed + first[any_cross] + 1) * step
            survivors = ~any_cross
            pos[alive[survivors]] = incr[survivors, -1]
            alive = alive[survivors]
            elapsed += steps
        times[done : done + batch] = out
        done += batch
    return times


def sample_hit_time(
    spec: DriftHitSpec,
    step: float,
    rng_seed: int,
    horizon: float | None = None,
) -> float:
    """Single-path convenience wrapper around sample_hit_times."""
    return float(sample_hit_times(spec, step, 1, rng_seed, horizon=horizon)[0])
