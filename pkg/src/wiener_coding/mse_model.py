"""Analytical MSE and sampling rate of the monotone-threshold scheme.

Two closed forms are provided:

* ``mse_large_mu`` -- the large-slope limit
      mse = K * E_P[L^2]/E_P[L] + E_Ptilde[L],     sr = 1/(D * E_P[L])

* ``mse_exact`` -- the finite-slope form assembled from the per-event
  conditional moments.  The sloped-threshold events contribute 1/mu
  correction terms through the shifted tail moments A_k, B_k:

      E[C(Y)Y^2] = (l1*At + l4*Bt + p2*l2*a^2 + p3*l3*b^2) * E[L]
                   + (l1*A1 + l4*B1)/mu * E[sqrt(L)]
      E[Y^4]     = (3 + p2*a^4 + p3*b^4 - Xt) * E[L^2]
                   + [6a^2*A1 + 12a*A2 + 6*A3 + (b terms)] * E[L^{3/2}]/mu
                   + [12a*A1 + 15*A2 + (b terms)] * E[L]/mu^2
                   + 15*(A1 + B1) * E[sqrt(L)]/mu^3
      E[tau+L]   = D * E[L] + (A1 + B1)/mu * E[sqrt(L)]
      mse        = (E[Y^4] + 6*E[C(Y)Y^2]) / (6*E[tau+L]),   sr = 1/E[tau+L]

Both reduce to the same value as mu -> inf.  A renewal-cycle Monte Carlo
check of the underlying optional-stopping identity
E[int_0^tau W^2 dt] = E[W_tau^4]/6 is provided in ``mse_integral_oracle``.

A process variance sigma^2 != 1 is handled by canonicalization: the config
(a, b, mu, sigma2) is mapped to the unit-variance config (a/s, b/s, mu/s)
with s = sqrt(sigma2), which runs through identical cycles in time; the MSE
scales by sigma^2 and the sampling rate is unchanged.  Breakdown component
fields (ey4, ecy2, ...) are always reported in canonical (unit-variance)
terms; only ``mse`` carries the sigma^2 factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ModelError, ParameterError
from .gauss_stats import (
    SchemeConstants,
    ThresholdConfig,
    gauss_pdf,
    gauss_tail,
    scheme_constants,
)

__all__ = [
    "Codebook",
    "MseBreakdown",
    "IntegralCheck",
    "DeterministicStop",
    "BandStop",
    "SlopedStop",
    "mse_large_mu",
    "mse_exact",
    "sampling_rate",
    "scale_to_sigma",
    "ideal_benchmark_mse",
    "mse_integral_oracle",
]

RELAXED = "relaxed-real"
INTEGER = "integer-prefix"


@dataclass(frozen=True)
class Codebook:
    """Code lengths for the four events, in bit-duration time units.

    ``integer-prefix`` mode requires integer lengths >= 1 satisfying the
    Kraft inequality (sum 2^-li <= 1); this is what the simulator runs.
    ``relaxed-real`` mode allows any positive real lengths, infinity
    included -- analytics reject an infinite length unless its event has
    exactly zero probability weight.
    """

    l1: float
    l2: float
    l3: float
    l4: float
    mode: str = RELAXED

    def __post_init__(self) -> None:
        if self.mode not in (RELAXED, INTEGER):
            raise ParameterError(f"unknown codebook mode {self.mode!r}")
        ls = []
        for name in ("l1", "l2", "l3", "l4"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or math.isnan(v):
                raise ParameterError(f"{name} must be a number, got {v!r}")
            ls.append(float(v))
            object.__setattr__(self, name, float(v))
        if self.mode == INTEGER:
            # infinity stands for a codeword that is never transmitted; it is
            # only legal for zero-probability events (checked at use sites)
            for name, v in zip(("l1", "l2", "l3", "l4"), ls):
                if not math.isinf(v) and not (v >= 1 and v == int(v)):
                    raise ParameterError(f"{name} must be a positive integer or inf, got {v}")
            kraft = sum(2.0 ** -v for v in ls)
            if kraft > 1.0 + 1e-12:
                raise ParameterError(f"lengths violate the Kraft inequality (sum 2^-l = {kraft})")
        else:
            for name, v in zip(("l1", "l2", "l3", "l4"), ls):
                if v <= 0:
                    raise ParameterError(f"{name} must be > 0, got {v}")

    @classmethod
    def relaxed(cls, l1: float, l2: float, l3: float, l4: float) -> "Codebook":
        return cls(l1, l2, l3, l4, mode=RELAXED)

    @classmethod
    def integer(cls, l1: int, l2: int, l3: int, l4: int) -> "Codebook":
        return cls(l1, l2, l3, l4, mode=INTEGER)

    @classmethod
    def uniform(cls, length: float, mode: str = RELAXED) -> "Codebook":
        return cls(length, length, length, length, mode=mode)

    @property
    def lengths(self) -> tuple[float, float, float, float]:
        return (self.l1, self.l2, self.l3, self.l4)

    def kraft_sum(self) -> float:
        return sum(2.0 ** -v for v in self.lengths)


@dataclass(frozen=True)
class MseBreakdown:
    """MSE/SR with the intermediate expectations that build them.

    etau is the mean cycle duration E[tau + L]; sr = 1/etau always.
    Component fields are canonical (unit-variance) quantities; mse includes
    the sigma^2 factor of the configuration it was computed for.
    """

    mse: float
    sr: float
    ey4: float
    ecy2: float
    etau: float
    lbar: float
    l2bar: float
    lsqrtbar: float
    ltilde: float
    regime: Literal["exact", "large_mu"]


def _weighted_sum(weights, values, what: str) -> float:
    """Sum w_i * v_i skipping zero-weight terms (0 * inf = 0 by convention)."""
    total = 0.0
    for w, v in zip(weights, values):
        if w == 0.0:
            continue
        if math.isinf(v):
            raise ModelError(f"infinite length with positive {what} weight {w}")
        total += w * v
    return total


def _pmf_length_moments(sc: SchemeConstants, cb: Codebook):
    """(E[L], E[L^2], E[sqrt L], E[L^1.5], E_Ptilde[L]) under the event PMFs.

    An infinite length is only admissible when both its event probability
    and its length-weighting probability are exactly zero.
    """
    p = sc.probs.as_tuple()
    pt = sc.p_tilde
    ls = cb.lengths
    for i, (pi, qi, li) in enumerate(zip(p, pt, ls)):
        if math.isinf(li) and (pi != 0.0 or qi != 0.0):
            raise ModelError(
                f"l{i + 1} is infinite but its event has positive weight (p={pi}, p_tilde={qi})"
            )
    m1 = _weighted_sum(p, ls, "event")
    m2 = _weighted_sum(p, [l * l for l in ls], "event")
    mh = _weighted_sum(p, [math.sqrt(l) for l in ls], "event")
    m32 = _weighted_sum(p, [l * math.sqrt(l) for l in ls], "event")
    ltilde = _weighted_sum(pt, ls, "length-weighting")
    return m1, m2, mh, m32, ltilde


def scale_to_sigma(cfg: ThresholdConfig) -> ThresholdConfig:
    """Unit-variance configuration equivalent to cfg.

    The sigma^2-variance process with thresholds (a, b) and slope mu runs
    through the same cycles as the unit process with (a/s, b/s, mu/s),
    s = sqrt(sigma2); its MSE is sigma^2 times the canonical MSE and its
    sampling rate is the canonical one.
    """
    s = cfg.sigma
    if s == 1.0:
        return cfg
    return ThresholdConfig(cfg.a / s, cfg.b / s, cfg.mu / s, 1.0)


def mse_large_mu(cfg: ThresholdConfig, cb: Codebook) -> MseBreakdown:
    """Large-slope MSE: K * E[L^2]/E[L] + E_Ptilde[L], sr = 1/(D*E[L])."""
    canon = scale_to_sigma(cfg)
    sc = scheme_constants(canon)
    m1, m2, mh, m32, ltilde = _pmf_length_moments(sc, cb)
    a, b = canon.a, canon.b
    p = sc.probs
    etau = sc.d * m1
    ecy2 = (
        _weighted_sum(
            (sc.a_tilde, p.p2 * a * a, p.p3 * b * b, sc.b_tilde),
            cb.lengths,
            "length-weighting",
        )
        * m1
    )
    ey4 = (3.0 + p.p2 * a**4 + p.p3 * b**4 - sc.x_tilde) * m2
    mse = sc.k * m2 / m1 + ltilde
    return MseBreakdown(
        mse=cfg.sigma2 * mse,
        sr=1.0 / etau,
        ey4=ey4,
        ecy2=ecy2,
        etau=etau,
        lbar=m1,
        l2bar=m2,
        lsqrtbar=mh,
        ltilde=ltilde,
        regime="large_mu",
    )


def mse_exact(cfg: ThresholdConfig, cb: Codebook) -> MseBreakdown:
    """Finite-slope MSE with all 1/mu correction terms."""
    canon = scale_to_sigma(cfg)
    sc = scheme_constants(canon)
    m1, m2, mh, m32, ltilde = _pmf_length_moments(sc, cb)
    a, b, mu = canon.a, canon.b, canon.mu
    p = sc.probs
    A = sc.moments.upper
    B = sc.moments.lower

    ecy2 = (
        _weighted_sum(
            (sc.a_tilde, p.p2 * a * a, p.p3 * b * b, sc.b_tilde),
            cb.lengths,
            "length-weighting",
        )
        * m1
        + _weighted_sum((A[1], 0.0, 0.0, B[1]), cb.lengths, "tail") / mu * mh
    )
    ey4 = (
        (3.0 + p.p2 * a**4 + p.p3 * b**4 - sc.x_tilde) * m2
        + (
            (6 * a * a * A[1] + 12 * a * A[2] + 6 * A[3])
            + (6 * b * b * B[1] + 12 * b * B[2] + 6 * B[3])
        )
        * m32
        / mu
        + ((12 * a * A[1] + 15 * A[2]) + (12 * b * B[1] + 15 * B[2])) * m1 / mu**2
        + 15.0 * (A[1] + B[1]) * mh / mu**3
    )
    etau = sc.d * m1 + (A[1] + B[1]) / mu * mh
    mse = (ey4 + 6.0 * ecy2) / (6.0 * etau)
    return MseBreakdown(
        mse=cfg.sigma2 * mse,
        sr=1.0 / etau,
        ey4=ey4,
        ecy2=ecy2,
        etau=etau,
        lbar=m1,
        l2bar=m2,
        lsqrtbar=mh,
        ltilde=ltilde,
        regime="exact",
    )


def sampling_rate(
    cfg: ThresholdConfig, cb: Codebook, mode: Literal["exact", "large_mu"] = "exact"
) -> float:
    """Long-run samples per unit time, 1/E[tau + L], under the chosen regime."""
    if mode == "exact":
        return mse_exact(cfg, cb).sr
    if mode == "large_mu":
        return mse_large_mu(cfg, cb).sr
    raise ParameterError(f"mode must be 'exact' or 'large_mu', got {mode!r}")


def ideal_benchmark_mse(a: float) -> tuple[float, float]:
    """(mse, sr) of the ideal-sampling benchmark: real-valued samples, unit delay.

    The source samples whenever |W - West| >= a with the channel free.  With
    X ~ N(0,1) the post-delivery error, the exit value Y satisfies

        E[Y^2] = 2*G2(a) + a^2*(1 - 2Q(a)),  E[Y^4] = 2*G4(a) + a^4*(1 - 2Q(a))

    and mse = 1 + E[Y^4]/(6*E[Y^2]), sr = 1/E[Y^2].  Derived with the same
    optional-stopping machinery as the main scheme and validated against the
    ideal-benchmark simulator.
    """
    if a < 0 or not math.isfinite(a):
        raise ParameterError(f"threshold a must be finite and >= 0, got {a}")
    q = gauss_tail(a)
    g2 = a * gauss_pdf(a) + q
    g4 = (a**3 + 3 * a) * gauss_pdf(a) + 3 * q
    p_band = 1.0 - 2.0 * q
    ey2 = 2.0 * g2 + a * a * p_band
    ey4 = 2.0 * g4 + a**4 * p_band
    return 1.0 + ey4 / (6.0 * ey2), 1.0 / ey2


# ---------------------------------------------------------------------------
# Monte Carlo check of the optional-stopping identity E[int W^2] = E[W_tau^4]/6
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeterministicStop:
    t: float


@dataclass(frozen=True)
class BandStop:
    a_level: float
    b_level: float


@dataclass(frozen=True)
class SlopedStop:
    """Stop when W hits the falling line c - mu*t (drifted hitting-time law)."""

    c: float
    mu: float


StopSpec = DeterministicStop | BandStop | SlopedStop


@dataclass(frozen=True)
class IntegralCheck:
    """Both sides of the stopping identity with per-path paired statistics."""

    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    diff: float
    diff_se: float
    n_paths: int
    n_truncated: int


def _summarize(lhs: np.ndarray, rhs: np.ndarray, n_truncated: int) -> IntegralCheck:
    n = lhs.size
    d = lhs - rhs
    return IntegralCheck(
        lhs=float(lhs.mean()),
        lhs_se=float(lhs.std(ddof=1) / math.sqrt(n)),
        rhs=float(rhs.mean()),
        rhs_se=float(rhs.std(ddof=1) / math.sqrt(n)),
        diff=float(d.mean()),
        diff_se=float(d.std(ddof=1) / math.sqrt(n)),
        n_paths=n,
        n_truncated=n_truncated,
    )


def mse_integral_oracle(
    stop: StopSpec,
    horizon: float = 1e4,
    n_paths: int = 20_000,
    step: float = 1e-3,
    seed: int = 0,
) -> IntegralCheck:
    """Monte Carlo estimates of E[int_0^tau W^2 dt] and E[W_tau^4]/6.

    The integral uses the left-Riemann sum plus the discrete-martingale
    compensator step*tau/2, which makes the two sides agree exactly in
    expectation for the simulated walk at any step size.  Paths alive at the
    horizon are stopped there and counted in n_truncated (flagged, not
    raised).
    """
    if step <= 0 or n_paths <= 0 or horizon <= 0:
        raise ParameterError("step, n_paths and horizon must all be positive")
    rng = np.random.default_rng(seed)
    sqrt_step = math.sqrt(step)

    if isinstance(stop, DeterministicStop):
        if stop.t <= 0:
            raise ParameterError("deterministic stop time must be > 0")
        n_steps = max(1, int(round(stop.t / step)))
        lhs = np.empty(n_paths)
        rhs = np.empty(n_paths)
        batch = max(1, min(n_paths, int(2e7) // max(1, n_steps)))
        done = 0
        while done < n_paths:
            m = min(batch, n_paths - done)
            w = np.cumsum(rng.standard_normal((m, n_steps)) * sqrt_step, axis=1)
            # left endpoints are W_0 = 0 and the first n_steps-1 values
            acc = np.sum(w[:, :-1] ** 2, axis=1)
            lhs[done : done + m] = step * acc + 0.5 * step * stop.t
            rhs[done : done + m] = w[:, -1] ** 4 / 6.0
            done += m
        return _summarize(lhs, rhs, 0)

    if isinstance(stop, BandStop):
        if stop.a_level <= 0 or stop.b_level <= 0:
            raise ParameterError("band levels must be > 0")

        def crossed(w: np.ndarray, t: np.ndarray) -> np.ndarray:
            return (w >= stop.a_level) | (w <= -stop.b_level)

    elif isinstance(stop, SlopedStop):
        if stop.c <= 0 or stop.mu <= 0:
            raise ParameterError("sloped stop needs c > 0 and mu > 0")

        def crossed(w: np.ndarray, t: np.ndarray) -> np.ndarray:
            return w >= stop.c - stop.mu * t

    else:
        raise ParameterError(f"unknown stop spec {stop!r}")

    max_steps = int(math.ceil(horizon / step))
    chunk = 1024
    lhs = np.empty(n_paths)
    rhs = np.empty(n_paths)
    n_truncated = 0
    batch_size = 20_000
    done = 0
    while done < n_paths:
        m = min(batch_size, n_paths - done)
        pos = np.zeros(m)
        acc = np.zeros(m)  # sum of squared left endpoints so far
        out_l = np.full(m, np.nan)
        out_r = np.full(m, np.nan)
        alive = np.arange(m)
        elapsed = 0
        while alive.size and elapsed < max_steps:
            s = min(chunk, max_steps - elapsed)
            w = rng.standard_normal((alive.size, s)) * sqrt_step
            np.cumsum(w, axis=1, out=w)
            w += pos[alive, None]
            t = (elapsed + 1 + np.arange(s)) * step
            hit = crossed(w, t[None, :])
            any_hit = hit.any(axis=1)
            j = hit.argmax(axis=1)
            presq = np.cumsum(w * w, axis=1)
            if any_hit.any():
                rows = np.flatnonzero(any_hit)
                jj = j[rows]
                partial = np.where(jj >= 1, presq[rows, np.maximum(jj - 1, 0)], 0.0)
                tau = (elapsed + jj + 1) * step
                idx = alive[rows]
                out_l[idx] = step * (acc[idx] + pos[idx] ** 2 + partial) + 0.5 * step * tau
                out_r[idx] = w[rows, jj] ** 4 / 6.0
            rows = np.flatnonzero(~any_hit)
            idx = alive[rows]
            extra = presq[rows, -2] if s >= 2 else 0.0
            acc[idx] += pos[idx] ** 2 + extra
            pos[idx] = w[rows, -1]
            alive = idx
            elapsed += s
        if alive.size:  # truncated at horizon: stop there, flag
            n_truncated += alive.size
            tau = max_steps * step
            out_l[alive] = step * acc[alive] + 0.5 * step * tau
            out_r[alive] = pos[alive] ** 4 / 6.0
        lhs[done : done + m] = out_l
        rhs[done : done + m] = out_r
        done += m
    return _summarize(lhs, rhs, n_truncated)
