"""Discrete-time Monte Carlo simulation of the sampling and coding protocol.

The engine walks a Wiener path on a grid of step eps and runs the monitor's
state machine.  A cycle starts at a delivery time D_n with the decoded
estimate ref and the previous code length L_n:

* X_n = W(D_n) - ref strictly inside (-b*sqrt(L_n), a*sqrt(L_n)): wait for
  the increment process to exit the constant band (events 2/3), decoded
  value exactly +-threshold.
* X_n beyond (or exactly on) a boundary: wait for the sloped threshold
  a*sqrt(L_n) + mu*t (or its mirror) started at D_n to catch the process
  (events 1/4); the monitor reconstructs tau from timestamps, so the
  decoded value is threshold + mu*tau_hat.

Crossings are detected at the first grid index satisfying the condition
(O(sqrt(eps)) overshoot accepted); the decoder always uses the
protocol-implied value, and thresholds are referenced to the decoded ledger
ref, so estimator and monitor agree exactly and discretization error never
accumulates across cycles.

A sample on a threshold boundary is classified as the sloped event: the
sloped hitting time from the boundary is zero in continuous time, so the
conventions agree up to a null event.  This also makes the a = b = 0
configuration runnable with infinite band codewords (the band is never
entered; the very first cycle starts from X = 0, i.e. on the boundary).

Transmission of length l occupies round(l/eps) grid indices; the estimate
updates at delivery.  Measurement covers complete cycles starting after the
burn-in prefix (default 1% of the horizon; the first cycle's previous
length is initialized to l2).

The grid must resolve the catch-up dynamics: decoded sloped values are
multiples of mu*eps, so keep mu*eps well below the process scale (the
reference experiments use mu*eps ~ 0.1).

Benchmarks: the uniform scheme is the same engine with all lengths 2; the
ideal scheme samples the exact real value whenever |W - ref| >= a with the
channel free and delivers it after exactly one time unit.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import stats as _stats

from .errors import HorizonError, ParameterError, WienerCodingError
from .gauss_stats import ThresholdConfig, event_probabilities
from .mse_model import INTEGER, Codebook

__all__ = [
    "SimConfig",
    "CycleRecord",
    "CycleLog",
    "SimulationReport",
    "IndependenceResult",
    "run",
    "run_benchmark",
    "length_independence_test",
]

MONOTONE = "monotone"
UNIFORM = "uniform-benchmark"
IDEAL = "ideal-benchmark"

_CSV_COLUMNS = ("s_n", "d_n", "event", "z_n", "length")


@dataclass(frozen=True)
class SimConfig:
    eps: float
    horizon: float
    cfg: ThresholdConfig
    cb: Codebook | None
    seed: int
    scheme: str = MONOTONE
    replications: int = 1
    burn_in_frac: float = 0.01
    log_cycles: bool = False

    def __post_init__(self) -> None:
        if self.eps <= 0:
            raise ParameterError(f"eps must be > 0, got {self.eps}")
        if self.scheme not in (MONOTONE, UNIFORM, IDEAL):
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if self.replications < 1:
            raise ParameterError("replications must be >= 1")
        if not (0.0 <= self.burn_in_frac < 0.5):
            raise ParameterError("burn_in_frac must be in [0, 0.5)")
        cb = self.cb
        if self.scheme == UNIFORM:
            if cb is None:
                cb = Codebook.uniform(2, mode=INTEGER)
                object.__setattr__(self, "cb", cb)
            elif cb.lengths != (2.0, 2.0, 2.0, 2.0):
                raise ParameterError("uniform benchmark fixes all code lengths to 2")
        elif self.scheme == IDEAL:
            if cb is not None:
                raise ParameterError("ideal benchmark transmits real values; no codebook")
        elif cb is None:
            raise ParameterError("monotone scheme requires a codebook")
        if cb is not None:
            if cb.mode != INTEGER:
                raise ParameterError("simulator requires an integer-prefix codebook")
            probs = event_probabilities(self.cfg).as_tuple()
            for i, (p, l) in enumerate(zip(probs, cb.lengths)):
                if math.isinf(l) and p > 0.0:
                    raise ParameterError(
                        f"l{i + 1} is infinite but event {i + 1} has probability {p}"
                    )
        max_len = 1.0 if cb is None else max(l for l in cb.lengths if math.isfinite(l))
        if self.horizon < 100.0 * max_len:
            raise ParameterError(
                f"horizon {self.horizon} too short; need >= 100 * max length = {100 * max_len}"
            )


@dataclass(frozen=True)
class CycleRecord:
    s_idx: int
    d_idx: int
    event: int
    z_n: float
    length: float
    w_hat: float  # decoded estimate in effect after this delivery
    eps: float

    @property
    def s_n(self) -> float:
        return self.s_idx * self.eps

    @property
    def d_n(self) -> float:
        return self.d_idx * self.eps


class CycleLog:
    """Columnar per-cycle log (measured cycles of one replication)."""

    def __init__(self, eps: float):
        self.eps = eps
        self.s_idx: list[int] = []
        self.d_idx: list[int] = []
        self.event: list[int] = []
        self.z: list[float] = []
        self.length: list[float] = []
        self.w_hat: list[float] = []
        self.reward: list[float] = []
        self.duration: list[float] = []

    def append(self, s_idx, d_idx, event, z, length, w_hat, reward, duration) -> None:
        self.s_idx.append(s_idx)
        self.d_idx.append(d_idx)
        self.event.append(event)
        self.z.append(z)
        self.length.append(length)
        self.w_hat.append(w_hat)
        self.reward.append(reward)
        self.duration.append(duration)

    def __len__(self) -> int:
        return len(self.s_idx)

    def records(self) -> Iterator[CycleRecord]:
        for i in range(len(self)):
            yield CycleRecord(
                s_idx=self.s_idx[i],
                d_idx=self.d_idx[i],
                event=self.event[i],
                z_n=self.z[i],
                length=self.length[i],
                w_hat=self.w_hat[i],
                eps=self.eps,
            )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_COLUMNS)
            for r in self.records():
                writer.writerow([r.s_n, r.d_n, r.event, r.z_n, r.length])


@dataclass
class SimulationReport:
    mse_hat: float
    mse_ci: float
    sr_hat: float
    sr_ci: float
    event_counts: np.ndarray  # counts for events 1..4
    n_cycles: int
    total_time: float
    rep_mse: np.ndarray
    rep_sr: np.ndarray
    length_sequences: list[np.ndarray]
    cycles: CycleLog | None
    config: SimConfig

    @property
    def length_sequence(self) -> np.ndarray:
        return np.concatenate(self.length_sequences) if self.length_sequences else np.array([])

    def to_json_dict(self) -> dict:
        cb = self.config.cb
        cfg = self.config.cfg

        def _num(x):
            return None if (x is None or not math.isfinite(x)) else float(x)

        return {
            "spec": {
                "scheme": self.config.scheme,
                "eps": self.config.eps,
                "horizon": self.config.horizon,
                "a": cfg.a,
                "b": cfg.b,
                "mu": cfg.mu,
                "sigma2": cfg.sigma2,
                "lengths": None if cb is None else [_num(l) for l in cb.lengths],
                "seed": self.config.seed,
                "replications": self.config.replications,
                "burn_in_frac": self.config.burn_in_frac,
            },
            "results": {
                "mse_hat": float(self.mse_hat),
                "mse_ci": _num(self.mse_ci),
                "sr_hat": float(self.sr_hat),
                "sr_ci": _num(self.sr_ci),
                "n_cycles": int(self.n_cycles),
                "total_time": float(self.total_time),
                "event_counts": {str(i + 1): int(c) for i, c in enumerate(self.event_counts)},
                "rep_mse": [float(x) for x in self.rep_mse],
                "rep_sr": [float(x) for x in self.rep_sr],
            },
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


@dataclass(frozen=True)
class IndependenceResult:
    statistic: float
    dof: int
    p_value: float
    table: np.ndarray
    categories: np.ndarray
    n_pairs: int


@dataclass
class _RepOutcome:
    reward: float
    duration: float
    n_cycles: int
    event_counts: np.ndarray
    lengths: np.ndarray
    log: CycleLog | None


def _first_band_crossing(w, ref, start, last, athr, bthr):
    """First index in [start, last] with w - ref >= athr or <= -bthr.

    Returns (index, went_up); (-1, False) when no crossing exists.  Ties at
    a single index (possible only when athr = bthr = 0) resolve upward.
    """
    up_level = ref + athr
    dn_level = ref - bthr
    j0 = start
    chunk = 512
    while j0 <= last:
        j1 = min(j0 + chunk, last + 1)
        seg = w[j0:j1]
        hit = (seg >= up_level) | (seg <= dn_level)
        k = int(np.argmax(hit))
        if hit[k]:
            return j0 + k, bool(seg[k] >= up_level)
        j0 = j1
        chunk = min(chunk * 2, 1 << 16)
    return -1, False


def _first_sloped_crossing(w, ref, d, start, last, thr0, mu_eps, upward):
    """First index where the sloped threshold catches the process.

    Upward event: process above, crossing when w - ref <= thr0 + mu_eps*(j-d).
    Downward event: w - ref >= -(thr0 + mu_eps*(j-d)).
    """
    j0 = start
    chunk = 512
    while j0 <= last:
        j1 = min(j0 + chunk, last + 1)
        seg = w[j0:j1] - ref
        line = thr0 + mu_eps * np.arange(j0 - d, j1 - d)
        hit = (seg <= line) if upward else (seg >= -line)
        k = int(np.argmax(hit))
        if hit[k]:
            return j0 + k
        j0 = j1
        chunk = min(chunk * 2, 1 << 16)
    return -1


def _wiener_path(rng, n_steps: int, eps: float, sigma2: float) -> np.ndarray:
    w = np.empty(n_steps + 1)
    w[0] = 0.0
    incr = rng.standard_normal(n_steps)
    incr *= math.sqrt(sigma2 * eps)
    np.cumsum(incr, out=w[1:])
    return w


def _run_monotone_once(sim: SimConfig, rng, log_cycles: bool) -> _RepOutcome:
    cfg, cb, eps = sim.cfg, sim.cb, sim.eps
    n_steps = int(round(sim.horizon / eps))
    burn_idx = int(round(sim.burn_in_frac * n_steps))
    w = _wiener_path(rng, n_steps, eps, cfg.sigma2)
    a, b, mu = cfg.a, cfg.b, cfg.mu
    mu_eps = mu * eps
    len_idx = [int(round(l / eps)) if math.isfinite(l) else -1 for l in cb.lengths]

    ref = 0.0
    d = 0
    l_prev = cb.l2
    reward = 0.0
    duration = 0.0
    n_cycles = 0
    counts = np.zeros(4, dtype=np.int64)
    lengths: list[float] = []
    log = CycleLog(eps) if log_cycles else None

    while d < n_steps:
        athr = a * math.sqrt(l_prev) if a > 0.0 else 0.0
        bthr = b * math.sqrt(l_prev) if b > 0.0 else 0.0
        x = w[d] - ref
        if -bthr < x < athr:
            j, went_up = _first_band_crossing(w, ref, d + 1, n_steps, athr, bthr)
            if j < 0:
                break
            if went_up:
                event, z = 2, athr
            else:
                event, z = 3, -bthr
        else:
            upward = x >= athr  # boundary goes to the sloped event (tau = 0 limit)
            thr0 = athr if upward else bthr
            j = _first_sloped_crossing(w, ref, d, d + 1, n_steps, thr0, mu_eps, upward)
            if j < 0:
                break
            tau_hat = (j - d) * eps
            if upward:
                event, z = 1, athr + mu * tau_hat
            else:
                event, z = 4, -(bthr + mu * tau_hat)
        steps = len_idx[event - 1]
        if steps < 0:
            raise WienerCodingError(
                f"event {event} with infinite code length occurred at index {j}"
            )
        d_new = j + steps
        if d_new > n_steps:
            break
        if d >= burn_idx:
            err = w[d:d_new] - ref
            sq = float(np.add.reduce(err * err)) * eps
            dur = (d_new - d) * eps
            reward += sq
            duration += dur
            n_cycles += 1
            counts[event - 1] += 1
            lengths.append(cb.lengths[event - 1])
            if log is not None:
                log.append(j, d_new, event, z, cb.lengths[event - 1], ref + z, sq, dur)
        ref += z
        l_prev = cb.lengths[event - 1]
        d = d_new
    return _RepOutcome(reward, duration, n_cycles, counts, np.array(lengths), log)


def _run_ideal_once(sim: SimConfig, rng, log_cycles: bool) -> _RepOutcome:
    cfg, eps = sim.cfg, sim.eps
    n_steps = int(round(sim.horizon / eps))
    burn_idx = int(round(sim.burn_in_frac * n_steps))
    w = _wiener_path(rng, n_steps, eps, cfg.sigma2)
    a = cfg.a
    delay = int(round(1.0 / eps))

    ref = 0.0
    d = 0
    reward = 0.0
    duration = 0.0
    n_cycles = 0
    counts = np.zeros(4, dtype=np.int64)
    lengths: list[float] = []
    log = CycleLog(eps) if log_cycles else None

    while d < n_steps:
        # channel free from d onward; sample as soon as |W - ref| >= a
        j, went_up = _first_band_crossing(w, ref, d, n_steps, a, a)
        if j < 0:
            break
        d_new = j + delay
        if d_new > n_steps:
            break
        z = float(w[j] - ref)
        event = 2 if went_up else 3
        if d >= burn_idx:
            err = w[d:d_new] - ref
            sq = float(np.add.reduce(err * err)) * eps
            dur = (d_new - d) * eps
            reward += sq
            duration += dur
            n_cycles += 1
            counts[event - 1] += 1
            lengths.append(1.0)
            if log is not None:
                log.append(j, d_new, event, z, 1.0, ref + z, sq, dur)
        ref += z
        d = d_new
    return _RepOutcome(reward, duration, n_cycles, counts, np.array(lengths), log)


def _run_replicated(sim: SimConfig) -> SimulationReport:
    runner = _run_ideal_once if sim.scheme == IDEAL else _run_monotone_once
    outcomes: list[_RepOutcome] = []
    for rep in range(sim.replications):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=sim.seed, spawn_key=(rep,)))
        out = runner(sim, rng, sim.log_cycles and rep == 0)
        if out.n_cycles == 0:
            raise HorizonError(
                f"replication {rep}: no complete cycle after burn-in; horizon too short"
            )
        outcomes.append(out)
    rep_mse = np.array([o.reward / o.duration for o in outcomes])
    rep_sr = np.array([o.n_cycles / o.duration for o in outcomes])
    n = len(outcomes)
    if n > 1:
        mse_ci = 1.96 * float(rep_mse.std(ddof=1)) / math.sqrt(n)
        sr_ci = 1.96 * float(rep_sr.std(ddof=1)) / math.sqrt(n)
    else:
        mse_ci = math.nan
        sr_ci = math.nan
    return SimulationReport(
        mse_hat=float(rep_mse.mean()),
        mse_ci=mse_ci,
        sr_hat=float(rep_sr.mean()),
        sr_ci=sr_ci,
        event_counts=sum(o.event_counts for o in outcomes),
        n_cycles=sum(o.n_cycles for o in outcomes),
        total_time=sum(o.duration for o in outcomes),
        rep_mse=rep_mse,
        rep_sr=rep_sr,
        length_sequences=[o.lengths for o in outcomes],
        cycles=outcomes[0].log,
        config=sim,
    )


def run(sim: SimConfig) -> SimulationReport:
    """Simulate the monotone-threshold scheme."""
    if sim.scheme != MONOTONE:
        raise ParameterError(f"run() handles the monotone scheme; got {sim.scheme!r}")
    return _run_replicated(sim)


def run_benchmark(sim: SimConfig) -> SimulationReport:
    """Simulate a benchmark scheme (uniform length-2 code or ideal sampling)."""
    if sim.scheme not in (UNIFORM, IDEAL):
        raise ParameterError(f"run_benchmark() needs a benchmark scheme; got {sim.scheme!r}")
    return _run_replicated(sim)


def length_independence_test(
    report: SimulationReport, min_cycles: int = 10_000
) -> IndependenceResult:
    """Chi-square contingency test on consecutive code-length pairs.

    Pairs are formed within each replication (no cross-replication pairs).
    Needs at least min_cycles cycles and at least two distinct length values.
    """
    total = sum(len(seq) for seq in report.length_sequences)
    if total < min_cycles:
        raise ParameterError(f"need >= {min_cycles} cycles for the test, got {total}")
    seqs = [seq for seq in report.length_sequences if len(seq) >= 2]
    pooled = np.concatenate(seqs)
    categories = np.unique(pooled)
    k = categories.size
    if k < 2:
        raise ParameterError("independence test needs >= 2 distinct code lengths")
    table = np.zeros((k, k), dtype=np.int64)
    for seq in seqs:
        ia = np.searchsorted(categories, seq[:-1])
        ib = np.searchsorted(categories, seq[1:])
        np.add.at(table, (ia, ib), 1)
    n_pairs = int(table.sum())
    row = table.sum(axis=1, keepdims=True)
    col = table.sum(axis=0, keepdims=True)
    expected = row * col / n_pairs
    mask = expected > 0
    statistic = float((((table - expected) ** 2)[mask] / expected[mask]).sum())
    dof = (k - 1) * (k - 1)
    p_value = float(_stats.chi2.sf(statistic, dof))
    return IndependenceResult(
        statistic=statistic,
        dof=dof,
        p_value=p_value,
        table=table,
        categories=categories,
        n_pairs=n_pairs,
    )
