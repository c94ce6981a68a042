"""Monte Carlo simulation of two-hop cooperative-jamming transmissions.

Trials are generated in fixed blocks of ``BLOCK_SIZE``. Block ``k`` always
covers trials ``[k*BLOCK_SIZE, (k+1)*BLOCK_SIZE)`` and draws all of its
randomness from ``trial_generator(seed, k)``, in a fixed order, before any
outcome is evaluated. Trial ``i`` therefore sees the same channel and position
draws whatever the total trial count or worker count, and the reduction over
blocks is a plain sum of integer counts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .channel import FROZEN_POSITIONS_STREAM, sample_gains, trial_generator
from .protocols import (
    in_region,
    noise_set_batch,
    select_relay_optimal_batch,
    select_relay_random_batch,
    select_relay_region_batch,
)
from .scenario import DESTINATION, SOURCE, ScenarioEqual, ScenarioGeo

BLOCK_SIZE = 4096
WILSON_Z99 = 2.576


@dataclass(frozen=True)
class TrialOutcome:
    hop1_tx_outage: bool
    hop2_tx_outage: bool
    hop1_sec_outage: bool
    hop2_sec_outage: bool
    relay_unavailable: bool = False

    @property
    def tx_outage(self) -> bool:
        return self.hop1_tx_outage or self.hop2_tx_outage or self.relay_unavailable

    @property
    def sec_outage(self) -> bool:
        return self.hop1_sec_outage or self.hop2_sec_outage


@dataclass(frozen=True)
class OutageEstimate:
    successes: int
    trials: int
    p_hat: float
    ci_low: float
    ci_high: float

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z99):
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError("need trials >= 1 and 0 <= successes <= trials")
    p = successes / trials
    z2n = z * z / trials
    denom = 1.0 + z2n
    center = (p + 0.5 * z2n) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials)) / denom
    low = 0.0 if successes == 0 else max(0.0, min(p, center - half))
    high = 1.0 if successes == trials else min(1.0, max(p, center + half))
    return low, high


def make_estimate(successes: int, trials: int, z: float = WILSON_Z99) -> OutageEstimate:
    lo, hi = wilson_interval(successes, trials, z)
    return OutageEstimate(successes, trials, successes / trials, lo, hi)


# ---------------------------------------------------------------------------
# draws and per-block evaluation


@dataclass
class Draws:
    """Raw randomness for a block; arrays have the trial index on axis 0."""

    u_select: np.ndarray  # (B,)
    g_src: np.ndarray  # (B, n)  S -> R_j
    g_dst: np.ndarray  # (B, n)  R_j -> D, also D -> R_j
    g_relay: np.ndarray  # (B, n) R_j -> R_j*
    eve1_signal: np.ndarray  # (B, m)  S -> E_i
    eve1_jam: np.ndarray  # (B, n, m)  R_j -> E_i, hop 1
    eve2_signal: np.ndarray  # (B, m)  R_j* -> E_i
    eve2_jam: np.ndarray  # (B, n, m)  R_j -> E_i, hop 2
    relay_pos: Optional[np.ndarray] = None  # (B, n, 2)
    eve_pos: Optional[np.ndarray] = None  # (B, m, 2)

    def head(self, size: int) -> "Draws":
        return Draws(**{f.name: None if getattr(self, f.name) is None else getattr(self, f.name)[:size]
                        for f in fields(self)})


def draw_block(rng: np.random.Generator, size: int, n: int, m: int, geo: bool) -> Draws:
    u = rng.random(size)
    relay_pos = rng.random((size, n, 2)) if geo else None
    eve_pos = rng.random((size, m, 2)) if geo else None
    return Draws(
        u_select=u,
        g_src=sample_gains(rng, (size, n)),
        g_dst=sample_gains(rng, (size, n)),
        g_relay=sample_gains(rng, (size, n)),
        eve1_signal=sample_gains(rng, (size, m)),
        eve1_jam=sample_gains(rng, (size, n, m)),
        eve2_signal=sample_gains(rng, (size, m)),
        eve2_jam=sample_gains(rng, (size, n, m)),
        relay_pos=relay_pos,
        eve_pos=eve_pos,
    )


def frozen_positions(seed: int, n: int, m: int):
    rng = trial_generator(seed, 0, FROZEN_POSITIONS_STREAM)
    return rng.random((n, 2)), rng.random((m, 2))


@dataclass
class BlockOutcome:
    hop1_tx: np.ndarray
    hop2_tx: np.ndarray
    hop1_sec: np.ndarray
    hop2_sec: np.ndarray
    unavailable: np.ndarray
    relay: np.ndarray
    noise1: np.ndarray
    noise2: np.ndarray


def _decodes(signal, interference, noise, threshold):
    """SINR >= threshold, with a zero denominator read as infinite SINR."""
    return (signal > 0) & (signal >= threshold * (interference + noise))


def _outage(signal, interference, noise, threshold):
    """SINR < threshold; a zero denominator never causes an outage."""
    return signal < threshold * (interference + noise)


def evaluate_equal(protocol: int, s: ScenarioEqual, d: Draws) -> BlockOutcome:
    size = d.u_select.shape[0]
    rows = np.arange(size)
    if protocol == 1:
        j = select_relay_optimal_batch(d.g_src, d.g_dst)
    elif protocol == 2:
        j = select_relay_random_batch(d.u_select, s.n)
    else:
        raise ValueError("equal path-loss scenario supports protocols 1 and 2")
    noise = s.n0 / (2.0 * s.es)
    r1 = noise_set_batch(d.g_relay, s.tau, j)
    r2 = noise_set_batch(d.g_dst, s.tau, j)

    hop1_tx = _outage(d.g_src[rows, j], np.sum(d.g_relay * r1, axis=1), noise, s.gamma_r)
    hop2_tx = _outage(d.g_dst[rows, j], np.sum(d.g_dst * r2, axis=1), noise, s.gamma_r)

    if s.m:
        jam1 = np.einsum("bj,bji->bi", r1.astype(float), d.eve1_jam)
        jam2 = np.einsum("bj,bji->bi", r2.astype(float), d.eve2_jam)
        hop1_sec = _decodes(d.eve1_signal, jam1, noise, s.gamma_e).any(axis=1)
        hop2_sec = _decodes(d.eve2_signal, jam2, noise, s.gamma_e).any(axis=1)
    else:
        hop1_sec = hop2_sec = np.zeros(size, dtype=bool)
    return BlockOutcome(hop1_tx, hop2_tx, hop1_sec, hop2_sec, np.zeros(size, dtype=bool), j, r1, r2)


def _dist(p, q):
    return np.sqrt(np.sum((p - q) ** 2, axis=-1))


def evaluate_geo(s: ScenarioGeo, d: Draws) -> BlockOutcome:
    base = s.base
    size = d.u_select.shape[0]
    rows = np.arange(size)
    src = np.asarray(SOURCE)
    dst = np.asarray(DESTINATION)
    relay_pos, eve_pos = d.relay_pos, d.eve_pos

    inside = in_region(relay_pos[..., 0], relay_pos[..., 1], s.a, s.b)
    j = select_relay_region_batch(inside, d.u_select)
    unavailable = j < 0
    jj = np.where(unavailable, 0, j)
    sel = relay_pos[rows, jj]  # (B, 2)
    noise = base.n0 / (2.0 * base.es)
    alpha = s.alpha

    # nobody transmits when the selection region is empty
    r1 = noise_set_batch(d.g_relay, base.tau, j) & ~unavailable[:, None]
    r2 = noise_set_batch(d.g_dst, base.tau, j) & ~unavailable[:, None]

    def loss(dist, mask):
        # masked entries get distance 1 so that self-distances never produce 0**-alpha
        return np.where(mask, dist, 1.0) ** (-alpha) * mask

    d_relays_sel = _dist(relay_pos, sel[:, None, :])  # (B, n)
    d_relays_dst = _dist(relay_pos, dst)  # (B, n)
    interf1 = np.sum(d.g_relay * loss(d_relays_sel, r1), axis=1)
    interf2 = np.sum(d.g_dst * loss(d_relays_dst, r2), axis=1)
    sig1 = d.g_src[rows, jj] * _dist(src, sel) ** (-alpha)
    sig2 = d.g_dst[rows, jj] * _dist(sel, dst) ** (-alpha)
    hop1_tx = _outage(sig1, interf1, noise, base.gamma_r) | unavailable
    hop2_tx = _outage(sig2, interf2, noise, base.gamma_r) | unavailable

    if base.m:
        d_relay_eve = _dist(relay_pos[:, :, None, :], eve_pos[:, None, :, :])  # (B, n, m)
        jam1 = np.sum(d.eve1_jam * loss(d_relay_eve, r1[:, :, None]), axis=1)
        jam2 = np.sum(d.eve2_jam * loss(d_relay_eve, r2[:, :, None]), axis=1)
        d_src_eve = _dist(eve_pos, src)
        d_sel_eve = _dist(eve_pos, sel[:, None, :])
        with np.errstate(divide="ignore"):
            e1 = (d_src_eve < s.r0) | _decodes(d.eve1_signal * d_src_eve ** (-alpha), jam1, noise, base.gamma_e)
            e2 = (d_sel_eve < s.r0) | _decodes(d.eve2_signal * d_sel_eve ** (-alpha), jam2, noise, base.gamma_e)
        hop1_sec = e1.any(axis=1) & ~unavailable
        hop2_sec = e2.any(axis=1) & ~unavailable
    else:
        hop1_sec = hop2_sec = np.zeros(size, dtype=bool)
    return BlockOutcome(hop1_tx, hop2_tx, hop1_sec, hop2_sec, unavailable, j, r1, r2)


def evaluate(protocol: int, scenario, d: Draws) -> BlockOutcome:
    if protocol == 3:
        if not isinstance(scenario, ScenarioGeo):
            raise ValueError("protocol 3 needs a ScenarioGeo")
        return evaluate_geo(scenario, d)
    if isinstance(scenario, ScenarioGeo):
        scenario = scenario.base
    return evaluate_equal(protocol, scenario, d)


def _first(out: BlockOutcome) -> TrialOutcome:
    return TrialOutcome(
        bool(out.hop1_tx[0]), bool(out.hop2_tx[0]), bool(out.hop1_sec[0]),
        bool(out.hop2_sec[0]), bool(out.unavailable[0]),
    )


def run_trial_equal(protocol: int, s: ScenarioEqual, rng: np.random.Generator) -> TrialOutcome:
    return _first(evaluate_equal(protocol, s, draw_block(rng, 1, s.n, s.m, geo=False)))


def run_trial_geo(s: ScenarioGeo, rng: np.random.Generator) -> TrialOutcome:
    return _first(evaluate_geo(s, draw_block(rng, 1, s.base.n, s.base.m, geo=True)))


# ---------------------------------------------------------------------------
# batched estimation


@dataclass(frozen=True)
class Counts:
    trials: int = 0
    tx: int = 0
    sec: int = 0
    hop1_tx: int = 0
    hop2_tx: int = 0
    hop1_sec: int = 0
    hop2_sec: int = 0
    unavailable: int = 0

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    @property
    def tx_estimate(self) -> OutageEstimate:
        return make_estimate(self.tx, self.trials)

    @property
    def sec_estimate(self) -> OutageEstimate:
        return make_estimate(self.sec, self.trials)


def _count_block(protocol, scenario, trials, seed, block, frozen) -> Counts:
    base = scenario.base if isinstance(scenario, ScenarioGeo) else scenario
    geo = protocol == 3
    start = block * BLOCK_SIZE
    size = min(BLOCK_SIZE, trials - start)
    d = draw_block(trial_generator(seed, block), BLOCK_SIZE, base.n, base.m, geo).head(size)
    if geo and frozen is not None:
        d.relay_pos = np.broadcast_to(frozen[0], d.relay_pos.shape)
        d.eve_pos = np.broadcast_to(frozen[1], d.eve_pos.shape)
    out = evaluate(protocol, scenario, d)
    tx = out.hop1_tx | out.hop2_tx | out.unavailable
    sec = out.hop1_sec | out.hop2_sec
    return Counts(
        trials=size,
        tx=int(tx.sum()),
        sec=int(sec.sum()),
        hop1_tx=int(out.hop1_tx.sum()),
        hop2_tx=int(out.hop2_tx.sum()),
        hop1_sec=int(out.hop1_sec.sum()),
        hop2_sec=int(out.hop2_sec.sum()),
        unavailable=int(out.unavailable.sum()),
    )


def _count_blocks(args) -> Counts:
    protocol, scenario, trials, seed, blocks, frozen = args
    total = Counts()
    for b in blocks:
        total = total + _count_block(protocol, scenario, trials, seed, b, frozen)
    return total


def resolve_workers(workers) -> int:
    if workers is None:
        workers = os.environ.get("RELAYSEC_WORKERS", "1")
    if workers == "auto":
        return os.cpu_count() or 1
    workers = int(workers)
    if workers < 1:
        raise ValueError("workers must be ≥ 1")
    return workers


def simulate(protocol: int, scenario, trials: int, seed: int, workers=1, freeze_positions=False) -> Counts:
    """Run ``trials`` independent trials and return outcome counts."""
    if trials < 1:
        raise ValueError("trials must be ≥ 1")
    base = scenario.base if isinstance(scenario, ScenarioGeo) else scenario
    frozen = frozen_positions(seed, base.n, base.m) if (protocol == 3 and freeze_positions) else None
    nblocks = -(-trials // BLOCK_SIZE)
    workers = min(resolve_workers(workers), nblocks)
    if workers == 1:
        return _count_blocks((protocol, scenario, trials, seed, range(nblocks), frozen))
    chunks = [range(w, nblocks, workers) for w in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_count_blocks, [(protocol, scenario, trials, seed, c, frozen) for c in chunks])
        total = Counts()
        for p in parts:
            total = total + p
    return total


def estimate(protocol: int, scenario, trials: int, seed: int, workers=1, freeze_positions=False):
    """``(transmission, secrecy)`` OutageEstimates with Wilson 99% intervals."""
    c = simulate(protocol, scenario, trials, seed, workers, freeze_positions)
    return c.tx_estimate, c.sec_estimate
