"""Rayleigh fading draws, SINR, and order-statistic CDFs of unit-mean exponentials.

Random streams
--------------
All randomness goes through ``numpy.random.Generator`` backed by Philox-4x64
(a counter-based bit generator). ``trial_generator(seed, block)`` derives an
independent stream for each block of trials from ``(seed, block)`` alone, which
is what makes batched estimates independent of how blocks are scheduled.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

RNG_ALGORITHM = "Philox4x64-10 via numpy.random.Philox, keyed by SeedSequence([seed, block, stream])"

# stream tags mixed into the seed sequence
TRIALS_STREAM = 0
FROZEN_POSITIONS_STREAM = 1


class DegenerateSINR(ArithmeticError):
    """Zero denominator: no interferers and no environment noise.

    Callers treat this as an infinite SINR (never a transmission outage; an
    eavesdropper with a positive gain always decodes).
    """


class Interferer(NamedTuple):
    gain: float
    distance: float = 1.0


def trial_generator(seed: int, block: int, stream: int = TRIALS_STREAM) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), int(block), int(stream)])
    return np.random.Generator(np.random.Philox(ss))


def sample_gains(rng: np.random.Generator, size) -> np.ndarray:
    """Unit-mean exponential |h|^2 draws by inverse-CDF transform of uniforms."""
    u = rng.random(size)
    return -np.log1p(-u)


def sample_gain(rng: np.random.Generator) -> float:
    return float(-math.log1p(-rng.random()))


def sinr(
    signal_gain: float,
    signal_distance: float,
    interferers: Sequence[Interferer],
    alpha: float,
    es: float,
    n0: float,
) -> float:
    """E_s g d^-a / (sum_i E_s g_i d_i^-a + N0/2).

    Raises DegenerateSINR when the denominator vanishes.
    """
    if signal_distance <= 0 or any(i.distance <= 0 for i in interferers):
        raise ValueError("distances must be positive")
    if es <= 0 or n0 < 0:
        raise ValueError("need es > 0 and n0 >= 0")
    denom = sum(es * i.gain * i.distance ** (-alpha) for i in interferers) + n0 / 2.0
    if denom == 0.0:
        raise DegenerateSINR("no interference and no environment noise")
    return es * signal_gain * signal_distance ** (-alpha) / denom


def min_pair_cdf(x):
    """CDF of min of two independent unit exponentials: 1 - exp(-2x) for x > 0."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, -np.expm1(-2.0 * np.where(x > 0, x, 0.0)), 0.0)
    return out if out.ndim else float(out)


def max_of_min_cdf(x, n: int):
    """CDF of the largest of ``n`` independent min-pairs."""
    if n < 1:
        raise ValueError("n must be ≥ 1")
    return min_pair_cdf(x) ** n
