"""Relay selection rules and noise-set formation.

Scalar functions operate on one realization. The ``*_batch`` variants take
arrays whose leading axis indexes trials and are what the simulator uses; the
scalar forms are kept as the readable reference and are cross-checked against
the batch forms in the tests.

A relay choice is an ``int`` index, or ``None`` when Protocol 3 finds no relay
inside its selection region.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .scenario import Point

NO_RELAY = -1  # batch marker for "no relay available"


def select_relay_optimal(gains_to_source: Sequence[float], gains_to_dest: Sequence[float]) -> int:
    """Index maximizing min(source gain, destination gain); lowest index wins ties."""
    if len(gains_to_source) != len(gains_to_dest):
        raise ValueError("gain lists differ in length")
    if len(gains_to_source) < 2:
        raise ValueError("need at least 2 relays")
    best, best_val = 0, min(gains_to_source[0], gains_to_dest[0])
    for j in range(1, len(gains_to_source)):
        v = min(gains_to_source[j], gains_to_dest[j])
        if v > best_val:
            best, best_val = j, v
    return best


def select_relay_random(n: int, rng: np.random.Generator) -> int:
    if n < 2:
        raise ValueError("need at least 2 relays")
    return int(rng.integers(n))


def in_region(x, y, a: float, b: float):
    """Closed rectangle [a, 1-a] x [b, 1-b]."""
    return (x >= a) & (x <= 1.0 - a) & (y >= b) & (y <= 1.0 - b)


def select_relay_region(
    positions: Sequence[Point], a: float, b: float, rng: np.random.Generator
) -> Optional[int]:
    """Uniform pick among relays inside the selection region, or None if it is empty."""
    inside = [j for j, p in enumerate(positions) if in_region(p.x, p.y, a, b)]
    if not inside:
        return None
    return inside[int(rng.integers(len(inside)))]


def noise_set(gains_to_target: Sequence[float], tau: float, exclude: int) -> frozenset:
    """Relays other than ``exclude`` whose gain to the target is strictly below tau."""
    if not 0 <= exclude < len(gains_to_target):
        raise ValueError("exclude index out of range")
    return frozenset(j for j, g in enumerate(gains_to_target) if j != exclude and g < tau)


# ---------------------------------------------------------------------------
# batched forms, leading axis = trial


def select_relay_optimal_batch(g_src: np.ndarray, g_dst: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximum, which is the lowest-index tie-break
    return np.argmax(np.minimum(g_src, g_dst), axis=1)


def select_relay_random_batch(u: np.ndarray, n: int) -> np.ndarray:
    """Map uniforms in [0, 1) to indices in [0, n)."""
    return np.minimum((u * n).astype(np.int64), n - 1)


def select_relay_region_batch(inside: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Uniform pick of a True column per row of ``inside``; NO_RELAY for all-False rows."""
    count = inside.sum(axis=1)
    k = np.minimum((u * count).astype(np.int64), np.maximum(count - 1, 0))
    rank = np.cumsum(inside, axis=1)
    chosen = np.argmax(inside & (rank == (k + 1)[:, None]), axis=1)
    return np.where(count > 0, chosen, NO_RELAY)


def noise_set_batch(gains: np.ndarray, tau: float, exclude: np.ndarray) -> np.ndarray:
    """Boolean membership mask, shape (trials, n)."""
    mask = gains < tau
    rows = np.arange(gains.shape[0])
    valid = exclude >= 0
    mask[rows[valid], exclude[valid]] = False
    return mask
