"""Closed-form outage bounds, tau windows and eavesdropper-tolerance limits.

Everything here is natural-log based. Bounds come back as ``BoundPair``:

* ``raw`` is the formula value exactly as written (``2q - q**2`` style), which
  can leave [0, 1] or even turn negative when the per-hop term exceeds 1;
* ``clamped`` is the two-hop union of the per-hop term clamped to [0, 1].
  When the per-hop term already lies in [0, 1] this equals
  ``min(1, max(0, raw))``; otherwise it is 1, since a per-hop probability
  can never exceed 1 and ``2q - q**2`` is only increasing on [0, 1].

The tau_max closed forms replace ``1 - exp(-tau)`` by ``tau``. Because
``(1 - exp(-tau)) * tau <= tau**2`` that replacement gives a *smaller* tau than
the exact root; the ``*_exact`` variants solve ``(1 - exp(-tau)) * tau = K`` by
bisection for comparison.
"""

from __future__ import annotations

import functools
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize, stats

from .quadrature import disc_excluded_integral
from .scenario import Requirements, ScenarioGeo

DEFAULT_EXCLUSION_RADIUS = 1e-3
QUAD_RTOL = 1e-6

# infeasibility causes reported by TauWindow
RELIABILITY = "reliability"  # empty-region probability alone exceeds eps_t
NEAR_EAVESDROPPER = "near-eavesdropper"  # r0 discs alone exceed the secrecy budget
SECRECY = "secrecy"  # no finite tau makes jamming strong enough
WINDOW = "window"  # both endpoints finite but tau_min > tau_max


@dataclass(frozen=True)
class BoundPair:
    raw: float
    clamped: float


@dataclass(frozen=True)
class TauWindow:
    """``tau_min`` is ``inf`` when secrecy cannot be met; ``tau_max`` is ``nan``
    when reliability cannot be met. ``feasible`` is ``tau_min <= tau_max``."""

    tau_min: float
    tau_max: float
    feasible: bool
    cause: Optional[str] = None

    @property
    def binding(self) -> str:
        if self.cause is not None:
            return self.cause
        return "none"


@dataclass(frozen=True)
class GeoConstants:
    n: int
    a: float
    b: float
    alpha: float
    theta: float
    varphi1: float
    varphi2: float
    phi: float
    psi: float
    exclusion_radius: float
    quad_error: float = 0.0


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _two_hop(q: float, two_minus_q: Optional[float] = None) -> BoundPair:
    """Union of two independent hops with per-hop term q; ``two_minus_q`` may be
    supplied when 2 - q would cancel."""
    qc = _clamp01(q)
    if two_minus_q is None:
        two_minus_q = 2.0 - q
    return BoundPair(raw=q * two_minus_q, clamped=qc * (2.0 - qc))


def _eve_two_hop(m: int, h: float, one_minus_h: float) -> BoundPair:
    # q = m h, and 2 - q = (2 - m) + m (1 - h) keeps its digits when q is near 2
    if m == 0:
        return BoundPair(0.0, 0.0)
    return _two_hop(m * h, (2.0 - m) + m * one_minus_h)


def _p_noise(tau: float) -> float:
    """P(|h|^2 < tau) for a unit exponential."""
    return -math.expm1(-tau)


def _budget(eps: float) -> float:
    """1 - sqrt(1 - eps), written to avoid cancellation for small eps."""
    return eps / (1.0 + math.sqrt(1.0 - eps))


def union_outage(p1: float, p2: float) -> float:
    for p in (p1, p2):
        if not 0.0 <= p <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
    return p1 + p2 - p1 * p2


# ---------------------------------------------------------------------------
# equal path loss: Protocols 1 and 2


def lemma1_hop_term(n: int, gamma_r: float, tau: float) -> float:
    x = 2.0 * gamma_r * (n - 1) * _p_noise(tau) * tau
    return (-math.expm1(-x)) ** n


def lemma3_hop_term(n: int, gamma_r: float, tau: float) -> float:
    return -math.expm1(-gamma_r * (n - 1) * _p_noise(tau) * tau)


def secrecy_hop_term(n: int, m: int, gamma_e: float, tau: float) -> float:
    """m * (1 / (1 + gamma_e)) ** ((n - 1)(1 - exp(-tau)))."""
    if m == 0:
        return 0.0
    return m * math.exp(-(n - 1) * _p_noise(tau) * math.log1p(gamma_e))


def lemma1_transmission_bound(n: int, gamma_r: float, tau: float) -> BoundPair:
    return _two_hop(lemma1_hop_term(n, gamma_r, tau))


def lemma1_secrecy_bound(n: int, m: int, gamma_e: float, tau: float) -> BoundPair:
    x = -(n - 1) * _p_noise(tau) * math.log1p(gamma_e)
    return _eve_two_hop(m, math.exp(x), -math.expm1(x))


def lemma3_transmission_bound(n: int, gamma_r: float, tau: float) -> BoundPair:
    return _two_hop(lemma3_hop_term(n, gamma_r, tau))


# random relay selection does not change the eavesdroppers' view
lemma3_secrecy_bound = lemma1_secrecy_bound


def lemma2_tau_max(n: int, gamma_r: float, eps_t: float) -> float:
    """Largest tau meeting eps_t under optimal selection; ``inf`` when eps_t = 1."""
    if not 0.0 <= eps_t <= 1.0:
        raise ValueError("eps_t must lie in [0, 1]")
    if eps_t == 1.0:
        return math.inf
    k = -math.log1p(-(_budget(eps_t) ** (1.0 / n)))
    return math.sqrt(k / (2.0 * gamma_r * (n - 1)))


def lemma4_tau_max(n: int, gamma_r: float, eps_t: float) -> float:
    """Largest tau meeting eps_t under random selection; ``inf`` when eps_t = 1."""
    if not 0.0 <= eps_t <= 1.0:
        raise ValueError("eps_t must lie in [0, 1]")
    if eps_t == 1.0:
        return math.inf
    return math.sqrt(-math.log1p(-eps_t) / (2.0 * gamma_r * (n - 1)))


def lemma2_tau_min(n: int, gamma_e: float, eps_s: float, m: int) -> Optional[float]:
    """Smallest tau meeting eps_s; ``None`` when no tau suffices.

    Negative formula values (secrecy met without any jamming) clamp to 0.
    """
    if m == 0 or eps_s == 1.0:
        return 0.0
    budget = _budget(eps_s)
    if budget == 0.0:
        return None
    log_ratio = math.log(budget / m)
    # m typed as 1 - sqrt(1 - eps_s) can differ from budget by an ulp or two
    if abs(log_ratio) <= 4 * sys.float_info.epsilon:
        return 0.0
    ratio = log_ratio / ((n - 1) * math.log1p(gamma_e))
    if ratio <= -1.0:
        return None
    return max(0.0, -math.log1p(ratio))


lemma4_tau_min = lemma2_tau_min


def theorem1_m_max(n: int, gamma_r: float, gamma_e: float, eps_t: float, eps_s: float) -> float:
    budget = _budget(eps_s)
    if eps_t == 1.0:
        return math.inf if budget > 0 else 0.0
    k = -math.log1p(-(_budget(eps_t) ** (1.0 / n)))
    return budget * math.exp(math.log1p(gamma_e) * math.sqrt((n - 1) * k / (2.0 * gamma_r)))


def theorem2_m_max(n: int, gamma_r: float, gamma_e: float, eps_t: float, eps_s: float) -> float:
    budget = _budget(eps_s)
    if eps_t == 1.0:
        return math.inf if budget > 0 else 0.0
    k = -math.log1p(-eps_t)
    return budget * math.exp(math.log1p(gamma_e) * math.sqrt((n - 1) * k / (2.0 * gamma_r)))


# ---------------------------------------------------------------------------
# exact inversion of (1 - e^-tau) tau = k


def solve_tau_exact(k: float) -> float:
    """Root of (1 - exp(-tau)) * tau = k on [0, inf) by bisection."""
    if k < 0:
        raise ValueError("k must be ≥ 0")
    if k == 0:
        return 0.0
    if math.isinf(k):
        return math.inf
    # (1 - e^-t) t lies between 0.63 min(t, t^2) and t^2, so [sqrt(k), hi] brackets the root
    lo = math.sqrt(k)
    hi = max(1.0, k / 0.6, math.sqrt(k / 0.6))
    f = lambda t: -math.expm1(-t) * t - k  # noqa: E731
    if f(lo) >= 0.0:
        return lo
    return optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * sys.float_info.epsilon, maxiter=500)


def lemma2_tau_max_exact(n: int, gamma_r: float, eps_t: float) -> float:
    return solve_tau_exact(lemma2_tau_max(n, gamma_r, eps_t) ** 2)


def lemma4_tau_max_exact(n: int, gamma_r: float, eps_t: float) -> float:
    return solve_tau_exact(lemma4_tau_max(n, gamma_r, eps_t) ** 2)


def tau_window_protocol(
    protocol: int,
    n: int,
    gamma_r: float,
    gamma_e: float,
    eps_t: float,
    eps_s: float,
    m: int,
    exact: bool = False,
) -> TauWindow:
    if protocol == 1:
        tmax = (lemma2_tau_max_exact if exact else lemma2_tau_max)(n, gamma_r, eps_t)
    elif protocol == 2:
        tmax = (lemma4_tau_max_exact if exact else lemma4_tau_max)(n, gamma_r, eps_t)
    else:
        raise ValueError("protocol must be 1 or 2; use lemma6_window for protocol 3")
    tmin = lemma2_tau_min(n, gamma_e, eps_s, m)
    if tmin is None:
        return TauWindow(math.inf, tmax, False, SECRECY)
    feasible = tmin <= tmax
    return TauWindow(tmin, tmax, feasible, None if feasible else WINDOW)


def m_max_exact_tau(protocol: int, n, gamma_r, gamma_e, eps_t, eps_s) -> float:
    """Tolerance obtained by plugging the exactly inverted tau_max into the secrecy condition."""
    tau = (lemma2_tau_max_exact if protocol == 1 else lemma4_tau_max_exact)(n, gamma_r, eps_t)
    budget = _budget(eps_s)
    if math.isinf(tau):
        return budget * (1.0 + gamma_e) ** (n - 1)
    return budget * math.exp((n - 1) * _p_noise(tau) * math.log1p(gamma_e))


# ---------------------------------------------------------------------------
# distance-dependent path loss: Protocol 3


def empty_region_probability(n: int, a: float, b: float) -> float:
    return (1.0 - (1.0 - 2.0 * a) * (1.0 - 2.0 * b)) ** n


@functools.lru_cache(maxsize=256)
def geo_constants(
    n: int, a: float, b: float, alpha: float, exclusion_radius: float = DEFAULT_EXCLUSION_RADIUS
) -> GeoConstants:
    """Region/geometry constants; the three integrals use an exclusion disc of the given radius."""
    v1, e1 = disc_excluded_integral(0.5, 0.5, alpha, exclusion_radius, QUAD_RTOL)
    v2, e2 = disc_excluded_integral(1.0, 0.5, alpha, exclusion_radius, QUAD_RTOL)
    ps, e3 = disc_excluded_integral(0.0, 0.0, alpha, exclusion_radius, QUAD_RTOL)
    return GeoConstants(
        n=n,
        a=a,
        b=b,
        alpha=alpha,
        theta=empty_region_probability(n, a, b),
        varphi1=v1,
        varphi2=v2,
        phi=math.hypot(1.0 - a, 0.5 - b),
        psi=ps,
        exclusion_radius=exclusion_radius,
        quad_error=max(e1, e2, e3),
    )


def constants_for(geo: ScenarioGeo, exclusion_radius: float = DEFAULT_EXCLUSION_RADIUS) -> GeoConstants:
    return geo_constants(geo.base.n, geo.a, geo.b, geo.alpha, exclusion_radius)


def _check_consts(geo: ScenarioGeo, c: GeoConstants):
    if (c.n, c.a, c.b, c.alpha) != (geo.base.n, geo.a, geo.b, geo.alpha):
        raise ValueError("geometric constants were computed for a different (n, a, b, alpha)")


def lemma5_hop_exponent(geo: ScenarioGeo, c: GeoConstants) -> float:
    s = geo.base
    return s.gamma_r * s.tau * (s.n - 1) * _p_noise(s.tau) * (c.varphi1 + c.varphi2) * c.phi**geo.alpha


def lemma5_transmission_bound(geo: ScenarioGeo, c: GeoConstants) -> BoundPair:
    _check_consts(geo, c)
    raw = -math.expm1(-lemma5_hop_exponent(geo, c)) * (1.0 - c.theta) + c.theta
    return BoundPair(raw=raw, clamped=_clamp01(raw))


def near_mass(r0: float) -> float:
    return math.pi * r0 * r0


def jamming_base_log(geo: ScenarioGeo, c: GeoConstants) -> float:
    """log(1 + gamma_E psi r0^alpha)."""
    return math.log1p(geo.base.gamma_e * c.psi * geo.r0**geo.alpha)


def lemma5_hop_term(geo: ScenarioGeo, c: GeoConstants) -> float:
    s = geo.base
    if s.m == 0:
        return 0.0
    near = near_mass(geo.r0)
    far = math.exp(-(s.n - 1) * _p_noise(s.tau) * jamming_base_log(geo, c))
    return s.m * (near + far * (1.0 - near))


def lemma5_secrecy_bound(geo: ScenarioGeo, c: GeoConstants) -> BoundPair:
    _check_consts(geo, c)
    s = geo.base
    near = near_mass(geo.r0)
    x = -(s.n - 1) * _p_noise(s.tau) * jamming_base_log(geo, c)
    return _eve_two_hop(s.m, near + math.exp(x) * (1.0 - near), (1.0 - near) * -math.expm1(x))


def _lemma6_k(geo: ScenarioGeo, eps_t: float, c: GeoConstants) -> Optional[float]:
    """tau_max**2, or None when the empty-region probability alone exceeds eps_t."""
    if eps_t == 1.0:
        return math.inf
    if c.theta > eps_t or c.theta >= 1.0:
        return None
    s = geo.base
    log_ratio = math.log1p(-c.theta) - math.log1p(-eps_t)  # -log((1-eps_t)/(1-theta)) >= 0
    return log_ratio * c.phi ** (-geo.alpha) / (s.gamma_r * (s.n - 1) * (c.varphi1 + c.varphi2))


def lemma6_tau_min(geo: ScenarioGeo, eps_s: float, c: GeoConstants):
    """``(tau_min, cause)``; tau_min is inf when infeasible."""
    s = geo.base
    if s.m == 0 or eps_s == 1.0:
        return 0.0, None
    near = near_mass(geo.r0)
    per_eve = _budget(eps_s) / s.m
    if per_eve <= near:
        return math.inf, NEAR_EAVESDROPPER
    inner = (per_eve - near) / (1.0 - near)
    jam = jamming_base_log(geo, c)
    if inner >= 1.0:
        return 0.0, None
    if jam == 0.0:
        return math.inf, SECRECY
    ratio = math.log(inner) / ((s.n - 1) * jam)
    if ratio <= -1.0:
        return math.inf, SECRECY
    return max(0.0, -math.log1p(ratio)), None


def lemma6_window(geo: ScenarioGeo, reqs: Requirements, c: GeoConstants, exact: bool = False) -> TauWindow:
    _check_consts(geo, c)
    k = _lemma6_k(geo, reqs.eps_t, c)
    if k is None:
        tmin, _ = lemma6_tau_min(geo, reqs.eps_s, c)
        return TauWindow(tmin, math.nan, False, RELIABILITY)
    tmax = solve_tau_exact(k) if exact else math.sqrt(k)
    tmin, cause = lemma6_tau_min(geo, reqs.eps_s, c)
    if cause is not None:
        return TauWindow(tmin, tmax, False, cause)
    feasible = tmin <= tmax
    return TauWindow(tmin, tmax, feasible, None if feasible else WINDOW)


def theorem3_m_max(geo: ScenarioGeo, reqs: Requirements, c: GeoConstants) -> Optional[float]:
    """Eavesdropper tolerance, or None when the selection region is too often empty."""
    _check_consts(geo, c)
    s = geo.base
    budget = _budget(reqs.eps_s)
    near = near_mass(geo.r0)
    if reqs.eps_t == 1.0:
        omega = 0.0 if geo.r0 > 0 else 1.0
        return budget / (near + (1.0 - near) * omega)
    if c.theta > reqs.eps_t or c.theta >= 1.0:
        return None
    log_ratio = math.log1p(-c.theta) - math.log1p(-reqs.eps_t)
    expo = math.sqrt((s.n - 1) * log_ratio / (s.gamma_r * (c.varphi1 + c.varphi2) * c.phi**geo.alpha))
    omega = math.exp(-jamming_base_log(geo, c) * expo)
    return budget / (near + (1.0 - near) * omega)


def theorem3_m_max_exact_tau(geo: ScenarioGeo, reqs: Requirements, c: GeoConstants) -> Optional[float]:
    k = _lemma6_k(geo, reqs.eps_t, c)
    if k is None:
        return None
    tau = solve_tau_exact(k)
    near = near_mass(geo.r0)
    p = 1.0 if math.isinf(tau) else _p_noise(tau)
    omega = math.exp(-(geo.base.n - 1) * p * jamming_base_log(geo, c))
    return _budget(reqs.eps_s) / (near + (1.0 - near) * omega)


# ---------------------------------------------------------------------------
# refinements that average over the binomial noise-set size instead of
# plugging in its mean; used to trace bound violations back to that step


def _binomial_mean(n_minus_1: int, p: float, f) -> float:
    k = np.arange(n_minus_1 + 1)
    return float(np.sum(stats.binom.pmf(k, n_minus_1, p) * f(k)))


def lemma1_hop_term_binomial(n: int, gamma_r: float, tau: float) -> float:
    return _binomial_mean(n - 1, _p_noise(tau), lambda k: (-np.expm1(-2.0 * gamma_r * tau * k)) ** n)


def lemma3_hop_term_binomial(n: int, gamma_r: float, tau: float) -> float:
    p = _p_noise(tau)
    return 1.0 - (1.0 - p + p * math.exp(-gamma_r * tau)) ** (n - 1)


def secrecy_hop_term_binomial(n: int, m: int, gamma_e: float, tau: float) -> float:
    p = _p_noise(tau)
    return m * (1.0 - p + p / (1.0 + gamma_e)) ** (n - 1)


def lemma5_transmission_binomial(geo: ScenarioGeo, c: GeoConstants) -> float:
    s = geo.base
    p = _p_noise(s.tau)
    scale = s.gamma_r * s.tau * c.phi**geo.alpha
    # the two hops draw independent noise sets
    ok1 = (1.0 - p + p * math.exp(-scale * c.varphi1)) ** (s.n - 1)
    ok2 = (1.0 - p + p * math.exp(-scale * c.varphi2)) ** (s.n - 1)
    return (1.0 - ok1 * ok2) * (1.0 - c.theta) + c.theta


def lemma5_hop_term_binomial(geo: ScenarioGeo, c: GeoConstants) -> float:
    s = geo.base
    if s.m == 0:
        return 0.0
    p = _p_noise(s.tau)
    w = 1.0 / (1.0 + s.gamma_e * c.psi * geo.r0**geo.alpha)
    near = near_mass(geo.r0)
    return s.m * (near + (1.0 - p + p * w) ** (s.n - 1) * (1.0 - near))
