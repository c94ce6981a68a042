"""Compare analytic bounds with simulated outage rates.

Two pass rules are used:

* ``report`` rule (CLI ``validate``): a point passes when the Wilson lower
  edge does not exceed the clamped bound, i.e. ``slack = bound - ci_low >= 0``;
* ``half-width`` rule (acceptance grid): ``p_hat <= bound + half_width``.

A violation is *traceable to the noise-set approximation* when the same
empirical rate respects the binomial refinement of the bound, which differs
from the closed form only in averaging over the noise-set size instead of
plugging in its mean.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

from . import analytic as an
from .montecarlo import OutageEstimate, simulate
from .report import bound_cells, estimate_cells, fmt, param_row
from .scenario import RunConfig, ScenarioGeo


def bounds_for(cfg: RunConfig, exclusion_radius: float = an.DEFAULT_EXCLUSION_RADIUS):
    """``(tx, sec, consts)``; consts is None for protocols 1 and 2."""
    s = cfg.base
    if cfg.protocol == 1:
        return (an.lemma1_transmission_bound(s.n, s.gamma_r, s.tau),
                an.lemma1_secrecy_bound(s.n, s.m, s.gamma_e, s.tau), None)
    if cfg.protocol == 2:
        return (an.lemma3_transmission_bound(s.n, s.gamma_r, s.tau),
                an.lemma3_secrecy_bound(s.n, s.m, s.gamma_e, s.tau), None)
    c = an.constants_for(cfg.scenario, exclusion_radius)
    return an.lemma5_transmission_bound(cfg.scenario, c), an.lemma5_secrecy_bound(cfg.scenario, c), c


def refined_bounds_for(cfg: RunConfig, exclusion_radius: float = an.DEFAULT_EXCLUSION_RADIUS):
    """Clamped ``(tx, sec)`` bounds with the noise-set size averaged, not plugged in."""
    s = cfg.base

    def two_hop(q):
        q = min(1.0, max(0.0, q))
        return q * (2.0 - q)

    sec_hop = an.secrecy_hop_term_binomial(s.n, s.m, s.gamma_e, s.tau)
    if cfg.protocol == 1:
        return two_hop(an.lemma1_hop_term_binomial(s.n, s.gamma_r, s.tau)), two_hop(sec_hop)
    if cfg.protocol == 2:
        return two_hop(an.lemma3_hop_term_binomial(s.n, s.gamma_r, s.tau)), two_hop(sec_hop)
    geo: ScenarioGeo = cfg.scenario
    c = an.constants_for(geo, exclusion_radius)
    tx = min(1.0, max(0.0, an.lemma5_transmission_binomial(geo, c)))
    return tx, two_hop(an.lemma5_hop_term_binomial(geo, c))


@dataclass
class PointResult:
    cfg: RunConfig
    trials: int
    seed: int
    tx_bound: an.BoundPair
    sec_bound: an.BoundPair
    tx: OutageEstimate
    sec: OutageEstimate
    tx_refined: float
    sec_refined: float
    bound_scale: float = 1.0

    @property
    def tx_limit(self) -> float:
        return self.tx_bound.clamped * self.bound_scale

    @property
    def sec_limit(self) -> float:
        return self.sec_bound.clamped * self.bound_scale

    @property
    def tx_slack(self) -> float:
        return self.tx_limit - self.tx.ci_low

    @property
    def sec_slack(self) -> float:
        return self.sec_limit - self.sec.ci_low

    @property
    def passed(self) -> bool:
        return self.tx_slack >= 0 and self.sec_slack >= 0

    def violations(self):
        """Half-width-rule violations as ``(kind, p_hat, bound, refined, half_width, traceable)``."""
        out = []
        for kind, est, limit, refined in (
            ("tx", self.tx, self.tx_limit, self.tx_refined),
            ("sec", self.sec, self.sec_limit, self.sec_refined),
        ):
            hw = est.half_width
            if est.p_hat > limit + hw:
                traceable = refined > limit and est.p_hat <= refined + hw
                out.append((kind, est.p_hat, limit, refined, hw, traceable))
        return out

    def row(self) -> dict:
        row = param_row(self.cfg, self.trials, self.seed)
        row.update(bound_cells(self.tx_bound, self.sec_bound))
        if self.bound_scale != 1.0:
            row["tx_bound"] = self.tx_limit
            row["sec_bound"] = self.sec_limit
        row.update(estimate_cells(self.tx, self.sec))
        row.update(
            tx_slack=self.tx_slack, sec_slack=self.sec_slack,
            tx_pass=self.tx_slack >= 0, sec_pass=self.sec_slack >= 0, **{"pass": self.passed},
        )
        return row


def validate_point(
    cfg: RunConfig,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    workers=1,
    exclusion_radius: float = an.DEFAULT_EXCLUSION_RADIUS,
    bound_scale: float = 1.0,
    freeze_positions: bool = False,
) -> PointResult:
    trials = cfg.trials if trials is None else trials
    seed = cfg.seed if seed is None else seed
    tx_b, sec_b, _ = bounds_for(cfg, exclusion_radius)
    tx_r, sec_r = refined_bounds_for(cfg, exclusion_radius)
    counts = simulate(cfg.protocol, cfg.scenario, trials, seed, workers, freeze_positions)
    return PointResult(cfg, trials, seed, tx_b, sec_b, counts.tx_estimate, counts.sec_estimate,
                       tx_r, sec_r, bound_scale)


DEVIATION_COLUMNS = ("protocol", "n", "m", "tau", "a", "b", "r0", "kind", "p_hat", "bound",
                     "refined_bound", "half_width", "traceable")


def deviation_rows(results):
    rows = []
    for r in results:
        vals = r.cfg.values()
        for kind, p_hat, bound, refined, hw, traceable in r.violations():
            row = {k: vals.get(k) for k in ("protocol", "n", "m", "tau", "a", "b", "r0")}
            row.update(kind=kind, p_hat=p_hat, bound=bound, refined_bound=refined,
                       half_width=hw, traceable=traceable)
            rows.append(row)
    return rows


def write_deviation_report(path, results) -> list:
    rows = deviation_rows(results)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DEVIATION_COLUMNS)
        for row in rows:
            w.writerow([fmt(row[c]) for c in DEVIATION_COLUMNS])
    return rows
