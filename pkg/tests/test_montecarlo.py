import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relaysec.channel import DegenerateSINR, Interferer, sinr, trial_generator
from relaysec.montecarlo import (
    BLOCK_SIZE,
    draw_block,
    estimate,
    evaluate_equal,
    evaluate_geo,
    make_estimate,
    run_trial_equal,
    run_trial_geo,
    simulate,
    wilson_interval,
)
from relaysec.protocols import in_region, noise_set, select_relay_optimal
from relaysec.scenario import DESTINATION, SOURCE, Point, ScenarioEqual, ScenarioGeo


def eq(n=10, m=2, gamma_r=1.0, gamma_e=1.0, tau=0.2, n0=0.0):
    return ScenarioEqual(n, m, gamma_r, gamma_e, tau, 1.0, n0)


def geo(n=10, m=2, tau=0.2, a=0.25, b=0.25, r0=0.05, alpha=2.0, n0=0.0):
    return ScenarioGeo(eq(n, m, tau=tau, n0=n0), alpha, a, b, r0)


class TestWilson:
    def test_boundaries(self):
        assert wilson_interval(0, 50)[0] == 0.0
        assert wilson_interval(50, 50)[1] == 1.0

    def test_symmetric_case(self):
        lo, hi = wilson_interval(50, 100)
        assert 0.5 - lo == pytest.approx(hi - 0.5, rel=1e-12)
        z = 2.576
        half = z * math.sqrt(0.25 / 100 + z * z / 40000) / (1 + z * z / 100)
        assert hi - 0.5 == pytest.approx(half, rel=1e-12)

    @given(st.integers(1, 10**6).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))))
    def test_contains_point_estimate(self, kn):
        k, n = kn
        lo, hi = wilson_interval(k, n)
        assert 0.0 <= lo <= k / n <= hi <= 1.0

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            wilson_interval(3, 2)


# scalar reference: one trial at a time through sinr() and the scalar selection rules


def _decodes(signal, interferers, es, n0, threshold, alpha=2.0, distance=1.0):
    try:
        return sinr(signal, distance, interferers, alpha, es, n0) >= threshold
    except DegenerateSINR:
        return signal > 0


def reference_equal(protocol, s, d, t):
    if protocol == 1:
        j = select_relay_optimal(d.g_src[t], d.g_dst[t])
    else:
        j = min(int(d.u_select[t] * s.n), s.n - 1)
    r1 = noise_set(d.g_relay[t], s.tau, j)
    r2 = noise_set(d.g_dst[t], s.tau, j)
    tx1 = not _decodes(d.g_src[t, j], [Interferer(d.g_relay[t, k]) for k in r1], s.es, s.n0, s.gamma_r)
    tx2 = not _decodes(d.g_dst[t, j], [Interferer(d.g_dst[t, k]) for k in r2], s.es, s.n0, s.gamma_r)
    sec1 = any(_decodes(d.eve1_signal[t, i], [Interferer(d.eve1_jam[t, k, i]) for k in r1], s.es, s.n0, s.gamma_e)
               for i in range(s.m))
    sec2 = any(_decodes(d.eve2_signal[t, i], [Interferer(d.eve2_jam[t, k, i]) for k in r2], s.es, s.n0, s.gamma_e)
               for i in range(s.m))
    return tx1, tx2, sec1, sec2


def reference_geo(s, d, t):
    base = s.base
    pos = [Point(*p) for p in d.relay_pos[t]]
    inside = [k for k, p in enumerate(pos) if in_region(p.x, p.y, s.a, s.b)]
    if not inside:
        return True, True, False, False
    j = inside[min(int(d.u_select[t] * len(inside)), len(inside) - 1)]
    sel = np.asarray(d.relay_pos[t, j])
    src, dst = np.asarray(SOURCE), np.asarray(DESTINATION)
    r1 = noise_set(d.g_relay[t], base.tau, j)
    r2 = noise_set(d.g_dst[t], base.tau, j)

    def dist(p, q):
        p = (p.x, p.y) if isinstance(p, Point) else p
        return math.hypot(p[0] - q[0], p[1] - q[1])

    tx1 = not _decodes(d.g_src[t, j], [Interferer(d.g_relay[t, k], dist(pos[k], sel)) for k in r1],
                       base.es, base.n0, base.gamma_r, s.alpha, dist(src, sel))
    tx2 = not _decodes(d.g_dst[t, j], [Interferer(d.g_dst[t, k], dist(pos[k], dst)) for k in r2],
                       base.es, base.n0, base.gamma_r, s.alpha, dist(sel, dst))
    sec = []
    for tx, noise, sig, jam in ((src, r1, d.eve1_signal, d.eve1_jam), (sel, r2, d.eve2_signal, d.eve2_jam)):
        hit = False
        for i in range(base.m):
            e = d.eve_pos[t, i]
            de = dist(e, tx)
            if de < s.r0 or _decodes(sig[t, i], [Interferer(jam[t, k, i], dist(pos[k], e)) for k in noise],
                                     base.es, base.n0, base.gamma_e, s.alpha, de):
                hit = True
        sec.append(hit)
    return tx1, tx2, sec[0], sec[1]


@pytest.mark.parametrize("protocol", [1, 2])
@pytest.mark.parametrize("n0", [0.0, 0.3])
def test_batch_matches_scalar_reference_equal(protocol, n0):
    s = eq(n=6, m=3, tau=0.6, n0=n0)
    d = draw_block(trial_generator(21, 0), 400, s.n, s.m, geo=False)
    out = evaluate_equal(protocol, s, d)
    for t in range(400):
        assert (out.hop1_tx[t], out.hop2_tx[t], out.hop1_sec[t], out.hop2_sec[t]) == reference_equal(protocol, s, d, t)


@pytest.mark.parametrize("n0", [0.0, 0.3])
def test_batch_matches_scalar_reference_geo(n0):
    s = geo(n=6, m=3, tau=0.6, a=0.3, b=0.3, r0=0.15, n0=n0)
    d = draw_block(trial_generator(22, 0), 400, 6, 3, geo=True)
    out = evaluate_geo(s, d)
    assert out.unavailable.any() and not out.unavailable.all()
    for t in range(400):
        assert (out.hop1_tx[t], out.hop2_tx[t], out.hop1_sec[t], out.hop2_sec[t]) == reference_geo(s, d, t)


def test_no_eavesdroppers_no_secrecy_outage():
    c = simulate(2, eq(m=0), 5000, 1)
    assert c.sec == 0
    est = c.sec_estimate
    assert est.p_hat == 0.0 and est.ci_low == 0.0 and est.ci_high > 0


def test_tiny_threshold_with_noise_never_fails():
    c = simulate(2, eq(gamma_r=1e-12, n0=1.0, tau=0.5), 100_000, 2)
    assert c.tx / c.trials < 1e-3


def test_degenerate_denominator_contract():
    for protocol in (1, 2):
        c = simulate(protocol, eq(tau=0.0, m=1), 2000, 3)
        assert c.tx == 0
        assert c.sec == c.trials


def test_empty_region_always_outages():
    c = simulate(3, geo(a=0.5, b=0.5), 1000, 4)
    assert c.tx == c.unavailable == 1000
    assert c.sec == 0
    assert c.tx_estimate.p_hat == 1.0


def test_near_rule_covering_the_square():
    # r0 beyond the square's diameter puts every eavesdropper inside the near disc
    s = ScenarioGeo(eq(m=1), 2.0, 0.25, 0.25, 1.5)
    d = draw_block(trial_generator(5, 0), 2000, 10, 1, geo=True)
    out = evaluate_geo(s, d)
    sent = ~out.unavailable
    assert sent.any()
    assert np.all(out.hop1_sec[sent] & out.hop2_sec[sent])


def test_single_trial_helpers():
    o = run_trial_equal(2, eq(m=0), trial_generator(0, 0))
    assert not o.sec_outage
    o = run_trial_geo(geo(a=0.5, b=0.5), trial_generator(0, 0))
    assert o.relay_unavailable and o.tx_outage and not o.sec_outage


@pytest.mark.parametrize("protocol, scenario", [(2, eq()), (1, eq()), (3, geo())])
def test_worker_count_does_not_change_counts(protocol, scenario):
    trials = 3 * BLOCK_SIZE + 17
    one = simulate(protocol, scenario, trials, 9, workers=1)
    assert simulate(protocol, scenario, trials, 9, workers=3) == one
    assert simulate(protocol, scenario, trials, 9, workers=8) == one
    assert simulate(protocol, scenario, trials, 10, workers=1) != one


def test_prefix_stability():
    # trial i sees the same draws whatever the total count
    a = simulate(2, eq(), BLOCK_SIZE + 100, 5)
    b = simulate(2, eq(), BLOCK_SIZE, 5)
    c = simulate(2, eq(), 100, 5)
    assert a.trials == BLOCK_SIZE + 100
    assert b.tx <= a.tx and c.tx <= b.tx


def test_hop_counts_are_consistent():
    c = simulate(2, eq(n=10, m=2, tau=0.3), 20_000, 6)
    assert max(c.hop1_tx, c.hop2_tx) <= c.tx <= c.hop1_tx + c.hop2_tx
    assert max(c.hop1_sec, c.hop2_sec) <= c.sec <= c.hop1_sec + c.hop2_sec


def test_hops_are_independent_under_random_selection():
    c = simulate(2, eq(n=10, m=1, tau=0.3), 200_000, 7)
    p1, p2, both = c.hop1_tx / c.trials, c.hop2_tx / c.trials, (c.hop1_tx + c.hop2_tx - c.tx) / c.trials
    assert both == pytest.approx(p1 * p2, abs=4 * math.sqrt(p1 * p2 / c.trials))


def test_frozen_positions_reuse_one_layout():
    s = geo(n=4, m=1)
    c = simulate(3, s, 5000, 8, freeze_positions=True)
    # with a fixed layout the region is either always empty or never empty
    assert c.unavailable in (0, 5000)


def test_estimate_returns_pair():
    tx, sec = estimate(2, eq(), 1000, 0)
    assert tx.trials == sec.trials == 1000
    assert make_estimate(tx.successes, 1000) == tx


def test_invalid_trials():
    with pytest.raises(ValueError):
        simulate(2, eq(), 0, 0)
    with pytest.raises(ValueError):
        evaluate_equal(3, eq(), draw_block(trial_generator(0, 0), 4, 10, 2, False))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 8), m=st.integers(0, 4), tau=st.floats(0, 3), seed=st.integers(0, 2**32))
def test_outcome_flags_are_well_formed(n, m, tau, seed):
    s = geo(n=n, m=m, tau=tau, a=0.2, b=0.2, r0=0.05)
    d = draw_block(trial_generator(seed, 0), 64, n, m, geo=True)
    out = evaluate_geo(s, d)
    assert np.all(out.hop1_tx[out.unavailable] & out.hop2_tx[out.unavailable])
    assert not np.any(out.hop1_sec[out.unavailable] | out.hop2_sec[out.unavailable])
    if m == 0:
        assert not out.hop1_sec.any()
    rows = np.arange(64)[~out.unavailable]
    assert not out.noise1[rows, out.relay[rows]].any()
