"""Independent reference evaluations used by the tests.

The closed forms are re-typed here from the formulas in 50-digit mpmath
arithmetic, with no reuse of package code, so that a transcription slip in
``relaysec.analytic`` cannot be mirrored here. The Riemann-grid oracle for the
singular integrals uses a midpoint grid in (log r, theta) around the singular
point, a different route from the package's adaptive Cartesian quadrature.
"""

import math

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def _m(x):
    return mp.mpf(x)


def lemma1_tx(n, g, tau):
    n, g, tau = _m(n), _m(g), _m(tau)
    q = (1 - mp.e ** (-2 * g * (n - 1) * (1 - mp.e ** (-tau)) * tau)) ** n
    return 2 * q - q**2


def lemma3_tx(n, g, tau):
    n, g, tau = _m(n), _m(g), _m(tau)
    q = 1 - mp.e ** (-g * (n - 1) * (1 - mp.e ** (-tau)) * tau)
    return 2 * q - q**2


def secrecy(n, m, ge, tau):
    n, m, ge, tau = _m(n), _m(m), _m(ge), _m(tau)
    s = m * (1 / (1 + ge)) ** ((n - 1) * (1 - mp.e ** (-tau)))
    return 2 * s - s**2


def lemma2_tau_max(n, g, et):
    n, g, et = _m(n), _m(g), _m(et)
    return mp.sqrt(-mp.log(1 - (1 - mp.sqrt(1 - et)) ** (1 / n)) / (2 * g * (n - 1)))


def lemma4_tau_max(n, g, et):
    n, g, et = _m(n), _m(g), _m(et)
    return mp.sqrt(-mp.log(1 - et) / (2 * g * (n - 1)))


def lemma2_tau_min_raw(n, ge, es, m):
    n, ge, es, m = _m(n), _m(ge), _m(es), _m(m)
    return -mp.log(1 + mp.log((1 - mp.sqrt(1 - es)) / m) / ((n - 1) * mp.log(1 + ge)))


def theorem1(n, gr, ge, et, es):
    n, gr, ge, et, es = map(_m, (n, gr, ge, et, es))
    return (1 - mp.sqrt(1 - es)) * (1 + ge) ** mp.sqrt(
        -(n - 1) * mp.log(1 - (1 - mp.sqrt(1 - et)) ** (1 / n)) / (2 * gr))


def theorem2(n, gr, ge, et, es):
    n, gr, ge, et, es = map(_m, (n, gr, ge, et, es))
    return (1 - mp.sqrt(1 - es)) * (1 + ge) ** mp.sqrt(-(n - 1) * mp.log(1 - et) / (2 * gr))


def theta(n, a, b):
    return (1 - (1 - 2 * _m(a)) * (1 - 2 * _m(b))) ** _m(n)


def phi(a, b):
    return mp.sqrt((1 - _m(a)) ** 2 + (mp.mpf("0.5") - _m(b)) ** 2)


def lemma5_tx(n, gr, tau, alpha, th, v1, v2, ph):
    n, gr, tau, alpha, th, v1, v2, ph = map(_m, (n, gr, tau, alpha, th, v1, v2, ph))
    x = gr * tau * (n - 1) * (1 - mp.e ** (-tau)) / ph ** (-alpha) * (v1 + v2)
    return (1 - mp.e ** (-x)) * (1 - th) + th


def lemma5_sec(n, m, ge, tau, alpha, r0, psi):
    n, m, ge, tau, alpha, r0, psi = map(_m, (n, m, ge, tau, alpha, r0, psi))
    near = mp.pi * r0**2
    u = m * (near + (1 / (1 + ge * psi * r0**alpha)) ** ((n - 1) * (1 - mp.e ** (-tau))) * (1 - near))
    return 2 * u - u**2


def lemma6_tau_max(n, gr, et, alpha, th, v1, v2, ph):
    n, gr, et, alpha, th, v1, v2, ph = map(_m, (n, gr, et, alpha, th, v1, v2, ph))
    return mp.sqrt(-mp.log((1 - et) / (1 - th)) * ph ** (-alpha) / (gr * (n - 1) * (v1 + v2)))


def lemma6_tau_min_raw(n, m, ge, es, alpha, r0, psi):
    n, m, ge, es, alpha, r0, psi = map(_m, (n, m, ge, es, alpha, r0, psi))
    near = mp.pi * r0**2
    inner = ((1 - mp.sqrt(1 - es)) / m - near) / (1 - near)
    return -mp.log(1 + mp.log(inner) / ((n - 1) * mp.log(1 + ge * psi * r0**alpha)))


def theorem3(n, gr, ge, et, es, alpha, r0, th, v1, v2, ph, psi):
    n, gr, ge, et, es, alpha, r0, th, v1, v2, ph, psi = map(
        _m, (n, gr, ge, et, es, alpha, r0, th, v1, v2, ph, psi))
    near = mp.pi * r0**2
    omega = (1 + ge * psi * r0**alpha) ** (
        -mp.sqrt(-(n - 1) * mp.log((1 - et) / (1 - th)) / (gr * (v1 + v2) * ph**alpha)))
    return (1 - mp.sqrt(1 - es)) / (near + (1 - near) * omega)


def riemann_disc_integral(cx, cy, alpha, delta, n=10_000, theta_range=(0.0, 2 * math.pi)):
    """Midpoint Riemann sum of r**-alpha over the unit square minus the disc r < delta.

    Grid: ``n`` cells in t = log r on [log delta, log sqrt 2] times ``n`` cells
    in theta; the area element is r**2 dt dtheta and points outside the square
    are dropped by an indicator.
    """
    t0, t1 = math.log(delta), math.log(math.sqrt(2.0))
    dt = (t1 - t0) / n
    t = t0 + (np.arange(n) + 0.5) * dt
    r = np.exp(t)
    w = np.exp((2.0 - alpha) * t)
    dth = (theta_range[1] - theta_range[0]) / n
    th = theta_range[0] + (np.arange(n) + 0.5) * dth
    total = 0.0
    step = 250
    for k in range(0, n, step):
        c = np.cos(th[k:k + step])[:, None]
        s = np.sin(th[k:k + step])[:, None]
        x = cx + c * r
        y = cy + s * r
        inside = (x >= 0.0) & (x <= 1.0) & (y >= 0.0) & (y <= 1.0)
        total += float(np.sum(inside * w))
    return total * dt * dth


# quadrant of directions that can reach the square from each singular point
THETA_RANGES = {
    "varphi1": ((0.5, 0.5), (0.0, 2 * math.pi)),
    "varphi2": ((1.0, 0.5), (0.5 * math.pi, 1.5 * math.pi)),
    "psi": ((0.0, 0.0), (0.0, 0.5 * math.pi)),
}
