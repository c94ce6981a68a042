"""Adaptive quadrature of ``r**-alpha`` over the unit square minus a small disc.

The geometric constants integrate ``((x-cx)^2 + (y-cy)^2)^(-alpha/2)`` with the
singular point ``(cx, cy)`` on or inside the square. For alpha >= 2 the integral
diverges, so a disc of radius ``delta`` around the singular point is cut out.
"""

from __future__ import annotations

import math
import warnings

from scipy import integrate


class QuadratureError(ArithmeticError):
    def __init__(self, message, achieved):
        super().__init__(f"{message} (achieved relative error {achieved:.3g})")
        self.achieved = achieved


def _y_pieces(x, cx, cy, delta):
    dx = x - cx
    if abs(dx) >= delta:
        return [(0.0, 1.0)]
    h = math.sqrt(delta * delta - dx * dx)
    out = []
    if cy - h > 0.0:
        out.append((0.0, min(cy - h, 1.0)))
    if cy + h < 1.0:
        out.append((max(cy + h, 0.0), 1.0))
    return out


def disc_excluded_integral(cx: float, cy: float, alpha: float, delta: float, rtol: float = 1e-6):
    """Return ``(value, relative_error_estimate)``.

    Outer integral over x is split at ``cx`` and ``cx +/- delta``; the inner
    integral over y skips the disc chord and is split at ``cy`` so that the
    peak of the integrand sits on a breakpoint.
    """
    if delta <= 0:
        raise ValueError("exclusion radius must be positive")
    if not rtol >= 1e-13:
        raise ValueError("rtol below 1e-13 is not attainable in double precision")
    half = -0.5 * alpha

    def inner(x):
        total = 0.0
        dx2 = (x - cx) ** 2
        for lo, hi in _y_pieces(x, cx, cy, delta):
            if hi <= lo:
                continue
            pts = [cy] if lo < cy < hi else None
            v, _ = integrate.quad(
                lambda y: (dx2 + (y - cy) ** 2) ** half,
                lo, hi, points=pts, epsabs=0.0, epsrel=rtol * 0.1, limit=200,
            )
            total += v
        return total

    cuts = {0.0, 1.0}
    for v in (cx - delta, cx, cx + delta):
        cuts.add(min(1.0, max(0.0, v)))
    edges = sorted(cuts)

    value, abserr = 0.0, 0.0
    # convergence is judged on the outer error estimate, not on scipy's warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi <= lo:
                continue
            v, e = integrate.quad(inner, lo, hi, epsabs=0.0, epsrel=rtol, limit=200)
            value += v
            abserr += e
    achieved = abserr / abs(value) if value else abserr
    if achieved > rtol:
        raise QuadratureError("quadrature did not converge", achieved)
    return value, achieved
